#include "quench/mmpde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "dual.hpp"
#include "quench/errors.hpp"
#include "quench/numkit.hpp"

namespace quench::mmpde {

using detail::Dual;
using detail::value;
using meshfield::MeshField;
using meshfield::Nodal;
using meshfield::ShapeFamily;

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Touchdown: return "touchdown";
        case Outcome::SteadyState: return "steady_state";
        case Outcome::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

void SimConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(touchdown_threshold > 0.0 && touchdown_threshold < 1.0))
        throw std::invalid_argument("touchdown threshold must lie in (0, 1)");
    if (n_intervals < 2) throw std::invalid_argument("need at least two mesh intervals");
    if (!(rel_tol > 0.0 && abs_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
    if (!(steady_tol > 0.0)) throw std::invalid_argument("steady_tol must be positive");
    if (!(tau_max > 0.0)) throw std::invalid_argument("tau_max must be positive");
}

namespace {

// shape values and derivatives 0..4 at the four Gauss points
struct GaussTable {
    std::array<double, 4> rho{};
    // [q][family][k][order]
    std::array<std::array<std::array<std::array<double, 5>, 4>, 2>, 4> s{};

    GaussTable() {
        rho = meshfield::gauss_points();
        for (int q = 0; q < 4; ++q)
            for (int f = 0; f < 2; ++f)
                for (int k = 0; k < 4; ++k)
                    for (int j = 0; j < 5; ++j)
                        s[q][f][k][j] = meshfield::shape_value(
                            f == 0 ? ShapeFamily::L0 : ShapeFamily::L1, k, j, rho[q]);
    }
};

const GaussTable& gauss() {
    static const GaussTable t;
    return t;
}

template <class T>
void residual_impl(const SimConfig& cfg, const T* y, const T* yd, T* f, std::size_t pinned) {
    const std::size_t m = cfg.n_intervals + 1;
    const StateLayout lay{m};
    const auto& gt = gauss();
    const bool disc = cfg.spec.geometry == Geometry::Disc;
    const double eps2 = cfg.epsilon * cfg.epsilon;

    std::vector<T> h(m - 1), p(m), mon(m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        h[i] = y[lay.x(i + 1)] - y[lay.x(i)];
        if (!(value(h[i]) > 0.0))
            throw MeshTangled("interval " + std::to_string(i) + " has nonpositive width");
    }
    for (std::size_t i = 0; i < m; ++i) {
        const T gap = T(1.0) + y[lay.u(i, 0)];
        if (!(value(gap) > 0.0)) throw TouchdownReached("nodal gap nonpositive");
        p[i] = T(1.0) / (gap * gap * gap);
    }
    T integral(0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) integral += T(0.5) * (p[i] + p[i + 1]) * h[i];
    std::size_t arg = 0;
    for (std::size_t i = 0; i < m; ++i) {
        mon[i] = p[i] + integral;
        if (value(mon[i]) > value(mon[arg])) arg = i;
    }
    if (pinned < m) arg = pinned;
    const T tdot = yd[lay.t()];
    f[0] = tdot - T(1.0) / mon[arg];

    // u block
    const auto rows = meshfield::boundary_rows(cfg.spec);
    std::size_t r = 1;
    auto constraint = [&](const meshfield::NodalConstraint& c) {
        const std::size_t node = c.side == meshfield::Side::Left ? 0 : m - 1;
        T sum(0.0);
        for (std::size_t k = 0; k < 4; ++k)
            if (c.coeffs[k] != 0.0) sum += T(c.coeffs[k]) * y[lay.u(node, k)];
        return sum;
    };
    for (const auto& c : rows)
        if (c.side == meshfield::Side::Left) f[r++] = constraint(c);

    for (std::size_t i = 0; i + 1 < m; ++i) {
        const T hi = h[i];
        const T hdot = yd[lay.x(i + 1)] - yd[lay.x(i)];
        // H^e for e = -4..3
        std::array<T, 8> hp;
        hp[4] = T(1.0);
        for (int e = 1; e <= 3; ++e) hp[4 + e] = hp[3 + e] * hi;
        const T inv = T(1.0) / hi;
        for (int e = 1; e <= 4; ++e) hp[4 - e] = hp[5 - e] * inv;

        for (int q = 0; q < 4; ++q) {
            const auto& s0 = gt.s[q][0];
            const auto& s1 = gt.s[q][1];
            std::array<T, 5> d;
            for (int j = 0; j < 5; ++j) {
                T sum(0.0);
                for (int k = 0; k < 4; ++k)
                    sum += (y[lay.u(i, k)] * T(s0[k][j]) + y[lay.u(i + 1, k)] * T(s1[k][j])) *
                           hp[4 + k - j];
                d[j] = sum;
            }
            T ut(0.0);
            for (int k = 0; k < 4; ++k)
                ut += (yd[lay.u(i, k)] * T(s0[k][0]) + yd[lay.u(i + 1, k)] * T(s1[k][0])) *
                      hp[4 + k];
            T dh(0.0);
            for (int k = 1; k < 4; ++k)
                dh += (y[lay.u(i, k)] * T(s0[k][0]) + y[lay.u(i + 1, k)] * T(s1[k][0])) *
                      T(static_cast<double>(k)) * hp[3 + k];
            ut += hdot * dh;
            ut -= d[1] * (yd[lay.x(i)] + T(gt.rho[q]) * hdot);

            T bih = d[4];
            if (disc) {
                const T rr = y[lay.x(i)] + T(gt.rho[q]) * hi;
                const T ir = T(1.0) / rr;
                bih += ir * (T(2.0) * d[3] + ir * (ir * d[1] - d[2]));
            }
            const T gap = T(1.0) + d[0];
            if (!(value(gap) > 0.0)) throw TouchdownReached("interpolated gap nonpositive");
            const T rhs = T(-eps2) * bih - T(1.0) / (gap * gap);
            f[r++] = ut - tdot * rhs;
        }
    }
    for (const auto& c : rows)
        if (c.side == meshfield::Side::Right) f[r++] = constraint(c);

    // mesh block
    f[r++] = y[lay.x(0)] - T(cfg.spec.left());
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const T mp = T(0.5) * (mon[i] + mon[i + 1]);
        const T mm = T(0.5) * (mon[i] + mon[i - 1]);
        const T lap = yd[lay.x(i - 1)] - T(2.0) * yd[lay.x(i)] + yd[lay.x(i + 1)];
        f[r++] = T(-cfg.gamma) * lap - tdot * (mp * h[i] - mm * h[i - 1]);
    }
    f[r++] = y[lay.x(m - 1)] - T(cfg.spec.right());
}

constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

std::vector<double> residual(const SimConfig& cfg, const std::vector<double>& y,
                             const std::vector<double>& yd, std::size_t pinned) {
    std::vector<double> f(y.size());
    residual_impl<double>(cfg, y.data(), yd.data(), f.data(), pinned);
    return f;
}

DaeJacobian jacobian(const SimConfig& cfg, const std::vector<double>& y,
                     const std::vector<double>& yd, std::size_t pinned) {
    const std::size_t n = y.size();
    DaeJacobian jac;
    jac.n = n;
    jac.dy.assign(n * n, 0.0);
    jac.dydot.assign(n * n, 0.0);
    std::vector<Dual> dy(n), dyd(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        dy[i] = Dual(y[i]);
        dyd[i] = Dual(yd[i]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        dy[j].a = 1.0;
        dyd[j].b = 1.0;
        residual_impl<Dual>(cfg, dy.data(), dyd.data(), f.data(), pinned);
        for (std::size_t i = 0; i < n; ++i) {
            jac.dy[i * n + j] = f[i].a;
            jac.dydot[i * n + j] = f[i].b;
        }
        dy[j].a = 0.0;
        dyd[j].b = 0.0;
    }
    return jac;
}

// node carrying the largest monitor value
std::size_t monitor_argmax(const StateLayout& lay, const std::vector<double>& y) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < lay.nodes; ++i)
        if (y[lay.u(i, 0)] < y[lay.u(arg, 0)]) arg = i;
    return arg;
}

double wrms(const std::vector<double>& v, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double q = v[i] / w[i];
        s += q * q;
    }
    return std::sqrt(s / static_cast<double>(v.size()));
}

double min_nodal_gap(const StateLayout& lay, const std::vector<double>& y) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lay.nodes; ++i) g = std::min(g, 1.0 + y[lay.u(i, 0)]);
    return g;
}

std::vector<double> hermite(const std::vector<double>& y0, const std::vector<double>& d0,
                            const std::vector<double>& y1, const std::vector<double>& d1,
                            double h, double theta) {
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    std::vector<double> out(y0.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i];
    return out;
}

// TR-BDF2 with a shared iteration matrix for both stages
class Integrator {
public:
    explicit Integrator(const SimConfig& cfg) : cfg_(cfg), lay_{cfg.n_intervals + 1} {}

    SimResult run();

private:
    static constexpr double kGamma = 2.0 - 1.4142135623730951;

    struct Jac {
        Eigen::MatrixXd dy, dyd;
    };

    void refresh_jacobian(const std::vector<double>& y, const std::vector<double>& yd);
    void factor(double c);
    bool newton(std::vector<double>& z, double c, const std::vector<double>& b,
                const std::vector<double>& w);
    std::vector<double> weights(const std::vector<double>& a,
                                const std::vector<double>& b) const;
    void record(SimResult& res, double t, const std::vector<double>& y);

    const SimConfig& cfg_;
    StateLayout lay_;
    Jac jac_;
    bool jac_fresh_ = false;
    double factored_c_ = -1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    Eigen::VectorXd row_scale_, col_scale_;

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        return col_scale_.cwiseProduct(lu_.solve(row_scale_.cwiseProduct(rhs)));
    }
    std::size_t jacobians_ = 0;
    // monitor maximum frozen over a step so the rescaled-time row stays smooth
    std::size_t pinned_ = kFree;
};

void Integrator::refresh_jacobian(const std::vector<double>& y, const std::vector<double>& yd) {
    const auto j = jacobian(cfg_, y, yd, pinned_);
    const auto n = static_cast<Eigen::Index>(j.n);
    jac_.dy = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(j.dy.data(), n, n);
    jac_.dyd = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(j.dydot.data(), n, n);
    jac_fresh_ = true;
    factored_c_ = -1.0;
    ++jacobians_;
}

void Integrator::factor(double c) {
    if (c == factored_c_) return;
    // equilibrate: the derivative unknowns enter with widely varying powers of H
    Eigen::MatrixXd g = jac_.dy + c * jac_.dyd;
    row_scale_ = g.cwiseAbs().rowwise().maxCoeff().cwiseMax(1e-300).cwiseInverse();
    g = row_scale_.asDiagonal() * g;
    col_scale_ = g.cwiseAbs().colwise().maxCoeff().transpose().cwiseMax(1e-300).cwiseInverse();
    g = g * col_scale_.asDiagonal();
    lu_.compute(g);
    factored_c_ = c;
}

std::vector<double> Integrator::weights(const std::vector<double>& a,
                                        const std::vector<double>& b) const {
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
    // derivative unknowns enter the interpolant scaled by H^k
    for (std::size_t node = 0; node < lay_.nodes; ++node) {
        double hloc = std::numeric_limits<double>::infinity();
        if (node > 0) hloc = std::min(hloc, a[lay_.x(node)] - a[lay_.x(node - 1)]);
        if (node + 1 < lay_.nodes) hloc = std::min(hloc, a[lay_.x(node + 1)] - a[lay_.x(node)]);
        double scale = 1.0;
        for (std::size_t k = 1; k < 4; ++k) {
            scale /= hloc;
            w[lay_.u(node, k)] += cfg_.abs_tol * scale;
        }
    }
    return w;
}

// Solve F(z, c z + b) = 0 by modified Newton from the given z.
bool Integrator::newton(std::vector<double>& z, double c, const std::vector<double>& b,
                        const std::vector<double>& w) {
    factor(c);
    const std::size_t n = z.size();
    std::vector<double> zd(n);
    double prev = 0.0;
    for (int it = 0; it < 8; ++it) {
        for (std::size_t i = 0; i < n; ++i) zd[i] = c * z[i] + b[i];
        std::vector<double> r;
        try {
            r = residual(cfg_, z, zd, pinned_);
        } catch (const Error&) {
            return false;
        }
        Eigen::Map<Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n));
        if (!rv.allFinite()) return false;
        const Eigen::VectorXd dz = solve(-rv);
        std::vector<double> step(dz.data(), dz.data() + n);
        for (std::size_t i = 0; i < n; ++i) z[i] += step[i];
        const double norm = wrms(step, w);
        if (!std::isfinite(norm)) return false;
        if (norm <= 1e-3) return true;
        if (it > 0) {
            const double rate = norm / prev;
            if (rate > 0.9) return false;
            if (rate / (1.0 - rate) * norm <= 0.05) return true;
        }
        prev = norm;
    }
    return false;
}

void Integrator::record(SimResult& res, double t, const std::vector<double>& y) {
    if (!res.snapshots.empty() && !(t > res.snapshots.back().t)) return;
    res.snapshots.push_back({t, min_nodal_gap(lay_, y), field_of(cfg_, y)});
}

SimResult Integrator::run() {
    const std::size_t n = lay_.size();
    SimResult res;
    std::vector<double> y = initial_state(cfg_);
    std::vector<double> yd(n, 0.0);
    std::vector<double> requested = cfg_.snapshot_times;
    std::sort(requested.begin(), requested.end());
    std::size_t next_request = 0;
    while (next_request < requested.size() && requested[next_request] <= 0.0) {
        if (requested[next_request] == 0.0) record(res, 0.0, y);
        ++next_request;
    }
    int decade = 1;
    auto decade_level = [&decade] { return std::pow(10.0, -decade); };
    res.min_gap_history.emplace_back(0.0, 1.0);

    // first step by backward Euler gives a consistent rate
    double h = 1e-6;
    double tau = 0.0;
    pinned_ = monitor_argmax(lay_, y);
    for (;;) {
        refresh_jacobian(y, yd);
        std::vector<double> z = y;
        std::vector<double> b(n);
        const double c = 1.0 / h;
        for (std::size_t i = 0; i < n; ++i) b[i] = -c * y[i];
        if (newton(z, c, b, weights(y, y))) {
            for (std::size_t i = 0; i < n; ++i) yd[i] = (z[i] - y[i]) / h;
            y = std::move(z);
            tau += h;
            break;
        }
        h *= 0.1;
        if (h < 1e-14) throw StiffnessFailure("initial step underflow");
    }
    res.min_gap_history.emplace_back(y[0], min_nodal_gap(lay_, y));

    const double g = kGamma;
    const double alpha = 2.0 / g;
    const double err_const = (-3 * g * g + 4 * g - 2) / (12 * (2 - g));
    int jac_age = 0;

    while (true) {
        if (res.steps >= cfg_.max_steps || tau >= cfg_.tau_max) {
            res.outcome = Outcome::Inconclusive;
            break;
        }
        h = std::min(h, cfg_.tau_max - tau);
        pinned_ = monitor_argmax(lay_, y);
        if (jac_age >= 4 && !jac_fresh_) {
            refresh_jacobian(y, yd);
            jac_age = 0;
        }
        const double c = alpha / h;
        const auto w = weights(y, y);

        // trapezoid stage to tau + g h
        std::vector<double> yg(n), bg(n);
        for (std::size_t i = 0; i < n; ++i) {
            yg[i] = y[i] + g * h * yd[i];
            bg[i] = -c * y[i] - yd[i];
        }
        bool ok = newton(yg, c, bg, w);
        std::vector<double> y1(n), b1(n), ydg(n), yd1(n);
        if (ok) {
            for (std::size_t i = 0; i < n; ++i) ydg[i] = c * yg[i] + bg[i];
            const double wg = 1.0 / (g * (2 - g));
            const double wn = (1 - g) * (1 - g) / (g * (2 - g));
            for (std::size_t i = 0; i < n; ++i) {
                y1[i] = yg[i] + (1 - g) * h * ydg[i];
                b1[i] = -c * (wg * yg[i] - wn * y[i]);
            }
            ok = newton(y1, c, b1, w);
        }
        if (!ok) {
            ++res.rejected_steps;
            if (!jac_fresh_) {
                refresh_jacobian(y, yd);
                jac_age = 0;
            } else {
                h *= 0.25;
            }
            if (h < 1e-12 * std::max(1.0, tau))
                throw StiffnessFailure("step size underflow at tau = " + std::to_string(tau));
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) yd1[i] = c * y1[i] + b1[i];

        // local error estimate, filtered through the iteration matrix
        Eigen::VectorXd est(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            est[static_cast<Eigen::Index>(i)] =
                err_const * 2.0 * h * (yd[i] / g - ydg[i] / (g * (1 - g)) + yd1[i] / (1 - g));
        const Eigen::VectorXd filtered = solve(c * (jac_.dyd * est));
        std::vector<double> e(filtered.data(), filtered.data() + n);
        const double err = wrms(e, weights(y, y1));
        const double factor_h = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -1.0 / 3.0),
                                           0.2, 4.0);
        if (!(err <= 1.0)) {
            ++res.rejected_steps;
            h *= std::min(factor_h, 0.5);
            if (h < 1e-12 * std::max(1.0, tau))
                throw StiffnessFailure("step size underflow at tau = " + std::to_string(tau));
            continue;
        }

        // accepted
        const std::vector<double> y0 = y, yd0 = yd;
        const double h_used = h;
        y = std::move(y1);
        yd = std::move(yd1);
        y[lay_.x(0)] = cfg_.spec.left();
        y[lay_.x(lay_.nodes - 1)] = cfg_.spec.right();
        tau += h_used;
        ++res.steps;
        jac_fresh_ = false;
        ++jac_age;
        h = h_used * factor_h;

        const double gap0 = min_nodal_gap(lay_, y0);
        const double gap1 = min_nodal_gap(lay_, y);
        res.min_gap_history.emplace_back(y[0], gap1);

        std::vector<std::vector<double>> events;
        auto at = [&](double theta) { return hermite(y0, yd0, y, yd, h_used, theta); };
        while (next_request < requested.size() && requested[next_request] <= y[0]) {
            const double target = requested[next_request++];
            if (target <= y0[0]) continue;
            const double theta = numkit::find_root_bracketed(
                [&](double th) { return at(th)[0] - target; }, 0.0, 1.0, 1e-14);
            auto ys = at(theta);
            ys[0] = target;
            events.push_back(std::move(ys));
        }
        while (gap1 <= decade_level() && decade_level() >= cfg_.touchdown_threshold) {
            const double level = decade_level();
            if (gap0 > level) {
                const double theta = numkit::find_root_bracketed(
                    [&](double th) { return min_nodal_gap(lay_, at(th)) - level; }, 0.0, 1.0,
                    1e-12 * level);
                events.push_back(at(theta));
            }
            ++decade;
        }
        std::sort(events.begin(), events.end(),
                  [](const auto& a, const auto& b) { return a[0] < b[0]; });
        for (const auto& ys : events) record(res, ys[0], ys);

        if (gap1 <= cfg_.touchdown_threshold) {
            res.outcome = Outcome::Touchdown;
            break;
        }
        double rate = 0.0;
        for (std::size_t i = 0; i < lay_.nodes; ++i)
            rate = std::max(rate, std::abs((yd[lay_.u(i, 0)] -
                                            y[lay_.u(i, 1)] * yd[lay_.x(i)]) /
                                           yd[0]));
        if (rate <= cfg_.steady_tol) {
            res.outcome = Outcome::SteadyState;
            break;
        }
    }

    record(res, y[0], y);
    res.t_final = y[0];
    res.tau_final = tau;
    res.final_gap = min_nodal_gap(lay_, y);
    res.jacobians = jacobians_;
    if (res.outcome == Outcome::Touchdown) {
        // gap^3 is linear in t near touchdown; extrapolate it with the exact rate
        std::size_t imin = 0;
        for (std::size_t i = 1; i < lay_.nodes; ++i)
            if (y[lay_.u(i, 0)] < y[lay_.u(imin, 0)]) imin = i;
        const double gap_rate =
            (yd[lay_.u(imin, 0)] - y[lay_.u(imin, 1)] * yd[lay_.x(imin)]) / yd[0];
        res.t_c = res.t_final;
        if (gap_rate < 0.0) res.t_c += res.final_gap / (-3.0 * gap_rate);
        res.touchdown_points = extract_touchdown_points(res.final_snapshot().field, cfg_.spec);
    }
    return res;
}

}  // namespace

MonitorSample monitor(const MeshField& field) {
    const auto& mesh = field.mesh();
    MonitorSample s;
    std::vector<double> p(mesh.node_count());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double gap = 1.0 + field.at(i)[0];
        if (!(gap > 0.0)) throw TouchdownReached("nodal gap nonpositive");
        p[i] = 1.0 / (gap * gap * gap);
    }
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        s.integral_term += 0.5 * (p[i] + p[i + 1]) * mesh.width(i);
    s.values.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) s.values[i] = p[i] + s.integral_term;
    return s;
}

std::vector<double> initial_state(const SimConfig& config) {
    config.validate();
    const StateLayout lay{config.n_intervals + 1};
    std::vector<double> y(lay.size(), 0.0);
    const auto mesh =
        meshfield::Mesh::uniform(config.spec.left(), config.spec.right(), config.n_intervals);
    for (std::size_t i = 0; i < lay.nodes; ++i) y[lay.x(i)] = mesh.node(i);
    return y;
}

MeshField field_of(const SimConfig& config, const std::vector<double>& y) {
    const StateLayout lay{config.n_intervals + 1};
    if (y.size() != lay.size()) throw std::invalid_argument("field_of: state size mismatch");
    std::vector<double> x(lay.nodes);
    std::vector<Nodal> nodal(lay.nodes);
    for (std::size_t i = 0; i < lay.nodes; ++i) {
        x[i] = y[lay.x(i)];
        for (std::size_t k = 0; k < 4; ++k) nodal[i][k] = y[lay.u(i, k)];
    }
    // the endpoint rows hold these only to the Newton tolerance
    x.front() = config.spec.left();
    x.back() = config.spec.right();
    return MeshField(meshfield::Mesh(std::move(x)), std::move(nodal));
}

std::vector<double> assemble_dae(const SimConfig& config, const std::vector<double>& y,
                                 const std::vector<double>& ydot) {
    const StateLayout lay{config.n_intervals + 1};
    if (y.size() != lay.size() || ydot.size() != lay.size())
        throw std::invalid_argument("assemble_dae: state size mismatch");
    return residual(config, y, ydot, kFree);
}

DaeJacobian assemble_jacobian(const SimConfig& config, const std::vector<double>& y,
                              const std::vector<double>& ydot) {
    const StateLayout lay{config.n_intervals + 1};
    const std::size_t n = lay.size();
    if (y.size() != n || ydot.size() != n)
        throw std::invalid_argument("assemble_jacobian: state size mismatch");
    return jacobian(config, y, ydot, kFree);
}

SimResult integrate(const SimConfig& config) {
    config.validate();
    Integrator integrator(config);
    return integrator.run();
}

std::vector<double> extract_touchdown_points(const MeshField& field, const BoundarySpec& spec) {
    struct Candidate {
        double x, gap;
    };
    std::vector<Candidate> found;
    const auto& mesh = field.mesh();
    constexpr int kSub = 16;
    if (spec.geometry == Geometry::Disc &&
        meshfield::interpolate_local(field, 0, 1.0 / kSub, 1) >= 0.0)
        found.push_back({0.0, 1.0 + field.at(0)[0]});
    for (std::size_t i = 0; i < mesh.interval_count(); ++i) {
        double prev_s = 0.0;
        // endpoint slopes straight from the nodal data
        double prev_d = field.at(i)[1];
        for (int k = 1; k <= kSub; ++k) {
            const double s = static_cast<double>(k) / kSub;
            const double d =
                k == kSub ? field.at(i + 1)[1] : meshfield::interpolate_local(field, i, s, 1);
            if (prev_d < 0.0 && d >= 0.0) {
                const double sr = d == 0.0 ? s
                                           : numkit::find_root_bracketed(
                                                 [&](double q) {
                                                     return meshfield::interpolate_local(field, i,
                                                                                         q, 1);
                                                 },
                                                 prev_s, s, 0.0);
                found.push_back({mesh.node(i) + sr * mesh.width(i),
                                 1.0 + meshfield::interpolate_local(field, i, sr, 0)});
            }
            prev_s = s;
            prev_d = d;
        }
    }
    if (found.empty()) return {};
    double gmin = std::numeric_limits<double>::infinity();
    for (const auto& c : found) gmin = std::min(gmin, c.gap);
    std::vector<double> pts;
    for (const auto& c : found)
        if (c.gap <= 10.0 * gmin &&
            (pts.empty() || std::abs(c.x - pts.back()) > 1e-9))
            pts.push_back(c.x);
    std::sort(pts.begin(), pts.end());
    if (spec.geometry == Geometry::Strip && pts.size() == 2 && pts[0] < 0.0 && pts[1] > 0.0) {
        const double a = 0.5 * (pts[1] - pts[0]);
        if (std::abs(pts[0] + pts[1]) <= 1e-3 * std::max(a, 1e-3)) pts = {-a, a};
    }
    return pts;
}

std::vector<double> extract_touchdown_points(const SimResult& result) {
    if (result.outcome != Outcome::Touchdown || result.snapshots.empty()) return {};
    return result.touchdown_points;
}

bool off_center(const std::vector<double>& points) {
    return std::any_of(points.begin(), points.end(),
                       [](double x) { return std::abs(x) > 1e-3; });
}

EpsilonSearch find_epsilon_c(const SimConfig& base, double lo, double hi, double tol,
                             unsigned jobs) {
    if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("find_epsilon_c: need 0 < lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("find_epsilon_c: tol must be positive");
    jobs = std::max(1u, jobs);
    EpsilonSearch out;
    auto probe = [&base](double eps) {
        SimConfig cfg = base;
        cfg.epsilon = eps;
        cfg.touchdown_threshold = 1e-2;
        cfg.snapshot_times.clear();
        const SimResult r = integrate(cfg);
        if (r.outcome != Outcome::Touchdown)
            throw NoConvergence("no touchdown at epsilon " + std::to_string(eps), r.final_gap);
        return off_center(r.touchdown_points);
    };
    auto run_all = [&](const std::vector<double>& eps) {
        std::vector<std::future<bool>> fut;
        std::vector<bool> res(eps.size());
        for (std::size_t i = 0; i < eps.size(); i += jobs) {
            fut.clear();
            for (std::size_t k = i; k < std::min(eps.size(), i + jobs); ++k)
                fut.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                         probe, eps[k]));
            for (std::size_t k = 0; k < fut.size(); ++k) res[i + k] = fut[k].get();
        }
        out.simulations += eps.size();
        return res;
    };

    const auto ends = run_all({lo, hi});
    if (ends[0] == ends[1])
        throw InvalidBracket("both ends are in the " +
                             std::string(ends[0] ? "off-centre" : "central") + " regime");
    if (!ends[0]) throw InvalidBracket("lower end must be in the off-centre regime");

    while (hi - lo > tol) {
        std::vector<double> eps(jobs);
        for (unsigned k = 0; k < jobs; ++k)
            eps[k] = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(jobs + 1);
        const auto res = run_all(eps);
        double new_lo = lo, new_hi = hi;
        for (std::size_t k = 0; k < eps.size(); ++k) {
            if (res[k]) {
                new_lo = eps[k];
            } else {
                new_hi = eps[k];
                break;
            }
        }
        lo = new_lo;
        hi = new_hi;
    }
    out.lo = lo;
    out.hi = hi;
    out.epsilon_c = 0.5 * (lo + hi);
    return out;
}

}  // namespace quench::mmpde
