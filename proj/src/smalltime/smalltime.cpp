#include "quench/smalltime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quench/errors.hpp"
#include "quench/numkit.hpp"

namespace quench::smalltime {

double f_of_t(double t) {
    if (!(t >= 0.0 && t <= 1.0 / 3.0 + 1e-15))
        throw OutOfDomain("f(t) requires 0 <= t <= 1/3, got " + std::to_string(t));
    return 1.0 - std::cbrt(std::max(0.0, 1.0 - 3.0 * t));
}

double t_of_f(double f) {
    if (!(f >= 0.0 && f <= 1.0)) throw OutOfDomain("f must lie in [0, 1]");
    const double g = 1.0 - f;
    return (1.0 - g * g * g) / 3.0;
}

double f_prime(double t) {
    if (!(t >= 0.0 && t < 1.0 / 3.0))
        throw OutOfDomain("f'(t) requires 0 <= t < 1/3, got " + std::to_string(t));
    return std::pow(1.0 - 3.0 * t, -2.0 / 3.0);
}

double LayerProfile::eval(double eta, int order, double step) const {
    const std::vector<double>* data = nullptr;
    switch (order) {
        case 0: data = &v; break;
        case 1: data = &d1; break;
        case 2: data = &d2; break;
        case 3: data = &d3; break;
        default: throw std::invalid_argument("LayerProfile::eval: order must be 0..3");
    }
    const std::size_t n = data->size();
    const double last = step * static_cast<double>(n - 1);
    if (eta >= last) return order == 0 ? v.back() : 0.0;
    eta = std::max(eta, 0.0);
    // six-point Lagrange interpolation around eta
    const long centre = static_cast<long>(std::floor(eta / step));
    const long base = std::clamp(centre - 2, 0L, static_cast<long>(n) - 6);
    double sum = 0.0;
    for (long i = base; i < base + 6; ++i) {
        double w = 1.0;
        for (long j = base; j < base + 6; ++j)
            if (j != i) w *= (eta - step * j) / (step * (i - j));
        sum += w * (*data)[static_cast<std::size_t>(i)];
    }
    return sum;
}

namespace {

enum class NearBc { Slope, Curvature };  // v'(0) = b or v''(0) = b

// v'''' - (eta/4) v' + c v = rhs on [0, L], v(0) = 0, the near-end condition
// with value b, and v' = v''' = 0 at eta = L (ghost reflection).
LayerProfile solve_linear_layer(double c, const std::vector<double>& rhs, NearBc bc, double b,
                                double h) {
    const std::size_t n = rhs.size() - 1;
    numkit::BandedMatrix a(n + 1, 2, 2);
    std::vector<double> f(n + 1, 0.0);
    a.at(0, 0) = 1.0;
    const double h4 = h * h * h * h;

    for (std::size_t j = 1; j <= n; ++j) {
        const double eta = h * static_cast<double>(j);
        f[j] = rhs[j];
        auto add = [&](long col, double coef) {
            if (col == -1) {
                if (bc == NearBc::Slope) {  // v_{-1} = v_1 - 2 h b
                    a.at(j, 1) += coef;
                    f[j] += coef * 2.0 * h * b;
                } else {  // v_{-1} = h^2 b + 2 v_0 - v_1
                    a.at(j, 0) += 2.0 * coef;
                    a.at(j, 1) -= coef;
                    f[j] -= coef * h * h * b;
                }
                return;
            }
            const long nn = static_cast<long>(n);
            if (col > nn) col = 2 * nn - col;  // v_{n+k} = v_{n-k}
            a.at(j, static_cast<std::size_t>(col)) += coef;
        };
        // rows scaled by h^4 to match the Dirichlet row
        f[j] *= h4;
        const long jj = static_cast<long>(j);
        add(jj - 2, 1.0);
        add(jj - 1, -4.0 + eta * h * h * h / 8.0);
        add(jj, 6.0 + c * h4);
        add(jj + 1, -4.0 - eta * h * h * h / 8.0);
        add(jj + 2, 1.0);
    }
    LayerProfile p;
    p.v = numkit::solve_banded(a, f);

    // extended copy with two ghosts each side
    std::vector<double> e(n + 5);
    for (std::size_t j = 0; j <= n; ++j) e[j + 2] = p.v[j];
    e[1] = bc == NearBc::Slope ? p.v[1] - 2.0 * h * b : h * h * b + 2.0 * p.v[0] - p.v[1];
    e[0] = 0.0;  // unused except through d3[0], which is extrapolated below
    e[n + 3] = p.v[n - 1];
    e[n + 4] = p.v[n - 2];
    p.d1.resize(n + 1);
    p.d2.resize(n + 1);
    p.d3.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const std::size_t k = j + 2;
        p.d1[j] = (e[k + 1] - e[k - 1]) / (2.0 * h);
        p.d2[j] = (e[k + 1] - 2.0 * e[k] + e[k - 1]) / (h * h);
        if (j >= 1) p.d3[j] = (e[k + 2] - 2.0 * e[k + 1] + 2.0 * e[k - 1] - e[k - 2]) / (2.0 * h * h * h);
    }
    p.d3[0] = 2.0 * p.d3[1] - p.d3[2];
    return p;
}

}  // namespace

LayerProfiles solve_layer_hierarchy(const BoundarySpec& spec, double length,
                                    std::size_t intervals) {
    if (!(length >= 20.0))
        throw std::invalid_argument("solve_layer_hierarchy: layer length must be >= 20");
    if (intervals < 10) throw std::invalid_argument("solve_layer_hierarchy: grid too coarse");

    LayerProfiles out;
    out.spec = spec;
    out.length = length;
    const double h = length / static_cast<double>(intervals);
    out.grid.resize(intervals + 1);
    for (std::size_t j = 0; j <= intervals; ++j) out.grid[j] = h * static_cast<double>(j);
    const auto& eta = out.grid;
    const std::size_t m = intervals + 1;
    const NearBc near = spec.condition == Condition::Clamped ? NearBc::Slope : NearBc::Curvature;
    const bool disc = spec.geometry == Geometry::Disc;

    std::vector<double> rhs(m, -1.0);
    out.terms[0] = solve_linear_layer(1.0, rhs, near, 0.0, h);
    const LayerProfile& v0 = out.terms[0];

    if (!disc) {
        for (std::size_t j = 0; j < m; ++j) rhs[j] = 0.5 * eta[j] * v0.d1[j];
        out.terms[1] = solve_linear_layer(2.0, rhs, near, 0.0, h);
        const LayerProfile& v1 = out.terms[1];
        for (std::size_t j = 0; j < m; ++j)
            rhs[j] = -3.0 * (v0.v[j] - 0.25 * eta[j] * v0.d1[j] + v0.v[j] * v0.v[j]) +
                     0.5 * eta[j] * v1.d1[j] - 2.0 * v1.v[j];
        out.terms[2] = solve_linear_layer(3.0, rhs, near, 0.0, h);
    } else {
        // Navier on the disc couples the orders through Delta u = u'' + u'/r at r = 1
        const bool navier = spec.condition == Condition::Navier;
        for (std::size_t j = 0; j < m; ++j) rhs[j] = 2.0 * v0.d3[j];
        out.terms[1] = solve_linear_layer(1.25, rhs, near, navier ? v0.d1[0] : 0.0, h);
        const LayerProfile& vq = out.terms[1];
        for (std::size_t j = 0; j < m; ++j)
            rhs[j] = 2.0 * vq.d3[j] + 2.0 * eta[j] * v0.d3[j] + v0.d2[j];
        out.terms[2] = solve_linear_layer(1.5, rhs, near, navier ? vq.d1[0] : 0.0, h);
    }

    const std::size_t tail = m - m / 10;
    for (const auto& term : out.terms) {
        double slope = 0.0;
        for (std::size_t j = tail; j < m; ++j) slope = std::max(slope, std::abs(term.d1[j]));
        if (slope > 1e-4)
            throw TruncationTooSmall("far-field slope " + std::to_string(slope) +
                                     " exceeds 1e-4; increase the layer length");
    }
    return out;
}

TouchdownConstants touchdown_constants(const LayerProfiles& profiles) {
    const LayerProfile& v0 = profiles.terms[0];
    const double h = profiles.step();
    std::size_t hit = 0;
    for (std::size_t j = 1; j + 1 < v0.d1.size(); ++j) {
        if (v0.d1[j] == 0.0 && v0.d1[j + 1] == 0.0) continue;
        if ((v0.d1[j] < 0.0 && v0.d1[j + 1] >= 0.0) || (v0.d1[j] > 0.0 && v0.d1[j + 1] <= 0.0)) {
            hit = j;
            break;
        }
    }
    if (hit == 0) throw NoCriticalPoint("v0' has no sign change on the layer grid");

    TouchdownConstants c;
    c.spec = profiles.spec;
    c.eta0 = numkit::find_root_bracketed([&](double e) { return v0.eval(e, 1, h); },
                                         profiles.grid[hit], profiles.grid[hit + 1], 1e-14);
    const double curv = v0.eval(c.eta0, 2, h);
    if (std::abs(curv) < 1e-12) throw NoCriticalPoint("degenerate critical point of v0");
    const LayerProfile& p1 = profiles.terms[1];
    const LayerProfile& p2 = profiles.terms[2];
    c.first = -p1.eval(c.eta0, 1, h) / curv;
    c.second = -(p2.eval(c.eta0, 1, h) + c.first * p1.eval(c.eta0, 2, h) +
                 0.5 * c.first * c.first * v0.eval(c.eta0, 3, h)) /
               curv;
    return c;
}

double composite_solution(const LayerProfiles& profiles, double x, double t, double epsilon,
                          int terms, MatchingTerm matching) {
    if (terms < 1 || terms > 3) throw std::invalid_argument("composite_solution: terms 1..3");
    const double f = f_of_t(t);
    if (f == 0.0) return 0.0;
    const double s = std::sqrt(epsilon) * std::pow(f, 0.25);
    const double h = profiles.step();
    if (profiles.spec.geometry == Geometry::Strip) {
        if (!(x >= -1.0 && x <= 1.0)) throw OutOfDomain("strip coordinate outside [-1, 1]");
        double sum = 0.0, fn = 1.0;
        for (int n = 0; n < terms; ++n) {
            const auto& p = profiles.terms[static_cast<std::size_t>(n)];
            sum += fn * (p.eval((x + 1.0) / s, 0, h) + p.eval((1.0 - x) / s, 0, h));
            fn *= f;
        }
        return f * sum + (matching == MatchingTerm::Plus ? f : -f);
    }
    if (!(x >= 0.0 && x <= 1.0)) throw OutOfDomain("disc radius outside [0, 1]");
    double sum = 0.0, sk = 1.0;
    for (int k = 0; k < terms; ++k) {
        sum += sk * profiles.terms[static_cast<std::size_t>(k)].eval((1.0 - x) / s, 0, h);
        sk *= s;
    }
    return f * sum;
}

std::vector<double> predict_touchdown(const TouchdownConstants& c, double epsilon, double t_c) {
    if (!(t_c > 0.0 && t_c <= 1.0 / 3.0 + 1e-15))
        throw OutOfDomain("predict_touchdown: t_c must lie in (0, 1/3]");
    const double f = f_of_t(std::min(t_c, 1.0 / 3.0));
    const double s = std::sqrt(epsilon) * std::pow(f, 0.25);
    if (c.spec.geometry == Geometry::Strip) {
        const double xc = 1.0 - s * (c.eta0 + f * c.first + f * f * c.second);
        if (!(xc > 0.0 && xc < 1.0))
            throw PredictionOutOfRange("x_c = " + std::to_string(xc) + " outside (0, 1)");
        return {-xc, xc};
    }
    const double rc = 1.0 - s * c.eta0 - s * s * c.first - s * s * s * c.second;
    if (!(rc > 0.0 && rc < 1.0))
        throw PredictionOutOfRange("r_c = " + std::to_string(rc) + " outside (0, 1)");
    return {rc};
}

}  // namespace quench::smalltime
