#include "quench/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "quench/errors.hpp"
#include "quench/numkit.hpp"

namespace quench::selfsim {

using numkit::BandedMatrix;
using numkit::Vector;

const char* to_string(SimilarityCase c) { return c == SimilarityCase::Line ? "line" : "radial"; }
const char* to_string(Branch b) { return b == Branch::Monotone ? "monotone" : "dimpled"; }

namespace {

const double kCubeRoot3 = std::cbrt(3.0);

std::vector<double> make_grid(SimilarityCase kind, double length, std::size_t intervals) {
    std::vector<double> g(intervals + 1);
    const double left = kind == SimilarityCase::Line ? -length : 0.0;
    const double h = (length - left) / static_cast<double>(intervals);
    for (std::size_t j = 0; j <= intervals; ++j) g[j] = left + h * static_cast<double>(j);
    if (kind == SimilarityCase::Line && intervals % 2 == 0) g[intervals / 2] = 0.0;
    g.back() = length;
    return g;
}

// Linear part of the discrete problem. ODE rows hold D4 + (eta/4) D1 - 1/3,
// closure rows hold the Robin operator 1/3 - (eta/4) D1.
struct Discretization {
    BandedMatrix lin;
    std::vector<char> ode_row;
    // line case: lin without the 1/h^4 stencil, which the residual applies
    // with exact integer weights
    BandedMatrix rest{1, 0, 0};
    long double inv_h4 = 0.0L;
};

void robin_row(BandedMatrix& a, const std::vector<double>& g, std::size_t j, double h) {
    const std::size_t n = g.size() - 1;
    const double c = -0.25 * g[j] / (2.0 * h);
    a.at(j, j) += 1.0 / 3.0;
    if (j == 0) {
        a.at(0, 0) += -3.0 * c;
        a.at(0, 1) += 4.0 * c;
        a.at(0, 2) += -c;
    } else if (j == n) {
        a.at(n, n) += 3.0 * c;
        a.at(n, n - 1) += -4.0 * c;
        a.at(n, n - 2) += c;
    } else {
        a.at(j, j + 1) += c;
        a.at(j, j - 1) -= c;
    }
}

Discretization discretize(SimilarityCase kind, const std::vector<double>& g) {
    const std::size_t n = g.size() - 1;
    const double h = g[1] - g[0];
    Discretization d{BandedMatrix(n + 1, 2, 2), std::vector<char>(n + 1, 0)};
    auto& a = d.lin;

    if (kind == SimilarityCase::Line) {
        const double h4 = std::pow(h, 4);
        d.rest = BandedMatrix(n + 1, 2, 2);
        d.inv_h4 = 1.0L / (static_cast<long double>(h) * h * h * h);
        for (std::size_t j = 2; j + 2 <= n; ++j) {
            d.ode_row[j] = 1;
            const double c = 0.25 * g[j] / (2.0 * h);
            a.at(j, j - 2) += 1.0 / h4;
            a.at(j, j - 1) += -4.0 / h4 - c;
            a.at(j, j) += 6.0 / h4 - 1.0 / 3.0;
            a.at(j, j + 1) += -4.0 / h4 + c;
            a.at(j, j + 2) += 1.0 / h4;
            d.rest.at(j, j - 1) = -c;
            d.rest.at(j, j) = -1.0 / 3.0;
            d.rest.at(j, j + 1) = c;
        }
        for (std::size_t j : {std::size_t{0}, std::size_t{1}, n - 1, n}) {
            robin_row(a, g, j, h);
            robin_row(d.rest, g, j, h);
        }
        return d;
    }

    // radial Laplacian in divergence form; even reflection at the origin
    std::vector<std::array<double, 3>> lap(n + 1);
    lap[0] = {0.0, -4.0 / (h * h), 4.0 / (h * h)};
    for (std::size_t j = 1; j < n; ++j) {
        const double rm = g[j] - 0.5 * h, rp = g[j] + 0.5 * h;
        const double s = 1.0 / (g[j] * h * h);
        lap[j] = {rm * s, -(rm + rp) * s, rp * s};
    }
    for (std::size_t j = 0; j + 2 <= n; ++j) {
        d.ode_row[j] = 1;
        // (Lap Lap v)_j = sum_k lap[j][k] (Lap v)_{j+k-1}; (Lap v)_{-1} mirrors (Lap v)_1
        for (int k = 0; k < 3; ++k) {
            const double w = lap[j][k];
            if (w == 0.0) continue;
            long m = static_cast<long>(j) + k - 1;
            if (m < 0) m = 1;
            const auto mm = static_cast<std::size_t>(m);
            for (int q = 0; q < 3; ++q) {
                const double w2 = lap[mm][q];
                if (w2 == 0.0) continue;
                long col = m + q - 1;
                if (col < 0) col = 1;
                a.at(j, static_cast<std::size_t>(col)) += w * w2;
            }
        }
        a.at(j, j) -= 1.0 / 3.0;
        if (j > 0) {
            const double c = 0.25 * g[j] / (2.0 * h);
            a.at(j, j + 1) += c;
            a.at(j, j - 1) -= c;
        }
    }
    robin_row(a, g, n - 1, h);
    robin_row(a, g, n, h);
    return d;
}

// accumulated in extended precision: the 1/h^4 stencil acting on v ~ L^{4/3}
// otherwise floors the residual near 1e-8
Vector residual(const Discretization& d, const Vector& v) {
    const std::size_t n = v.size();
    const bool split = d.inv_h4 != 0.0L;
    const BandedMatrix& m = split ? d.rest : d.lin;
    Vector r(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double sum = 0.0L;
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(n - 1, i + 2);
        for (std::size_t j = lo; j <= hi; ++j)
            sum += static_cast<long double>(m(i, j)) * static_cast<long double>(v[j]);
        if (split && d.ode_row[i]) {
            const long double d4 = static_cast<long double>(v[i - 2]) - 4.0L * v[i - 1] +
                                   6.0L * v[i] - 4.0L * v[i + 1] + static_cast<long double>(v[i + 2]);
            sum += d4 * d.inv_h4;
        }
        if (d.ode_row[i]) sum += 1.0L / (static_cast<long double>(v[i]) * v[i]);
        r[i] = static_cast<double>(sum);
    }
    return r;
}

BandedMatrix jacobian(const Discretization& d, const Vector& v) {
    BandedMatrix j = d.lin;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (d.ode_row[i]) j.at(i, i) += -2.0 / (v[i] * v[i] * v[i]);
    return j;
}

int count_critical_points(SimilarityCase kind, const std::vector<double>& v) {
    int changes = 0;
    int last = 0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        const double dv = v[j + 1] - v[j];
        const int s = dv > 0.0 ? 1 : (dv < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return kind == SimilarityCase::RadialOrigin ? changes + 1 : changes;
}

void fill_far_field(SimilarityProfile& p) {
    const double l43 = std::pow(p.length, 4.0 / 3.0);
    p.c0_endpoint = p.vbar.back() / l43;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
        if (std::abs(p.grid[j]) < 0.9 * p.length) continue;
        const double w = std::pow(std::abs(p.grid[j]), 4.0 / 3.0);
        num += w * p.vbar[j];
        den += w * w;
    }
    p.c0 = num / den;
    p.critical_points = count_critical_points(p.kind, p.vbar);
    p.branch = p.critical_points <= 1 ? Branch::Monotone : Branch::Dimpled;
}

std::vector<double> derivative(const SimilarityProfile& p) {
    const std::size_t n = p.grid.size() - 1;
    const double h = p.step();
    const auto& v = p.vbar;
    std::vector<double> d(n + 1);
    d[0] = p.kind == SimilarityCase::RadialOrigin ? 0.0 : (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
    for (std::size_t j = 1; j < n; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2 * h);
    d[n] = (3 * v[n] - 4 * v[n - 1] + v[n - 2]) / (2 * h);
    return d;
}

}  // namespace

std::size_t default_intervals(SimilarityCase kind, double length) {
    const double span = kind == SimilarityCase::Line ? 2.0 * length : length;
    return static_cast<std::size_t>(std::lround(span / 0.1));
}

double SimilarityProfile::eval(double eta) const {
    if (kind == SimilarityCase::RadialOrigin) eta = std::abs(eta);
    if (std::abs(eta) > length) return far_field_series(c0, eta, 2);
    const double h = step();
    const long n = static_cast<long>(grid.size()) - 1;
    const long i = static_cast<long>(std::floor((eta - grid[0]) / h));
    const long base = std::clamp(i - 1, 0L, n - 3);
    double sum = 0.0;
    for (long a = base; a < base + 4; ++a) {
        double w = 1.0;
        for (long b = base; b < base + 4; ++b)
            if (a != b) w *= (eta - grid[b]) / (grid[a] - grid[b]);
        sum += w * vbar[a];
    }
    return sum;
}

double initial_guess(double c0, double eta) {
    if (!(c0 > 0.0)) throw std::invalid_argument("initial_guess: c0 must be positive");
    return std::cbrt(c0 * c0 * c0 * std::pow(eta, 4) + 3.0);
}

std::vector<double> initial_guess(double c0, const std::vector<double>& grid) {
    std::vector<double> v(grid.size());
    std::transform(grid.begin(), grid.end(), v.begin(),
                   [c0](double e) { return initial_guess(c0, e); });
    return v;
}

SimilarityProfile solve_similarity(SimilarityCase kind, double c0_init, double length,
                                   std::size_t intervals) {
    if (!(c0_init > 0.0)) throw std::invalid_argument("solve_similarity: c0_init must be > 0");
    if (!(length >= 30.0)) throw std::invalid_argument("solve_similarity: L must be >= 30");
    if (intervals == 0) intervals = default_intervals(kind, length);
    if (intervals < 20) throw std::invalid_argument("solve_similarity: grid too coarse");

    SimilarityProfile p;
    p.kind = kind;
    p.length = length;
    p.grid = make_grid(kind, length, intervals);
    const Discretization d = discretize(kind, p.grid);

    Vector guess = initial_guess(c0_init, p.grid);
    numkit::NewtonSettings s;
    s.max_iter = 100;
    // rounding v itself leaves a residual of order eps |v| / h^4
    const double h = p.step();
    const double vmax = std::max(c0_init, 1.0) * std::pow(length, 4.0 / 3.0) + 3.0;
    s.abs_tol = std::max(5e-9, 8.0 * std::numeric_limits<double>::epsilon() * vmax / (h * h * h * h));
    const auto result = numkit::newton_solve(
        [&](const Vector& v) { return residual(d, v); },
        [&](const Vector& v) { return jacobian(d, v); }, std::move(guess), s,
        [](const Vector& v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
        });
    p.vbar = result.x;
    p.newton_iterations = result.iterations;
    fill_far_field(p);
    return p;
}

double interior_residual(const SimilarityProfile& profile) {
    const Discretization d = discretize(profile.kind, profile.grid);
    const Vector r = residual(d, profile.vbar);
    double m = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j)
        if (d.ode_row[j]) m = std::max(m, std::abs(r[j]));
    return m;
}

double far_field_c1(double c0) { return 40.0 * c0 / 81.0 + 1.0 / (c0 * c0); }

double far_field_series(double c0, double eta, int n_terms) {
    if (n_terms > 2) throw Unsupported("far-field coefficients beyond c1 are not available");
    if (n_terms < 1) throw std::invalid_argument("far_field_series: need at least one term");
    const double a = std::abs(eta);
    double v = c0 * std::pow(a, 4.0 / 3.0);
    if (n_terms == 2) v += far_field_c1(c0) * std::pow(a, -8.0 / 3.0);
    return v;
}

SimilarityProfile constant_state(SimilarityCase kind, double length, std::size_t intervals) {
    if (intervals == 0) intervals = default_intervals(kind, length);
    SimilarityProfile p;
    p.kind = kind;
    p.length = length;
    p.grid = make_grid(kind, length, intervals);
    p.vbar.assign(p.grid.size(), kCubeRoot3);
    p.c0 = 0.0;
    p.c0_endpoint = 0.0;
    p.critical_points = 0;
    return p;
}

Spectrum stability_spectrum(const SimilarityProfile& profile, std::size_t n_eigs) {
    const Discretization d = discretize(profile.kind, profile.grid);
    const BandedMatrix jac = jacobian(d, profile.vbar);
    const std::size_t n = profile.grid.size();
    // column-major dense copy: ODE rows carry -J, closure rows the Robin operator
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double sign = d.ode_row[i] ? -1.0 : 1.0;
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(n - 1, i + 2);
        for (std::size_t j = lo; j <= hi; ++j) a[j * n + i] = sign * jac(i, j);
    }
    std::vector<double> wr(n), wi(n), vr(n * n);
    const auto ni = static_cast<lapack_int>(n);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', ni, a.data(), ni, wr.data(),
                                          wi.data(), nullptr, 1, vr.data(), ni);
    if (info != 0) throw NoConvergence("dgeev failed with info " + std::to_string(info), 0.0);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return wr[x] > wr[y]; });

    Spectrum out;
    out.length = profile.length;
    out.intervals = n - 1;
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::hypot(wr[i], wi[i]));
    const std::size_t take = std::min(n_eigs, n);
    for (std::size_t k = 0; k < take; ++k) {
        const std::size_t idx = order[k];
        out.eigenvalues.push_back(wr[idx]);
        out.imaginary.push_back(wi[idx]);
        if (std::abs(wi[idx]) > 1e-6 * radius) out.complex_detected = true;
        // a conjugate pair shares columns (re, im) starting at the member with wi > 0
        const std::size_t col = wi[idx] < 0.0 ? idx - 1 : idx;
        std::vector<double> vec(vr.begin() + static_cast<std::ptrdiff_t>(col * n),
                                vr.begin() + static_cast<std::ptrdiff_t>((col + 1) * n));
        double big = 0.0;
        for (double x : vec)
            if (std::abs(x) > std::abs(big)) big = x;
        if (big != 0.0)
            for (double& x : vec) x /= big;
        out.eigenvectors.push_back(std::move(vec));
    }
    return out;
}

std::vector<double> time_translation_mode(const SimilarityProfile& profile) {
    const auto dv = derivative(profile);
    std::vector<double> m(dv.size());
    for (std::size_t j = 0; j < m.size(); ++j)
        m[j] = profile.vbar[j] / 3.0 - 0.25 * profile.grid[j] * dv[j];
    return m;
}

std::vector<double> space_translation_mode(const SimilarityProfile& profile) {
    return derivative(profile);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: size mismatch");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) return 0.0;
    return std::abs(ab) / std::sqrt(aa * bb);
}

std::vector<RescaledSample> rescale_snapshot(const meshfield::MeshField& field, double t,
                                             double t_c, double x_c, double epsilon) {
    if (!(t < t_c)) throw InvalidTime("snapshot time must precede t_c");
    if (!(epsilon > 0.0)) throw std::invalid_argument("rescale_snapshot: epsilon must be > 0");
    const double tau = t_c - t;
    const double xs = std::sqrt(epsilon) * std::pow(tau, 0.25);
    const double vs = std::cbrt(tau);
    const auto& mesh = field.mesh();
    std::vector<RescaledSample> out;
    constexpr int kPerInterval = 8;
    for (std::size_t i = 0; i < mesh.interval_count(); ++i) {
        for (int k = 0; k < kPerInterval; ++k) {
            const double s = static_cast<double>(k) / kPerInterval;
            const double x = mesh.node(i) + s * mesh.width(i);
            const double u = meshfield::interpolate_local(field, i, s, 0);
            out.push_back({(x - x_c) / xs, (1.0 + u) / vs});
        }
    }
    out.push_back({(mesh.right() - x_c) / xs, (1.0 + field.nodal().back()[0]) / vs});
    return out;
}

double similarity_distance(const std::vector<RescaledSample>& samples,
                           const SimilarityProfile& profile, double window) {
    double d = 0.0;
    for (const auto& s : samples)
        if (std::abs(s.eta) <= window) d = std::max(d, std::abs(s.v - profile.eval(s.eta)));
    return d;
}

}  // namespace quench::selfsim
