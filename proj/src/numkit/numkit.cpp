#include "quench/numkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

#include "quench/errors.hpp"

namespace quench::numkit {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), lower_(lower), upper_(upper), band_(n * (lower + upper + 1), 0.0) {
    if (n == 0) throw std::invalid_argument("BandedMatrix: n must be >= 1");
    if (n > 1 && (lower >= n || upper >= n))
        throw std::invalid_argument("BandedMatrix: bandwidth must be < n");
}

double BandedMatrix::operator()(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_ || !in_band(i, j)) return 0.0;
    return band_[i * (lower_ + upper_ + 1) + (j + lower_ - i)];
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_ || !in_band(i, j))
        throw std::out_of_range("BandedMatrix::at: (" + std::to_string(i) + "," +
                                std::to_string(j) + ") outside band");
    return band_[i * (lower_ + upper_ + 1) + (j + lower_ - i)];
}

void BandedMatrix::set_zero() { std::fill(band_.begin(), band_.end(), 0.0); }

Vector BandedMatrix::multiply(std::span<const double> x) const {
    Vector y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i > lower_ ? i - lower_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + upper_);
        double acc = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) acc += (*this)(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

Vector solve_banded(const BandedMatrix& a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("solve_banded: size mismatch");
    const std::size_t kl = a.lower();
    const std::size_t ku = a.upper();
    // Each row keeps a window of 2*kl + ku + 1 columns starting at i - kl so that
    // pivoting fill-in (up to kl extra super-diagonals) has somewhere to go.
    const std::size_t width = 2 * kl + ku + 1;
    std::vector<double> w(n * width, 0.0);
    auto cell = [&](std::size_t i, std::size_t j) -> double& {
        return w[i * width + (j + kl - i)];
    };

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = i > kl ? i - kl : 0;
        const std::size_t j1 = std::min(n - 1, i + ku);
        for (std::size_t j = j0; j <= j1; ++j) {
            cell(i, j) = a(i, j);
            scale = std::max(scale, std::abs(a(i, j)));
        }
    }
    Vector x(b.begin(), b.end());
    const double pivot_floor =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t last_row = std::min(n - 1, k + kl);
        const std::size_t last_col = std::min(n - 1, k + kl + ku);
        std::size_t p = k;
        for (std::size_t r = k + 1; r <= last_row; ++r)
            if (std::abs(cell(r, k)) > std::abs(cell(p, k))) p = r;
        if (!(std::abs(cell(p, k)) > pivot_floor))
            throw SingularMatrix("zero pivot in column " + std::to_string(k));
        if (p != k) {
            for (std::size_t j = k; j <= last_col; ++j) std::swap(cell(k, j), cell(p, j));
            std::swap(x[k], x[p]);
        }
        const double pivot = cell(k, k);
        for (std::size_t r = k + 1; r <= last_row; ++r) {
            const double factor = cell(r, k) / pivot;
            if (factor == 0.0) continue;
            cell(r, k) = 0.0;
            for (std::size_t j = k + 1; j <= last_col; ++j) cell(r, j) -= factor * cell(k, j);
            x[r] -= factor * x[k];
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        const std::size_t last_col = std::min(n - 1, ii + kl + ku);
        double acc = x[ii];
        for (std::size_t j = ii + 1; j <= last_col; ++j) acc -= cell(ii, j) * x[j];
        x[ii] = acc / cell(ii, ii);
    }
    return x;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double e : v) {
        if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(e));
    }
    return m;
}

NewtonResult newton_solve(const ResidualFn& residual, const BandedJacobianFn& jacobian,
                          Vector x0, const NewtonSettings& settings,
                          const AdmissibleFn& admissible) {
    if (!(settings.abs_tol > 0.0) || !(settings.damping > 0.0) || settings.damping > 1.0)
        throw std::invalid_argument("newton_solve: invalid settings");

    NewtonResult out;
    out.x = std::move(x0);
    if (admissible && !admissible(out.x))
        throw IterateInvalid("initial iterate is not admissible");
    Vector r = residual(out.x);
    double norm = max_abs(r);

    for (int it = 0; it < settings.max_iter; ++it) {
        if (norm <= settings.abs_tol) {
            out.iterations = it;
            out.residual_norm = norm;
            return out;
        }
        const Vector dx = solve_banded(jacobian(out.x), r);

        double lambda = 1.0;
        bool moved = false;
        Vector best_x;
        Vector best_r;
        double best_norm = std::numeric_limits<double>::infinity();
        while (lambda >= settings.min_step) {
            Vector trial(out.x.size());
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.x[i] - lambda * dx[i];
            if (!admissible || admissible(trial)) {
                Vector rt = residual(trial);
                const double nt = max_abs(rt);
                if (nt < norm) {
                    out.x = std::move(trial);
                    r = std::move(rt);
                    norm = nt;
                    moved = true;
                    break;
                }
                if (nt < best_norm) {
                    best_norm = nt;
                    best_x = std::move(trial);
                    best_r = std::move(rt);
                }
            }
            lambda *= settings.damping;
        }
        if (!moved) {
            // Floor reached without decrease: take the smallest admissible step
            // anyway so the iteration can leave a non-descent region.
            if (best_x.empty() || !std::isfinite(best_norm))
                throw IterateInvalid("no admissible damped step");
            out.x = std::move(best_x);
            r = std::move(best_r);
            norm = best_norm;
        }
    }
    if (norm <= settings.abs_tol) {
        out.iterations = settings.max_iter;
        out.residual_norm = norm;
        return out;
    }
    throw NoConvergence("newton_solve exceeded " + std::to_string(settings.max_iter) +
                            " iterations",
                        norm);
}

double find_root_bracketed(const std::function<double(double)>& f, double a, double b,
                           double tol) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!(fa * fb < 0.0))
        throw InvalidBracket("no sign change on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");

    // Brent's method; [b, c] always brackets the root.
    double c = a, fc = fa;
    double d = b - a, e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 500; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b);
        const double xm = 0.5 * (c - b);
        if (std::abs(fb) <= tol || std::abs(xm) <= tol1 || fb == 0.0) return b;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

namespace {

// Power series for x <= 12 (J) and the whole range (I, no cancellation).
double j0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && k > x) break;
    }
    return sum;
}

double j1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) && k > x) break;
    }
    return sum;
}

double i_series(int order, double x) {
    const double q = 0.25 * x * x;
    double term = order == 0 ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (static_cast<double>(k) * (k + order));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

// Hankel asymptotic expansion for J_nu, nu in {0, 1}, x > 12.
double j_asymptotic(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0;
    double a = 1.0;  // a_k(nu) / x^k
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        a *= (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(a) > last) break;  // series starts diverging
        last = std::abs(a);
        // k odd feeds Q with sign (-1)^((k-1)/2), k even feeds P with (-1)^(k/2)
        if (k % 2 == 1)
            q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * a;
        else
            p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * a;
        if (std::abs(a) < 1e-17) break;
    }
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel(BesselKind kind, double x) {
    if (!(x >= 0.0) || x > 700.0)
        throw OutOfRange("bessel argument " + std::to_string(x) + " outside [0, 700]");
    switch (kind) {
        case BesselKind::J0:
            return x <= 12.0 ? j0_series(x) : j_asymptotic(0, x);
        case BesselKind::J0Prime:
            return -(x <= 12.0 ? j1_series(x) : j_asymptotic(1, x));
        case BesselKind::I0:
            return i_series(0, x);
        case BesselKind::I0Prime:
            return i_series(1, x);
    }
    return 0.0;
}

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

double quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    if (!(tol > 0.0)) throw std::invalid_argument("quad_adaptive: tol must be positive");
    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod(f, a, b);
    double total = first.value;
    double error = first.error;
    heap.push(first);
    constexpr int kMaxSegments = 10000;
    while (error > tol) {
        if (static_cast<int>(heap.size()) >= kMaxSegments)
            throw QuadFailure("error estimate " + std::to_string(error) + " above tolerance");
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b))
            throw QuadFailure("interval collapsed near " + std::to_string(mid));
        const Segment left = gauss_kronrod(f, worst.a, mid);
        const Segment right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if (!std::isfinite(total)) throw QuadFailure("non-finite integrand");
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    double sum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        heap.pop();
    }
    return sum;
}

}  // namespace quench::numkit
