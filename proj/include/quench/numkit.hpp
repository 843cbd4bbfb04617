#pragma once

// Shared numerical kernel: banded solves, damped Newton, bracketed roots,
// adaptive quadrature and the handful of Bessel functions the eigenproblems
// need.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace quench::numkit {

using Vector = std::vector<double>;

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals.
/// Entries outside the band are zero and cannot be written.
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

    std::size_t size() const noexcept { return n_; }
    std::size_t lower() const noexcept { return lower_; }
    std::size_t upper() const noexcept { return upper_; }

    bool in_band(std::size_t i, std::size_t j) const noexcept {
        return j + lower_ >= i && j <= i + upper_;
    }

    /// Read access; returns 0 outside the band.
    double operator()(std::size_t i, std::size_t j) const;
    /// Write access; throws std::out_of_range outside the band.
    double& at(std::size_t i, std::size_t j);

    void set_zero();
    Vector multiply(std::span<const double> x) const;

private:
    std::size_t n_;
    std::size_t lower_;
    std::size_t upper_;
    // row-major, width lower_ + upper_ + 1, column j of row i at j - i + lower_
    std::vector<double> band_;
};

/// Gaussian elimination with partial pivoting inside the band.
/// Throws SingularMatrix when a pivot vanishes to working precision.
Vector solve_banded(const BandedMatrix& a, std::span<const double> b);

struct NewtonSettings {
    int max_iter = 50;
    double abs_tol = 1e-10;  // on the max-norm of the residual
    double damping = 0.5;    // backtracking factor
    double min_step = 1.0 / 65536.0;
};

struct NewtonResult {
    Vector x;
    int iterations = 0;
    double residual_norm = 0.0;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using BandedJacobianFn = std::function<BandedMatrix(const Vector&)>;
using AdmissibleFn = std::function<bool(const Vector&)>;

/// Newton iteration with backtracking: the step is scaled by `damping` until
/// the residual max-norm decreases (and the iterate is admissible), down to
/// `min_step`. Throws NoConvergence or SingularMatrix; IterateInvalid when no
/// admissible step can be found at all.
NewtonResult newton_solve(const ResidualFn& residual, const BandedJacobianFn& jacobian,
                          Vector x0, const NewtonSettings& settings = {},
                          const AdmissibleFn& admissible = {});

/// Root of f in [a, b] with a sign change. The bracket only shrinks; the
/// returned point satisfies |f| <= tol or the bracket has collapsed to
/// adjacent floating-point numbers.
double find_root_bracketed(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-10);

enum class BesselKind { J0, J0Prime, I0, I0Prime };

/// J0, J0' = -J1, I0 and I0' = I1 for 0 <= x <= 700.
double bessel(BesselKind kind, double x);

/// Globally adaptive 15-point Gauss-Kronrod quadrature with interval
/// bisection. Throws QuadFailure when the error estimate cannot be driven
/// below `tol`.
double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-10);

/// Max-norm helper used throughout.
double max_abs(std::span<const double> v);

}  // namespace quench::numkit
