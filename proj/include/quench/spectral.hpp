#pragma once

// Principal eigenpair of the biharmonic operator on the strip and unit disc,
// the non-existence bound on epsilon, and the touchdown-time upper bound.

#include "quench/meshfield.hpp"

namespace quench::spectral {

/// Positive principal eigenpair Delta^2 phi = mu phi, with phi normalized to
/// unit integral over the domain (area measure for the disc).
class EigenPair {
public:
    const BoundarySpec& spec() const noexcept { return spec_; }
    double mu0() const noexcept { return mu0_; }
    /// mu0^{1/4}
    double xi() const noexcept { return xi_; }
    double normalization() const noexcept { return c_; }

    /// phi(x); x in [-1, 1] for the strip, r in [0, 1] for the disc.
    double value(double x) const;
    /// d phi / dx (or d phi / dr).
    double gradient(double x) const;
    /// Laplacian (phi'' on the strip, radial Laplacian on the disc).
    double laplacian(double x) const;
    double bilaplacian(double x) const;

private:
    friend EigenPair principal_eigenpair(const BoundarySpec& spec);
    // unnormalized profile and its Laplacian powers: power 0, 1, 2 = phi, Lap, Lap^2
    double raw(double x, int laplacian_power) const;
    double raw_gradient(double x) const;

    BoundarySpec spec_;
    double mu0_ = 0.0;
    double xi_ = 0.0;
    double c_ = 1.0;
    // clamped strip: coefficient of the cos/cosh pair; clamped disc: I0(xi)/J0(xi)
    double ratio_ = 0.0;
};

/// Throws NoConvergence if the root search fails.
EigenPair principal_eigenpair(const BoundarySpec& spec);

/// sqrt(27 / (4 mu0)).
double epsilon_bar(double mu0);

/// Upper bound on the touchdown time: integral over s in (-1, 0) of
/// 1 / (eps^2 mu0 s + (1 + s)^-2). Throws BoundInapplicable when
/// eps >= epsilon_bar(mu0).
double touchdown_time_bound(double epsilon, double mu0);

}  // namespace quench::spectral
