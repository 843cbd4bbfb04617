#pragma once

// Small-time boundary-layer asymptotics. Near the edge the deflection is
// u = f(t) v(eta, t) with eta = (1 - x) / (eps^{1/2} f^{1/4}); expanding v
// gives a hierarchy of linear fourth-order ODEs on the half line, whose first
// trough locates the touchdown points.

#include <array>
#include <cstddef>
#include <vector>

#include "quench/meshfield.hpp"

namespace quench::smalltime {

/// f(t) = 1 - (1 - 3t)^{1/3} on [0, 1/3]; throws OutOfDomain outside.
double f_of_t(double t);
/// Inverse of f on [0, 1].
double t_of_f(double f);
/// f'(t) = (1 - 3t)^{-2/3}, finite for t < 1/3.
double f_prime(double t);

/// One layer profile on the uniform eta grid together with its first three
/// derivatives (second-order centred differences).
struct LayerProfile {
    std::vector<double> v, d1, d2, d3;

    /// Interpolated derivative (order 0..3) at eta; beyond the grid the
    /// far-field constant (and zero derivatives) is returned.
    double eval(double eta, int order, double step) const;
};

/// The three retained terms. Strip: (v0, v1, v2), the coefficients of
/// f^0, f^1, f^2. Disc: (v0, v_{1/4}, v_{1/2}), the coefficients of s^0, s^1,
/// s^2 with s = eps^{1/2} f^{1/4}.
struct LayerProfiles {
    BoundarySpec spec;
    double length = 30.0;
    std::vector<double> grid;
    std::array<LayerProfile, 3> terms;

    double step() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
};

/// Solve the three linear BVPs in order on [0, length] with `intervals`
/// grid intervals. Throws TruncationTooSmall when the far field has not
/// flattened, SingularMatrix if the discretization is singular.
LayerProfiles solve_layer_hierarchy(const BoundarySpec& spec, double length = 30.0,
                                    std::size_t intervals = 3000);

/// Location of the first trough (eta0) and its two corrections. For the
/// strip these are (eta0, eta1, eta2) multiplying f^0, f^1, f^2; for the disc
/// (eta0, eta_{1/4}, eta_{1/2}) multiplying s^0, s^1, s^2.
struct TouchdownConstants {
    BoundarySpec spec;
    double eta0 = 0.0;
    double first = 0.0;
    double second = 0.0;
};

/// Throws NoCriticalPoint when v0' has no sign change on the grid.
TouchdownConstants touchdown_constants(const LayerProfiles& profiles);

enum class MatchingTerm { Plus, Minus };

/// Uniform small-time approximation. `terms` keeps the first 1..3 profiles.
/// For the strip the two edge layers are superposed and `matching` selects the
/// sign of the f(t) correction that removes the doubled far field.
double composite_solution(const LayerProfiles& profiles, double x, double t, double epsilon,
                          int terms = 3, MatchingTerm matching = MatchingTerm::Plus);

/// Predicted touchdown set at time t_c: {-x_c, +x_c} on the strip, {r_c} on
/// the disc. Throws PredictionOutOfRange if the prediction leaves (0, 1).
std::vector<double> predict_touchdown(const TouchdownConstants& constants, double epsilon,
                                      double t_c);

}  // namespace quench::smalltime
