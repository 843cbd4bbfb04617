#pragma once

// Self-similar quenching profiles. In the variables
// u = -1 + (t_c - t)^{1/3} v, eta = (x - x_c) / (eps^{1/2} (t_c - t)^{1/4})
// an equilibrium solves v'''' + (eta/4) v' - v/3 + v^{-2} = 0 with algebraic
// growth v ~ c0 |eta|^{4/3}. The far field is pinned by the Robin condition
// v/3 - (eta/4) v' = 0 imposed at the last two nodes of each end.

#include <cstddef>
#include <vector>

#include "quench/meshfield.hpp"

namespace quench::selfsim {

enum class SimilarityCase { Line, RadialOrigin };
enum class Branch { Monotone, Dimpled };

const char* to_string(SimilarityCase c);
const char* to_string(Branch b);

struct SimilarityProfile {
    SimilarityCase kind = SimilarityCase::Line;
    double length = 50.0;
    /// [-L, L] for Line, [0, L] for RadialOrigin, uniform.
    std::vector<double> grid;
    std::vector<double> vbar;
    double c0 = 0.0;           // least-squares estimate over the outer 10%
    double c0_endpoint = 0.0;  // v(L) / L^{4/3}
    Branch branch = Branch::Monotone;
    int critical_points = 0;
    int newton_iterations = 0;

    double step() const { return grid[1] - grid[0]; }
    /// Profile at eta (|eta| for the radial case); cubic interpolation on the
    /// grid, far-field series beyond it.
    double eval(double eta) const;
};

/// Cube root of c0^3 eta^4 + 3.
double initial_guess(double c0, double eta);
std::vector<double> initial_guess(double c0, const std::vector<double>& grid);

/// Grid with spacing 0.1: 2L/0.1 intervals on the line, L/0.1 radially.
std::size_t default_intervals(SimilarityCase kind, double length);

/// Damped Newton on the centred-difference discretization; intervals = 0
/// selects default_intervals. Throws NoConvergence when the iteration stalls
/// and IterateInvalid when v would turn nonpositive.
SimilarityProfile solve_similarity(SimilarityCase kind, double c0_init, double length = 50.0,
                                   std::size_t intervals = 0);

/// Max-norm of the discrete equation over rows not replaced by the far-field
/// closure.
double interior_residual(const SimilarityProfile& profile);

/// c0 |eta|^{4/3} (+ c1 |eta|^{-8/3} with c1 = 40 c0 / 81 + c0^{-2}).
/// Throws Unsupported for more than two terms.
double far_field_series(double c0, double eta, int n_terms);
double far_field_c1(double c0);

struct Spectrum {
    /// Real parts, descending.
    std::vector<double> eigenvalues;
    /// Imaginary parts matching `eigenvalues`; nonzero entries are kept.
    std::vector<double> imaginary;
    /// Real eigenvectors sampled on the profile grid (same order).
    std::vector<std::vector<double>> eigenvectors;
    double length = 0.0;
    std::size_t intervals = 0;
    /// True if some returned eigenvalue has |Im| above 1e-6 times the
    /// spectral radius.
    bool complex_detected = false;
};

/// Leading n_eigs eigenvalues of the linearization about `profile`, with the
/// Robin rows mu phi = phi/3 - (eta/4) phi' at the far-field nodes.
Spectrum stability_spectrum(const SimilarityProfile& profile, std::size_t n_eigs = 8);

/// Profile with v identically 3^{1/3} on the given grid; its spectrum is the
/// constant-state linearization.
SimilarityProfile constant_state(SimilarityCase kind, double length = 50.0,
                                 std::size_t intervals = 0);

/// Symmetry modes v/3 - (eta/4) v' (mu = 1) and v' (mu = 1/4) on the grid.
std::vector<double> time_translation_mode(const SimilarityProfile& profile);
std::vector<double> space_translation_mode(const SimilarityProfile& profile);

/// |<a, b>| / (|a| |b|).
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct RescaledSample {
    double eta;
    double v;
};

/// Similarity variables of a snapshot taken at time t, centred at x_c.
/// Samples the nodes plus interior points of every interval. Throws
/// InvalidTime for t >= t_c.
std::vector<RescaledSample> rescale_snapshot(const meshfield::MeshField& field, double t,
                                             double t_c, double x_c, double epsilon);

/// sup over samples with |eta| <= window of |v - vbar(eta)|.
double similarity_distance(const std::vector<RescaledSample>& samples,
                           const SimilarityProfile& profile, double window = 5.0);

}  // namespace quench::selfsim
