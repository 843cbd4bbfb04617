#pragma once

// Adaptive moving-mesh simulator. The collocation equations for
// u_t = -eps^2 Delta^2 u - (1+u)^{-2}, the relaxed equidistribution equation
// for the nodes and the rescaled time dt/dtau = 1 / max M are integrated
// together as one implicit DAE F(y, y') = 0 in the computational time tau.

#include <cstddef>
#include <utility>
#include <vector>

#include "quench/meshfield.hpp"

namespace quench::mmpde {

struct SimConfig {
    double epsilon = 0.2;
    BoundarySpec spec{};
    /// Number of mesh intervals (N + 1 for N interior nodes).
    std::size_t n_intervals = 17;
    double gamma = 1e-4;
    double touchdown_threshold = 1e-3;
    double steady_tol = 1e-6;
    double rel_tol = 1e-7;
    double abs_tol = 1e-9;
    double tau_max = 1e3;
    std::size_t max_steps = 200000;
    /// Physical times at which snapshots are stored (in addition to the
    /// decades of the minimum gap and the final state).
    std::vector<double> snapshot_times;

    void validate() const;
};

enum class Outcome { Touchdown, SteadyState, Inconclusive };
const char* to_string(Outcome o);

struct Snapshot {
    double t;
    double min_gap;
    meshfield::MeshField field;
};

struct SimResult {
    Outcome outcome = Outcome::Inconclusive;
    /// Extrapolated touchdown time (Touchdown only).
    double t_c = 0.0;
    double t_final = 0.0;
    double tau_final = 0.0;
    double final_gap = 1.0;
    std::vector<double> touchdown_points;
    std::vector<Snapshot> snapshots;  // strictly increasing in t; last is final
    std::vector<std::pair<double, double>> min_gap_history;  // (t, min nodal 1+u)
    std::size_t steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t jacobians = 0;

    const Snapshot& final_snapshot() const { return snapshots.back(); }
};

struct MonitorSample {
    std::vector<double> values;  // M(X_i)
    double integral_term = 0.0;
};

/// Pointwise (1+u)^{-3} plus its trapezoid integral over the nodes (radial
/// line integral on the disc). Throws TouchdownReached for a nonpositive gap.
MonitorSample monitor(const meshfield::MeshField& field);

/// Layout of the DAE unknown y = (t, u_0^{(0..3)}, ..., u_{N+1}^{(0..3)}, X_0..X_{N+1}).
struct StateLayout {
    std::size_t nodes;
    std::size_t size() const { return 1 + 5 * nodes; }
    std::size_t t() const { return 0; }
    std::size_t u(std::size_t node, std::size_t order) const { return 1 + 4 * node + order; }
    std::size_t x(std::size_t node) const { return 1 + 4 * nodes + node; }
};

/// Residual F(y, y') of the DAE. Row order: rescaled-time row, the u block
/// (left boundary rows, four collocation rows per interval, right boundary
/// rows), then the mesh block (fixed left end, N mesh rows, fixed right end).
/// Throws MeshTangled or TouchdownReached for inadmissible states.
std::vector<double> assemble_dae(const SimConfig& config, const std::vector<double>& y,
                                 const std::vector<double>& ydot);

/// Dense Jacobians dF/dy and dF/dy' (row-major, size n x n) by forward-mode
/// differentiation.
struct DaeJacobian {
    std::size_t n = 0;
    std::vector<double> dy;
    std::vector<double> dydot;
};
DaeJacobian assemble_jacobian(const SimConfig& config, const std::vector<double>& y,
                              const std::vector<double>& ydot);

/// Initial state: t = 0, u = 0, uniform mesh.
std::vector<double> initial_state(const SimConfig& config);
/// Split a state vector into the physical time and field.
meshfield::MeshField field_of(const SimConfig& config, const std::vector<double>& y);

/// Integrate until touchdown, steady state or tau_max. Throws
/// StiffnessFailure when the step size underflows.
SimResult integrate(const SimConfig& config);

/// Local minima of 1+u in the final snapshot whose gap is within 10x of the
/// global minimum; a symmetric strip pair is reported as -x_c, +x_c.
std::vector<double> extract_touchdown_points(const SimResult& result);
std::vector<double> extract_touchdown_points(const meshfield::MeshField& field,
                                             const BoundarySpec& spec);

/// True when some touchdown point lies away from the centre (|x| > 1e-3).
bool off_center(const std::vector<double>& points);

struct EpsilonSearch {
    double epsilon_c = 0.0;
    double lo = 0.0;  // off-centre regime
    double hi = 0.0;  // central regime
    std::size_t simulations = 0;
};

/// Regime boundary between off-centre and central touchdown. Probes run at
/// `base` with epsilon replaced, stopping at a gap of 1e-2; up to `jobs`
/// probes run concurrently. Throws InvalidBracket when both ends fall in the
/// same regime.
EpsilonSearch find_epsilon_c(const SimConfig& base, double lo, double hi, double tol = 1e-3,
                             unsigned jobs = 1);

}  // namespace quench::mmpde
