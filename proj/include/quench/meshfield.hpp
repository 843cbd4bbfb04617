#pragma once

// Piecewise 7th-order Hermite representation on a moving 1D mesh. Each node
// carries u and its first three spatial derivatives; on [X_i, X_{i+1}] the
// field is expanded in the eight two-node shape functions L_{0,k}, L_{1,k}.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace quench {

enum class Geometry { Strip, Disc };
enum class Condition { Clamped, Navier };

struct BoundarySpec {
    Geometry geometry = Geometry::Strip;
    Condition condition = Condition::Clamped;

    /// Left and right ends of the computational interval: [-1, 1] for the
    /// strip, the radius [0, 1] for the disc.
    double left() const noexcept { return geometry == Geometry::Strip ? -1.0 : 0.0; }
    double right() const noexcept { return 1.0; }
    /// Spatial dimension of the radially symmetric problem (1 or 2).
    int dimension() const noexcept { return geometry == Geometry::Strip ? 1 : 2; }

    friend bool operator==(const BoundarySpec&, const BoundarySpec&) = default;
};

std::string to_string(Geometry g);
std::string to_string(Condition c);
Geometry parse_geometry(const std::string& s);
Condition parse_condition(const std::string& s);

}  // namespace quench

namespace quench::meshfield {

inline constexpr int kNodalOrders = 4;  // u, u', u'', u'''
using Nodal = std::array<double, kNodalOrders>;

enum class ShapeFamily { L0, L1 };

/// d^order/ds^order of L_{family,k}(s); order 0..4 (5..7 also valid).
double shape_value(ShapeFamily family, int k, int derivative_order, double s);

/// Order-4 Gauss-Legendre abscissae on (0, 1) in closed form.
std::array<double, 4> gauss_points();

/// Strictly increasing nodes X_0 < ... < X_{N+1}.
class Mesh {
public:
    explicit Mesh(std::vector<double> nodes);
    static Mesh uniform(double left, double right, std::size_t intervals);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t interval_count() const noexcept { return nodes_.size() - 1; }
    double node(std::size_t i) const { return nodes_[i]; }
    double width(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double left() const noexcept { return nodes_.front(); }
    double right() const noexcept { return nodes_.back(); }

    /// Interval index containing x (the last interval owns the right end).
    /// `hint` is tried first and updated; pass nullptr for a plain search.
    std::size_t locate(double x, std::size_t* hint = nullptr) const;

private:
    std::vector<double> nodes_;
};

/// Immutable snapshot: mesh plus nodal (u, u', u'', u''').
class MeshField {
public:
    MeshField(Mesh mesh, std::vector<Nodal> nodal);

    const Mesh& mesh() const noexcept { return mesh_; }
    const std::vector<Nodal>& nodal() const noexcept { return nodal_; }
    const Nodal& at(std::size_t i) const { return nodal_[i]; }

    /// Smallest nodal value of 1 + u.
    double min_gap() const;

    /// Sample an arbitrary function and its derivatives into nodal data.
    template <class F>
    static MeshField sample(Mesh mesh, F&& derivs) {
        std::vector<Nodal> data(mesh.node_count());
        for (std::size_t i = 0; i < data.size(); ++i) data[i] = derivs(mesh.node(i));
        return MeshField(std::move(mesh), std::move(data));
    }

private:
    Mesh mesh_;
    std::vector<Nodal> nodal_;
};

/// Value of the piecewise polynomial (derivative_order 0..4) at x.
/// Throws OutOfDomain outside [X_0, X_{N+1}].
double interpolate(const MeshField& field, double x, int derivative_order,
                   std::size_t* hint = nullptr);

/// Same, for a known interval index and local coordinate s in [0, 1].
double interpolate_local(const MeshField& field, std::size_t interval, double s,
                         int derivative_order);

enum class Side { Left, Right };

/// One linear constraint sum_k coeffs[k] * u^{(k)} = 0 at an end node.
struct NodalConstraint {
    Side side;
    Nodal coeffs;
};

/// The four end-node constraints for a geometry/condition pair. For the disc
/// the origin rows are u' = u''' = 0.
std::array<NodalConstraint, 4> boundary_rows(const BoundarySpec& spec);

struct SnapshotMeta {
    double time = 0.0;
    double epsilon = 0.0;
    BoundarySpec spec;
};

/// Columnar text: header "x,u,u1,u2,u3", one row per node, full precision.
void write_snapshot_csv(std::ostream& out, const MeshField& field);
MeshField read_snapshot_csv(std::istream& in);
/// JSON sidecar with time, epsilon, geometry and boundary condition.
std::string snapshot_meta_json(const SnapshotMeta& meta);
SnapshotMeta parse_snapshot_meta(const std::string& json);

}  // namespace quench::meshfield
