#include "quench/meshfield.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "quench/errors.hpp"

namespace quench {

std::string to_string(Geometry g) { return g == Geometry::Strip ? "strip" : "disc"; }
std::string to_string(Condition c) { return c == Condition::Clamped ? "clamped" : "navier"; }

Geometry parse_geometry(const std::string& s) {
    if (s == "strip") return Geometry::Strip;
    if (s == "disc") return Geometry::Disc;
    throw std::invalid_argument("unknown geometry '" + s + "'");
}

Condition parse_condition(const std::string& s) {
    if (s == "clamped") return Condition::Clamped;
    if (s == "navier") return Condition::Navier;
    throw std::invalid_argument("unknown boundary condition '" + s + "'");
}

}  // namespace quench

namespace quench::meshfield {

namespace {

using Poly = std::array<double, 8>;  // power basis, degree <= 7

Poly mul(const Poly& a, const Poly& b) {
    Poly c{};
    for (int i = 0; i < 8; ++i)
        for (int j = 0; i + j < 8; ++j) c[i + j] += a[i] * b[j];
    return c;
}

Poly poly(std::initializer_list<double> lowest_first) {
    Poly p{};
    int i = 0;
    for (double v : lowest_first) p[i++] = v;
    return p;
}

Poly power(const Poly& p, int n) {
    Poly r = poly({1.0});
    for (int i = 0; i < n; ++i) r = mul(r, p);
    return r;
}

Poly scale(Poly p, double f) {
    for (double& c : p) c *= f;
    return p;
}

struct ShapeBasis {
    // coeffs[family][k][derivative] as power-basis polynomials
    std::array<std::array<std::array<Poly, 8>, 4>, 2> coeffs{};

    ShapeBasis() {
        const Poly s = poly({0.0, 1.0});
        const Poly sm1 = poly({-1.0, 1.0});
        const Poly sm1_4 = power(sm1, 4);
        const Poly s4 = power(s, 4);
        std::array<Poly, 4> l0 = {
            mul(poly({1.0, 4.0, 10.0, 20.0}), sm1_4),
            mul(mul(s, poly({1.0, 4.0, 10.0})), sm1_4),
            mul(scale(power(s, 2), 0.5), mul(poly({1.0, 4.0}), sm1_4)),
            mul(scale(power(s, 3), 1.0 / 6.0), sm1_4),
        };
        std::array<Poly, 4> l1 = {
            scale(mul(s4, poly({-35.0, 84.0, -70.0, 20.0})), -1.0),
            mul(mul(s4, sm1), poly({15.0, -24.0, 10.0})),
            scale(mul(mul(s4, power(sm1, 2)), poly({-5.0, 4.0})), -0.5),
            mul(scale(s4, 1.0 / 6.0), power(sm1, 3)),
        };
        for (int k = 0; k < 4; ++k) {
            coeffs[0][k][0] = l0[k];
            coeffs[1][k][0] = l1[k];
            for (int f = 0; f < 2; ++f)
                for (int d = 1; d < 8; ++d) {
                    Poly q{};
                    const Poly& p = coeffs[f][k][d - 1];
                    for (int i = 1; i < 8; ++i) q[i - 1] = i * p[i];
                    coeffs[f][k][d] = q;
                }
        }
    }
};

const ShapeBasis& basis() {
    static const ShapeBasis b;
    return b;
}

double horner(const Poly& p, double s) {
    double v = 0.0;
    for (int i = 7; i >= 0; --i) v = v * s + p[i];
    return v;
}

}  // namespace

double shape_value(ShapeFamily family, int k, int derivative_order, double s) {
    if (k < 0 || k > 3 || derivative_order < 0 || derivative_order > 7)
        throw std::invalid_argument("shape_value: index out of range");
    return horner(basis().coeffs[family == ShapeFamily::L0 ? 0 : 1][k][derivative_order], s);
}

std::array<double, 4> gauss_points() {
    const double r30 = std::sqrt(30.0);
    const double rho1 = 0.5 - std::sqrt(525.0 + 70.0 * r30) / 70.0;
    const double rho2 = 0.5 - std::sqrt(525.0 - 70.0 * r30) / 70.0;
    return {rho1, rho2, 1.0 - rho2, 1.0 - rho1};
}

Mesh::Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("Mesh: need at least two nodes");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
        if (!(nodes_[i + 1] > nodes_[i]))
            throw MeshTangled("nodes not strictly increasing at index " + std::to_string(i));
}

Mesh Mesh::uniform(double left, double right, std::size_t intervals) {
    if (intervals == 0) throw std::invalid_argument("Mesh::uniform: zero intervals");
    std::vector<double> x(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        x[i] = left + (right - left) * static_cast<double>(i) / static_cast<double>(intervals);
    x.back() = right;
    return Mesh(std::move(x));
}

std::size_t Mesh::locate(double x, std::size_t* hint) const {
    if (!(x >= nodes_.front() && x <= nodes_.back()))
        throw OutOfDomain("x = " + std::to_string(x) + " outside [" +
                          std::to_string(nodes_.front()) + ", " + std::to_string(nodes_.back()) +
                          "]");
    const std::size_t last = interval_count() - 1;
    if (hint && *hint <= last && x >= nodes_[*hint] && x <= nodes_[*hint + 1]) return *hint;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    i = std::min(i, last);
    if (hint) *hint = i;
    return i;
}

MeshField::MeshField(Mesh mesh, std::vector<Nodal> nodal)
    : mesh_(std::move(mesh)), nodal_(std::move(nodal)) {
    if (nodal_.size() != mesh_.node_count())
        throw std::invalid_argument("MeshField: nodal data does not match mesh");
}

double MeshField::min_gap() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& n : nodal_) m = std::min(m, 1.0 + n[0]);
    return m;
}

double interpolate_local(const MeshField& field, std::size_t interval, double s,
                         int derivative_order) {
    if (derivative_order < 0 || derivative_order > 4)
        throw std::invalid_argument("interpolate: derivative order must be 0..4");
    const double h = field.mesh().width(interval);
    const Nodal& a = field.at(interval);
    const Nodal& b = field.at(interval + 1);
    const auto& c = basis().coeffs;
    double sum = 0.0;
    double hk = std::pow(h, -derivative_order);  // H^{k - j} starting at k = 0
    for (int k = 0; k < 4; ++k) {
        sum += (a[k] * horner(c[0][k][derivative_order], s) +
                b[k] * horner(c[1][k][derivative_order], s)) *
               hk;
        hk *= h;
    }
    return sum;
}

double interpolate(const MeshField& field, double x, int derivative_order, std::size_t* hint) {
    const std::size_t i = field.mesh().locate(x, hint);
    const double s = (x - field.mesh().node(i)) / field.mesh().width(i);
    return interpolate_local(field, i, std::clamp(s, 0.0, 1.0), derivative_order);
}

std::array<NodalConstraint, 4> boundary_rows(const BoundarySpec& spec) {
    auto row = [](Side side, int k) {
        NodalConstraint c{side, {0.0, 0.0, 0.0, 0.0}};
        c.coeffs[k] = 1.0;
        return c;
    };
    const bool clamped = spec.condition == Condition::Clamped;
    if (spec.geometry == Geometry::Strip) {
        const int second = clamped ? 1 : 2;
        return {row(Side::Left, 0), row(Side::Left, second), row(Side::Right, 0),
                row(Side::Right, second)};
    }
    NodalConstraint outer = row(Side::Right, 1);
    if (!clamped) outer.coeffs = {0.0, 1.0, 1.0, 0.0};  // u'' + u'/r at r = 1
    return {row(Side::Left, 1), row(Side::Left, 3), row(Side::Right, 0), outer};
}

void write_snapshot_csv(std::ostream& out, const MeshField& field) {
    out << "x,u,u1,u2,u3\n";
    out << std::scientific << std::setprecision(17);
    for (std::size_t i = 0; i < field.mesh().node_count(); ++i) {
        const Nodal& n = field.at(i);
        out << field.mesh().node(i) << ',' << n[0] << ',' << n[1] << ',' << n[2] << ',' << n[3]
            << '\n';
    }
}

MeshField read_snapshot_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,u,u1,u2,u3", 0) != 0)
        throw std::runtime_error("snapshot CSV: missing header");
    std::vector<double> x;
    std::vector<Nodal> data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::array<double, 5> row{};
        for (double& v : row) {
            std::string cell;
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("snapshot CSV: short row");
            v = std::stod(cell);
        }
        x.push_back(row[0]);
        data.push_back({row[1], row[2], row[3], row[4]});
    }
    return MeshField(Mesh(std::move(x)), std::move(data));
}

std::string snapshot_meta_json(const SnapshotMeta& meta) {
    nlohmann::json j;
    j["time"] = meta.time;
    j["epsilon"] = meta.epsilon;
    j["geometry"] = to_string(meta.spec.geometry);
    j["bc"] = to_string(meta.spec.condition);
    return j.dump(2);
}

SnapshotMeta parse_snapshot_meta(const std::string& json) {
    const auto j = nlohmann::json::parse(json);
    SnapshotMeta m;
    m.time = j.at("time").get<double>();
    m.epsilon = j.at("epsilon").get<double>();
    m.spec.geometry = parse_geometry(j.at("geometry").get<std::string>());
    m.spec.condition = parse_condition(j.at("bc").get<std::string>());
    return m;
}

}  // namespace quench::meshfield
