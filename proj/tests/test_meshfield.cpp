#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "quench/errors.hpp"
#include "quench/meshfield.hpp"

using namespace quench;
using namespace quench::meshfield;

namespace {

Mesh random_mesh(std::mt19937& rng, std::size_t intervals, double a, double b) {
    std::uniform_real_distribution<double> w(0.3, 1.7);
    std::vector<double> x{0.0};
    for (std::size_t i = 0; i < intervals; ++i) x.push_back(x.back() + w(rng));
    const double scale = (b - a) / x.back();
    for (auto& v : x) v = a + v * scale;
    x.back() = b;
    return Mesh(x);
}

// p(x) = sum c_k x^k, derivative of order j
double poly(const std::vector<double>& c, double x, int j) {
    double s = 0.0;
    for (std::size_t k = static_cast<std::size_t>(j); k < c.size(); ++k) {
        double f = 1.0;
        for (int m = 0; m < j; ++m) f *= static_cast<double>(k - m);
        s += c[k] * f * std::pow(x, static_cast<double>(k) - j);
    }
    return s;
}

}  // namespace

TEST_SUITE("meshfield") {

TEST_CASE("shape function cardinality") {
    for (int f = 0; f < 2; ++f) {
        const auto fam = f == 0 ? ShapeFamily::L0 : ShapeFamily::L1;
        for (int k = 0; k < 4; ++k)
            for (int p = 0; p < 4; ++p)
                for (int node = 0; node < 2; ++node) {
                    const double expect = (node == f && k == p) ? 1.0 : 0.0;
                    CHECK(std::abs(shape_value(fam, k, p, node) - expect) <= 1e-13);
                }
    }
    CHECK(shape_value(ShapeFamily::L0, 0, 0, 0.0) == doctest::Approx(1.0));
    CHECK(shape_value(ShapeFamily::L0, 0, 0, 1.0) == doctest::Approx(0.0));
    CHECK(shape_value(ShapeFamily::L0, 1, 1, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("value shape functions form a partition of unity") {
    for (double s : {0.3, 0.7, 0.01, 0.5})
        CHECK(shape_value(ShapeFamily::L0, 0, 0, s) + shape_value(ShapeFamily::L1, 0, 0, s) ==
              doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("shape derivatives are consistent with finite differences") {
    const double h = 1e-5;
    for (int f = 0; f < 2; ++f) {
        const auto fam = f == 0 ? ShapeFamily::L0 : ShapeFamily::L1;
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j)
                for (double s : {0.2, 0.55, 0.9}) {
                    const double fd =
                        (shape_value(fam, k, j, s + h) - shape_value(fam, k, j, s - h)) / (2 * h);
                    CHECK(shape_value(fam, k, j + 1, s) == doctest::Approx(fd).epsilon(1e-6));
                }
    }
}

TEST_CASE("gauss points") {
    const auto r = gauss_points();
    CHECK(r[0] == doctest::Approx(0.069432).epsilon(1e-5));
    CHECK(r[0] + r[3] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r[1] + r[2] == doctest::Approx(1.0).epsilon(1e-15));
    const double wo = (18.0 - std::sqrt(30.0)) / 72.0, wi = (18.0 + std::sqrt(30.0)) / 72.0;
    const double w[4] = {wo, wi, wi, wo};
    for (int d = 0; d <= 7; ++d) {
        double q = 0.0;
        for (int i = 0; i < 4; ++i) q += w[i] * std::pow(r[i], d);
        CHECK(q == doctest::Approx(1.0 / (d + 1)).epsilon(1e-14));
    }
}

TEST_CASE("linear field is reproduced") {
    const Mesh mesh = Mesh::uniform(-1.0, 1.0, 7);
    const auto field = MeshField::sample(mesh, [](double x) { return Nodal{x, 1.0, 0.0, 0.0}; });
    for (double x = -1.0; x <= 1.0; x += 0.0371) {
        CHECK(interpolate(field, x, 0) == doctest::Approx(x).epsilon(1e-14));
        CHECK(interpolate(field, x, 1) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("property: degree-7 polynomials are reproduced exactly") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> c(8);
        for (auto& v : c) v = uni(rng);
        if (trial == 0) c = {0, 0, 0, 0, 0, 0, 0, 1};  // x^7
        const Mesh mesh = random_mesh(rng, 3 + trial, -1.0, 1.0);
        const auto field = MeshField::sample(mesh, [&](double x) {
            return Nodal{poly(c, x, 0), poly(c, x, 1), poly(c, x, 2), poly(c, x, 3)};
        });
        double hmin = 2.0;
        for (std::size_t k = 0; k < mesh.interval_count(); ++k) hmin = std::min(hmin, mesh.width(k));
        std::uniform_real_distribution<double> pt(-1.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            const double x = pt(rng);
            for (int j = 0; j <= 4; ++j) {
                const double exact = poly(c, x, j);
                // roundoff in the j-th derivative grows like h^-j
                CHECK(std::abs(interpolate(field, x, j) - exact) <=
                      1e-12 * std::pow(hmin, -j) * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST_CASE("property: interpolation at nodes returns the nodal data") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    const Mesh mesh = random_mesh(rng, 9, 0.0, 1.0);
    std::vector<Nodal> data(mesh.node_count());
    for (auto& n : data)
        for (auto& v : n) v = uni(rng);
    const MeshField field(mesh, data);
    for (std::size_t i = 0; i < mesh.node_count(); ++i)
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(interpolate(field, mesh.node(i), k) - data[i][k]) <=
                  1e-12 * std::max(1.0, std::abs(data[i][k])));
    for (std::size_t i = 0; i < mesh.interval_count(); ++i)
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(interpolate_local(field, i, 0.0, k) - data[i][k]) <= 1e-12 * 3);
            CHECK(std::abs(interpolate_local(field, i, 1.0, k) - data[i + 1][k]) <= 1e-9 * 3);
        }
}

TEST_CASE("property: constants are reproduced on any mesh") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const Mesh mesh = random_mesh(rng, 4 + trial, -1.0, 1.0);
        const auto field = MeshField::sample(mesh, [](double) { return Nodal{-0.37, 0, 0, 0}; });
        for (double x = -1.0; x <= 1.0; x += 0.0137)
            CHECK(interpolate(field, x, 0) == doctest::Approx(-0.37).epsilon(1e-14));
    }
}

TEST_CASE("property: interpolation depends only on the bounding nodes") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Mesh mesh = Mesh::uniform(0.0, 1.0, 6);
    std::vector<Nodal> data(mesh.node_count());
    for (auto& n : data)
        for (auto& v : n) v = uni(rng);
    const MeshField a(mesh, data);
    auto changed = data;
    changed[5] = Nodal{9, 9, 9, 9};
    changed[0] = Nodal{-9, 9, -9, 9};
    const MeshField b(mesh, changed);
    for (double x = mesh.node(2); x <= mesh.node(3); x += 0.01)
        for (int j = 0; j <= 4; ++j) CHECK(interpolate(a, x, j) == interpolate(b, x, j));
}

TEST_CASE("interpolation outside the domain is rejected") {
    const auto field = MeshField::sample(Mesh::uniform(0.0, 1.0, 3),
                                         [](double) { return Nodal{0, 0, 0, 0}; });
    CHECK_THROWS_AS(interpolate(field, 1.5, 0), OutOfDomain);
    CHECK_THROWS_AS(interpolate(field, -0.1, 0), OutOfDomain);
}

TEST_CASE("mesh must be strictly increasing") {
    CHECK_THROWS(Mesh(std::vector<double>{0.0, 0.5, 0.5, 1.0}));
    CHECK_THROWS(Mesh(std::vector<double>{0.0}));
}

TEST_CASE("boundary rows for all geometry and condition pairs") {
    auto expect = [](const BoundarySpec& spec, std::array<std::pair<Side, Nodal>, 4> rows) {
        const auto got = boundary_rows(spec);
        for (std::size_t r = 0; r < 4; ++r) {
            CHECK(got[r].side == rows[r].first);
            for (std::size_t k = 0; k < 4; ++k) CHECK(got[r].coeffs[k] == rows[r].second[k]);
        }
    };
    using L = Side;
    expect({Geometry::Strip, Condition::Clamped}, {{{L::Left, {1, 0, 0, 0}},
                                                    {L::Left, {0, 1, 0, 0}},
                                                    {L::Right, {1, 0, 0, 0}},
                                                    {L::Right, {0, 1, 0, 0}}}});
    expect({Geometry::Strip, Condition::Navier}, {{{L::Left, {1, 0, 0, 0}},
                                                   {L::Left, {0, 0, 1, 0}},
                                                   {L::Right, {1, 0, 0, 0}},
                                                   {L::Right, {0, 0, 1, 0}}}});
    expect({Geometry::Disc, Condition::Navier}, {{{L::Left, {0, 1, 0, 0}},
                                                  {L::Left, {0, 0, 0, 1}},
                                                  {L::Right, {1, 0, 0, 0}},
                                                  {L::Right, {0, 1, 1, 0}}}});
    expect({Geometry::Disc, Condition::Clamped}, {{{L::Left, {0, 1, 0, 0}},
                                                   {L::Left, {0, 0, 0, 1}},
                                                   {L::Right, {1, 0, 0, 0}},
                                                   {L::Right, {0, 1, 0, 0}}}});
}

TEST_CASE("geometry and condition names round trip") {
    for (auto g : {Geometry::Strip, Geometry::Disc}) CHECK(parse_geometry(to_string(g)) == g);
    for (auto c : {Condition::Clamped, Condition::Navier}) CHECK(parse_condition(to_string(c)) == c);
    CHECK_THROWS(parse_geometry("annulus"));
}

TEST_CASE("snapshot csv and sidecar round trip") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Mesh mesh = random_mesh(rng, 5, 0.0, 1.0);
    std::vector<Nodal> data(mesh.node_count());
    for (auto& n : data)
        for (auto& v : n) v = uni(rng) * 1e3;
    const MeshField field(mesh, data);
    std::stringstream ss;
    write_snapshot_csv(ss, field);
    CHECK(ss.str().rfind("x,u,u1,u2,u3\n", 0) == 0);
    const auto back = read_snapshot_csv(ss);
    REQUIRE(back.mesh().node_count() == mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        CHECK(back.mesh().node(i) == mesh.node(i));
        for (int k = 0; k < 4; ++k) CHECK(back.at(i)[k] == data[i][k]);
    }
    const SnapshotMeta meta{0.3125, 0.02, {Geometry::Disc, Condition::Navier}};
    const auto m2 = parse_snapshot_meta(snapshot_meta_json(meta));
    CHECK(m2.time == meta.time);
    CHECK(m2.epsilon == meta.epsilon);
    CHECK(m2.spec == meta.spec);
}

}  // TEST_SUITE
