// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "quench/errors.hpp"
#include "quench/meshfield.hpp"
#include "quench/mmpde.hpp"
#include "quench/selfsim.hpp"
#include "quench/smalltime.hpp"
#include "quench/spectral.hpp"

using namespace quench;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

const BoundarySpec kStripClamped{Geometry::Strip, Condition::Clamped};
const BoundarySpec kDiscNavier{Geometry::Disc, Condition::Navier};

mmpde::SimConfig sim(BoundarySpec spec, double eps, std::size_t intervals) {
    mmpde::SimConfig c;
    c.spec = spec;
    c.epsilon = eps;
    c.n_intervals = intervals;
    return c;
}

void criterion1(Outcome& o) {
    const std::pair<BoundarySpec, std::pair<double, double>> ref[] = {
        {{Geometry::Strip, Condition::Navier}, {6.0881, 1.0530}},
        {{Geometry::Disc, Condition::Navier}, {33.4452, 0.4492}},
        {{Geometry::Strip, Condition::Clamped}, {31.2852, 0.4645}},
        {{Geometry::Disc, Condition::Clamped}, {104.3631, 0.2543}}};
    for (const auto& [spec, v] : ref) {
        const double mu = spectral::principal_eigenpair(spec).mu0();
        const double eb = spectral::epsilon_bar(mu);
        o.detail << " mu0=" << mu << " eps_bar=" << eb << ";";
        o.require(std::abs(mu - v.first) <= 1e-3 * v.first, "mu0 " + to_string(spec.geometry) + " " + to_string(spec.condition));
        o.require(std::abs(eb - v.second) <= 1e-3, "eps_bar " + to_string(spec.geometry) + " " + to_string(spec.condition));
    }
}

void criterion2(Outcome& o) {
    for (auto g : {Geometry::Strip, Geometry::Disc})
        for (auto c : {Condition::Clamped, Condition::Navier}) {
            const double mu = spectral::principal_eigenpair({g, c}).mu0();
            const double t0 = spectral::touchdown_time_bound(1e-7, mu);
            o.require(std::abs(t0 - 1.0 / 3.0) <= 1e-8, "limit 1/3");
            const double e1 = 0.01, e2 = 0.02;
            const double slope = (spectral::touchdown_time_bound(e2, mu) - spectral::touchdown_time_bound(e1, mu)) /
                                 (e2 * e2 - e1 * e1);
            o.require(std::abs(slope - mu / 30.0) <= 0.01 * mu / 30.0, "slope mu0/30");
            if (g == Geometry::Strip && c == Condition::Clamped)
                o.detail << " slope/(mu0/30)=" << slope / (mu / 30.0) << ";";
        }
    const double mu = spectral::principal_eigenpair(kStripClamped).mu0();
    for (double eps : {0.02, 0.1, 0.2}) {
        const auto r = mmpde::integrate(sim(kStripClamped, eps, 24));
        const double tbar = spectral::touchdown_time_bound(eps, mu);
        o.detail << " eps=" << eps << ": t_c=" << r.t_c << " < tbar=" << tbar << ";";
        o.require(r.outcome == mmpde::Outcome::Touchdown && r.t_c < tbar, "t_c < tbar at eps " + std::to_string(eps));
    }
}

void criterion3(Outcome& o) {
    const auto steady = mmpde::integrate(sim(kStripClamped, 0.5, 17));
    o.detail << " eps=0.5: " << mmpde::to_string(steady.outcome) << ";";
    o.require(steady.outcome == mmpde::Outcome::SteadyState, "steady state at 0.5");

    const auto central = mmpde::integrate(sim(kStripClamped, 0.2, 17));
    o.detail << " eps=0.2: t_c=" << central.t_c << " points=" << central.touchdown_points.size();
    if (!central.touchdown_points.empty()) o.detail << " x_c=" << central.touchdown_points[0];
    o.detail << ";";
    o.require(central.outcome == mmpde::Outcome::Touchdown && central.touchdown_points.size() == 1 &&
                  std::abs(central.touchdown_points[0]) <= 1e-3,
              "single point at the centre");
    o.require(std::abs(central.t_c - 0.3833) <= 2e-3, "t_c = 0.3833 +- 0.002 at eps 0.2");

    const auto pair = mmpde::integrate(sim(kStripClamped, 0.02, 24));
    o.detail << " eps=0.02: t_c=" << pair.t_c << " points=" << pair.touchdown_points.size();
    if (pair.touchdown_points.size() == 2)
        o.detail << " x=" << pair.touchdown_points[0] << "," << pair.touchdown_points[1];
    o.detail << ";";
    o.require(pair.touchdown_points.size() == 2 &&
                  std::abs(pair.touchdown_points[0] + pair.touchdown_points[1]) <= 1e-6,
              "two symmetric points at 0.02");
    o.require(std::abs(pair.t_c - 0.3240) <= 2e-3, "t_c = 0.3240 +- 0.002 at eps 0.02");
}

void criterion4(Outcome& o) {
    const auto strip = mmpde::find_epsilon_c(sim(kStripClamped, 0.1, 24), 0.02, 0.2, 1e-3, 8);
    const auto disc = mmpde::find_epsilon_c(sim(kDiscNavier, 0.1, 24), 0.02, 0.2, 1e-3, 8);
    o.detail << " strip eps_c=" << strip.epsilon_c << " (" << strip.simulations << " runs); disc eps_c="
             << disc.epsilon_c << " (" << disc.simulations << " runs);";
    o.require(std::abs(strip.epsilon_c - 0.066) <= 0.005, "strip eps_c");
    o.require(std::abs(disc.epsilon_c - 0.075) <= 0.005, "disc eps_c");
}

void criterion5(Outcome& o) {
    const auto s = smalltime::touchdown_constants(smalltime::solve_layer_hierarchy(kStripClamped));
    const auto d = smalltime::touchdown_constants(smalltime::solve_layer_hierarchy(kDiscNavier));
    o.detail << " strip (" << s.eta0 << ", " << s.first << ", " << s.second << "); disc (" << d.eta0 << ", "
             << d.first << ", " << d.second << ");";
    o.require(std::abs(s.eta0 - 3.7384) <= 1e-3 && std::abs(s.first + 0.6641) <= 1e-3 &&
                  std::abs(s.second - 0.1085) <= 1e-3,
              "strip constants");
    o.require(std::abs(d.eta0 - 2.8832) <= 1e-3 && std::abs(d.first - 0.3533) <= 1e-3 &&
                  std::abs(d.second - 0.9457) <= 1e-3,
              "disc constants");
}

void criterion6(Outcome& o) {
    const auto c = smalltime::touchdown_constants(smalltime::solve_layer_hierarchy(kStripClamped));
    for (double eps : {0.01, 0.02, 0.04}) {
        const auto r = mmpde::integrate(sim(kStripClamped, eps, 33));
        if (r.outcome != mmpde::Outcome::Touchdown || r.touchdown_points.empty()) {
            o.require(false, "touchdown at eps " + std::to_string(eps));
            continue;
        }
        const double xs = std::abs(r.touchdown_points.back());
        const double xp = smalltime::predict_touchdown(c, eps, r.t_c).back();
        const double rel = std::abs(xp - xs) / (1.0 - xs);
        o.detail << " eps=" << eps << ": sim " << xs << " pred " << xp << " err/(1-x)=" << rel << ";";
        o.require(rel <= 0.05, "location at eps " + std::to_string(eps));
    }
}

void criterion7(Outcome& o) {
    using selfsim::SimilarityCase;
    const std::pair<SimilarityCase, std::pair<double, double>> cases[] = {
        {SimilarityCase::Line, {0.1047, 0.9060}}, {SimilarityCase::RadialOrigin, {0.0966, 0.7265}}};
    for (const auto& [kind, expected] : cases) {
        std::vector<double> found;
        for (int k = 1; k <= 40; ++k) {
            try {
                found.push_back(selfsim::solve_similarity(kind, 0.05 * k).c0);
            } catch (const Error&) {
            }
        }
        std::sort(found.begin(), found.end());
        std::vector<double> branches;
        for (double c : found)
            if (branches.empty() || c - branches.back() > 1e-3) branches.push_back(c);
        o.detail << " " << selfsim::to_string(kind) << ":";
        for (double b : branches) o.detail << " " << b;
        o.detail << ";";
        o.require(branches.size() == 2, "two branches");
        if (branches.size() == 2) {
            o.require(std::abs(branches[0] - expected.first) <= 1e-3, "dimpled c0");
            o.require(std::abs(branches[1] - expected.second) <= 1e-3, "monotone c0");
        }
        // far field: adding the c1 term must reduce the mismatch
        const auto p = selfsim::solve_similarity(kind, 1.0);
        double e1 = 0.0, e2 = 0.0;
        for (double eta = 20.0; eta <= 30.0; eta += 0.5) {
            e1 = std::max(e1, std::abs(p.eval(eta) - selfsim::far_field_series(p.c0, eta, 1)));
            e2 = std::max(e2, std::abs(p.eval(eta) - selfsim::far_field_series(p.c0, eta, 2)));
        }
        o.detail << " c1=" << selfsim::far_field_c1(p.c0) << " far-field err " << e1 << " -> " << e2 << ";";
        o.require(e2 < e1, "c1 improves the far field");
    }
}

void criterion8(Outcome& o) {
    const double mono[8] = {1.0003, 0.2499, -0.1369, -0.4328, -0.6089, -0.8431, -1.1431, -1.4251};
    const double dimp[8] = {1.0000, 0.7740, 0.5347, 0.2499, -0.0828, -0.4464, -0.8269, -1.2151};
    double worst = 0.0, cos_min = 1.0;
    for (int b = 0; b < 2; ++b) {
        const auto p = selfsim::solve_similarity(selfsim::SimilarityCase::Line, b == 0 ? 1.0 : 0.12);
        const auto s = selfsim::stability_spectrum(p, 8);
        const double* ref = b == 0 ? mono : dimp;
        if (s.eigenvalues.size() != 8) {
            o.require(false, "eight eigenvalues");
            continue;
        }
        for (int k = 0; k < 8; ++k) worst = std::max(worst, std::abs(s.eigenvalues[k] - ref[k]));
        o.require(!s.complex_detected, "real spectrum");
        for (double mu : {1.0, 0.25}) {
            std::size_t best = 0;
            for (std::size_t k = 0; k < 8; ++k)
                if (std::abs(s.eigenvalues[k] - mu) < std::abs(s.eigenvalues[best] - mu)) best = k;
            const auto mode = mu == 1.0 ? selfsim::time_translation_mode(p) : selfsim::space_translation_mode(p);
            o.require(std::abs(s.eigenvalues[best] - mu) <= 1e-2, "symmetry eigenvalue present");
            cos_min = std::min(cos_min, selfsim::cosine_similarity(s.eigenvectors[best], mode));
        }
    }
    o.detail << " max |mu - reference| = " << worst << "; min cosine " << cos_min << ";";
    o.require(worst <= 1e-2, "reference spectrum to 1e-2");
    o.require(cos_min >= 0.999, "symmetry modes cosine >= 0.999");
    const auto cs = selfsim::stability_spectrum(selfsim::constant_state(selfsim::SimilarityCase::Line), 12);
    double cworst = 0.0;
    for (int k = 0; k <= 4; ++k) {
        double best = 1e9;
        for (double mu : cs.eigenvalues) best = std::min(best, std::abs(mu - (1.0 - k / 2.0)));
        cworst = std::max(cworst, best);
    }
    o.detail << " constant state max dev from 1-k/2: " << cworst << ";";
    o.require(cworst <= 1e-2, "constant state 1-k/2");
}

void criterion9(Outcome& o) {
    const auto line = selfsim::solve_similarity(selfsim::SimilarityCase::Line, 1.0);
    const auto radial = selfsim::solve_similarity(selfsim::SimilarityCase::RadialOrigin, 1.0);
    struct Case {
        const char* name;
        BoundarySpec spec;
        double eps;
        const selfsim::SimilarityProfile* profile;
    };
    const Case cases[] = {{"strip 0.2", kStripClamped, 0.2, &line},
                          {"disc 0.1", kDiscNavier, 0.1, &radial},
                          {"disc 0.02", kDiscNavier, 0.02, &line}};
    for (const auto& c : cases) {
        const auto r = mmpde::integrate(sim(c.spec, c.eps, 24));
        if (r.outcome != mmpde::Outcome::Touchdown || r.touchdown_points.empty()) {
            o.require(false, std::string("touchdown for ") + c.name);
            continue;
        }
        const double xc = r.touchdown_points.back();
        std::vector<double> dist;
        for (double level : {1e-1, 1e-2, 1e-3})
            for (const auto& s : r.snapshots)
                if (s.min_gap <= level * (1 + 1e-9) && s.min_gap > 0.5 * level) {
                    dist.push_back(selfsim::similarity_distance(
                        selfsim::rescale_snapshot(s.field, s.t, r.t_c, xc, c.eps), *c.profile));
                    break;
                }
        o.detail << " " << c.name << ":";
        for (double d : dist) o.detail << " " << d;
        o.detail << ";";
        if (dist.size() != 3) {
            o.require(false, std::string("three snapshots for ") + c.name);
            continue;
        }
        o.require(dist[1] < dist[0] && dist[2] < dist[1], std::string("monotone decrease for ") + c.name);
        o.require(dist[2] <= 0.05, std::string("final distance <= 0.05 for ") + c.name);
    }
}

void criterion10(Outcome& o) {
    using meshfield::ShapeFamily;
    double card = 0.0;
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) {
            const double d = k == j ? 1.0 : 0.0;
            card = std::max({card, std::abs(meshfield::shape_value(ShapeFamily::L0, k, j, 0.0) - d),
                             std::abs(meshfield::shape_value(ShapeFamily::L1, k, j, 1.0) - d),
                             std::abs(meshfield::shape_value(ShapeFamily::L0, k, j, 1.0)),
                             std::abs(meshfield::shape_value(ShapeFamily::L1, k, j, 0.0))});
        }
    o.detail << " cardinality " << card << ";";
    o.require(card <= 1e-13, "cardinality");

    // degree-7 exactness relative to the roundoff floor eps h^-j
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double exact_ratio = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> c(8), nodes{-1.0};
        for (auto& v : c) v = U(rng);
        for (int i = 0; i < 6 + trial; ++i) nodes.push_back(nodes.back() + 0.1 + 0.2 * (U(rng) + 1.0));
        for (auto& x : nodes) x = -1.0 + 2.0 * (x + 1.0) / (nodes.back() + 1.0);
        nodes.back() = 1.0;
        const meshfield::Mesh mesh(nodes);
        auto poly = [&](double x, int d) {
            double s = 0.0;
            for (int p = d; p < 8; ++p) {
                double coef = c[p];
                for (int q = 0; q < d; ++q) coef *= p - q;
                s += coef * std::pow(x, p - d);
            }
            return s;
        };
        const auto f = meshfield::MeshField::sample(mesh, [&](double x) {
            return meshfield::Nodal{poly(x, 0), poly(x, 1), poly(x, 2), poly(x, 3)};
        });
        double hmin = 2.0;
        for (std::size_t i = 0; i < mesh.interval_count(); ++i) hmin = std::min(hmin, mesh.width(i));
        for (double x = -1.0; x <= 1.0; x += 0.013)
            for (int j = 0; j <= 4; ++j)
                exact_ratio = std::max(exact_ratio, std::abs(meshfield::interpolate(f, x, j) - poly(x, j)) /
                                                        (1e-12 * std::pow(hmin, -j) * std::max(1.0, std::abs(poly(x, j)))));
    }
    o.detail << " degree-7 error / roundoff floor " << exact_ratio << ";";
    o.require(exact_ratio <= 1.0, "degree-7 exactness");

    // scaling invariance at a = 16 on an N = 8 state, and Jacobian consistency
    auto cfg = sim(kStripClamped, 0.1, 8);
    const mmpde::StateLayout lay{9};
    std::uniform_real_distribution<double> V(-0.3, 0.3);
    auto y = mmpde::initial_state(cfg);
    std::vector<double> yd(y.size());
    y[0] = 0.2;
    for (std::size_t i = 0; i < lay.nodes; ++i)
        for (std::size_t k = 0; k < 4; ++k) y[lay.u(i, k)] = V(rng);
    for (std::size_t i = 1; i + 1 < lay.nodes; ++i) y[lay.x(i)] += 0.2 * V(rng) / 8.0;
    for (auto& v : yd) v = V(rng);
    yd[0] = 0.5;
    const double a = 16.0;
    auto ys = y, yds = yd;
    ys[0] *= a;
    yds[0] *= a;
    for (std::size_t i = 0; i < lay.nodes; ++i) {
        ys[lay.u(i, 0)] = std::cbrt(a) * (1.0 + y[lay.u(i, 0)]) - 1.0;
        yds[lay.u(i, 0)] = std::cbrt(a) * yd[lay.u(i, 0)];
        for (std::size_t k = 1; k < 4; ++k) {
            const double s = std::cbrt(a) * std::pow(a, -0.25 * static_cast<double>(k));
            ys[lay.u(i, k)] *= s;
            yds[lay.u(i, k)] *= s;
        }
        ys[lay.x(i)] *= std::pow(a, 0.25);
        yds[lay.x(i)] *= std::pow(a, 0.25);
    }
    // collocation rows pick up exactly a^{1/3}, so zero residuals map to zero residuals
    const auto f0 = mmpde::assemble_dae(cfg, y, yd);
    const auto fs = mmpde::assemble_dae(cfg, ys, yds);
    double scale_res = 0.0;
    for (std::size_t r = 3; r < 3 + 4 * 8; ++r)
        scale_res = std::max(scale_res, std::abs(fs[r] - std::cbrt(a) * f0[r]) / std::max(1.0, std::abs(fs[r])));
    o.detail << " scaling residual " << scale_res << ";";
    o.require(scale_res <= 1e-8, "scaling invariance");

    const auto J = mmpde::assemble_jacobian(cfg, y, yd);
    double jac = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j)
        for (int which = 0; which < 2; ++which) {
            auto yp = y, ym = y, ydp = yd, ydm = yd;
            const double h = 1e-6;
            if (which == 0) {
                yp[j] += h;
                ym[j] -= h;
            } else {
                ydp[j] += h;
                ydm[j] -= h;
            }
            const auto fp = mmpde::assemble_dae(cfg, yp, ydp);
            const auto fm = mmpde::assemble_dae(cfg, ym, ydm);
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double ad = (which == 0 ? J.dy : J.dydot)[i * J.n + j];
                jac = std::max(jac, std::abs((fp[i] - fm[i]) / (2 * h) - ad) / std::max(1.0, std::abs(ad)));
            }
        }
    o.detail << " Jacobian FD mismatch " << jac << ";";
    o.require(jac <= 1e-6, "Jacobian consistency");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double limit_s;  // 0 = no runtime bound
        std::function<void(Outcome&)> run;
    };
    const Criterion criteria[] = {
        {1, "principal eigenvalues and epsilon bounds", 1.0, criterion1},
        {2, "touchdown-time bound", 300.0, criterion2},
        {3, "simulator regimes on the clamped strip", 0.0, criterion3},
        {4, "regime boundary epsilon_c", 3600.0, criterion4},
        {5, "boundary-layer constants", 30.0, criterion5},
        {6, "touchdown-location prediction", 0.0, criterion6},
        {7, "self-similar branches", 60.0, criterion7},
        {8, "stability spectra", 0.0, criterion8},
        {9, "convergence to self-similarity", 0.0, criterion9},
        {10, "discretization properties", 60.0, criterion10},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0.0 && secs >= c.limit_s) o.require(false, "runtime limit");
        failed += !o.pass;
        std::printf("%s criterion %d (%s, %.2f s):%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
