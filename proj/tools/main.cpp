// quench: command-line front end for the simulator, the asymptotic and
// similarity computations, and the reproduction harness.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "output.hpp"
#include "quench/errors.hpp"
#include "quench/meshfield.hpp"
#include "quench/mmpde.hpp"
#include "quench/selfsim.hpp"
#include "quench/smalltime.hpp"
#include "quench/spectral.hpp"

#ifndef QUENCH_REFERENCE
#define QUENCH_REFERENCE "data/reference.json"
#endif

using nlohmann::json;
using quench::cli::fmt;
using quench::cli::OutputSet;

namespace {

struct SimFlags {
    std::string geometry = "strip";
    std::string bc = "clamped";
    double eps = 0.0;
    std::size_t n = 23;  // interior nodes
    double gamma = 1e-4;
    double threshold = 1e-3;
    std::vector<double> snapshot_times;

    quench::mmpde::SimConfig config(double epsilon) const {
        quench::mmpde::SimConfig c;
        c.spec = {quench::parse_geometry(geometry), quench::parse_condition(bc)};
        c.epsilon = epsilon;
        c.n_intervals = n + 1;
        c.gamma = gamma;
        c.touchdown_threshold = threshold;
        c.snapshot_times = snapshot_times;
        std::sort(c.snapshot_times.begin(), c.snapshot_times.end());
        return c;
    }

    json echo() const {
        return {{"geometry", geometry}, {"bc", bc},         {"n", n},
                {"gamma", gamma},       {"threshold", threshold}, {"snapshot_times", snapshot_times}};
    }
};

void add_spec_flags(CLI::App* cmd, SimFlags& f) {
    cmd->add_option("--geometry", f.geometry, "strip or disc")
        ->check(CLI::IsMember({"strip", "disc"}))
        ->capture_default_str();
    cmd->add_option("--bc", f.bc, "clamped or navier")
        ->check(CLI::IsMember({"clamped", "navier"}))
        ->capture_default_str();
}

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
    add_spec_flags(cmd, f);
    cmd->add_option("--n", f.n, "interior mesh nodes")->check(CLI::Range(1, 4096))->capture_default_str();
    cmd->add_option("--gamma", f.gamma, "mesh relaxation time")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--threshold", f.threshold, "stop when min(1+u) falls below this")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--snapshot-times", f.snapshot_times, "physical output times")->delimiter(',');
}

json result_json(const quench::mmpde::SimResult& r) {
    json j;
    j["outcome"] = quench::mmpde::to_string(r.outcome);
    if (r.outcome == quench::mmpde::Outcome::Touchdown) j["t_c"] = r.t_c;
    j["t_final"] = r.t_final;
    j["tau_final"] = r.tau_final;
    j["final_gap"] = r.final_gap;
    j["touchdown_points"] = r.touchdown_points;
    j["steps"] = r.steps;
    j["rejected_steps"] = r.rejected_steps;
    j["jacobians"] = r.jacobians;
    return j;
}

// ---------------------------------------------------------------------------

void cmd_constants(OutputSet& out) {
    json entries = json::array();
    std::vector<std::vector<std::string>> rows;
    for (auto g : {quench::Geometry::Strip, quench::Geometry::Disc})
        for (auto c : {quench::Condition::Clamped, quench::Condition::Navier}) {
            const auto e = quench::spectral::principal_eigenpair({g, c});
            const double eb = quench::spectral::epsilon_bar(e.mu0());
            entries.push_back({{"geometry", quench::to_string(g)},
                               {"bc", quench::to_string(c)},
                               {"mu0", e.mu0()},
                               {"epsilon_bar", eb}});
            rows.push_back({quench::to_string(g), quench::to_string(c), fmt(e.mu0()), fmt(eb)});
        }
    out.write_json("constants.json", {{"entries", entries}});
    out.write_csv("constants.csv", {"geometry", "bc", "mu0", "epsilon_bar"}, rows);
}

void cmd_simulate(OutputSet& out, const SimFlags& f) {
    const auto cfg = f.config(f.eps);
    const auto r = quench::mmpde::integrate(cfg);
    json snaps = json::array();
    for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        const auto& s = r.snapshots[k];
        char name[64];
        std::snprintf(name, sizeof name, "snapshots/snapshot_%03zu", k);
        std::ostringstream csv;
        quench::meshfield::write_snapshot_csv(csv, s.field);
        out.write_text(std::string(name) + ".csv", csv.str());
        out.write_text(std::string(name) + ".json",
                       quench::meshfield::snapshot_meta_json({s.t, cfg.epsilon, cfg.spec}) + "\n");
        snaps.push_back({{"file", std::string(name) + ".csv"}, {"t", s.t}, {"min_gap", s.min_gap}});
    }
    std::vector<std::vector<std::string>> hist;
    for (const auto& [t, g] : r.min_gap_history) hist.push_back({fmt(t), fmt(g)});
    out.write_csv("min_gap_history.csv", {"t", "min_gap"}, hist);
    json j = result_json(r);
    j["epsilon"] = cfg.epsilon;
    j["snapshots"] = snaps;
    out.write_json("result.json", j);
}

void cmd_sweep(OutputSet& out, const SimFlags& f, const std::vector<double>& eps_list, unsigned jobs) {
    struct Row {
        double eps;
        json result;
        std::string error;
    };
    auto run = [&f](double eps) -> Row {
        try {
            return {eps, result_json(quench::mmpde::integrate(f.config(eps))), ""};
        } catch (const std::exception& e) {
            return {eps, json(), e.what()};
        }
    };
    std::vector<Row> rows;
    jobs = std::max(1u, jobs);
    for (std::size_t i = 0; i < eps_list.size(); i += jobs) {
        std::vector<std::future<Row>> batch;
        for (std::size_t k = i; k < std::min(eps_list.size(), i + jobs); ++k)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run,
                                       eps_list[k]));
        for (auto& b : batch) rows.push_back(b.get());
    }
    std::vector<std::vector<std::string>> csv;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        json j = r.error.empty() ? r.result : json{{"error", r.error}};
        j["epsilon"] = r.eps;
        out.write_json("runs/run_" + std::to_string(k) + ".json", j);
        if (!r.error.empty()) {
            csv.push_back({fmt(r.eps), "error", "", "0", "", "", r.error});
            continue;
        }
        const auto pts = r.result["touchdown_points"].get<std::vector<double>>();
        csv.push_back({fmt(r.eps), r.result["outcome"].get<std::string>(),
                       r.result.contains("t_c") ? fmt(r.result["t_c"].get<double>()) : "",
                       std::to_string(pts.size()), pts.size() > 0 ? fmt(pts[0]) : "",
                       pts.size() > 1 ? fmt(pts[1]) : "", ""});
    }
    out.write_csv("sweep.csv", {"epsilon", "outcome", "t_c", "point_count", "x_c_1", "x_c_2", "error"}, csv);
}

void cmd_predict(OutputSet& out, const SimFlags& f, double tc) {
    std::string source = "given";
    if (!(tc > 0.0)) {
        const auto r = quench::mmpde::integrate(f.config(f.eps));
        if (r.outcome == quench::mmpde::Outcome::Touchdown) {
            tc = r.t_c;
            source = "simulated";
        } else {
            tc = 1.0 / 3.0;
            source = "default";
        }
    }
    const quench::BoundarySpec spec{quench::parse_geometry(f.geometry), quench::parse_condition(f.bc)};
    const auto c = quench::smalltime::touchdown_constants(quench::smalltime::solve_layer_hierarchy(spec));
    const auto pts = quench::smalltime::predict_touchdown(c, f.eps, tc);
    out.write_json("prediction.json",
                   {{"epsilon", f.eps},
                    {"t_c", tc},
                    {"t_c_source", source},
                    {"eta_constants", {{"eta0", c.eta0}, {"first", c.first}, {"second", c.second}}},
                    {"locations", pts}});
}

void cmd_layer_profiles(OutputSet& out, const SimFlags& f, double length, std::size_t intervals) {
    const quench::BoundarySpec spec{quench::parse_geometry(f.geometry), quench::parse_condition(f.bc)};
    const auto p = quench::smalltime::solve_layer_hierarchy(spec, length, intervals);
    const auto c = quench::smalltime::touchdown_constants(p);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
        std::vector<std::string> row{fmt(p.grid[j])};
        for (const auto& t : p.terms)
            for (const auto* d : {&t.v, &t.d1, &t.d2, &t.d3}) row.push_back(fmt((*d)[j]));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"eta"};
    for (int k = 0; k < 3; ++k)
        for (const char* suffix : {"", "_1", "_2", "_3"})
            header.push_back("v" + std::to_string(k) + suffix);
    out.write_csv("layer_profiles.csv", header, rows);
    out.write_json("layer_constants.json",
                   {{"geometry", f.geometry}, {"bc", f.bc}, {"eta0", c.eta0}, {"first", c.first}, {"second", c.second}});
}

quench::selfsim::SimilarityCase parse_case(const std::string& s) {
    if (s == "line") return quench::selfsim::SimilarityCase::Line;
    if (s == "radial") return quench::selfsim::SimilarityCase::RadialOrigin;
    throw std::invalid_argument("unknown similarity case '" + s + "'");
}

void cmd_similarity(OutputSet& out, const std::string& kind, double c0_init, double length,
                    std::size_t intervals) {
    const auto p = quench::selfsim::solve_similarity(parse_case(kind), c0_init, length, intervals);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < p.grid.size(); ++j) rows.push_back({fmt(p.grid[j]), fmt(p.vbar[j])});
    out.write_csv("similarity_profile.csv", {"eta", "vbar"}, rows);
    out.write_json("similarity_profile.json", {{"case", kind},
                                               {"branch", quench::selfsim::to_string(p.branch)},
                                               {"c0", p.c0},
                                               {"c0_endpoint", p.c0_endpoint},
                                               {"c1", quench::selfsim::far_field_c1(p.c0)},
                                               {"critical_points", p.critical_points},
                                               {"length", p.length},
                                               {"residual", quench::selfsim::interior_residual(p)}});
}

void cmd_stability(OutputSet& out, const std::string& kind, double c0_init, double length,
                   std::size_t intervals, std::size_t count, bool constant) {
    const auto c = parse_case(kind);
    const auto p = constant ? quench::selfsim::constant_state(c, length, intervals)
                            : quench::selfsim::solve_similarity(c, c0_init, length, intervals);
    const auto s = quench::selfsim::stability_spectrum(p, count);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
        rows.push_back({std::to_string(k), fmt(s.eigenvalues[k]), fmt(s.imaginary[k])});
    out.write_csv("spectrum.csv", {"index", "real", "imag"}, rows);
    out.write_json("spectrum.json", {{"case", kind},
                                     {"profile", constant ? "constant" : quench::selfsim::to_string(p.branch)},
                                     {"c0", p.c0},
                                     {"eigenvalues", s.eigenvalues},
                                     {"imaginary", s.imaginary},
                                     {"complex_detected", s.complex_detected}});
}

// ---------------------------------------------------------------------------
// reproduction harness

struct Check {
    std::string name;
    double computed;
    double reference;
    double tolerance;
    bool relative;
    bool pass() const {
        const double err = std::abs(computed - reference);
        return relative ? err <= tolerance * std::abs(reference) : err <= tolerance;
    }
};

bool relative_tol(const json& t) { return t.at("kind").get<std::string>() == "relative"; }

std::vector<Check> reproduce_table1(const json& ref) {
    std::vector<Check> out;
    const double tol = ref.at("tolerance").at("value");
    for (const auto& e : ref.at("entries")) {
        const std::string g = e.at("geometry"), c = e.at("bc");
        const auto pair = quench::spectral::principal_eigenpair({quench::parse_geometry(g), quench::parse_condition(c)});
        out.push_back({"mu0 " + g + " " + c, pair.mu0(), e.at("mu0"), tol, relative_tol(ref.at("tolerance"))});
        out.push_back({"epsilon_bar " + g + " " + c, quench::spectral::epsilon_bar(pair.mu0()),
                       e.at("epsilon_bar"), tol, relative_tol(ref.at("tolerance"))});
    }
    return out;
}

std::vector<Check> reproduce_table2(const json& ref) {
    std::vector<Check> out;
    const double tol = ref.at("tolerance").at("value");
    const double length = ref.at("length");
    const std::size_t intervals = ref.at("intervals");
    for (const char* branch : {"monotone", "dimpled"}) {
        const double init = std::string(branch) == "monotone" ? 1.0 : 0.12;
        const auto p = quench::selfsim::solve_similarity(quench::selfsim::SimilarityCase::Line, init, length, intervals);
        const auto expected = ref.at(branch).get<std::vector<double>>();
        const auto s = quench::selfsim::stability_spectrum(p, expected.size());
        for (std::size_t k = 0; k < expected.size(); ++k)
            out.push_back({std::string(branch) + " mu" + std::to_string(k),
                           k < s.eigenvalues.size() ? s.eigenvalues[k] : NAN, expected[k], tol,
                           relative_tol(ref.at("tolerance"))});
    }
    return out;
}

std::vector<Check> reproduce_constants_eta(const json& ref) {
    std::vector<Check> out;
    const double tol = ref.at("tolerance").at("value");
    const std::pair<const char*, quench::BoundarySpec> cases[] = {
        {"strip_clamped", {quench::Geometry::Strip, quench::Condition::Clamped}},
        {"disc_navier", {quench::Geometry::Disc, quench::Condition::Navier}}};
    for (const auto& [key, spec] : cases) {
        const auto c = quench::smalltime::touchdown_constants(quench::smalltime::solve_layer_hierarchy(spec));
        const auto& r = ref.at(key);
        const bool rel = relative_tol(ref.at("tolerance"));
        out.push_back({std::string(key) + " eta0", c.eta0, r.at("eta0"), tol, rel});
        out.push_back({std::string(key) + " first", c.first, r.at("first"), tol, rel});
        out.push_back({std::string(key) + " second", c.second, r.at("second"), tol, rel});
    }
    return out;
}

std::vector<Check> reproduce_c0(const json& ref) {
    std::vector<Check> out;
    const double tol = ref.at("tolerance").at("value");
    for (const auto& e : ref.at("entries")) {
        const std::string kind = e.at("case"), branch = e.at("branch");
        const auto p = quench::selfsim::solve_similarity(parse_case(kind), e.at("c0_init"));
        const bool branch_ok = branch == quench::selfsim::to_string(p.branch);
        out.push_back({"c0 " + kind + " " + branch, branch_ok ? p.c0 : NAN, e.at("c0"), tol,
                       relative_tol(ref.at("tolerance"))});
    }
    return out;
}

std::vector<Check> reproduce_fig_touchdown(const json& ref, unsigned jobs) {
    const quench::BoundarySpec spec{quench::parse_geometry(ref.at("geometry")), quench::parse_condition(ref.at("bc"))};
    const double frac = ref.at("tolerance").at("value");
    const auto eps = ref.at("epsilons").get<std::vector<double>>();
    const std::size_t intervals = ref.at("intervals");
    const auto constants = quench::smalltime::touchdown_constants(quench::smalltime::solve_layer_hierarchy(spec));
    auto simulate = [&](double e) {
        quench::mmpde::SimConfig c;
        c.spec = spec;
        c.epsilon = e;
        c.n_intervals = intervals;
        return quench::mmpde::integrate(c);
    };
    std::vector<quench::mmpde::SimResult> runs;
    jobs = std::max(1u, jobs);
    for (std::size_t i = 0; i < eps.size(); i += jobs) {
        std::vector<std::future<quench::mmpde::SimResult>> batch;
        for (std::size_t k = i; k < std::min(eps.size(), i + jobs); ++k)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, simulate, eps[k]));
        for (auto& b : batch) runs.push_back(b.get());
    }
    std::vector<Check> out;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const auto& r = runs[k];
        if (r.outcome != quench::mmpde::Outcome::Touchdown || r.touchdown_points.empty())
            throw quench::NoConvergence("no touchdown at epsilon " + std::to_string(eps[k]), r.final_gap);
        const double xs = std::abs(r.touchdown_points.back());
        const double xp = quench::smalltime::predict_touchdown(constants, eps[k], r.t_c).back();
        out.push_back({"location eps=" + fmt(eps[k]), xp, xs, frac * (1.0 - xs), false});
    }
    return out;
}

int cmd_reproduce(OutputSet& out, const std::string& target, const std::string& reference, unsigned jobs) {
    std::ifstream in(reference);
    if (!in) throw std::invalid_argument("cannot open reference file " + reference);
    const json ref = json::parse(in);
    const json& block = ref.at(target);
    std::vector<Check> checks;
    if (target == "table1") checks = reproduce_table1(block);
    else if (target == "table2") checks = reproduce_table2(block);
    else if (target == "constants_eta") checks = reproduce_constants_eta(block);
    else if (target == "c0") checks = reproduce_c0(block);
    else if (target == "fig_touchdown") checks = reproduce_fig_touchdown(block, jobs);
    else throw std::invalid_argument("unknown target " + target);

    std::size_t passed = 0;
    json items = json::array();
    std::ostringstream text;
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : checks) {
        const bool ok = c.pass();
        passed += ok;
        items.push_back({{"name", c.name},
                         {"computed", std::isfinite(c.computed) ? json(c.computed) : json()},
                         {"reference", c.reference},
                         {"tolerance", c.tolerance},
                         {"relative", c.relative},
                         {"pass", ok}});
        rows.push_back({c.name, fmt(c.computed), fmt(c.reference), fmt(c.tolerance), ok ? "pass" : "fail"});
        text << (ok ? "PASS " : "FAIL ") << c.name << ": computed " << fmt(c.computed) << ", reference "
             << fmt(c.reference) << "\n";
    }
    text << passed << "/" << checks.size() << " within tolerance\n";
    out.write_csv(target + ".csv", {"name", "computed", "reference", "tolerance", "status"}, rows);
    out.write_json("report.json", {{"target", target},
                                   {"provenance", block.value("provenance", "")},
                                   {"passed", passed},
                                   {"total", checks.size()},
                                   {"checks", items}});
    out.write_text("report.txt", text.str());
    std::cout << text.str();
    return passed == checks.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-time quenching lab for u_t = -eps^2 Delta^2 u - 1/(1+u)^2"};
    app.require_subcommand(1);
    std::string out_dir = "out";
    unsigned jobs = 1;
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    app.add_option("--jobs", jobs, "concurrent simulations")->check(CLI::Range(1u, 256u))->capture_default_str();

    SimFlags sim;
    std::vector<double> eps_list;
    double tc = 0.0, c0_init = 1.0, length = 50.0, layer_length = 30.0;
    std::size_t intervals = 0, layer_intervals = 3000, count = 8;
    std::string kind = "line", target, reference = QUENCH_REFERENCE;
    bool layer = false, constant = false;

    auto* constants = app.add_subcommand("constants", "principal eigenvalues and epsilon bounds");
    auto* simulate = app.add_subcommand("simulate", "adaptive moving-mesh simulation");
    add_sim_flags(simulate, sim);
    simulate->add_option("--eps", sim.eps, "epsilon")->required()->check(CLI::PositiveNumber);
    auto* sweep = app.add_subcommand("sweep", "simulations over a list of epsilon values");
    add_sim_flags(sweep, sim);
    sweep->add_option("--eps", eps_list, "comma-separated epsilon values")->required()->delimiter(',')->check(CLI::PositiveNumber);
    auto* predict = app.add_subcommand("predict", "small-time touchdown location prediction");
    add_sim_flags(predict, sim);
    predict->add_option("--eps", sim.eps, "epsilon")->required()->check(CLI::PositiveNumber);
    predict->add_option("--tc", tc, "touchdown time (default: simulated, else 1/3)")
        ->check(CLI::Range(0.0, 1.0 / 3.0));
    auto* profiles = app.add_subcommand("profiles", "similarity or boundary-layer profiles");
    add_spec_flags(profiles, sim);
    profiles->add_flag("--layer", layer, "boundary-layer hierarchy instead of a similarity profile");
    profiles->add_option("--case", kind, "line or radial")->check(CLI::IsMember({"line", "radial"}))->capture_default_str();
    profiles->add_option("--c0-init", c0_init, "far-field amplitude of the initial guess")->check(CLI::PositiveNumber)->capture_default_str();
    profiles->add_option("--length", length, "similarity domain half-length")->capture_default_str();
    profiles->add_option("--intervals", intervals, "grid intervals (0 = spacing 0.1)")->capture_default_str();
    profiles->add_option("--layer-length", layer_length, "layer domain length")->capture_default_str();
    profiles->add_option("--layer-intervals", layer_intervals, "layer grid intervals")->capture_default_str();
    auto* stability = app.add_subcommand("stability", "linear stability spectrum of a similarity profile");
    stability->add_option("--case", kind, "line or radial")->check(CLI::IsMember({"line", "radial"}))->capture_default_str();
    stability->add_option("--c0-init", c0_init, "far-field amplitude of the initial guess")->check(CLI::PositiveNumber)->capture_default_str();
    stability->add_option("--length", length, "similarity domain half-length")->capture_default_str();
    stability->add_option("--intervals", intervals, "grid intervals (0 = spacing 0.1)")->capture_default_str();
    stability->add_option("--count", count, "number of eigenvalues")->check(CLI::PositiveNumber)->capture_default_str();
    stability->add_flag("--constant", constant, "linearize about the constant state instead");
    auto* reproduce = app.add_subcommand("reproduce", "compare against the reference values");
    reproduce->add_option("target", target, "table1, table2, constants_eta, c0 or fig_touchdown")
        ->required()
        ->check(CLI::IsMember({"table1", "table2", "constants_eta", "c0", "fig_touchdown"}));
    reproduce->add_option("--reference", reference, "reference value file")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string command;
    for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

    std::unique_ptr<OutputSet> out;
    json config = {{"out_dir", out_dir}, {"jobs", jobs}};
    int status = 0;
    try {
        out = std::make_unique<OutputSet>(out_dir);
        if (*constants) {
            cmd_constants(*out);
        } else if (*simulate) {
            config.update(sim.echo());
            config["eps"] = sim.eps;
            cmd_simulate(*out, sim);
        } else if (*sweep) {
            config.update(sim.echo());
            config["eps"] = eps_list;
            cmd_sweep(*out, sim, eps_list, jobs);
        } else if (*predict) {
            config.update(sim.echo());
            config.update({{"eps", sim.eps}, {"tc", tc}});
            cmd_predict(*out, sim, tc);
        } else if (*profiles) {
            if (layer) {
                config.update({{"geometry", sim.geometry}, {"bc", sim.bc}, {"layer_length", layer_length},
                               {"layer_intervals", layer_intervals}});
                cmd_layer_profiles(*out, sim, layer_length, layer_intervals);
            } else {
                config.update({{"case", kind}, {"c0_init", c0_init}, {"length", length}, {"intervals", intervals}});
                cmd_similarity(*out, kind, c0_init, length, intervals);
            }
        } else if (*stability) {
            config.update({{"case", kind}, {"c0_init", c0_init}, {"length", length},
                           {"intervals", intervals}, {"count", count}, {"constant", constant}});
            cmd_stability(*out, kind, c0_init, length, intervals, count, constant);
        } else if (*reproduce) {
            config.update({{"target", target}, {"reference", reference}});
            status = cmd_reproduce(*out, target, reference, jobs);
        }
    } catch (const quench::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        config["error"] = e.what();
        status = 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        config["error"] = e.what();
        status = 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        config["error"] = e.what();
        status = 1;
    }
    try {
        if (out) out->write_manifest(command, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return status;
}
