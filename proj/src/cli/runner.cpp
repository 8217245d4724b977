#include "runner.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hopnet/error.hpp"
#include "hopnet/kernels.hpp"

#ifndef HOPNET_VERSION
#define HOPNET_VERSION "0.0.0"
#endif

namespace hopnet::cli {

namespace {

Json final_sample(const Trajectory& traj) {
    const auto& s = traj.back();
    return {{"t", s.t}, {"q", s.q}, {"V", s.V}, {"H", s.H}, {"P", s.P}};
}

const Analysis& requested(const Scenario& sc, Op op, Analysis& fallback) {
    for (const auto& a : sc.analyses)
        if (a.op == op) return a;
    fallback.op = op;
    return fallback;
}

struct Context {
    const Scenario& sc;
    const RunOptions& opts;
    std::uint64_t seed;
    RunResult& out;

    void violation(const std::string& line) { out.violations.push_back(line); }
};

Json run_simulate(Context& cx, const SimulateParams& p) {
    const auto& net = cx.sc.subject();
    const auto input = cx.sc.input();
    Trajectory traj = p.form == Form::q
                          ? integrate_q(net, cx.sc.initial_q, input, cx.sc.integrator)
                          : integrate_V(net, outputs(net, cx.sc.initial_q), input, cx.sc.integrator);
    const auto mono = monotonicity_report(traj, input);
    const auto windows = passivity_window_check(traj);
    if (traj.termination == Termination::max_steps) cx.violation("simulate: step budget exhausted before t_end");
    if (!mono.ok()) cx.violation("simulate: dissipation inequality violated beyond tolerance");
    if (!windows.ok) cx.violation("simulate: energy balance violated on a passive window");

    Json j = {{"form", p.form == Form::q ? "q" : "V"},
              {"method", std::string(to_string(cx.sc.integrator.method))},
              {"termination", std::string(to_string(traj.termination))},
              {"steps", traj.steps},
              {"rejected", traj.rejected},
              {"samples", traj.samples.size()},
              {"final", final_sample(traj)},
              {"monotonicity", io::to_json(mono)},
              {"passivity_windows", io::to_json(windows)}};
    if (!cx.out.trajectory) cx.out.trajectory = std::move(traj);
    return j;
}

Json run_equilibria(Context& cx, const EquilibriaParams& p) {
    EquilibriaOptions o;
    o.seeds = p.seeds;
    o.seed = cx.seed;
    o.workers = cx.opts.workers;
    o.cluster_tolerance = p.cluster_tolerance;
    o.spread = p.spread;
    return io::to_json(find_equilibria(cx.sc.subject(), cx.sc.constant_current(), o));
}

Json run_passivity(Context& cx, const PassivityParams& p) {
    PassivityOptions o;
    o.samples = p.samples;
    o.seed = cx.seed;
    o.workers = cx.opts.workers;
    return io::to_json(certify_semipassivity(cx.sc.subject(), p.radius, o));
}

Json run_invariance(Context& cx, const InvarianceParams& p) {
    InvarianceOptions o;
    o.trials = p.trials;
    o.seed = cx.seed;
    o.workers = cx.opts.workers;
    o.equilibria.seed = cx.seed ^ 0x5EEDULL;
    o.equilibria.workers = cx.opts.workers;
    const auto rep = cube_invariance_probe(cx.sc.subject(), cx.sc.constant_current(), p.epsilon, o);
    if (!rep.invariant) cx.violation("invariance: trajectory left the cube beyond tolerance");
    if (!rep.all_converged) cx.violation("invariance: a trial did not converge");
    if (!rep.all_match_equilibria) cx.violation("invariance: a trial ended away from every known equilibrium");
    return io::to_json(rep);
}

Json run_sweep(Context& cx, const SweepParams& p) {
    LambdaSweepOptions o;
    o.epsilon = p.epsilon;
    o.grid_per_axis = p.grid_per_axis;
    o.workers = cx.opts.workers;
    const auto rep = lambda_sweep(cx.sc.subject(), cx.sc.constant_current(), p.gains, o);
    if (!rep.monotone) cx.violation("lambda_sweep: sup not decreasing in lambda");
    if (!rep.ratios_in_band) cx.violation("lambda_sweep: doubling ratio outside [0.4, 0.6]");
    if (!rep.argmin_agrees_at_largest) cx.violation("lambda_sweep: grid argmin differs from the limit");
    return io::to_json(rep);
}

Json run_memory(Context& cx, const MemoryParams& p) {
    const auto net = hebbian_network(p.patterns, p.gain, p.scale);
    RecallOptions o;
    o.seed = cx.seed;
    o.corruption = p.corruption;
    Json j = io::to_json(hebbian_recall(net, p.patterns, o));
    j["gain"] = p.gain;
    j["scale"] = p.scale;
    j["network"] = io::network_to_json(net);
    return j;
}

Json run_interconnect(Context& cx, const InterconnectParams& p) {
    const auto& c = *cx.sc.coupled;
    const std::size_t na = c.alpha.size();
    const Vector qa(cx.sc.initial_q.begin(), cx.sc.initial_q.begin() + na);
    const Vector qb(cx.sc.initial_q.begin() + na, cx.sc.initial_q.end());
    const double horizon = p.horizon > 0.0 ? p.horizon : cx.sc.integrator.t_end - cx.sc.integrator.t0;
    auto rep = interconnection_consistency(c, qa, qb, horizon, cx.sc.integrator);
    if (!rep.ok()) cx.violation("interconnect: consistency check failed");
    Json j = io::to_json(rep);
    j["horizon"] = horizon;
    if (!cx.out.trajectory) cx.out.trajectory = std::move(rep.trajectory);
    return j;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

RunResult execute(const Scenario& sc, const RunOptions& opts) {
    RunResult out;
    Context cx{sc, opts, opts.seed.value_or(sc.seed), out};

    std::vector<Analysis> plan;
    if (opts.only) {
        Analysis fallback;
        plan.push_back(requested(sc, *opts.only, fallback));
        validate_analysis(sc, plan.back());
    } else {
        plan = sc.analyses;
    }

    // The trajectory artifact comes from simulate when it runs.
    std::stable_partition(plan.begin(), plan.end(), [](const Analysis& a) { return a.op == Op::simulate; });

    Json ops = Json::object();
    for (const auto& a : plan) {
        Json r;
        switch (a.op) {
            case Op::simulate: r = run_simulate(cx, a.simulate); break;
            case Op::equilibria: r = run_equilibria(cx, a.equilibria); break;
            case Op::passivity: r = run_passivity(cx, a.passivity); break;
            case Op::invariance: r = run_invariance(cx, a.invariance); break;
            case Op::lambda_sweep: r = run_sweep(cx, a.sweep); break;
            case Op::memory: r = run_memory(cx, a.memory); break;
            case Op::interconnect: r = run_interconnect(cx, a.interconnect); break;
        }
        ops[op_name(a.op)] = std::move(r);
    }

    Json& rep = out.report;
    rep["format_version"] = 1;
    rep["name"] = sc.document.contains("name") ? sc.document["name"] : Json(nullptr);
    rep["seed"] = cx.seed;
    rep["operations"] = std::move(ops);
    rep["violations"] = out.violations;
    return out;
}

Json manifest(const Scenario& sc, const RunOptions& opts, double wall_seconds,
              const std::vector<std::string>& artifacts) {
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    std::ostringstream json_version;
    json_version << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.'
                 << NLOHMANN_JSON_VERSION_PATCH;
    return {{"tool", "hopnet"},
            {"version", HOPNET_VERSION},
            {"config_hash", "fnv1a64:" + hex64(config_hash(sc.document))},
            {"seed", opts.seed.value_or(sc.seed)},
            {"workers", opts.workers},
            {"strict", opts.strict},
            {"format", opts.format == TrajectoryFormat::csv ? "csv" : "json"},
            {"isa", std::string(kernels::to_string(kernels::active()))},
            {"libraries", {{"eigen", eigen.str()}, {"nlohmann_json", json_version.str()}}},
            {"wall_time_seconds", wall_seconds},
            {"artifacts", artifacts}};
}

int run_config(const std::filesystem::path& config, const RunOptions& opts, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    Scenario sc;
    try {
        std::ifstream in(config, std::ios::binary);
        if (!in) {
            err << "hopnet: cannot read config " << config.string() << "\n";
            return kExitValidation;
        }
        sc = parse_scenario(Json::parse(in));
    } catch (const Json::parse_error& e) {
        err << "hopnet: " << config.string() << ": invalid JSON: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {  // ValidationError, DimensionError
        err << "hopnet: invalid scenario: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "hopnet: invalid scenario: " << e.what() << "\n";
        return kExitValidation;
    }

    RunResult result;
    try {
        result = execute(sc, opts);
    } catch (const IntegrationError& e) {
        err << "hopnet: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "hopnet: invalid scenario: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "hopnet: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }

    const std::filesystem::path dir =
        opts.out_dir ? *opts.out_dir : std::filesystem::path(sc.output_dir.empty() ? "hopnet_out" : sc.output_dir);
    std::vector<std::string> artifacts;
    std::vector<std::pair<std::string, std::string>> files;
    if (result.trajectory) {
        if (opts.format == TrajectoryFormat::csv) {
            std::ostringstream csv;
            io::write_trajectory_csv(csv, *result.trajectory);
            files.emplace_back("trajectory.csv", csv.str());
        } else {
            files.emplace_back("trajectory.json", io::dump(io::trajectory_to_json(*result.trajectory)));
        }
    }
    files.emplace_back("report.json", io::dump(result.report));
    for (const auto& [name, _] : files) artifacts.push_back(name);
    artifacts.push_back("manifest.json");

    try {
        std::filesystem::create_directories(dir);
        for (const auto& [name, content] : files) io::write_file_atomic(dir / name, content);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        io::write_file_atomic(dir / "manifest.json", io::dump(manifest(sc, opts, wall, artifacts)));
    } catch (const std::exception& e) {
        err << "hopnet: cannot write artifacts: " << e.what() << "\n";
        return 1;
    }

    for (const auto& v : result.violations) err << "hopnet: violation: " << v << "\n";
    if (opts.strict && !result.violations.empty()) return kExitViolation;
    return kExitOk;
}

}  // namespace hopnet::cli
