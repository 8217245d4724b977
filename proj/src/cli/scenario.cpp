#include "scenario.hpp"

#include <cmath>
#include <set>

#include "hopnet/error.hpp"

namespace hopnet::cli {

namespace {

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key)) throw ValidationError(where + ": unknown key '" + key + "'");
}

double positive(const Json& v, const std::string& where) {
    const double x = io::require_number(v, where);
    if (!(x > 0.0)) throw ValidationError(where + ": must be > 0");
    return x;
}

std::size_t count(const Json& v, const std::string& where) {
    return static_cast<std::size_t>(io::require_unsigned(v, where));
}

Method method_from(const Json& v, const std::string& where) {
    if (v == "rk45") return Method::rk45;
    if (v == "rk4") return Method::rk4;
    throw ValidationError(where + ": expected \"rk4\" or \"rk45\"");
}

IntegratorConfig parse_integrator(const Json& doc) {
    const std::string w = "integrator";
    reject_unknown(doc, {"method", "dt", "rtol", "atol", "t0", "t_end", "equilibrium_tol", "max_steps",
                         "output_interval", "min_step", "boundary_margin"},
                   w);
    IntegratorConfig cfg;
    if (doc.contains("method")) cfg.method = method_from(doc["method"], w + ".method");
    if (doc.contains("dt")) cfg.dt = io::require_number(doc["dt"], w + ".dt");
    if (doc.contains("rtol")) cfg.rtol = io::require_number(doc["rtol"], w + ".rtol");
    if (doc.contains("atol")) cfg.atol = io::require_number(doc["atol"], w + ".atol");
    if (doc.contains("t0")) cfg.t0 = io::require_number(doc["t0"], w + ".t0");
    if (doc.contains("t_end")) cfg.t_end = io::require_number(doc["t_end"], w + ".t_end");
    if (doc.contains("equilibrium_tol"))
        cfg.equilibrium_tol = io::require_number(doc["equilibrium_tol"], w + ".equilibrium_tol");
    if (doc.contains("max_steps")) cfg.max_steps = count(doc["max_steps"], w + ".max_steps");
    if (doc.contains("output_interval"))
        cfg.output_interval = io::require_number(doc["output_interval"], w + ".output_interval");
    if (doc.contains("min_step")) cfg.min_step = io::require_number(doc["min_step"], w + ".min_step");
    if (doc.contains("boundary_margin"))
        cfg.boundary_margin = io::require_number(doc["boundary_margin"], w + ".boundary_margin");
    cfg.validate();
    return cfg;
}

void check_input(const Json& doc, std::size_t n) {
    const std::string w = "input";
    reject_unknown(doc, {"constant", "sinusoid"}, w);
    if (doc.size() != 1) throw ValidationError("input: give exactly one of 'constant' or 'sinusoid'");
    if (doc.contains("constant")) {
        if (io::require_vector(doc["constant"], "input.constant").size() != n)
            throw ValidationError("input.constant: expected " + std::to_string(n) + " entries");
        return;
    }
    const Json& s = doc["sinusoid"];
    reject_unknown(s, {"amplitude", "omega", "phase", "offset"}, "input.sinusoid");
    if (!s.contains("amplitude") || !s.contains("omega"))
        throw ValidationError("input.sinusoid: 'amplitude' and 'omega' are required");
    if (io::require_vector(s["amplitude"], "input.sinusoid.amplitude").size() != n)
        throw ValidationError("input.sinusoid.amplitude: expected " + std::to_string(n) + " entries");
    io::require_number(s["omega"], "input.sinusoid.omega");
    if (s.contains("phase")) io::require_number(s["phase"], "input.sinusoid.phase");
    if (s.contains("offset") && io::require_vector(s["offset"], "input.sinusoid.offset").size() != n)
        throw ValidationError("input.sinusoid.offset: expected " + std::to_string(n) + " entries");
}

std::vector<Pattern> parse_patterns(const Json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ValidationError(where + ": expected a non-empty list of patterns");
    std::vector<Pattern> out;
    for (std::size_t p = 0; p < v.size(); ++p) {
        const std::string wp = where + "[" + std::to_string(p) + "]";
        if (!v[p].is_array()) throw ValidationError(wp + ": expected an array of +-1");
        Pattern pat;
        for (const auto& x : v[p]) {
            if (!x.is_number_integer() || (x.get<int>() != 1 && x.get<int>() != -1))
                throw ValidationError(wp + ": entries must be 1 or -1");
            pat.push_back(x.get<int>());
        }
        out.push_back(std::move(pat));
    }
    return out;
}

Analysis parse_analysis(const Json& doc, const std::string& w) {
    if (!doc.is_object() || !doc.contains("op") || !doc["op"].is_string())
        throw ValidationError(w + ": expected an object with a string 'op'");
    const auto op = op_from_name(doc["op"].get<std::string>());
    if (!op) throw ValidationError(w + ".op: unknown operation '" + doc["op"].get<std::string>() + "'");
    Analysis a;
    a.op = *op;
    switch (a.op) {
        case Op::simulate:
            reject_unknown(doc, {"op", "form"}, w);
            if (doc.contains("form")) {
                if (doc["form"] == "q") a.simulate.form = Form::q;
                else if (doc["form"] == "V") a.simulate.form = Form::V;
                else throw ValidationError(w + ".form: expected \"q\" or \"V\"");
            }
            break;
        case Op::equilibria:
            reject_unknown(doc, {"op", "seeds", "cluster_tolerance", "spread"}, w);
            if (doc.contains("seeds")) a.equilibria.seeds = count(doc["seeds"], w + ".seeds");
            if (doc.contains("cluster_tolerance"))
                a.equilibria.cluster_tolerance = positive(doc["cluster_tolerance"], w + ".cluster_tolerance");
            if (doc.contains("spread")) a.equilibria.spread = positive(doc["spread"], w + ".spread");
            break;
        case Op::passivity:
            reject_unknown(doc, {"op", "radius", "samples"}, w);
            if (doc.contains("radius")) a.passivity.radius = positive(doc["radius"], w + ".radius");
            if (doc.contains("samples")) a.passivity.samples = count(doc["samples"], w + ".samples");
            if (a.passivity.samples == 0) throw ValidationError(w + ".samples: must be > 0");
            break;
        case Op::invariance:
            reject_unknown(doc, {"op", "epsilon", "trials"}, w);
            if (doc.contains("epsilon")) a.invariance.epsilon = positive(doc["epsilon"], w + ".epsilon");
            if (a.invariance.epsilon >= 1.0) throw ValidationError(w + ".epsilon: must lie in (0, 1)");
            if (doc.contains("trials")) a.invariance.trials = count(doc["trials"], w + ".trials");
            break;
        case Op::lambda_sweep:
            reject_unknown(doc, {"op", "gains", "epsilon", "grid_per_axis"}, w);
            if (doc.contains("gains")) a.sweep.gains = io::require_vector(doc["gains"], w + ".gains");
            if (a.sweep.gains.empty()) throw ValidationError(w + ".gains: must not be empty");
            for (std::size_t k = 0; k < a.sweep.gains.size(); ++k)
                if (!(a.sweep.gains[k] > 0.0) || (k > 0 && !(a.sweep.gains[k] > a.sweep.gains[k - 1])))
                    throw ValidationError(w + ".gains: must be positive and increasing");
            if (doc.contains("epsilon")) a.sweep.epsilon = positive(doc["epsilon"], w + ".epsilon");
            if (a.sweep.epsilon >= 1.0) throw ValidationError(w + ".epsilon: must lie in (0, 1)");
            if (doc.contains("grid_per_axis")) a.sweep.grid_per_axis = count(doc["grid_per_axis"], w + ".grid_per_axis");
            break;
        case Op::memory:
            reject_unknown(doc, {"op", "patterns", "gain", "scale", "corruption"}, w);
            if (!doc.contains("patterns")) throw ValidationError(w + ": 'patterns' is required");
            a.memory.patterns = parse_patterns(doc["patterns"], w + ".patterns");
            if (doc.contains("gain")) a.memory.gain = positive(doc["gain"], w + ".gain");
            if (doc.contains("scale")) a.memory.scale = io::require_number(doc["scale"], w + ".scale");
            if (doc.contains("corruption")) a.memory.corruption = count(doc["corruption"], w + ".corruption");
            // Surfaces ragged patterns now rather than mid-run.
            hebbian_network(a.memory.patterns, a.memory.gain, a.memory.scale);
            if (a.memory.corruption && *a.memory.corruption > a.memory.patterns[0].size())
                throw ValidationError(w + ".corruption: exceeds the pattern length");
            break;
        case Op::interconnect:
            reject_unknown(doc, {"op", "horizon"}, w);
            if (doc.contains("horizon")) a.interconnect.horizon = positive(doc["horizon"], w + ".horizon");
            break;
    }
    return a;
}

}  // namespace

std::string op_name(Op op) {
    switch (op) {
        case Op::simulate: return "simulate";
        case Op::equilibria: return "equilibria";
        case Op::passivity: return "passivity";
        case Op::invariance: return "invariance";
        case Op::lambda_sweep: return "lambda_sweep";
        case Op::memory: return "memory";
        case Op::interconnect: return "interconnect";
    }
    return "?";
}

std::optional<Op> op_from_name(const std::string& name) {
    std::string key = name;
    for (char& c : key)
        if (c == '-') c = '_';
    for (Op op : kAllOps)
        if (op_name(op) == key) return op;
    return std::nullopt;
}

const HopfieldNetwork& Scenario::subject() const {
    if (network) return *network;
    if (composed) return *composed;
    throw ValidationError("scenario: this operation needs a 'network' or 'coupled' document");
}

InputSignal Scenario::input() const {
    const std::size_t n = subject().size();
    if (input_doc.is_null()) return InputSignal::zero(n);
    if (input_doc.contains("constant")) return InputSignal::constant(io::require_vector(input_doc["constant"], "input"));
    const Json& s = input_doc["sinusoid"];
    const Vector amp = io::require_vector(s["amplitude"], "input");
    const Vector offset = s.contains("offset") ? io::require_vector(s["offset"], "input") : Vector(n, 0.0);
    const double phase = s.contains("phase") ? s["phase"].get<double>() : 0.0;
    return InputSignal::sinusoid(offset, amp, s["omega"].get<double>(), phase);
}

Vector Scenario::constant_current() const { return input().current(integrator.t0); }

Scenario parse_scenario(const Json& doc) {
    reject_unknown(doc, {"name", "description", "network", "coupled", "input", "initial", "integrator", "analyses",
                         "seed", "output_dir"},
                   "scenario");
    Scenario sc;
    sc.document = doc;
    for (const char* key : {"name", "description", "output_dir"})
        if (doc.contains(key) && !doc[key].is_string())
            throw ValidationError(std::string("scenario.") + key + ": expected a string");
    if (doc.contains("output_dir")) sc.output_dir = doc["output_dir"].get<std::string>();

    if (doc.contains("network") && doc.contains("coupled"))
        throw ValidationError("scenario: give either 'network' or 'coupled', not both");
    if (doc.contains("network")) sc.network = io::network_from_json(doc["network"]);
    if (doc.contains("coupled")) {
        sc.coupled = io::coupled_from_json(doc["coupled"]);
        sc.composed = compose(*sc.coupled);
    }

    if (doc.contains("seed")) sc.seed = io::require_unsigned(doc["seed"], "scenario.seed");
    if (doc.contains("integrator")) sc.integrator = parse_integrator(doc["integrator"]);

    if (doc.contains("analyses")) {
        const Json& list = doc["analyses"];
        if (!list.is_array()) throw ValidationError("analyses: expected an array");
        std::set<Op> seen;
        for (std::size_t k = 0; k < list.size(); ++k) {
            auto a = parse_analysis(list[k], "analyses[" + std::to_string(k) + "]");
            if (!seen.insert(a.op).second)
                throw ValidationError("analyses: operation '" + op_name(a.op) + "' listed twice");
            sc.analyses.push_back(std::move(a));
        }
    }
    if (sc.analyses.empty()) sc.analyses.push_back(Analysis{});

    const bool has_subject = sc.network || sc.coupled;
    if (has_subject) {
        const std::size_t n = sc.subject().size();
        if (doc.contains("input")) {
            check_input(doc["input"], n);
            sc.input_doc = doc["input"];
        }
        sc.initial_q.assign(n, 0.0);
        if (doc.contains("initial")) {
            const Json& init = doc["initial"];
            reject_unknown(init, {"q", "V"}, "initial");
            if (init.size() != 1) throw ValidationError("initial: give exactly one of 'q' or 'V'");
            if (init.contains("q")) {
                sc.initial_q = io::require_vector(init["q"], "initial.q");
                if (sc.initial_q.size() != n)
                    throw ValidationError("initial.q: expected " + std::to_string(n) + " entries");
            } else {
                const Vector V = io::require_vector(init["V"], "initial.V");
                if (V.size() != n) throw ValidationError("initial.V: expected " + std::to_string(n) + " entries");
                for (double x : V)
                    if (!(std::abs(x) < 1.0)) throw ValidationError("initial.V: entries must lie in (-1, 1)");
                sc.initial_q = charges(sc.subject(), V);
            }
        }
    } else if (doc.contains("input") || doc.contains("initial")) {
        throw ValidationError("scenario: 'input' and 'initial' need a network document");
    }
    for (const auto& a : sc.analyses) validate_analysis(sc, a);
    return sc;
}

void validate_analysis(const Scenario& sc, const Analysis& a) {
    if (a.op == Op::memory) {
        if (a.memory.patterns.empty()) throw ValidationError("memory: no 'patterns' given in the scenario");
        return;
    }
    if (a.op == Op::interconnect && !sc.coupled)
        throw ValidationError("interconnect: needs a 'coupled' document");
    if (!sc.network && !sc.coupled) throw ValidationError("scenario: missing 'network' (or 'coupled') document");
    if ((a.op == Op::equilibria || a.op == Op::invariance || a.op == Op::lambda_sweep) && !sc.input().is_constant())
        throw ValidationError(op_name(a.op) + ": needs a constant input");
}

std::uint64_t config_hash(const Json& doc) {
    const std::string text = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hopnet::cli
