#include "hopnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <system_error>

#include "hopnet/error.hpp"

namespace hopnet::io {

namespace {

Json num(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

Json vec(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

Json mat(const Matrix& m) {
    Json a = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i)));
    return a;
}

void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.contains(key)) throw ValidationError(where + ": unknown key '" + key + "'");
}

const Json& require_key(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ValidationError(where + ": missing required key '" + key + "'");
    return obj.at(key);
}

std::vector<std::size_t> require_indices(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + ": expected an array of indices");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(require_unsigned(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::uint64_t require_unsigned(const Json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    throw ValidationError(where + ": expected a non-negative integer");
}

double require_number(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ValidationError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(where + ": expected a finite number");
    return x;
}

Vector require_vector(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + ": expected an array of numbers");
    Vector out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(require_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Matrix require_matrix(const Json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ValidationError(where + ": expected a non-empty matrix");
    const std::size_t rows = v.size();
    const Vector first = require_vector(v[0], where + "[0]");
    Matrix m(rows, first.size());
    for (std::size_t i = 0; i < rows; ++i) {
        const Vector r = require_vector(v[i], where + "[" + std::to_string(i) + "]");
        if (r.size() != first.size()) throw ValidationError(where + ": ragged matrix");
        for (std::size_t j = 0; j < r.size(); ++j) m(i, j) = r[j];
    }
    return m;
}

HopfieldNetwork network_from_json(const Json& doc) {
    const std::string where = "network";
    reject_unknown_keys(doc, {"n", "C", "R", "lambda", "T", "activation"}, where);
    const std::size_t n = require_unsigned(require_key(doc, "n", where), where + ".n");
    if (n == 0) throw ValidationError("network.n must be >= 1");
    const Vector C = require_vector(require_key(doc, "C", where), where + ".C");
    const Vector R = require_vector(require_key(doc, "R", where), where + ".R");
    const Vector lambda = require_vector(require_key(doc, "lambda", where), where + ".lambda");
    const Matrix T = require_matrix(require_key(doc, "T", where), where + ".T");
    if (C.size() != n || R.size() != n || lambda.size() != n)
        throw ValidationError("network: C, R and lambda must each have n = " + std::to_string(n) +
                              " entries");
    if (T.rows() != n || T.cols() != n)
        throw ValidationError("network: T must be " + std::to_string(n) + "x" + std::to_string(n));

    std::vector<Activation> kinds(n, Activation::tanh);
    if (doc.contains("activation")) {
        const Json& a = doc.at("activation");
        if (a.is_string()) {
            kinds.assign(n, activation_from_string(a.get<std::string>()));
        } else if (a.is_array() && a.size() == n) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!a[i].is_string()) throw ValidationError("network.activation: expected names");
                kinds[i] = activation_from_string(a[i].get<std::string>());
            }
        } else {
            throw ValidationError("network.activation: expected a name or n names");
        }
    }
    std::vector<CapacitorModel> caps;
    caps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) caps.emplace_back(kinds[i], lambda[i], C[i]);
    return HopfieldNetwork(std::move(caps), R, T);
}

Json network_to_json(const HopfieldNetwork& net) {
    Json doc;
    doc["n"] = net.size();
    Vector C, lambda;
    Json kinds = Json::array();
    bool uniform = true;
    for (const auto& c : net.capacitors()) {
        C.push_back(c.capacitance());
        lambda.push_back(c.gain());
        kinds.push_back(std::string(to_string(c.kind())));
        uniform = uniform && c.kind() == net.capacitor(0).kind();
    }
    doc["C"] = vec(C);
    doc["R"] = vec(net.resistances());
    doc["lambda"] = vec(lambda);
    doc["T"] = mat(net.coupling());
    doc["activation"] = uniform ? Json(std::string(to_string(net.capacitor(0).kind()))) : kinds;
    return doc;
}

CoupledNetwork coupled_from_json(const Json& doc) {
    reject_unknown_keys(doc, {"alpha", "beta", "S"}, "coupled");
    const auto side = [&](const char* name) {
        const std::string where = std::string("coupled.") + name;
        const Json& s = require_key(doc, name, "coupled");
        reject_unknown_keys(s, {"network", "terminals"}, where);
        HopfieldNetwork net = network_from_json(require_key(s, "network", where));
        TerminalPartition part(net.size(),
                               require_indices(require_key(s, "terminals", where), where + ".terminals"));
        return std::pair{std::move(net), std::move(part)};
    };
    auto [alpha, pa] = side("alpha");
    auto [beta, pb] = side("beta");
    const Json& sj = require_key(doc, "S", "coupled");
    Matrix S;
    if (sj.is_array() && sj.empty()) {
        S = Matrix(pb.terminals().size(), pa.terminals().size());
    } else {
        S = require_matrix(sj, "coupled.S");
    }
    CoupledNetwork c{std::move(alpha), std::move(pa), std::move(beta), std::move(pb), std::move(S)};
    try {
        c.validate();
    } catch (const DimensionError& e) {
        throw ValidationError(std::string("coupled: ") + e.what());
    }
    return c;
}

Json coupled_to_json(const CoupledNetwork& c) {
    Json doc;
    doc["alpha"] = {{"network", network_to_json(c.alpha)}, {"terminals", c.alpha_terminals.terminals()}};
    doc["beta"] = {{"network", network_to_json(c.beta)}, {"terminals", c.beta_terminals.terminals()}};
    doc["S"] = mat(c.S);
    return doc;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t n = traj.samples.empty() ? 0 : traj.samples.front().q.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",q_" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",V_" << i;
    os << ",H,P,dHdt,dPdt,passivity_residual,P_residual\n";
    for (const auto& s : traj.samples) {
        os << format_double(s.t);
        for (double x : s.q) os << ',' << format_double(x);
        for (double x : s.V) os << ',' << format_double(x);
        os << ',' << format_double(s.H) << ',' << format_double(s.P) << ','
           << format_double(s.rates.energy_rate) << ',' << format_double(s.rates.potential_rate)
           << ',' << format_double(s.rates.passivity_residual) << ','
           << format_double(s.rates.potential_residual) << '\n';
    }
}

Json trajectory_to_json(const Trajectory& traj) {
    Json doc;
    doc["termination"] = std::string(to_string(traj.termination));
    doc["steps"] = traj.steps;
    doc["rejected"] = traj.rejected;
    Json samples = Json::array();
    for (const auto& s : traj.samples) {
        samples.push_back({{"t", num(s.t)},
                           {"q", vec(s.q)},
                           {"V", vec(s.V)},
                           {"H", num(s.H)},
                           {"P", num(s.P)},
                           {"dHdt", num(s.rates.energy_rate)},
                           {"dPdt", num(s.rates.potential_rate)},
                           {"passivity_residual", num(s.rates.passivity_residual)},
                           {"P_residual", num(s.rates.potential_residual)}});
    }
    doc["samples"] = std::move(samples);
    return doc;
}

Json to_json(const MonotonicityReport& r) {
    return {{"ok", r.ok()},
            {"rate_tolerance", num(r.rate_tolerance)},
            {"rate_ok", r.rate_ok},
            {"worst_rate_excess", num(r.worst_rate_excess)},
            {"worst_rate_time", num(r.worst_rate_time)},
            {"discrete_checked", r.discrete_checked},
            {"discrete_tolerance", num(r.discrete_tolerance)},
            {"discrete_ok", r.discrete_ok},
            {"worst_discrete_increase", num(r.worst_discrete_increase)},
            {"worst_discrete_time", num(r.worst_discrete_time)},
            {"passivity_tolerance", num(r.passivity_tolerance)},
            {"passivity_ok", r.passivity_ok},
            {"passive_samples", r.passive_samples},
            {"worst_passivity_excess", num(r.worst_passivity_excess)},
            {"worst_passivity_time", num(r.worst_passivity_time)}};
}

Json to_json(const PassivityReport& r) {
    Json witnesses = Json::array();
    for (const auto& w : r.counterexamples)
        witnesses.push_back({{"v", vec(w.v)}, {"V", vec(w.V)}, {"residual", num(w.residual)}});
    return {{"mode", std::string(to_string(r.mode))},
            {"radius", num(r.radius)},
            {"samples", r.samples},
            {"analytic_certificate", r.analytic_certificate},
            {"certificate_lhs", num(r.certificate_lhs)},
            {"certificate_rhs", num(r.certificate_rhs)},
            {"min_sampled_residual", num(r.min_sampled_residual)},
            {"counterexamples", std::move(witnesses)}};
}

Json to_json(const EquilibriumSet& s) {
    Json eqs = Json::array();
    for (const auto& e : s.equilibria) {
        Json j = {{"q", vec(e.q)},
                  {"V", vec(e.V)},
                  {"P", num(e.potential)},
                  {"classification", std::string(to_string(e.kind))},
                  {"hessian_eigenvalues", vec(e.hessian_eigenvalues)},
                  {"residual", num(e.residual)},
                  {"gradient_residual", num(e.gradient_residual)},
                  {"basin_count", e.basin_count}};
        j["perturbation_returns"] = e.perturbation_returns ? Json(*e.perturbation_returns) : Json(nullptr);
        eqs.push_back(std::move(j));
    }
    Json unconverged = Json::array();
    for (const auto& q : s.unconverged_seeds) unconverged.push_back(vec(q));
    return {{"seeds", s.seeds},
            {"cluster_tolerance", num(s.cluster_tolerance)},
            {"equilibria", std::move(eqs)},
            {"unconverged_seeds", std::move(unconverged)}};
}

Json to_json(const InvarianceReport& r) {
    Json trials = Json::array();
    for (const auto& t : r.trials)
        trials.push_back({{"V0", vec(t.V0)},
                          {"on_face", t.on_face},
                          {"max_excursion", num(t.max_excursion)},
                          {"converged", t.converged},
                          {"final_q", vec(t.final_q)},
                          {"nearest_equilibrium", t.nearest_equilibrium},
                          {"equilibrium_distance", num(t.equilibrium_distance)}});
    return {{"epsilon", num(r.epsilon)},
            {"max_excursion", num(r.max_excursion)},
            {"excursion_tolerance", num(r.excursion_tolerance)},
            {"invariant", r.invariant},
            {"all_converged", r.all_converged},
            {"match_tolerance", num(r.match_tolerance)},
            {"all_match_equilibria", r.all_match_equilibria},
            {"trials", std::move(trials)},
            {"equilibria", to_json(r.equilibria)}};
}

Json to_json(const LambdaSweepReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"lambda", num(e.gain)},
                           {"conjugate_sup", num(e.conjugate_sup)},
                           {"gap_sup", num(e.gap_sup)},
                           {"argmin_index", e.argmin_index},
                           {"argmin_matches_limit", e.argmin_matches_limit}});
    return {{"epsilon", num(r.epsilon)},
            {"grid_per_axis", r.grid_per_axis},
            {"limit_argmin_index", r.limit_argmin_index},
            {"limit_argmin", vec(r.limit_argmin)},
            {"entries", std::move(entries)},
            {"conjugate_ratios", vec(r.conjugate_ratios)},
            {"gap_ratios", vec(r.gap_ratios)},
            {"scaled_conjugate_ratios", vec(r.scaled_conjugate_ratios)},
            {"monotone", r.monotone},
            {"ratios_in_band", r.ratios_in_band},
            {"argmin_agrees_at_largest", r.argmin_agrees_at_largest}};
}

Json to_json(const RecallReport& r) {
    Json results = Json::array();
    for (const auto& x : r.results)
        results.push_back({{"pattern", x.pattern},
                           {"flipped", x.flipped},
                           {"sign_matches", x.sign_matches},
                           {"converged", x.converged},
                           {"final_q", vec(x.final_q)},
                           {"final_classification", std::string(to_string(x.final_kind))},
                           {"clean_sign_matches", x.clean_sign_matches},
                           {"clean_converged", x.clean_converged},
                           {"clean_classification", std::string(to_string(x.clean_kind))}});
    return {{"n", r.n},
            {"corruption", r.corruption},
            {"results", std::move(results)},
            {"non_minimum_endings", r.saddle_endings}};
}

Json to_json(const InterconnectionReport& r) {
    return {{"ok", r.ok()},
            {"samples", r.samples},
            {"converged", r.converged},
            {"worst_chain_rule_error", num(r.worst_chain_rule_error)},
            {"chain_rule_ok", r.chain_rule_ok},
            {"worst_potential_increase", num(r.worst_potential_increase)},
            {"potential_nonincreasing", r.potential_nonincreasing},
            {"worst_alpha_excess", num(r.worst_alpha_excess)},
            {"worst_beta_excess", num(r.worst_beta_excess)},
            {"subsystem_inequalities_ok", r.subsystem_inequalities_ok}};
}

Json to_json(const PassivityWindowReport& r) {
    return {{"windows", r.windows}, {"ok", r.ok}, {"worst_excess", num(r.worst_excess)}};
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace hopnet::io
