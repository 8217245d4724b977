#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopnet/analysis.hpp"
#include "hopnet/input.hpp"
#include "hopnet/integrator.hpp"
#include "hopnet/interconnect.hpp"
#include "hopnet/io.hpp"
#include "hopnet/network.hpp"

namespace hopnet::cli {

using io::Json;

enum class Op { simulate, equilibria, passivity, invariance, lambda_sweep, memory, interconnect };

inline constexpr Op kAllOps[] = {Op::simulate,     Op::equilibria, Op::passivity,   Op::invariance,
                                 Op::lambda_sweep, Op::memory,     Op::interconnect};

std::string op_name(Op op);
// Accepts both "lambda_sweep" and the subcommand spelling "lambda-sweep".
std::optional<Op> op_from_name(const std::string& name);

enum class Form { q, V };

struct SimulateParams {
    Form form = Form::q;
};

struct EquilibriaParams {
    std::size_t seeds = 0;
    double cluster_tolerance = 1e-6;
    double spread = 0.0;
};

struct PassivityParams {
    double radius = 1.0;
    std::size_t samples = 100'000;
};

struct InvarianceParams {
    double epsilon = 1e-3;
    std::size_t trials = 30;
};

struct SweepParams {
    Vector gains{10.0, 20.0, 40.0, 80.0};
    double epsilon = 1e-3;
    std::size_t grid_per_axis = 0;
};

struct MemoryParams {
    std::vector<Pattern> patterns;
    double gain = 4.0;
    double scale = 2.0;
    std::optional<std::size_t> corruption;
};

struct InterconnectParams {
    double horizon = 0.0;  // 0: integrator t_end
};

struct Analysis {
    Op op = Op::simulate;
    SimulateParams simulate;
    EquilibriaParams equilibria;
    PassivityParams passivity;
    InvarianceParams invariance;
    SweepParams sweep;
    MemoryParams memory;
    InterconnectParams interconnect;
};

// A validated scenario document. Everything that can be checked without
// running numerics has been checked by parse_scenario.
struct Scenario {
    Json document;  // as read, for hashing and echoing
    std::optional<HopfieldNetwork> network;
    std::optional<CoupledNetwork> coupled;
    std::optional<HopfieldNetwork> composed;  // compose(*coupled)
    Json input_doc;  // null: zero input
    Vector initial_q;
    IntegratorConfig integrator;
    std::vector<Analysis> analyses;
    std::uint64_t seed = 0;
    std::string output_dir;

    // The single network the analyses act on: the network document, or the
    // composed network of a coupled document.
    const HopfieldNetwork& subject() const;
    InputSignal input() const;
    // Constant current at t0, for operations that need a fixed input.
    Vector constant_current() const;
};

// Throws ValidationError with a path-qualified message.
Scenario parse_scenario(const Json& doc);

// Checks that the scenario supplies what the analysis needs (a coupled
// document, patterns, a constant input).
void validate_analysis(const Scenario& scenario, const Analysis& analysis);

// Canonical 64-bit FNV-1a of the serialized scenario.
std::uint64_t config_hash(const Json& doc);

}  // namespace hopnet::cli
