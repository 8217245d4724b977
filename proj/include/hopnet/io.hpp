#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "hopnet/analysis.hpp"
#include "hopnet/integrator.hpp"
#include "hopnet/interconnect.hpp"
#include "hopnet/network.hpp"

namespace hopnet::io {

using Json = nlohmann::ordered_json;

// Shortest decimal that round-trips to the same double (at most 17
// significant digits). Non-finite values print as "inf", "-inf", "nan".
std::string format_double(double x);

// Network document: {"n", "C", "R", "lambda", "T", optional "activation"}.
// "activation" is a family name or one name per node (default "tanh").
// Unknown keys, size mismatches and asymmetric T throw ValidationError.
HopfieldNetwork network_from_json(const Json& doc);
Json network_to_json(const HopfieldNetwork& net);

// Coupled document: {"alpha": {"network", "terminals"}, "beta": {...}, "S"}.
CoupledNetwork coupled_from_json(const Json& doc);
Json coupled_to_json(const CoupledNetwork& c);

// Field extraction; throw ValidationError naming `where` on a type mismatch.
std::uint64_t require_unsigned(const Json& v, const std::string& where);
double require_number(const Json& v, const std::string& where);
Vector require_vector(const Json& v, const std::string& where);
Matrix require_matrix(const Json& v, const std::string& where);

// Header: t, q_1..q_n, V_1..V_n, H, P, dHdt, dPdt, passivity_residual,
// P_residual.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Json trajectory_to_json(const Trajectory& traj);

Json to_json(const MonotonicityReport& r);
Json to_json(const PassivityReport& r);
Json to_json(const EquilibriumSet& s);
Json to_json(const InvarianceReport& r);
Json to_json(const LambdaSweepReport& r);
Json to_json(const RecallReport& r);
Json to_json(const InterconnectionReport& r);
Json to_json(const PassivityWindowReport& r);

// Serializes with fixed formatting (two-space indent, trailing newline).
std::string dump(const Json& doc);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hopnet::io
