#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hopnet/integrator.hpp"
#include "hopnet/linalg.hpp"
#include "hopnet/network.hpp"

namespace hopnet {

// Split of a network's nodes into terminal nodes (external currents allowed)
// and hidden nodes (external current identically zero).
class TerminalPartition {
public:
    // Throws ValidationError on duplicates or out-of-range indices.
    TerminalPartition(std::size_t n, std::vector<std::size_t> terminals);

    std::size_t size() const noexcept { return n_; }
    const std::vector<std::size_t>& terminals() const noexcept { return terminals_; }
    const std::vector<std::size_t>& hidden() const noexcept { return hidden_; }

    // Full-length current vector carrying `terminal_current` on the terminal
    // nodes and zero on the hidden ones.
    Vector embed(std::span<const double> terminal_current) const;
    Vector restrict(std::span<const double> full) const;

private:
    std::size_t n_;
    std::vector<std::size_t> terminals_;
    std::vector<std::size_t> hidden_;
};

// Two networks joined through I^t_alpha = S^T V^t_beta and
// I^t_beta = S V^t_alpha, with S of shape |terminals_beta| x |terminals_alpha|.
struct CoupledNetwork {
    HopfieldNetwork alpha;
    TerminalPartition alpha_terminals;
    HopfieldNetwork beta;
    TerminalPartition beta_terminals;
    Matrix S;

    // Throws DimensionError when the partitions or S do not fit the networks.
    void validate() const;

    // Interconnection currents for the given outputs.
    Vector alpha_current(std::span<const double> V_beta) const;
    Vector beta_current(std::span<const double> V_alpha) const;
};

// Single network on n_alpha + n_beta nodes (alpha first) with block-diagonal
// C, R and capacitors and T = [[T_alpha, E^T], [E, T_beta]], where E embeds
// S on the terminal rows and columns.
HopfieldNetwork compose(const CoupledNetwork& coupled);

// Sign of the cross term in composed_potential. With S mapping alpha
// terminals to beta terminals, -dP/dV reproduces the coupled dynamics only
// with a negative cross term, the same sign as -1/2 V^T T V gives it.
inline constexpr double kCrossTermSign = -1.0;

// P_alpha(V_alpha, 0) + P_beta(V_beta, 0) + kCrossTermSign (V^t_beta)^T S V^t_alpha.
double composed_potential(const CoupledNetwork& coupled, std::span<const double> V_alpha,
                          std::span<const double> V_beta);

// Integrates both networks as separate subsystems, each driven by the
// interconnection current computed from its partner at every Runge-Kutta
// stage. States are returned concatenated (alpha first).
OdeSolution cosimulate(const CoupledNetwork& coupled, std::span<const double> q_alpha0,
                       std::span<const double> q_beta0, const IntegratorConfig& cfg);

struct InterconnectionReport {
    std::size_t samples = 0;
    // (a) d/dt (S^T V^t_beta) against S^T dV^t_beta/dt, and the beta side.
    double worst_chain_rule_error = 0.0;
    bool chain_rule_ok = true;
    // (b) composed P nonincreasing (relative tolerance 1e-9 (1 + |P|)).
    double worst_potential_increase = 0.0;
    bool potential_nonincreasing = true;
    // (c) dP_sub/dt <= -(V^t_sub)^T dI^t_sub/dt + tolerance for both subsystems.
    double worst_alpha_excess = 0.0;
    double worst_beta_excess = 0.0;
    bool subsystem_inequalities_ok = true;
    bool converged = false;
    Trajectory trajectory;  // of the composed network

    bool ok() const noexcept {
        return chain_rule_ok && potential_nonincreasing && subsystem_inequalities_ok;
    }
};

InterconnectionReport interconnection_consistency(const CoupledNetwork& coupled,
                                                  std::span<const double> q_alpha0,
                                                  std::span<const double> q_beta0, double horizon,
                                                  IntegratorConfig cfg = {},
                                                  double tolerance = 1e-8);

}  // namespace hopnet
