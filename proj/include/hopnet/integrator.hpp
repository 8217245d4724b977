#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "hopnet/input.hpp"
#include "hopnet/linalg.hpp"
#include "hopnet/network.hpp"

namespace hopnet {

enum class Method { rk4, rk45 };

std::string_view to_string(Method m) noexcept;

struct IntegratorConfig {
    Method method = Method::rk45;
    double dt = 1e-3;  // fixed step for rk4, initial step hint for rk45 (<= 0: automatic)
    double rtol = 1e-8;
    double atol = 1e-10;
    double t0 = 0.0;
    double t_end = 10.0;
    // Stop once ||dq/dt||_inf drops below this; 0 disables the check. Near a
    // fixed point the error control lets q drift by about rtol |q|, so with
    // the default rtol this threshold is usually not reached before t_end.
    double equilibrium_tol = 1e-10;
    std::size_t max_steps = 1'000'000;
    // > 0: record samples on the grid t0 + k * output_interval (steps are
    // shortened to land on it). 0: record every accepted step.
    double output_interval = 0.0;
    // Smallest step the V-form boundary guard may halve down to.
    double min_step = 1e-14;
    // V-form only: an accepted state with 1 - |V_i| below this is reported
    // as boundary proximity. Closer than this the form cannot resolve V.
    double boundary_margin = 1e-12;

    // Throws ValidationError on non-positive steps or tolerances.
    void validate() const;
};

enum class Termination { horizon, converged, max_steps };

std::string_view to_string(Termination t) noexcept;

// Generic explicit integrator used by both coordinate forms and by the
// co-simulation of coupled networks.
struct OdeProblem {
    std::size_t dim = 0;
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)> rhs;
    // Stage states failing this are rejected and the step halved. Empty:
    // every finite state is admissible.
    std::function<bool(std::span<const double> y)> admissible;
    // Accepted states failing this end the run with IntegrationError(boundary).
    std::function<bool(std::span<const double> y)> interior;
    // Equilibrium measure at an accepted state. Empty: ||dy/dt||_inf.
    std::function<double(double t, std::span<const double> y, std::span<const double> dydt)>
        stationarity;
};

struct OdeSolution {
    std::vector<double> times;
    std::vector<Vector> states;
    Termination termination = Termination::horizon;
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

// Throws IntegrationError(diverged) on a non-finite state and
// IntegrationError(boundary) when the step would have to shrink below
// cfg.min_step to stay admissible.
OdeSolution solve_ode(const OdeProblem& problem, std::span<const double> y0,
                      const IntegratorConfig& cfg);

struct TrajectorySample {
    double t = 0.0;
    Vector q;
    Vector V;
    double H = 0.0;
    double P = 0.0;
    DissipationRates rates;
    double input_power = 0.0;       // I^T V
    double input_rate_power = 0.0;  // V^T dI/dt
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Termination termination = Termination::horizon;
    std::size_t steps = 0;
    std::size_t rejected = 0;

    bool converged() const noexcept { return termination == Termination::converged; }
    const TrajectorySample& back() const { return samples.back(); }
};

// Diagnostics for every sample from the exact expressions in network.hpp.
Trajectory make_trajectory(const HopfieldNetwork& net, const InputSignal& input,
                           const OdeSolution& sol);

// Integrates dq/dt = q_dynamics(q, I(t)).
Trajectory integrate_q(const HopfieldNetwork& net, std::span<const double> q0,
                       const InputSignal& input, const IntegratorConfig& cfg = {});

// Integrates the gradient flow metric(V) dV/dt = -dP/dV(V, I(t)) on the
// open cube. Steps leaving the cube are rejected and halved.
Trajectory integrate_V(const HopfieldNetwork& net, std::span<const double> V0,
                       const InputSignal& input, const IntegratorConfig& cfg = {});

struct MonotonicityReport {
    double rate_tolerance = 0.0;
    double discrete_tolerance = 0.0;

    // dP/dt + V^T dI/dt <= rate_tolerance at every sample.
    bool rate_ok = true;
    double worst_rate_excess = 0.0;  // max of dP/dt + V^T dI/dt
    double worst_rate_time = 0.0;

    // Only checked for constant inputs: P_{k+1} <= P_k + tol (1 + |P_k|).
    bool discrete_checked = false;
    bool discrete_ok = true;
    double worst_discrete_increase = 0.0;  // max of (P_{k+1} - P_k) / (1 + |P_k|)
    double worst_discrete_time = 0.0;

    // Where V^T R^{-1} v - V^T T V >= 0: dH/dt <= I^T V + passivity_tolerance.
    double passivity_tolerance = 0.0;
    bool passivity_ok = true;
    std::size_t passive_samples = 0;
    double worst_passivity_excess = 0.0;
    double worst_passivity_time = 0.0;

    bool ok() const noexcept { return rate_ok && discrete_ok && passivity_ok; }
};

MonotonicityReport monotonicity_report(const Trajectory& traj, const InputSignal& input,
                                       double rate_tolerance = 1e-8,
                                       double discrete_tolerance = 1e-9,
                                       double passivity_tolerance = 1e-9);

}  // namespace hopnet
