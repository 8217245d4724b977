#include "hopnet/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hopnet/error.hpp"
#include "hopnet/kernels.hpp"

namespace hopnet {

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::rk4: return "rk4";
        case Method::rk45: return "rk45";
    }
    return "unknown";
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::horizon: return "horizon";
        case Termination::converged: return "converged";
        case Termination::max_steps: return "max_steps";
    }
    return "unknown";
}

void IntegratorConfig::validate() const {
    const auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (method == Method::rk4 && !positive(dt)) throw ValidationError("integrator: dt must be > 0");
    if (method == Method::rk45 && !(positive(rtol) && positive(atol)))
        throw ValidationError("integrator: rtol and atol must be > 0");
    if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0))
        throw ValidationError("integrator: need finite t0 < t_end");
    if (!(equilibrium_tol >= 0.0)) throw ValidationError("integrator: equilibrium_tol must be >= 0");
    if (!(output_interval >= 0.0) || !std::isfinite(output_interval))
        throw ValidationError("integrator: output_interval must be >= 0");
    if (max_steps == 0) throw ValidationError("integrator: max_steps must be > 0");
    if (!positive(min_step)) throw ValidationError("integrator: min_step must be > 0");
    if (!(boundary_margin >= 0.0 && boundary_margin < 1.0))
        throw ValidationError("integrator: boundary_margin must lie in [0, 1)");
}

namespace {

enum class StepStatus { ok, inadmissible, nonfinite };

bool all_finite(std::span<const double> y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

class Stepper {
public:
    Stepper(const OdeProblem& p) : p_(p), n_(p.dim) {}

    // f = rhs(t, y) after checking admissibility of y.
    StepStatus eval(double t, std::span<const double> y, std::span<double> f) const {
        if (!all_finite(y)) return StepStatus::nonfinite;
        if (p_.admissible && !p_.admissible(y)) return StepStatus::inadmissible;
        p_.rhs(t, y, f);
        return all_finite(f) ? StepStatus::ok : StepStatus::nonfinite;
    }

    double stationarity(double t, std::span<const double> y, std::span<const double> f) const {
        return p_.stationarity ? p_.stationarity(t, y, f) : norm_inf(f);
    }

    std::size_t dim() const { return n_; }

private:
    const OdeProblem& p_;
    std::size_t n_;
};

// Classic fourth-order Runge-Kutta. f0 = rhs(t, y) on entry; on success
// y_out and f_out hold the new state and its derivative.
StepStatus rk4_step(const Stepper& s, double t, std::span<const double> y,
                    std::span<const double> f0, double h, Vector& y_out, Vector& f_out) {
    const std::size_t n = s.dim();
    Vector k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * f0[i];
    if (auto st = s.eval(t + 0.5 * h, tmp, k2); st != StepStatus::ok) return st;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    if (auto st = s.eval(t + 0.5 * h, tmp, k3); st != StepStatus::ok) return st;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    if (auto st = s.eval(t + h, tmp, k4); st != StepStatus::ok) return st;
    y_out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        y_out[i] = y[i] + h / 6.0 * (f0[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    f_out.resize(n);
    return s.eval(t + h, y_out, f_out);
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat (fifth minus fourth order weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Rk45Result {
    StepStatus status = StepStatus::ok;
    double error = 0.0;
};

Rk45Result dopri_step(const Stepper& s, const IntegratorConfig& cfg, double t,
                      std::span<const double> y, std::span<const double> k1, double h,
                      Vector& y_out, Vector& k7) {
    const std::size_t n = s.dim();
    Vector k2(n), k3(n), k4(n), k5(n), k6(n), tmp(n);
    Rk45Result r;
    const auto stage = [&](double tc, Vector& k) {
        r.status = s.eval(tc, tmp, k);
        return r.status == StepStatus::ok;
    };
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    if (!stage(t + c2 * h, k2)) return r;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    if (!stage(t + c3 * h, k3)) return r;
    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    if (!stage(t + c4 * h, k4)) return r;
    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    if (!stage(t + c5 * h, k5)) return r;
    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    if (!stage(t + h, k6)) return r;
    y_out.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        y_out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7.resize(n);
    r.status = s.eval(t + h, y_out, k7);
    if (r.status != StepStatus::ok) return r;

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * k7[i]);
        const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_out[i]));
        acc += (err / sc) * (err / sc);
    }
    r.error = std::sqrt(acc / static_cast<double>(n));
    if (!std::isfinite(r.error)) r.status = StepStatus::nonfinite;
    return r;
}

double initial_step(const Stepper& s, const IntegratorConfig& cfg, double t,
                    std::span<const double> y, std::span<const double> f) {
    // Hairer, Norsett & Wanner, "Solving ODEs I", II.4.
    const std::size_t n = s.dim();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
        d0 += (y[i] / sc) * (y[i] / sc);
        d1 += (f[i] / sc) * (f[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, cfg.t_end - t);
    Vector y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + h0 * f[i];
    if (s.eval(t + h0, y1, f1) != StepStatus::ok) return h0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = cfg.atol + cfg.rtol * std::abs(y[i]);
        d2 += ((f1[i] - f[i]) / sc) * ((f1[i] - f[i]) / sc);
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, cfg.t_end - t});
}

class Recorder {
public:
    Recorder(const IntegratorConfig& cfg, OdeSolution& sol) : cfg_(cfg), sol_(sol) {}

    // Upper bound for the next step so that grid points are hit exactly.
    double next_stop() const {
        if (cfg_.output_interval <= 0.0) return cfg_.t_end;
        return std::min(cfg_.t_end, grid(next_index_));
    }

    void record(double t, std::span<const double> y) {
        sol_.times.push_back(t);
        sol_.states.emplace_back(y.begin(), y.end());
    }

    void accepted(double t, std::span<const double> y, bool final) {
        if (cfg_.output_interval <= 0.0 || final) {
            record(t, y);
        } else if (t >= grid(next_index_)) {
            record(t, y);
        }
        while (cfg_.output_interval > 0.0 && grid(next_index_) <= t) ++next_index_;
    }

private:
    double grid(std::size_t k) const { return cfg_.t0 + static_cast<double>(k) * cfg_.output_interval; }

    const IntegratorConfig& cfg_;
    OdeSolution& sol_;
    std::size_t next_index_ = 1;
};

[[noreturn]] void fail(StepStatus st, double t) {
    if (st == StepStatus::inadmissible)
        throw IntegrationError(IntegrationError::Kind::boundary,
                               "step rejected below the minimum step size near the state-space "
                               "boundary at t = " + std::to_string(t),
                               t);
    throw IntegrationError(IntegrationError::Kind::diverged,
                           "non-finite state at t = " + std::to_string(t), t);
}

}  // namespace

OdeSolution solve_ode(const OdeProblem& problem, std::span<const double> y0,
                      const IntegratorConfig& cfg) {
    cfg.validate();
    if (y0.size() != problem.dim) throw DimensionError("solve_ode: initial state has wrong size");
    const Stepper stepper(problem);
    OdeSolution sol;
    Recorder rec(cfg, sol);

    double t = cfg.t0;
    Vector y(y0.begin(), y0.end());
    Vector f(y.size());
    if (auto st = stepper.eval(t, y, f); st != StepStatus::ok) {
        if (st == StepStatus::inadmissible)
            throw DomainError("solve_ode: initial state outside the admissible set");
        fail(st, t);
    }
    rec.record(t, y);
    if (cfg.equilibrium_tol > 0.0 && stepper.stationarity(t, y, f) < cfg.equilibrium_tol) {
        sol.termination = Termination::converged;
        return sol;
    }

    const double t_eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end));
    Vector y_new, f_new;
    double h = cfg.method == Method::rk4
                   ? cfg.dt
                   : (cfg.dt > 0.0 ? std::min(cfg.dt, cfg.t_end - t) : initial_step(stepper, cfg, t, y, f));
    bool last_rejected = false;

    while (true) {
        if (sol.steps >= cfg.max_steps) {
            sol.termination = Termination::max_steps;
            if (sol.times.back() != t) rec.record(t, y);
            return sol;
        }
        const double stop = rec.next_stop();
        const bool clamped = t + h >= stop - t_eps;
        const double step = clamped ? stop - t : h;

        StepStatus status;
        double error = 0.0;
        if (cfg.method == Method::rk4) {
            status = rk4_step(stepper, t, y, f, step, y_new, f_new);
        } else {
            const Rk45Result r = dopri_step(stepper, cfg, t, y, f, step, y_new, f_new);
            status = r.status;
            error = r.error;
        }

        if (status != StepStatus::ok) {
            ++sol.rejected;
            h = 0.5 * step;
            if (h < cfg.min_step) fail(status, t);
            last_rejected = true;
            continue;
        }

        if (cfg.method == Method::rk45) {
            if (error > 1.0) {
                ++sol.rejected;
                h = step * std::max(0.2, 0.9 * std::pow(error, -0.2));
                if (h < cfg.min_step) fail(StepStatus::nonfinite, t);
                last_rejected = true;
                continue;
            }
            double factor = error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(error, -0.2), 0.2, 5.0);
            if (last_rejected) factor = std::min(factor, 1.0);
            const double proposed = step * factor;
            // A step shortened to hit a grid point should not shrink the next one.
            h = clamped ? std::max(h, proposed) : proposed;
        } else {
            h = cfg.dt;  // rk4 resumes the nominal step after a guard halving
        }
        last_rejected = false;

        t = clamped ? stop : t + step;
        y.swap(y_new);
        f.swap(f_new);
        ++sol.steps;
        if (problem.interior && !problem.interior(y))
            throw IntegrationError(IntegrationError::Kind::boundary,
                                   "state within the boundary margin of the cube at t = " + std::to_string(t), t);

        const bool done = t >= cfg.t_end - t_eps;
        const bool converged =
            cfg.equilibrium_tol > 0.0 && stepper.stationarity(t, y, f) < cfg.equilibrium_tol;
        rec.accepted(t, y, done || converged);
        if (converged) {
            sol.termination = Termination::converged;
            return sol;
        }
        if (done) {
            sol.termination = Termination::horizon;
            return sol;
        }
    }
}

Trajectory make_trajectory(const HopfieldNetwork& net, const InputSignal& input,
                           const OdeSolution& sol) {
    Trajectory traj;
    traj.termination = sol.termination;
    traj.steps = sol.steps;
    traj.rejected = sol.rejected;
    traj.samples.reserve(sol.times.size());
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        TrajectorySample s;
        s.t = sol.times[k];
        s.q = sol.states[k];
        s.V = outputs(net, s.q);
        const Vector I = input.current(s.t);
        const Vector Idot = input.rate(s.t);
        s.H = total_energy(net, s.q);
        s.P = dissipation_potential_at_charge(net, s.q, I);
        s.rates = dissipation_rates(net, s.q, I, Idot);
        s.input_power = kernels::dot(I, s.V);
        s.input_rate_power = kernels::dot(s.V, Idot);
        traj.samples.push_back(std::move(s));
    }
    return traj;
}

Trajectory integrate_q(const HopfieldNetwork& net, std::span<const double> q0,
                       const InputSignal& input, const IntegratorConfig& cfg) {
    if (q0.size() != net.size()) throw DimensionError("integrate_q: q0 has wrong size");
    if (input.size() != net.size()) throw DimensionError("integrate_q: input has wrong size");
    OdeProblem p;
    p.dim = net.size();
    p.rhs = [&](double t, std::span<const double> q, std::span<double> dq) {
        const Vector I = input.current(t);
        const Vector r = q_dynamics(net, q, I);
        std::copy(r.begin(), r.end(), dq.begin());
    };
    return make_trajectory(net, input, solve_ode(p, q0, cfg));
}

Trajectory integrate_V(const HopfieldNetwork& net, std::span<const double> V0,
                       const InputSignal& input, const IntegratorConfig& cfg) {
    if (V0.size() != net.size()) throw DimensionError("integrate_V: V0 has wrong size");
    if (input.size() != net.size()) throw DimensionError("integrate_V: input has wrong size");
    for (std::size_t i = 0; i < V0.size(); ++i)
        if (!net.capacitor(i).in_range(V0[i]))
            throw DomainError("integrate_V: V0 outside the open cube");

    OdeProblem p;
    p.dim = net.size();
    p.admissible = [&](std::span<const double> V) {
        for (std::size_t i = 0; i < V.size(); ++i)
            if (!net.capacitor(i).in_range(V[i])) return false;
        return true;
    };
    p.interior = [&](std::span<const double> V) {
        for (double x : V)
            if (1.0 - std::abs(x) < cfg.boundary_margin) return false;
        return true;
    };
    p.rhs = [&](double t, std::span<const double> V, std::span<double> dV) {
        const Vector I = input.current(t);
        const Vector grad = potential_gradient(net, V, I);
        const Vector m = metric(net, V);
        for (std::size_t i = 0; i < V.size(); ++i) dV[i] = -grad[i] / m[i];
    };
    // ||dq/dt||_inf, with dq = metric * dV.
    p.stationarity = [&](double, std::span<const double> V, std::span<const double> dV) {
        const Vector m = metric(net, V);
        double worst = 0.0;
        for (std::size_t i = 0; i < V.size(); ++i) worst = std::max(worst, std::abs(m[i] * dV[i]));
        return worst;
    };

    OdeSolution sol = solve_ode(p, V0, cfg);
    for (auto& state : sol.states) state = charges(net, state);
    return make_trajectory(net, input, sol);
}

MonotonicityReport monotonicity_report(const Trajectory& traj, const InputSignal& input,
                                       double rate_tolerance, double discrete_tolerance,
                                       double passivity_tolerance) {
    MonotonicityReport rep;
    rep.rate_tolerance = rate_tolerance;
    rep.discrete_tolerance = discrete_tolerance;
    rep.passivity_tolerance = passivity_tolerance;
    rep.worst_rate_excess = -std::numeric_limits<double>::infinity();
    rep.worst_passivity_excess = -std::numeric_limits<double>::infinity();

    for (const auto& s : traj.samples) {
        const double excess = s.rates.potential_rate + s.input_rate_power;
        if (excess > rep.worst_rate_excess) {
            rep.worst_rate_excess = excess;
            rep.worst_rate_time = s.t;
        }
        if (s.rates.passivity_residual >= 0.0) {
            ++rep.passive_samples;
            const double pe = s.rates.energy_rate - s.input_power;
            if (pe > rep.worst_passivity_excess) {
                rep.worst_passivity_excess = pe;
                rep.worst_passivity_time = s.t;
            }
        }
    }
    rep.rate_ok = rep.worst_rate_excess <= rate_tolerance;
    rep.passivity_ok = rep.passive_samples == 0 || rep.worst_passivity_excess <= passivity_tolerance;
    if (rep.passive_samples == 0) rep.worst_passivity_excess = 0.0;

    if (input.is_constant() && traj.samples.size() > 1) {
        rep.discrete_checked = true;
        rep.worst_discrete_increase = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < traj.samples.size(); ++k) {
            const double prev = traj.samples[k - 1].P;
            const double inc = (traj.samples[k].P - prev) / (1.0 + std::abs(prev));
            if (inc > rep.worst_discrete_increase) {
                rep.worst_discrete_increase = inc;
                rep.worst_discrete_time = traj.samples[k].t;
            }
        }
        rep.discrete_ok = rep.worst_discrete_increase <= discrete_tolerance;
    }
    return rep;
}

}  // namespace hopnet
