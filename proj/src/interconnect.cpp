#include "hopnet/interconnect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hopnet/error.hpp"
#include "hopnet/kernels.hpp"

namespace hopnet {

TerminalPartition::TerminalPartition(std::size_t n, std::vector<std::size_t> terminals)
    : n_(n), terminals_(std::move(terminals)) {
    std::vector<char> seen(n, 0);
    for (std::size_t t : terminals_) {
        if (t >= n)
            throw ValidationError("terminal index " + std::to_string(t) + " out of range for n = " +
                                  std::to_string(n));
        if (seen[t]) throw ValidationError("duplicate terminal index " + std::to_string(t));
        seen[t] = 1;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!seen[i]) hidden_.push_back(i);
}

Vector TerminalPartition::embed(std::span<const double> terminal_current) const {
    if (terminal_current.size() != terminals_.size())
        throw DimensionError("embed: terminal current has wrong size");
    Vector full(n_, 0.0);
    for (std::size_t k = 0; k < terminals_.size(); ++k) full[terminals_[k]] = terminal_current[k];
    return full;
}

Vector TerminalPartition::restrict(std::span<const double> full) const {
    if (full.size() != n_) throw DimensionError("restrict: vector has wrong size");
    Vector out(terminals_.size());
    for (std::size_t k = 0; k < terminals_.size(); ++k) out[k] = full[terminals_[k]];
    return out;
}

void CoupledNetwork::validate() const {
    if (alpha_terminals.size() != alpha.size() || beta_terminals.size() != beta.size())
        throw DimensionError("terminal partition does not match its network");
    if (S.rows() != beta_terminals.terminals().size() ||
        S.cols() != alpha_terminals.terminals().size())
        throw DimensionError("S must be |terminals_beta| x |terminals_alpha| = " +
                             std::to_string(beta_terminals.terminals().size()) + "x" +
                             std::to_string(alpha_terminals.terminals().size()));
    for (double s : S.data())
        if (!std::isfinite(s)) throw ValidationError("S entries must be finite");
}

Vector CoupledNetwork::alpha_current(std::span<const double> V_beta) const {
    const Vector vt = beta_terminals.restrict(V_beta);
    Vector it(S.cols(), 0.0);
    for (std::size_t r = 0; r < S.rows(); ++r)
        for (std::size_t c = 0; c < S.cols(); ++c) it[c] += S(r, c) * vt[r];
    return alpha_terminals.embed(it);
}

Vector CoupledNetwork::beta_current(std::span<const double> V_alpha) const {
    const Vector vt = alpha_terminals.restrict(V_alpha);
    Vector it(S.rows());
    kernels::gemv(S.data(), vt, it);
    return beta_terminals.embed(it);
}

HopfieldNetwork compose(const CoupledNetwork& coupled) {
    coupled.validate();
    const std::size_t na = coupled.alpha.size();
    const std::size_t nb = coupled.beta.size();
    std::vector<CapacitorModel> caps = coupled.alpha.capacitors();
    caps.insert(caps.end(), coupled.beta.capacitors().begin(), coupled.beta.capacitors().end());
    Vector res = coupled.alpha.resistances();
    res.insert(res.end(), coupled.beta.resistances().begin(), coupled.beta.resistances().end());

    Matrix T(na + nb, na + nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) T(i, j) = coupled.alpha.coupling()(i, j);
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) T(na + i, na + j) = coupled.beta.coupling()(i, j);
    const auto& ta = coupled.alpha_terminals.terminals();
    const auto& tb = coupled.beta_terminals.terminals();
    for (std::size_t r = 0; r < tb.size(); ++r)
        for (std::size_t c = 0; c < ta.size(); ++c) {
            T(na + tb[r], ta[c]) = coupled.S(r, c);
            T(ta[c], na + tb[r]) = coupled.S(r, c);
        }
    return HopfieldNetwork(std::move(caps), std::move(res), std::move(T));
}

double composed_potential(const CoupledNetwork& coupled, std::span<const double> V_alpha,
                          std::span<const double> V_beta) {
    coupled.validate();
    const double pa = dissipation_potential(coupled.alpha, V_alpha, Vector(coupled.alpha.size(), 0.0));
    const double pb = dissipation_potential(coupled.beta, V_beta, Vector(coupled.beta.size(), 0.0));
    const Vector va = coupled.alpha_terminals.restrict(V_alpha);
    const Vector vb = coupled.beta_terminals.restrict(V_beta);
    Vector sva(coupled.S.rows());
    kernels::gemv(coupled.S.data(), va, sva);
    return pa + pb + kCrossTermSign * kernels::dot(vb, sva);
}

OdeSolution cosimulate(const CoupledNetwork& coupled, std::span<const double> q_alpha0,
                       std::span<const double> q_beta0, const IntegratorConfig& cfg) {
    coupled.validate();
    const std::size_t na = coupled.alpha.size();
    const std::size_t nb = coupled.beta.size();
    if (q_alpha0.size() != na || q_beta0.size() != nb)
        throw DimensionError("cosimulate: initial states have wrong size");

    OdeProblem p;
    p.dim = na + nb;
    p.rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        const auto qa = y.first(na);
        const auto qb = y.subspan(na);
        // Exchange: each subsystem sees its partner's outputs at this stage.
        const Vector Va = outputs(coupled.alpha, qa);
        const Vector Vb = outputs(coupled.beta, qb);
        const Vector dqa = q_dynamics(coupled.alpha, qa, coupled.alpha_current(Vb));
        const Vector dqb = q_dynamics(coupled.beta, qb, coupled.beta_current(Va));
        std::copy(dqa.begin(), dqa.end(), dy.begin());
        std::copy(dqb.begin(), dqb.end(), dy.begin() + static_cast<std::ptrdiff_t>(na));
    };
    Vector y0(q_alpha0.begin(), q_alpha0.end());
    y0.insert(y0.end(), q_beta0.begin(), q_beta0.end());
    return solve_ode(p, y0, cfg);
}

InterconnectionReport interconnection_consistency(const CoupledNetwork& coupled,
                                                  std::span<const double> q_alpha0,
                                                  std::span<const double> q_beta0, double horizon,
                                                  IntegratorConfig cfg, double tolerance) {
    const HopfieldNetwork net = compose(coupled);
    const std::size_t na = coupled.alpha.size();
    const std::size_t nb = coupled.beta.size();
    if (q_alpha0.size() != na || q_beta0.size() != nb)
        throw DimensionError("interconnection_consistency: initial states have wrong size");
    cfg.t_end = cfg.t0 + horizon;

    Vector q0(q_alpha0.begin(), q_alpha0.end());
    q0.insert(q0.end(), q_beta0.begin(), q_beta0.end());
    const InputSignal none = InputSignal::zero(na + nb);

    InterconnectionReport rep;
    rep.trajectory = integrate_q(net, q0, none, cfg);
    rep.converged = rep.trajectory.converged();
    rep.samples = rep.trajectory.samples.size();
    rep.worst_alpha_excess = -std::numeric_limits<double>::infinity();
    rep.worst_beta_excess = -std::numeric_limits<double>::infinity();

    const Vector zero(na + nb, 0.0);
    for (std::size_t k = 0; k < rep.trajectory.samples.size(); ++k) {
        const auto& s = rep.trajectory.samples[k];
        const std::span<const double> qa(s.q.data(), na);
        const std::span<const double> qb(s.q.data() + na, nb);
        const Vector dq = q_dynamics(net, s.q, zero);
        const Vector slope = energy_hessian_diagonal(net, s.q);
        Vector dV(na + nb);
        for (std::size_t i = 0; i < dV.size(); ++i) dV[i] = slope[i] * dq[i];
        const std::span<const double> dVa(dV.data(), na);
        const std::span<const double> dVb(dV.data() + na, nb);

        const Vector Ia = coupled.alpha_current(std::span<const double>(s.V.data() + na, nb));
        const Vector Ib = coupled.beta_current(std::span<const double>(s.V.data(), na));
        // Currents are linear in V, so their rates are the same maps on dV.
        const Vector Ia_dot = coupled.alpha_current(dVb);
        const Vector Ib_dot = coupled.beta_current(dVa);

        // (a) independent rate: central difference of the currents along the flow.
        const double speed = norm_inf(dq);
        if (speed > 0.0) {
            const double delta = 1e-5 / speed;
            Vector qp(s.q), qm(s.q);
            for (std::size_t i = 0; i < qp.size(); ++i) {
                qp[i] += delta * dq[i];
                qm[i] -= delta * dq[i];
            }
            const Vector Vp = outputs(net, qp), Vm = outputs(net, qm);
            const Vector Iap = coupled.alpha_current(std::span<const double>(Vp.data() + na, nb));
            const Vector Iam = coupled.alpha_current(std::span<const double>(Vm.data() + na, nb));
            const Vector Ibp = coupled.beta_current(std::span<const double>(Vp.data(), na));
            const Vector Ibm = coupled.beta_current(std::span<const double>(Vm.data(), na));
            for (std::size_t i = 0; i < na; ++i) {
                const double fd = (Iap[i] - Iam[i]) / (2.0 * delta);
                rep.worst_chain_rule_error = std::max(
                    rep.worst_chain_rule_error, std::abs(fd - Ia_dot[i]) / (1.0 + std::abs(Ia_dot[i])));
            }
            for (std::size_t i = 0; i < nb; ++i) {
                const double fd = (Ibp[i] - Ibm[i]) / (2.0 * delta);
                rep.worst_chain_rule_error = std::max(
                    rep.worst_chain_rule_error, std::abs(fd - Ib_dot[i]) / (1.0 + std::abs(Ib_dot[i])));
            }
        }

        // (b)
        if (k > 0) {
            const double prev = rep.trajectory.samples[k - 1].P;
            rep.worst_potential_increase =
                std::max(rep.worst_potential_increase, (s.P - prev) / (1.0 + std::abs(prev)));
        }

        // (c)
        const DissipationRates ra = dissipation_rates(coupled.alpha, qa, Ia, Ia_dot);
        const DissipationRates rb = dissipation_rates(coupled.beta, qb, Ib, Ib_dot);
        const Vector Va(s.V.begin(), s.V.begin() + static_cast<std::ptrdiff_t>(na));
        const Vector Vb(s.V.begin() + static_cast<std::ptrdiff_t>(na), s.V.end());
        rep.worst_alpha_excess =
            std::max(rep.worst_alpha_excess, ra.potential_rate + kernels::dot(Va, Ia_dot));
        rep.worst_beta_excess =
            std::max(rep.worst_beta_excess, rb.potential_rate + kernels::dot(Vb, Ib_dot));
    }
    rep.chain_rule_ok = rep.worst_chain_rule_error <= tolerance;
    rep.potential_nonincreasing = rep.worst_potential_increase <= 1e-9;
    rep.subsystem_inequalities_ok =
        rep.worst_alpha_excess <= tolerance && rep.worst_beta_excess <= tolerance;
    return rep;
}

}  // namespace hopnet
