#include "hopnet/network.hpp"

#include <cmath>
#include <string>

#include "hopnet/error.hpp"
#include "hopnet/kernels.hpp"

namespace hopnet {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                             ", got " + std::to_string(got));
}

Vector coupled_outputs(const HopfieldNetwork& net, std::span<const double> V) {
    Vector tv(net.size());
    kernels::gemv(net.coupling().data(), V, tv);
    return tv;
}

}  // namespace

HopfieldNetwork::HopfieldNetwork(std::vector<CapacitorModel> capacitors, Vector resistances,
                                 Matrix coupling)
    : capacitors_(std::move(capacitors)),
      resistances_(std::move(resistances)),
      coupling_(std::move(coupling)) {
    const std::size_t n = capacitors_.size();
    if (n == 0) throw ValidationError("network needs at least one node");
    require_size(resistances_.size(), n, "resistances");
    if (coupling_.rows() != n || coupling_.cols() != n)
        throw DimensionError("coupling matrix must be " + std::to_string(n) + "x" +
                             std::to_string(n));
    for (double r : resistances_)
        if (!(std::isfinite(r) && r > 0.0))
            throw ValidationError("resistances must be finite and > 0");
    for (double t : coupling_.data())
        if (!std::isfinite(t)) throw ValidationError("coupling entries must be finite");
    if (coupling_.asymmetry() > kSymmetryTolerance)
        throw ValidationError("coupling matrix T is not symmetric (max |T - T^T| = " +
                              std::to_string(coupling_.asymmetry()) + ")");
    rates_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        rates_[i] = 1.0 / (resistances_[i] * capacitors_[i].capacitance());
}

HopfieldNetwork HopfieldNetwork::uniform(Matrix coupling, double gain, double capacitance,
                                         double resistance) {
    const std::size_t n = coupling.rows();
    return HopfieldNetwork(
        std::vector<CapacitorModel>(n, CapacitorModel(Activation::tanh, gain, capacitance)),
        Vector(n, resistance), std::move(coupling));
}

HopfieldNetwork HopfieldNetwork::with_gain(double gain) const {
    std::vector<CapacitorModel> caps;
    caps.reserve(size());
    for (const auto& c : capacitors_) caps.emplace_back(c.kind(), gain, c.capacitance());
    return HopfieldNetwork(std::move(caps), resistances_, coupling_);
}

Vector NetworkState::soma_voltages(const HopfieldNetwork& net) const {
    return hopnet::soma_voltages(net, q);
}

Vector NetworkState::outputs(const HopfieldNetwork& net) const { return hopnet::outputs(net, q); }

Vector soma_voltages(const HopfieldNetwork& net, std::span<const double> q) {
    require_size(q.size(), net.size(), "charge vector");
    Vector v(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) v[i] = q[i] / net.capacitor(i).capacitance();
    return v;
}

Vector outputs(const HopfieldNetwork& net, std::span<const double> q) {
    require_size(q.size(), net.size(), "charge vector");
    Vector V(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) V[i] = net.capacitor(i).output_at_charge(q[i]);
    return V;
}

Vector energy_hessian_diagonal(const HopfieldNetwork& net, std::span<const double> q) {
    require_size(q.size(), net.size(), "charge vector");
    Vector d(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d[i] = net.capacitor(i).output_slope_at_charge(q[i]);
    return d;
}

Vector charges(const HopfieldNetwork& net, std::span<const double> V) {
    require_size(V.size(), net.size(), "output vector");
    Vector q(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) q[i] = net.capacitor(i).inverse_charge(V[i]);
    return q;
}

Vector q_dynamics(const HopfieldNetwork& net, std::span<const double> q, std::span<const double> I) {
    require_size(I.size(), net.size(), "current vector");
    const Vector V = outputs(net, q);
    Vector dq = coupled_outputs(net, V);
    const Vector& rates = net.relaxation_rates();
    for (std::size_t i = 0; i < dq.size(); ++i) dq[i] += I[i] - rates[i] * q[i];
    return dq;
}

double total_energy(const HopfieldNetwork& net, std::span<const double> q) {
    require_size(q.size(), net.size(), "charge vector");
    double h = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) h += net.capacitor(i).charge_energy(q[i]);
    return h;
}

double dissipation_potential(const HopfieldNetwork& net, std::span<const double> V,
                             std::span<const double> I) {
    require_size(V.size(), net.size(), "output vector");
    require_size(I.size(), net.size(), "current vector");
    const Vector& rates = net.relaxation_rates();
    double conj = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i)
        conj += rates[i] * net.capacitor(i).conjugate_energy(V[i]);
    return -0.5 * kernels::quadratic_form(net.coupling().data(), V) + conj - kernels::dot(V, I);
}

double dissipation_potential_at_charge(const HopfieldNetwork& net, std::span<const double> q,
                                       std::span<const double> I) {
    require_size(I.size(), net.size(), "current vector");
    const Vector V = outputs(net, q);
    const Vector& rates = net.relaxation_rates();
    double conj = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        conj += rates[i] * net.capacitor(i).conjugate_energy_at_charge(q[i]);
    return -0.5 * kernels::quadratic_form(net.coupling().data(), V) + conj - kernels::dot(V, I);
}

Vector potential_gradient(const HopfieldNetwork& net, std::span<const double> V,
                          std::span<const double> I) {
    require_size(I.size(), net.size(), "current vector");
    const Vector q = charges(net, V);
    const Vector tv = coupled_outputs(net, V);
    const Vector& rates = net.relaxation_rates();
    Vector g(V.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = rates[i] * q[i] - tv[i] - I[i];
    return g;
}

Vector potential_input_gradient(const HopfieldNetwork& net, std::span<const double> V,
                                std::span<const double> I) {
    require_size(V.size(), net.size(), "output vector");
    require_size(I.size(), net.size(), "current vector");
    Vector g(V.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!net.capacitor(i).in_range(V[i]))
            throw DomainError("potential_input_gradient: output outside the open cube");
        g[i] = -V[i];
    }
    return g;
}

Vector metric(const HopfieldNetwork& net, std::span<const double> V) {
    require_size(V.size(), net.size(), "output vector");
    Vector m(V.size());
    for (std::size_t i = 0; i < V.size(); ++i) m[i] = net.capacitor(i).metric_weight(V[i]);
    return m;
}

Matrix potential_hessian(const HopfieldNetwork& net, std::span<const double> V) {
    const Vector m = metric(net, V);
    const std::size_t n = net.size();
    Matrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = -net.coupling()(i, j);
    for (std::size_t i = 0; i < n; ++i) h(i, i) += net.relaxation_rates()[i] * m[i];
    return h;
}

double passivity_residual_at_charge(const HopfieldNetwork& net, std::span<const double> q) {
    const Vector V = outputs(net, q);
    const Vector v = soma_voltages(net, q);
    double dissipated = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) dissipated += V[i] * v[i] / net.resistances()[i];
    return dissipated - kernels::quadratic_form(net.coupling().data(), V);
}

DissipationRates dissipation_rates(const HopfieldNetwork& net, std::span<const double> q,
                                   std::span<const double> I, std::span<const double> Idot) {
    require_size(Idot.size(), net.size(), "current rate vector");
    const Vector V = outputs(net, q);
    const Vector dq = q_dynamics(net, q, I);
    const Vector slope = energy_hessian_diagonal(net, q);
    const Vector tv = coupled_outputs(net, V);
    const Vector& rates = net.relaxation_rates();

    DissipationRates out;
    out.energy_rate = kernels::dot(V, dq);
    double dp = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        // dP/dV_i from the charge, so it is defined wherever q is.
        const double grad = rates[i] * q[i] - tv[i] - I[i];
        const double dV = slope[i] * dq[i];
        dp += grad * dV - V[i] * Idot[i];
    }
    out.potential_rate = dp;
    out.passivity_residual = passivity_residual_at_charge(net, q);
    out.potential_residual = -kernels::dot(V, Idot) - dp;
    return out;
}

}  // namespace hopnet
