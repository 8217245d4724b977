#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hopnet/capacitor.hpp"
#include "hopnet/linalg.hpp"

namespace hopnet {

// Continuous Hopfield network  C dv/dt = T V - R^{-1} v + I,  V_i = g_i(v_i).
//
// Immutable after construction. The constructor rejects non-positive
// resistances, size mismatches and any coupling matrix whose asymmetry
// exceeds kSymmetryTolerance; it never symmetrizes silently.
class HopfieldNetwork {
public:
    static constexpr double kSymmetryTolerance = 1e-12;

    HopfieldNetwork(std::vector<CapacitorModel> capacitors, Vector resistances, Matrix coupling);

    // n identical tanh neurons with the given gain and unit C and R.
    static HopfieldNetwork uniform(Matrix coupling, double gain, double capacitance = 1.0,
                                   double resistance = 1.0);

    std::size_t size() const noexcept { return capacitors_.size(); }
    const std::vector<CapacitorModel>& capacitors() const noexcept { return capacitors_; }
    const CapacitorModel& capacitor(std::size_t i) const { return capacitors_.at(i); }
    const Vector& resistances() const noexcept { return resistances_; }
    const Matrix& coupling() const noexcept { return coupling_; }

    // 1 / (R_i C_i), the per-node relaxation rate.
    const Vector& relaxation_rates() const noexcept { return rates_; }

    // Same topology and resistances with every gain replaced.
    HopfieldNetwork with_gain(double gain) const;

private:
    std::vector<CapacitorModel> capacitors_;
    Vector resistances_;
    Matrix coupling_;
    Vector rates_;
};

// A network state in its canonical charge coordinates. Soma voltages
// v = C^{-1} q and outputs V = dH/dq are derived on demand.
struct NetworkState {
    Vector q;

    Vector soma_voltages(const HopfieldNetwork& net) const;
    Vector outputs(const HopfieldNetwork& net) const;
};

Vector soma_voltages(const HopfieldNetwork& net, std::span<const double> q);

// V = dH/dq.
Vector outputs(const HopfieldNetwork& net, std::span<const double> q);

// diag of d^2H/dq^2, i.e. h_i'(q_i).
Vector energy_hessian_diagonal(const HopfieldNetwork& net, std::span<const double> q);

// q = dH*/dV. Throws DomainError outside the open cube.
Vector charges(const HopfieldNetwork& net, std::span<const double> V);

// dq/dt = T V - R^{-1} C^{-1} q + I.
Vector q_dynamics(const HopfieldNetwork& net, std::span<const double> q, std::span<const double> I);

// H(q) = sum_i H_i(q_i).
double total_energy(const HopfieldNetwork& net, std::span<const double> q);

// P(V, I) = -1/2 V^T T V + sum_i H_i*(V_i) / (R_i C_i) - V^T I. Dimension
// of power. Throws DomainError outside the open cube.
double dissipation_potential(const HopfieldNetwork& net, std::span<const double> V,
                             std::span<const double> I);

// P(V(q), I) evaluated through the charges, so it stays finite where V
// rounds to +-1 in floating point.
double dissipation_potential_at_charge(const HopfieldNetwork& net, std::span<const double> q,
                                       std::span<const double> I);

// dP/dV = -T V + (RC)^{-1} q(V) - I; equals -dq/dt at q(V).
Vector potential_gradient(const HopfieldNetwork& net, std::span<const double> V,
                          std::span<const double> I);

// dP/dI = -V.
Vector potential_input_gradient(const HopfieldNetwork& net, std::span<const double> V,
                                std::span<const double> I);

// Diagonal of the gradient-flow metric d^2H*/dV^2, the inverse of the
// energy Hessian at q(V). Throws DomainError outside the open cube.
Vector metric(const HopfieldNetwork& net, std::span<const double> V);

// d^2P/dV^2 = -T + diag(metric_i / (R_i C_i)).
Matrix potential_hessian(const HopfieldNetwork& net, std::span<const double> V);

// V^T R^{-1} v - V^T T V at the node voltages v.
double passivity_residual_at_charge(const HopfieldNetwork& net, std::span<const double> q);

struct DissipationRates {
    double energy_rate = 0.0;         // dH/dt = V^T dq/dt
    double potential_rate = 0.0;      // dP/dt = (dP/dV)^T dV/dt + (dP/dI)^T dI/dt
    double passivity_residual = 0.0;  // V^T R^{-1} v - V^T T V  (= I^T V - dH/dt)
    double potential_residual = 0.0;  // -V^T dI/dt - dP/dt  (= dV^T metric dV >= 0)
};

// All rates at the charge q under current I and its rate Idot.
DissipationRates dissipation_rates(const HopfieldNetwork& net, std::span<const double> q,
                                   std::span<const double> I, std::span<const double> Idot);

}  // namespace hopnet
