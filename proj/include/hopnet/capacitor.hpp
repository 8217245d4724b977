#pragma once

#include <string_view>

namespace hopnet {

// Sigmoid families shipped with exact derivatives. Both are odd and map the
// real line onto (-1, 1).
//   tanh:      g(v) = tanh(gain * v)
//   algebraic: g(v) = gain * v / sqrt(1 + (gain * v)^2)
enum class Activation { tanh, algebraic };

std::string_view to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view name);  // throws ValidationError

// One neuron's nonlinear capacitor.
//
// The soma voltage v and charge q are related by q = C v. The output
// voltage is V = g(v) = h(q) with h(q) := g(q / C), and h is the derivative
// of the stored energy H(q), normalized so that H(0) = 0. H* is the convex
// conjugate of H; its derivative inverts h and its second derivative is the
// metric weight 1 / h'(q).
class CapacitorModel {
public:
    // Throws ValidationError unless gain and capacitance are finite and > 0.
    explicit CapacitorModel(Activation kind = Activation::tanh, double gain = 1.0,
                            double capacitance = 1.0);

    Activation kind() const noexcept { return kind_; }
    double gain() const noexcept { return gain_; }
    double capacitance() const noexcept { return capacitance_; }

    // g(v) and g'(v).
    double activation(double v) const;
    double activation_slope(double v) const;

    // h(q) and h'(q). h' is computed without cancellation, so it stays
    // positive (but may underflow) for large |q|.
    double output_at_charge(double q) const;
    double output_slope_at_charge(double q) const;

    // H(q). Overflow-safe for large |q|.
    double charge_energy(double q) const;

    // H*(V). Throws DomainError when V lies outside the open range (-1, 1),
    // where the conjugate is +inf.
    double conjugate_energy(double V) const;

    // H*(h(q)) evaluated from the charge, finite for every finite q. Equal
    // to q h(q) - H(q) on the graph.
    double conjugate_energy_at_charge(double q) const;

    // q with h(q) = V, i.e. dH*/dV. Throws DomainError outside (-1, 1).
    double inverse_charge(double V) const;

    // d^2H*/dV^2 = 1 / h'(q(V)). Throws DomainError outside (-1, 1).
    double metric_weight(double V) const;

    bool in_range(double V) const noexcept { return V > -1.0 && V < 1.0; }

    // sup_q [q V - H(q)] by golden-section search on the concave objective.
    // Uses only charge_energy, so it checks the closed-form conjugate
    // independently. Throws DomainError outside (-1, 1).
    double numeric_conjugate_energy(double V, double q_tolerance = 1e-12) const;

    friend bool operator==(const CapacitorModel&, const CapacitorModel&) = default;

private:
    void require_in_range(double V, const char* op) const;

    Activation kind_;
    double gain_;
    double capacitance_;
};

}  // namespace hopnet
