#include "hopnet/capacitor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hopnet/error.hpp"

namespace hopnet {

namespace {

// ln cosh(x). The product form is exact near zero; past |x| = 20 cosh would
// lose the small correction, so use |x| - ln 2 + ln(1 + e^{-2|x|}).
double log_cosh(double x) {
    const double ax = std::abs(x);
    if (ax > 20.0) return ax - std::numbers::ln2 + std::log1p(std::exp(-2.0 * ax));
    const double s = std::sinh(0.5 * x);
    return std::log1p(2.0 * s * s);
}

// sech^2(x) without forming cosh^2 for large |x|.
double sech2(double x) {
    const double e = std::exp(-2.0 * std::abs(x));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

}  // namespace

std::string_view to_string(Activation a) noexcept {
    switch (a) {
        case Activation::tanh: return "tanh";
        case Activation::algebraic: return "algebraic";
    }
    return "unknown";
}

Activation activation_from_string(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "algebraic") return Activation::algebraic;
    throw ValidationError("unknown activation family '" + std::string(name) + "'");
}

CapacitorModel::CapacitorModel(Activation kind, double gain, double capacitance)
    : kind_(kind), gain_(gain), capacitance_(capacitance) {
    if (!(std::isfinite(gain) && gain > 0.0))
        throw ValidationError("capacitor gain must be finite and > 0");
    if (!(std::isfinite(capacitance) && capacitance > 0.0))
        throw ValidationError("capacitance must be finite and > 0");
}

void CapacitorModel::require_in_range(double V, const char* op) const {
    if (!in_range(V))
        throw DomainError(std::string(op) + ": output voltage " + std::to_string(V) +
                          " outside the open range (-1, 1)");
}

double CapacitorModel::activation(double v) const {
    const double x = gain_ * v;
    switch (kind_) {
        case Activation::tanh: return std::tanh(x);
        case Activation::algebraic: return x / std::hypot(1.0, x);
    }
    return 0.0;
}

double CapacitorModel::activation_slope(double v) const {
    const double x = gain_ * v;
    switch (kind_) {
        case Activation::tanh: return gain_ * sech2(x);
        case Activation::algebraic: {
            const double r = std::hypot(1.0, x);
            return gain_ / (r * r * r);
        }
    }
    return 0.0;
}

double CapacitorModel::output_at_charge(double q) const { return activation(q / capacitance_); }

double CapacitorModel::output_slope_at_charge(double q) const {
    return activation_slope(q / capacitance_) / capacitance_;
}

double CapacitorModel::charge_energy(double q) const {
    const double x = gain_ * q / capacitance_;
    const double scale = capacitance_ / gain_;
    switch (kind_) {
        case Activation::tanh: return scale * log_cosh(x);
        case Activation::algebraic: return scale * x * x / (std::hypot(1.0, x) + 1.0);
    }
    return 0.0;
}

double CapacitorModel::conjugate_energy(double V) const {
    require_in_range(V, "conjugate_energy");
    const double scale = capacitance_ / gain_;
    const double one_minus_sq = (1.0 - V) * (1.0 + V);
    switch (kind_) {
        case Activation::tanh: return scale * (V * std::atanh(V) + 0.5 * std::log(one_minus_sq));
        case Activation::algebraic: return scale * V * V / (1.0 + std::sqrt(one_minus_sq));
    }
    return 0.0;
}

double CapacitorModel::conjugate_energy_at_charge(double q) const {
    const double x = gain_ * q / capacitance_;
    const double scale = capacitance_ / gain_;
    switch (kind_) {
        case Activation::tanh: return scale * (x * std::tanh(x) - log_cosh(x));
        case Activation::algebraic: {
            const double r = std::hypot(1.0, x);
            return scale * x * x / (r * (r + 1.0));
        }
    }
    return 0.0;
}

double CapacitorModel::inverse_charge(double V) const {
    require_in_range(V, "inverse_charge");
    const double scale = capacitance_ / gain_;
    switch (kind_) {
        case Activation::tanh: return scale * std::atanh(V);
        case Activation::algebraic: return scale * V / std::sqrt((1.0 - V) * (1.0 + V));
    }
    return 0.0;
}

double CapacitorModel::metric_weight(double V) const {
    require_in_range(V, "metric_weight");
    const double scale = capacitance_ / gain_;
    const double one_minus_sq = (1.0 - V) * (1.0 + V);
    switch (kind_) {
        case Activation::tanh: return scale / one_minus_sq;
        case Activation::algebraic: return scale / (one_minus_sq * std::sqrt(one_minus_sq));
    }
    return 0.0;
}

double CapacitorModel::numeric_conjugate_energy(double V, double q_tolerance) const {
    require_in_range(V, "numeric_conjugate_energy");
    const auto objective = [&](double q) { return q * V - charge_energy(q); };

    const double centre = inverse_charge(V);
    double lo = centre - 5.0;
    double hi = centre + 5.0;
    constexpr double inv_phi = 0.6180339887498948482;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > q_tolerance) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
        if (x1 >= x2) break;  // bracket collapsed to adjacent doubles
    }
    return std::max({f1, f2, objective(0.5 * (lo + hi))});
}

}  // namespace hopnet
