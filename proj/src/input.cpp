#include "hopnet/input.hpp"

#include <cmath>

#include "hopnet/error.hpp"

namespace hopnet {

InputSignal InputSignal::constant(Vector current) {
    for (double c : current)
        if (!std::isfinite(c)) throw ValidationError("input current must be finite");
    return InputSignal(Constant{std::move(current)});
}

InputSignal InputSignal::zero(std::size_t n) { return constant(Vector(n, 0.0)); }

InputSignal InputSignal::sinusoid(Vector offset, Vector amplitude, double omega, double phase) {
    if (offset.empty()) offset.assign(amplitude.size(), 0.0);
    if (offset.size() != amplitude.size())
        throw DimensionError("sinusoid: offset and amplitude sizes differ");
    if (!std::isfinite(omega) || !std::isfinite(phase))
        throw ValidationError("sinusoid: omega and phase must be finite");
    return InputSignal(Sinusoid{std::move(offset), std::move(amplitude), omega, phase});
}

InputSignal InputSignal::custom(std::size_t n, std::function<Vector(double)> current,
                                std::function<Vector(double)> rate) {
    if (!current || !rate) throw ValidationError("custom input needs both I(t) and dI/dt");
    return InputSignal(Custom{n, std::move(current), std::move(rate)});
}

std::size_t InputSignal::size() const noexcept {
    struct {
        std::size_t operator()(const Constant& c) const { return c.current.size(); }
        std::size_t operator()(const Sinusoid& s) const { return s.amplitude.size(); }
        std::size_t operator()(const Custom& c) const { return c.dim; }
    } visitor;
    return std::visit(visitor, signal_);
}

bool InputSignal::is_constant() const noexcept {
    return std::holds_alternative<Constant>(signal_);
}

Vector InputSignal::current(double t) const {
    if (const auto* c = std::get_if<Constant>(&signal_)) return c->current;
    if (const auto* s = std::get_if<Sinusoid>(&signal_)) {
        Vector out(s->amplitude.size());
        const double sn = std::sin(s->omega * t + s->phase);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = s->offset[i] + s->amplitude[i] * sn;
        return out;
    }
    const auto& c = std::get<Custom>(signal_);
    Vector out = c.current(t);
    if (out.size() != c.dim) throw DimensionError("custom input returned wrong size");
    return out;
}

Vector InputSignal::rate(double t) const {
    if (const auto* c = std::get_if<Constant>(&signal_)) return Vector(c->current.size(), 0.0);
    if (const auto* s = std::get_if<Sinusoid>(&signal_)) {
        Vector out(s->amplitude.size());
        const double cs = s->omega * std::cos(s->omega * t + s->phase);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = s->amplitude[i] * cs;
        return out;
    }
    const auto& c = std::get<Custom>(signal_);
    Vector out = c.rate(t);
    if (out.size() != c.dim) throw DimensionError("custom input rate returned wrong size");
    return out;
}

}  // namespace hopnet
