#pragma once

#include <functional>
#include <variant>

#include "hopnet/linalg.hpp"

namespace hopnet {

// External currents I(t) together with their time derivative dI/dt. The
// dissipation inequality for the potential needs dI/dt exactly, so every
// signal carries its own derivative instead of differencing samples.
class InputSignal {
public:
    struct Constant {
        Vector current;
    };
    // I(t) = offset + amplitude * sin(omega t + phase), componentwise.
    struct Sinusoid {
        Vector offset;
        Vector amplitude;
        double omega = 1.0;
        double phase = 0.0;
    };
    struct Custom {
        std::size_t dim = 0;
        std::function<Vector(double)> current;
        std::function<Vector(double)> rate;
    };

    static InputSignal constant(Vector current);
    static InputSignal zero(std::size_t n);
    static InputSignal sinusoid(Vector offset, Vector amplitude, double omega, double phase = 0.0);
    static InputSignal custom(std::size_t n, std::function<Vector(double)> current,
                              std::function<Vector(double)> rate);

    std::size_t size() const noexcept;
    bool is_constant() const noexcept;

    Vector current(double t) const;
    Vector rate(double t) const;

    const std::variant<Constant, Sinusoid, Custom>& kind() const noexcept { return signal_; }

private:
    explicit InputSignal(std::variant<Constant, Sinusoid, Custom> s) : signal_(std::move(s)) {}

    std::variant<Constant, Sinusoid, Custom> signal_;
};

}  // namespace hopnet
