#pragma once

#include <cstdint>

namespace hopnet::detail {

// SplitMix64 (Steele, Lea & Flood). Each randomized operation derives one
// stream per work item from (seed, index), so results do not depend on how
// items are scheduled.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    SplitMix64(std::uint64_t seed, std::uint64_t stream)
        : state_(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1))) {
        next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform on [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    bool coin() { return (next() >> 63) != 0; }

private:
    std::uint64_t state_;
};

}  // namespace hopnet::detail
