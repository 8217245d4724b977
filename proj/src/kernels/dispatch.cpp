#include "hopnet/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace hopnet::kernels {

namespace {

struct Table {
    Isa isa;
    double (*dot)(const double*, const double*, std::size_t);
    void (*gemv)(const double*, const double*, double*, std::size_t, std::size_t);
    double (*quadratic_form)(const double*, const double*, std::size_t);
};

constexpr Table kScalar{Isa::scalar, &scalar::dot, &scalar::gemv, &scalar::quadratic_form};
constexpr Table kAvx2{Isa::avx2, &avx2::dot, &avx2::gemv, &avx2::quadratic_form};
constexpr Table kNeon{Isa::neon, &neon::dot, &neon::gemv, &neon::quadratic_form};

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool runnable(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return avx2::compiled() && cpu_has_avx2();
        case Isa::neon: return neon::compiled();  // NEON is baseline on AArch64
    }
    return false;
}

const Table* detect() noexcept {
    if (runnable(Isa::avx2)) return &kAvx2;
    if (runnable(Isa::neon)) return &kNeon;
    return &kScalar;
}

const Table* table_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::avx2: return &kAvx2;
        case Isa::neon: return &kNeon;
        case Isa::scalar: break;
    }
    return &kScalar;
}

std::atomic<const Table*>& current() {
    static std::atomic<const Table*> t{detect()};
    return t;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string("kernels::") + what + ": size mismatch");
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::scalar};
    if (runnable(Isa::avx2)) out.push_back(Isa::avx2);
    if (runnable(Isa::neon)) out.push_back(Isa::neon);
    return out;
}

Isa active() noexcept { return current().load(std::memory_order_relaxed)->isa; }

void force(Isa isa) {
    if (!runnable(isa))
        throw std::invalid_argument("kernels::force: " + std::string(to_string(isa)) +
                                    " is not available on this machine");
    current().store(table_for(isa), std::memory_order_relaxed);
}

void reset() { current().store(detect(), std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size(), "dot");
    return current().load(std::memory_order_relaxed)->dot(a.data(), b.data(), a.size());
}

void gemv(std::span<const double> a, std::span<const double> x, std::span<double> y) {
    check_sizes(a.size(), x.size() * y.size(), "gemv");
    current().load(std::memory_order_relaxed)->gemv(a.data(), x.data(), y.data(), y.size(), x.size());
}

double quadratic_form(std::span<const double> a, std::span<const double> x) {
    check_sizes(a.size(), x.size() * x.size(), "quadratic_form");
    return current().load(std::memory_order_relaxed)->quadratic_form(a.data(), x.data(), x.size());
}

}  // namespace hopnet::kernels
