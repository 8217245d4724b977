#pragma once

// Dense arithmetic kernels behind the network model: dot products,
// matrix-vector products and quadratic forms. Each kernel has a scalar
// reference implementation and SIMD variants (AVX2+FMA on x86-64, NEON on
// AArch64). The variant is picked once at startup from the running CPU and
// can be pinned for equivalence testing.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hopnet::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

// Variants compiled into this binary and runnable on this CPU. Always
// contains Isa::scalar.
std::vector<Isa> available();

Isa active() noexcept;

// Pins the dispatch target for the whole process. Throws
// std::invalid_argument when the variant is not available.
void force(Isa isa);

// Restores CPU-based selection.
void reset();

double dot(std::span<const double> a, std::span<const double> b);

// y = A x for row-major A of shape (y.size() x x.size()).
void gemv(std::span<const double> a, std::span<const double> x, std::span<double> y);

// x^T A x for row-major square A.
double quadratic_form(std::span<const double> a, std::span<const double> x);

// Explicit-variant entry points, used by the equivalence tests and by the
// dispatcher. Calling a variant the CPU does not support is undefined.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);
double quadratic_form(const double* a, const double* x, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled() noexcept;
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);
double quadratic_form(const double* a, const double* x, std::size_t n);
}  // namespace avx2

namespace neon {
bool compiled() noexcept;
double dot(const double* a, const double* b, std::size_t n);
void gemv(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);
double quadratic_form(const double* a, const double* x, std::size_t n);
}  // namespace neon

}  // namespace hopnet::kernels
