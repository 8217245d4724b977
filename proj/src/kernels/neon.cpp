#include "hopnet/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#define HOPNET_HAVE_NEON 1
#else
#define HOPNET_HAVE_NEON 0
#endif

namespace hopnet::kernels::neon {

bool compiled() noexcept { return HOPNET_HAVE_NEON != 0; }

#if HOPNET_HAVE_NEON

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

double quadratic_form(const double* a, const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * dot(a + i * n, x, n);
    return s;
}

#else

double dot(const double*, const double*, std::size_t) { return 0.0; }
void gemv(const double*, const double*, double*, std::size_t, std::size_t) {}
double quadratic_form(const double*, const double*, std::size_t) { return 0.0; }

#endif

}  // namespace hopnet::kernels::neon
