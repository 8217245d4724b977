// Compiled with -mavx2 -mfma on x86-64; only reached after the dispatcher
// has confirmed both extensions at runtime.
#include "hopnet/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define HOPNET_HAVE_AVX2 1
#else
#define HOPNET_HAVE_AVX2 0
#endif

namespace hopnet::kernels::avx2 {

bool compiled() noexcept { return HOPNET_HAVE_AVX2 != 0; }

#if HOPNET_HAVE_AVX2

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void gemv(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
    // Four rows at a time share each load of x.
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        const double* a0 = a + r * cols;
        const double* a1 = a0 + cols;
        const double* a2 = a1 + cols;
        const double* a3 = a2 + cols;
        __m256d s0 = _mm256_setzero_pd();
        __m256d s1 = _mm256_setzero_pd();
        __m256d s2 = _mm256_setzero_pd();
        __m256d s3 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 4 <= cols; j += 4) {
            const __m256d xv = _mm256_loadu_pd(x + j);
            s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + j), xv, s0);
            s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + j), xv, s1);
            s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + j), xv, s2);
            s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + j), xv, s3);
        }
        double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
        for (; j < cols; ++j) {
            t0 += a0[j] * x[j];
            t1 += a1[j] * x[j];
            t2 += a2[j] * x[j];
            t3 += a3[j] * x[j];
        }
        y[r] = t0;
        y[r + 1] = t1;
        y[r + 2] = t2;
        y[r + 3] = t3;
    }
    for (; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
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

}  // namespace hopnet::kernels::avx2
