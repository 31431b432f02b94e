#include "stratify/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#define STRATIFY_AVX2 __attribute__((target("avx2,fma")))

namespace stratify::simd::avx2 {
namespace {

STRATIFY_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Lanes selecting the first `rem` (1..3) elements of a 4-wide load.
STRATIFY_AVX2 inline __m256i tail_mask(std::size_t rem) {
    static const long long bits[8] = {-1, -1, -1, -1, 0, 0, 0, 0};
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + 4 - rem));
}

// Squared differences folded into four lanes; the tail is a masked load so
// rows of any width go through the same vector path.
STRATIFY_AVX2 inline __m256d squared_lanes(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    if (i < n) {
        __m256i m = tail_mask(n - i);
        __m256d d = _mm256_sub_pd(_mm256_maskload_pd(a + i, m), _mm256_maskload_pd(b + i, m));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    return acc;
}

// (l0 + l1) + (l2 + l3): the order the four-row path below reduces in, so a
// distance comes out bit-identical whichever entry point computed it.
STRATIFY_AVX2 inline double fold(__m256d v) {
    __m256d h = _mm256_hadd_pd(v, v);
    return _mm_cvtsd_f64(_mm_add_sd(_mm256_castpd256_pd128(h), _mm256_extractf128_pd(h, 1)));
}

STRATIFY_AVX2 inline double squared_distance(const double* a, const double* b, std::size_t n) {
    return fold(squared_lanes(a, b, n));
}

// Four rows per step, reduced together with two hadds and a lane swap
// instead of four separate horizontal sums.
STRATIFY_AVX2 void squared_distance_rows(const double* rows, std::size_t count, std::size_t n, const double* q,
                                         double* out) {
    std::size_t r = 0;
    for (; r + 4 <= count; r += 4) {
        const double* base = rows + r * n;
        __m256d a0 = squared_lanes(base, q, n);
        __m256d a1 = squared_lanes(base + n, q, n);
        __m256d a2 = squared_lanes(base + 2 * n, q, n);
        __m256d a3 = squared_lanes(base + 3 * n, q, n);
        __m256d t0 = _mm256_hadd_pd(a0, a1);
        __m256d t1 = _mm256_hadd_pd(a2, a3);
        __m256d lo = _mm256_permute2f128_pd(t0, t1, 0x20);
        __m256d hi = _mm256_permute2f128_pd(t0, t1, 0x31);
        _mm256_storeu_pd(out + r, _mm256_add_pd(lo, hi));
    }
    for (; r < count; ++r) out[r] = squared_distance(rows + r * n, q, n);
}

STRATIFY_AVX2 double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

STRATIFY_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable table{squared_distance, dot, axpy, squared_distance_rows};

}  // namespace stratify::simd::avx2

#else

namespace stratify::simd::avx2 {
const KernelTable table{nullptr, nullptr, nullptr, nullptr};
}

#endif
