#include "taoquant/kernels.hpp"

#if defined(TAOQUANT_HAVE_AVX2)

#include <immintrin.h>

namespace taoquant::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double sum(std::span<const double> x) {
    const double* p = x.data();
    const std::size_t n = x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(p + i + 4));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += p[i];
    return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
    const double* px = x.data();
    const double* py = y.data();
    const std::size_t n = x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i + 4), _mm256_loadu_pd(py + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += px[i] * py[i];
    return acc;
}

double dot_lagged(std::span<const double> x, std::span<const double> y, std::size_t lag) {
    if (lag >= x.size()) return 0.0;
    return dot(x.subspan(lag), y.first(x.size() - lag));
}

double centered_sumsq(std::span<const double> x, double mean) {
    const double* p = x.data();
    const std::size_t n = x.size();
    const __m256d m = _mm256_set1_pd(mean);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), m);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) {
        const double d = p[i] - mean;
        r += d * d;
    }
    return r;
}

CenteredSums centered_sums(std::span<const double> x, double mean) {
    const double* p = x.data();
    const std::size_t n = x.size();
    const __m256d m = _mm256_set1_pd(mean);
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    __m256d a4 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), m);
        const __m256d d2 = _mm256_mul_pd(d, d);
        a2 = _mm256_add_pd(a2, d2);
        a3 = _mm256_fmadd_pd(d2, d, a3);
        a4 = _mm256_fmadd_pd(d2, d2, a4);
    }
    CenteredSums s;
    s.m2 = hsum(a2);
    s.m3 = hsum(a3);
    s.m4 = hsum(a4);
    for (; i < n; ++i) {
        const double d = p[i] - mean;
        const double d2 = d * d;
        s.m2 += d2;
        s.m3 += d2 * d;
        s.m4 += d2 * d2;
    }
    return s;
}

SemidevSums semidev_sums(std::span<const double> x) {
    const double* p = x.data();
    const std::size_t n = x.size();
    const __m256d zero = _mm256_setzero_pd();
    __m256d aneg = _mm256_setzero_pd();
    __m256d apos = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(p + i);
        const __m256d sq = _mm256_mul_pd(v, v);
        const __m256d is_neg = _mm256_cmp_pd(v, zero, _CMP_LT_OQ);
        aneg = _mm256_add_pd(aneg, _mm256_and_pd(sq, is_neg));
        apos = _mm256_add_pd(apos, _mm256_andnot_pd(is_neg, sq));
    }
    SemidevSums s;
    s.neg_sq = hsum(aneg);
    s.pos_sq = hsum(apos);
    for (; i < n; ++i) {
        const double v = p[i];
        if (v < 0.0) {
            s.neg_sq += v * v;
        } else {
            s.pos_sq += v * v;
        }
    }
    return s;
}

void clamp(std::span<double> x, double lo, double hi) {
    double* p = x.data();
    const std::size_t n = x.size();
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(p + i);
        // Ordered compares are false for NaN, so NaN lanes keep their value.
        const __m256d below = _mm256_cmp_pd(v, vlo, _CMP_LT_OQ);
        const __m256d above = _mm256_cmp_pd(v, vhi, _CMP_GT_OQ);
        v = _mm256_blendv_pd(v, vlo, below);
        v = _mm256_blendv_pd(v, vhi, above);
        _mm256_storeu_pd(p + i, v);
    }
    for (; i < n; ++i) {
        if (p[i] < lo) {
            p[i] = lo;
        } else if (p[i] > hi) {
            p[i] = hi;
        }
    }
}

}  // namespace taoquant::kernels::avx2

#endif  // TAOQUANT_HAVE_AVX2
