#include "taoquant/kernels.hpp"

#if defined(TAOQUANT_HAVE_NEON)

#include <arm_neon.h>

namespace taoquant::kernels::neon {

double sum(std::span<const double> x) {
    const double* p = x.data();
    const std::size_t n = x.size();
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(p + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(p + i + 2));
    }
    for (; i + 2 <= n; i += 2) {
        acc0 = vaddq_f64(acc0, vld1q_f64(p + i));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += p[i];
    return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
    const double* px = x.data();
    const double* py = y.data();
    const std::size_t n = x.size();
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(px + i), vld1q_f64(py + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(px + i + 2), vld1q_f64(py + i + 2));
    }
    for (; i + 2 <= n; i += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(px + i), vld1q_f64(py + i));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
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
    const float64x2_t m = vdupq_n_f64(mean);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(p + i), m);
        acc = vfmaq_f64(acc, d, d);
    }
    double r = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = p[i] - mean;
        r += d * d;
    }
    return r;
}

CenteredSums centered_sums(std::span<const double> x, double mean) {
    const double* p = x.data();
    const std::size_t n = x.size();
    const float64x2_t m = vdupq_n_f64(mean);
    float64x2_t a2 = vdupq_n_f64(0.0);
    float64x2_t a3 = vdupq_n_f64(0.0);
    float64x2_t a4 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(p + i), m);
        const float64x2_t d2 = vmulq_f64(d, d);
        a2 = vaddq_f64(a2, d2);
        a3 = vfmaq_f64(a3, d2, d);
        a4 = vfmaq_f64(a4, d2, d2);
    }
    CenteredSums s;
    s.m2 = vaddvq_f64(a2);
    s.m3 = vaddvq_f64(a3);
    s.m4 = vaddvq_f64(a4);
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
    const float64x2_t zero = vdupq_n_f64(0.0);
    float64x2_t aneg = vdupq_n_f64(0.0);
    float64x2_t apos = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(p + i);
        const float64x2_t sq = vmulq_f64(v, v);
        const uint64x2_t is_neg = vcltq_f64(v, zero);
        aneg = vaddq_f64(aneg, vbslq_f64(is_neg, sq, zero));
        apos = vaddq_f64(apos, vbslq_f64(is_neg, zero, sq));
    }
    SemidevSums s;
    s.neg_sq = vaddvq_f64(aneg);
    s.pos_sq = vaddvq_f64(apos);
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
    const float64x2_t vlo = vdupq_n_f64(lo);
    const float64x2_t vhi = vdupq_n_f64(hi);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(p + i);
        // Comparisons are false for NaN, so NaN lanes keep their value.
        const uint64x2_t below = vcltq_f64(v, vlo);
        const uint64x2_t above = vcgtq_f64(v, vhi);
        v = vbslq_f64(below, vlo, v);
        v = vbslq_f64(above, vhi, v);
        vst1q_f64(p + i, v);
    }
    for (; i < n; ++i) {
        if (p[i] < lo) {
            p[i] = lo;
        } else if (p[i] > hi) {
            p[i] = hi;
        }
    }
}

}  // namespace taoquant::kernels::neon

#endif  // TAOQUANT_HAVE_NEON
