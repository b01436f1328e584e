#include "taoquant/kernels.hpp"

namespace taoquant::kernels::scalar {

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double dot_lagged(std::span<const double> x, std::span<const double> y, std::size_t lag) {
    double acc = 0.0;
    const std::size_t n = x.size();
    for (std::size_t t = lag; t < n; ++t) acc += x[t] * y[t - lag];
    return acc;
}

double centered_sumsq(std::span<const double> x, double mean) {
    double acc = 0.0;
    for (double v : x) {
        const double d = v - mean;
        acc += d * d;
    }
    return acc;
}

CenteredSums centered_sums(std::span<const double> x, double mean) {
    CenteredSums s;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        s.m2 += d2;
        s.m3 += d2 * d;
        s.m4 += d2 * d2;
    }
    return s;
}

SemidevSums semidev_sums(std::span<const double> x) {
    SemidevSums s;
    for (double v : x) {
        if (v < 0.0) {
            s.neg_sq += v * v;
        } else {
            s.pos_sq += v * v;
        }
    }
    return s;
}

void clamp(std::span<double> x, double lo, double hi) {
    for (double& v : x) {
        // NaN fails both comparisons and passes through.
        if (v < lo) {
            v = lo;
        } else if (v > hi) {
            v = hi;
        }
    }
}

}  // namespace taoquant::kernels::scalar
