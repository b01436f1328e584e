#pragma once

#include <cstddef>
#include <span>

namespace taoquant::kernels {

enum class Isa { scalar, avx2, neon };

/// Instruction set used by the dispatched kernels. Resolved once from CPU
/// features; the TAOQUANT_SIMD environment variable (scalar|avx2|neon|auto)
/// overrides detection.
Isa active_isa();

/// Test hook: pin the active implementation. Throws ConfigError if the
/// requested ISA is not available in this build/CPU.
void force_isa(Isa isa);

/// Test hook: back to automatic detection.
void reset_isa();

const char* isa_name(Isa isa);

/// Sums of (x[i]-mean)^k for k = 2,3,4.
struct CenteredSums {
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

/// Sums of min(x,0)^2 and max(x,0)^2.
struct SemidevSums {
    double neg_sq = 0.0;
    double pos_sq = 0.0;
};

// Inputs must be finite; missing-value filtering happens in callers.
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// sum over t in [lag, n) of x[t] * y[t-lag].
double dot_lagged(std::span<const double> x, std::span<const double> y, std::size_t lag);

double centered_sumsq(std::span<const double> x, double mean);
CenteredSums centered_sums(std::span<const double> x, double mean);
SemidevSums semidev_sums(std::span<const double> x);

/// In-place clamp into [lo, hi]. NaN entries pass through untouched.
void clamp(std::span<double> x, double lo, double hi);

// Reference implementations. These are the ground truth the SIMD variants
// are equivalence-tested against, and the fallback on CPUs without them.
namespace scalar {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double dot_lagged(std::span<const double> x, std::span<const double> y, std::size_t lag);
double centered_sumsq(std::span<const double> x, double mean);
CenteredSums centered_sums(std::span<const double> x, double mean);
SemidevSums semidev_sums(std::span<const double> x);
void clamp(std::span<double> x, double lo, double hi);
}  // namespace scalar

#if defined(TAOQUANT_HAVE_AVX2)
namespace avx2 {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double dot_lagged(std::span<const double> x, std::span<const double> y, std::size_t lag);
double centered_sumsq(std::span<const double> x, double mean);
CenteredSums centered_sums(std::span<const double> x, double mean);
SemidevSums semidev_sums(std::span<const double> x);
void clamp(std::span<double> x, double lo, double hi);
}  // namespace avx2
#endif

#if defined(TAOQUANT_HAVE_NEON)
namespace neon {
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double dot_lagged(std::span<const double> x, std::span<const double> y, std::size_t lag);
double centered_sumsq(std::span<const double> x, double mean);
CenteredSums centered_sums(std::span<const double> x, double mean);
SemidevSums semidev_sums(std::span<const double> x);
void clamp(std::span<double> x, double lo, double hi);
}  // namespace neon
#endif

}  // namespace taoquant::kernels
