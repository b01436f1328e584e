#include "taoquant/kernels.hpp"

#include <cstdlib>
#include <string>

#include "taoquant/errors.hpp"

namespace taoquant::kernels {

namespace {

struct Vtable {
    double (*sum)(std::span<const double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    double (*dot_lagged)(std::span<const double>, std::span<const double>, std::size_t);
    double (*centered_sumsq)(std::span<const double>, double);
    CenteredSums (*centered_sums)(std::span<const double>, double);
    SemidevSums (*semidev_sums)(std::span<const double>);
    void (*clamp)(std::span<double>, double, double);
};

constexpr Vtable kScalar{scalar::sum,           scalar::dot,          scalar::dot_lagged,
                         scalar::centered_sumsq, scalar::centered_sums, scalar::semidev_sums,
                         scalar::clamp};

#if defined(TAOQUANT_HAVE_AVX2)
constexpr Vtable kAvx2{avx2::sum,           avx2::dot,          avx2::dot_lagged,
                       avx2::centered_sumsq, avx2::centered_sums, avx2::semidev_sums,
                       avx2::clamp};
#endif

#if defined(TAOQUANT_HAVE_NEON)
constexpr Vtable kNeon{neon::sum,           neon::dot,          neon::dot_lagged,
                       neon::centered_sumsq, neon::centered_sums, neon::semidev_sums,
                       neon::clamp};
#endif

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(TAOQUANT_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::neon:
#if defined(TAOQUANT_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const Vtable& table_for(Isa isa) {
    switch (isa) {
#if defined(TAOQUANT_HAVE_AVX2)
        case Isa::avx2:
            return kAvx2;
#endif
#if defined(TAOQUANT_HAVE_NEON)
        case Isa::neon:
            return kNeon;
#endif
        default:
            return kScalar;
    }
}

Isa detect() {
    if (const char* env = std::getenv("TAOQUANT_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return Isa::scalar;
        if (want == "avx2" || want == "neon") {
            const Isa isa = want == "avx2" ? Isa::avx2 : Isa::neon;
            if (!isa_available(isa))
                throw ConfigError("TAOQUANT_SIMD=" + want + " requested but not available");
            return isa;
        }
        if (!want.empty() && want != "auto")
            throw ConfigError("TAOQUANT_SIMD must be scalar, avx2, neon, or auto (got '" + want +
                              "')");
    }
    if (isa_available(Isa::avx2)) return Isa::avx2;
    if (isa_available(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

struct State {
    Isa isa;
    const Vtable* table;
};

State& state() {
    static State s = [] {
        const Isa isa = detect();
        return State{isa, &table_for(isa)};
    }();
    return s;
}

}  // namespace

Isa active_isa() { return state().isa; }

void force_isa(Isa isa) {
    if (!isa_available(isa))
        throw ConfigError(std::string("kernel ISA '") + isa_name(isa) +
                          "' not available in this build");
    state() = State{isa, &table_for(isa)};
}

void reset_isa() {
    const Isa isa = detect();
    state() = State{isa, &table_for(isa)};
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::neon:
            return "neon";
    }
    return "?";
}

double sum(std::span<const double> x) { return state().table->sum(x); }

double dot(std::span<const double> x, std::span<const double> y) {
    return state().table->dot(x, y);
}

double dot_lagged(std::span<const double> x, std::span<const double> y, std::size_t lag) {
    return state().table->dot_lagged(x, y, lag);
}

double centered_sumsq(std::span<const double> x, double mean) {
    return state().table->centered_sumsq(x, mean);
}

CenteredSums centered_sums(std::span<const double> x, double mean) {
    return state().table->centered_sums(x, mean);
}

SemidevSums semidev_sums(std::span<const double> x) { return state().table->semidev_sums(x); }

void clamp(std::span<double> x, double lo, double hi) { state().table->clamp(x, lo, hi); }

}  // namespace taoquant::kernels
