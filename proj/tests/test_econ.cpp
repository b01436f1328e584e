#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "taoquant/econometrics.hpp"
#include "taoquant/errors.hpp"

using namespace taoquant;
using econ::RegressionResult;
using factors::FactorSeries;
using linalg::Mat;

namespace {

const Date kDay0 = Date(2025, 2, 14);
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

FactorSeries mk_series(const std::string& name, const std::vector<double>& returns) {
    FactorSeries f;
    f.name = name;
    for (std::size_t t = 0; t < returns.size(); ++t) f.dates.push_back(kDay0 + static_cast<int>(t));
    f.returns = returns;
    f.long_count.assign(returns.size(), 1);
    f.short_count.assign(returns.size(), 1);
    return f;
}

/// Brute-force OLS oracle: explicit Gauss-Jordan inversion of X'X in long
/// double, nothing shared with the library path.
std::vector<double> ols_oracle(const std::vector<double>& y, const std::vector<std::vector<double>>& cols) {
    const std::size_t n = y.size();
    const std::size_t k = cols.size();
    std::vector<std::vector<long double>> a(k, std::vector<long double>(2 * k, 0.0L));
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q)
            for (std::size_t i = 0; i < n; ++i)
                a[p][q] += static_cast<long double>(cols[p][i]) * cols[q][i];
        a[p][k + p] = 1.0L;
    }
    for (std::size_t p = 0; p < k; ++p) {  // partial pivoting
        std::size_t piv = p;
        for (std::size_t q = p + 1; q < k; ++q)
            if (std::abs(static_cast<double>(a[q][p])) > std::abs(static_cast<double>(a[piv][p])))
                piv = q;
        std::swap(a[p], a[piv]);
        const long double d = a[p][p];
        for (auto& v : a[p]) v /= d;
        for (std::size_t q = 0; q < k; ++q) {
            if (q == p) continue;
            const long double m = a[q][p];
            for (std::size_t c = 0; c < 2 * k; ++c) a[q][c] -= m * a[p][c];
        }
    }
    std::vector<long double> xty(k, 0.0L);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t i = 0; i < n; ++i)
            xty[p] += static_cast<long double>(cols[p][i]) * y[i];
    std::vector<double> beta(k, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
        long double acc = 0.0L;
        for (std::size_t q = 0; q < k; ++q) acc += a[p][k + q] * xty[q];
        beta[p] = static_cast<double>(acc);
    }
    return beta;
}

/// Brute-force Bartlett HAC variance by the O(n^2 L) double sum.
std::vector<double> nw_oracle(const RegressionResult& r, int lags) {
    const std::size_t n = r.n(), k = r.k();
    std::vector<std::vector<long double>> xtx_inv(k, std::vector<long double>(k, 0.0L));
    {
        // Invert X'X with the same Gauss-Jordan helper, inline for long double.
        std::vector<std::vector<long double>> a(k, std::vector<long double>(2 * k, 0.0L));
        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t q = 0; q < k; ++q)
                for (std::size_t i = 0; i < n; ++i)
                    a[p][q] += static_cast<long double>(r.X(i, p)) * r.X(i, q);
            a[p][k + p] = 1.0L;
        }
        for (std::size_t p = 0; p < k; ++p) {
            std::size_t piv = p;
            for (std::size_t q = p + 1; q < k; ++q)
                if (std::abs(static_cast<double>(a[q][p])) >
                    std::abs(static_cast<double>(a[piv][p])))
                    piv = q;
            std::swap(a[p], a[piv]);
            const long double d = a[p][p];
            for (auto& v : a[p]) v /= d;
            for (std::size_t q = 0; q < k; ++q) {
                if (q == p) continue;
                const long double m = a[q][p];
                for (std::size_t c = 0; c < 2 * k; ++c) a[q][c] -= m * a[p][c];
            }
        }
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = 0; q < k; ++q) xtx_inv[p][q] = a[p][k + q];
    }

    // S by the literal double sum over (t, s) pairs.
    std::vector<std::vector<long double>> s(k, std::vector<long double>(k, 0.0L));
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t u = 0; u < n; ++u) {
            const auto gap = static_cast<long long>(t) - static_cast<long long>(u);
            if (std::llabs(gap) > lags) continue;
            const long double w = 1.0L - static_cast<long double>(std::llabs(gap)) / (lags + 1.0L);
            const long double ee =
                static_cast<long double>(r.residuals[t]) * r.residuals[u] * w;
            for (std::size_t p = 0; p < k; ++p)
                for (std::size_t q = 0; q < k; ++q)
                    s[p][q] += ee * r.X(t, p) * r.X(u, q);
        }

    std::vector<double> se(k, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
        long double acc = 0.0L;
        for (std::size_t a2 = 0; a2 < k; ++a2)
            for (std::size_t b = 0; b < k; ++b)
                acc += xtx_inv[p][a2] * s[a2][b] * xtx_inv[b][p];
        se[p] = std::sqrt(static_cast<double>(acc));
    }
    return se;
}

}  // namespace

TEST_CASE("ols: exact line recovers coefficients and R2 = 1") {
    std::vector<double> x(20), y(20);
    for (std::size_t i = 0; i < 20; ++i) {
        x[i] = 0.1 * static_cast<double>(i) - 1.0;
        y[i] = 3.0 + 2.0 * x[i];
    }
    Mat design(20, 1);
    std::copy(x.begin(), x.end(), design.col(0).begin());
    const auto r = econ::ols(y, design, {"const", "x"}, true);
    CHECK(r.coef[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.coef[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.names[0] == "const");
    // Residual orthogonality: max |X'e| small relative to scale.
    for (std::size_t j = 0; j < 2; ++j) {
        double xe = 0.0;
        for (std::size_t i = 0; i < 20; ++i) xe += r.X(i, j) * r.residuals[i];
        CHECK(std::abs(xe) <= 1e-8 * 20.0);
    }
}

TEST_CASE("ols: singular design names the offending column") {
    std::vector<double> y(30);
    for (std::size_t i = 0; i < 30; ++i) y[i] = i % 2 == 0 ? 1.0 : -1.0;
    Mat bad(30, 1);  // constant column duplicates the intercept
    for (std::size_t i = 0; i < 30; ++i) bad(i, 0) = 5.0;
    try {
        (void)econ::ols(y, bad, {"const", "dup"}, true);
        CHECK(false);
    } catch (const SingularDesignError& e) {
        REQUIRE(e.columns().size() == 1);
        CHECK(e.columns()[0] == "dup");
    }
}

TEST_CASE("ols: regressor orthogonal to y gets slope 0") {
    // Constant y against a zero-mean alternating regressor: slope exactly 0.
    std::vector<double> x2(30), y3(30, 7.0);
    for (std::size_t i = 0; i < 30; ++i) x2[i] = i % 2 == 0 ? 1.0 : -1.0;
    Mat d2(30, 1);
    std::copy(x2.begin(), x2.end(), d2.col(0).begin());
    const auto r = econ::ols(y3, d2, {}, true);
    CHECK(r.coef[0] == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(std::abs(r.coef[1]) <= 1e-12);
}

TEST_CASE("ols: random systems match the explicit-inversion oracle to 1e-10") {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 50;
        const std::size_t kx = 1 + trial % 4;
        std::vector<std::vector<double>> cols(kx + 1, std::vector<double>(n, 1.0));
        Mat design(n, kx);
        for (std::size_t j = 0; j < kx; ++j)
            for (std::size_t i = 0; i < n; ++i) {
                cols[j + 1][i] = g(rng);
                design(i, j) = cols[j + 1][i];
            }
        std::vector<double> y(n);
        for (auto& v : y) v = 0.5 + g(rng);

        const auto r = econ::ols(y, design, {}, true);
        const auto oracle = ols_oracle(y, cols);
        REQUIRE(r.coef.size() == oracle.size());
        for (std::size_t j = 0; j <= kx; ++j)
            CHECK(r.coef[j] == doctest::Approx(oracle[j]).epsilon(1e-10));
        CHECK(r.r2 >= 0.0);
        CHECK(r.r2 <= 1.0);
    }
}

TEST_CASE("ols: guards") {
    Mat x(3, 2);
    std::vector<double> y{1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)econ::ols(y, x, {}, true), InsufficientSampleError);
    std::vector<double> bad{1.0, kNaN, 3.0};
    CHECK_THROWS_AS((void)econ::ols(bad, Mat(3, 0), {}, true), DataError);
    CHECK_THROWS_AS((void)econ::ols(y, Mat(3, 0), {}, false), ConfigError);
}

TEST_CASE("newey-west: lags 0 equals White errors to 1e-12") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 80;
    std::vector<double> y(n);
    Mat x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = g(rng);
        x(i, 1) = g(rng);
        y[i] = 0.2 + 0.7 * x(i, 0) + (1.0 + 0.5 * std::abs(x(i, 1))) * g(rng);
    }
    auto r = econ::ols(y, x, {}, true);
    econ::newey_west_se(r, 0);

    // White oracle: (X'X)^{-1} (sum e_i^2 x_i x_i') (X'X)^{-1}, no df scaling.
    const auto oracle = nw_oracle(r, 0);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(r.hac_se[j] == doctest::Approx(oracle[j]).epsilon(1e-12));
    CHECK(r.hac_lags == 0);
}

TEST_CASE("newey-west: random regressions match the double-sum oracle to 1e-10") {
    std::mt19937_64 rng(55);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 60 + (trial % 3) * 25;
        const int lags = trial % 7;
        const std::size_t kx = 1 + trial % 3;
        std::vector<double> y(n);
        Mat x(n, kx);
        double ar = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < kx; ++j) x(i, j) = g(rng);
            ar = 0.6 * ar + g(rng);  // serially correlated noise
            y[i] = 0.1 + ar;
        }
        auto r = econ::ols(y, x, {}, true);
        econ::newey_west_se(r, lags);
        const auto oracle = nw_oracle(r, lags);
        for (std::size_t j = 0; j < r.k(); ++j)
            CHECK(r.hac_se[j] == doctest::Approx(oracle[j]).epsilon(1e-10));
    }
}

TEST_CASE("newey-west: guards and p-value conventions") {
    std::vector<double> y(10, 0.0);
    for (std::size_t i = 0; i < 10; ++i) y[i] = static_cast<double>(i % 3) - 1.0;
    auto r = econ::ols(y, Mat(10, 0), {}, true);
    CHECK_THROWS_AS(econ::newey_west_se(r, -1), ConfigError);
    CHECK_THROWS_AS(econ::newey_west_se(r, 10), ConfigError);
    econ::newey_west_se(r, 2);
    CHECK(r.hac_se[0] > 0.0);
    // p in [0,1], monotone in |t|.
    CHECK(r.hac_p(0) >= 0.0);
    CHECK(r.hac_p(0) <= 1.0);
    CHECK(r.ols_p(0) >= 0.0);
    CHECK(r.ols_p(0) <= 1.0);
}

TEST_CASE("newey-west: iid noise keeps NW se near OLS se") {
    // With spherical errors the Bartlett correction should not move the se
    // much; check the ratio stays around 1 on average over repetitions.
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g(0.0, 1.0);
    double ratio_sum = 0.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const std::size_t n = 150;
        std::vector<double> y(n);
        for (auto& v : y) v = g(rng);
        auto r = econ::ols(y, Mat(n, 0), {}, true);
        econ::newey_west_se(r, 5);
        ratio_sum += r.hac_se[0] / r.ols_se[0];
    }
    CHECK(ratio_sum / reps == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("summary_stats: moments, Sharpe identity, alternating series") {
    std::vector<double> alt;
    for (int i = 0; i < 40; ++i) alt.push_back(i % 2 == 0 ? 0.03 : -0.03);
    const auto s = econ::summary_stats(alt, 5);
    CHECK(s.mean == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(s.skew == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(s.n == 40);
    CHECK(s.sharpe == doctest::Approx(s.mean / s.stddev * std::sqrt(365.0)).epsilon(1e-12));
    CHECK(s.t_ols == doctest::Approx(s.mean / (s.stddev / std::sqrt(40.0))).epsilon(1e-12));

    // NaNs dropped, not poisoning.
    std::vector<double> with_gaps = alt;
    with_gaps.push_back(kNaN);
    const auto s2 = econ::summary_stats(with_gaps, 5);
    CHECK(s2.n == 40);
    CHECK(s2.mean == s.mean);

    // Raw vs excess kurtosis differ by exactly 3.
    const auto s3 = econ::summary_stats(alt, 5, true);
    CHECK(s.kurt - s3.kurt == doctest::Approx(3.0).epsilon(1e-12));

    CHECK_THROWS_AS(econ::summary_stats(std::vector<double>{1.0}, 5), InsufficientSampleError);
    CHECK_THROWS_AS(econ::summary_stats(std::vector<double>(30, 0.02), 5), ZeroVarianceError);
}

TEST_CASE("summary_stats: kurtosis of a known pattern") {
    // Values {-2,-1,1,2} repeated 10x: mean 0, sum of squares 100,
    // sum of fourth powers 340.
    std::vector<double> x;
    for (int i = 0; i < 10; ++i) {
        x.push_back(-2.0);
        x.push_back(-1.0);
        x.push_back(1.0);
        x.push_back(2.0);
    }
    const auto s = econ::summary_stats(x, 5);
    const double n = 40.0;
    const double var = 10.0 * 10.0 / (n - 1.0);  // sum of squares 100
    CHECK(s.stddev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    const double m4 = 10.0 * (16.0 + 1.0 + 1.0 + 16.0) / n;
    CHECK(s.kurt == doctest::Approx(m4 / (var * var)).epsilon(1e-12));
}

TEST_CASE("fama-macbeth: noiseless exact factor structure is recovered exactly") {
    // r_it = beta_i * f_t with known lambda = E[f]; second pass slopes are
    // exactly f_t each day, so premium = mean(f), se from its time variation.
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 0.01);
    const std::size_t days = 80, n_sub = 10;
    std::vector<double> f(days);
    for (auto& v : f) v = 0.004 + g(rng);
    std::vector<double> beta(n_sub);
    for (std::size_t i = 0; i < n_sub; ++i) beta[i] = 0.5 + 0.15 * static_cast<double>(i);

    panel::ReturnPanel p;
    for (std::size_t t = 0; t < days; ++t) p.dates.push_back(kDay0 + static_cast<int>(t));
    for (std::size_t i = 0; i < n_sub; ++i) p.netuids.push_back(static_cast<int>(i) + 1);
    p.r_tao.assign(days * n_sub, 0.0);
    p.r_usd.assign(days * n_sub, kNaN);
    p.eligible.assign(days * n_sub, 1);
    for (std::size_t t = 0; t < days; ++t)
        for (std::size_t i = 0; i < n_sub; ++i) p.r_tao[t * n_sub + i] = beta[i] * f[t];

    std::vector<FactorSeries> facs{mk_series("F", f)};
    const auto fm = econ::fama_macbeth(p, facs, 60);
    REQUIRE(fm.names.size() == 2);
    CHECK(fm.names[1] == "F");
    CHECK(fm.n_days == days);
    CHECK(fm.n_subnets == n_sub);
    CHECK(fm.avg_cross_section == doctest::Approx(10.0));
    const double fbar = std::accumulate(f.begin(), f.end(), 0.0) / days;
    CHECK(fm.premia[1] == doctest::Approx(fbar).epsilon(1e-9));
    CHECK(std::abs(fm.premia[0]) <= 1e-10);  // zero intercept by construction
    CHECK(fm.se[0] <= 1e-10);                // noiseless: daily intercepts identical
}

TEST_CASE("fama-macbeth: history bar, day thinning and diagnostics") {
    std::mt19937_64 rng(67);
    std::normal_distribution<double> g(0.0, 0.02);
    const std::size_t days = 90, n_sub = 9;
    std::vector<double> f(days);
    for (auto& v : f) v = 0.002 + g(rng);

    panel::ReturnPanel p;
    for (std::size_t t = 0; t < days; ++t) p.dates.push_back(kDay0 + static_cast<int>(t));
    for (std::size_t i = 0; i < n_sub; ++i) p.netuids.push_back(static_cast<int>(i) + 1);
    p.r_tao.assign(days * n_sub, kNaN);
    p.r_usd.assign(days * n_sub, kNaN);
    p.eligible.assign(days * n_sub, 1);
    for (std::size_t t = 0; t < days; ++t)
        for (std::size_t i = 0; i < n_sub; ++i) {
            if (i == 0 && t >= 30) continue;  // subnet 1 has only 30 days: excluded
            p.r_tao[t * n_sub + i] = (0.5 + 0.2 * static_cast<double>(i)) * f[t] + 0.3 * g(rng);
        }
    // Blank day 89 down to a single usable subnet: below the kc+1 = 3
    // threshold for one factor, so the day is skipped and counted.
    for (std::size_t i = 2; i < n_sub; ++i) p.r_tao[89 * n_sub + i] = kNaN;

    std::vector<FactorSeries> facs{mk_series("F", f)};
    const auto fm = econ::fama_macbeth(p, facs, 60);
    CHECK(fm.excluded_subnets == 1);
    CHECK(fm.n_subnets == 8);
    CHECK(fm.skipped_days == 1);  // day 89 has 1 usable subnet (uid2 only)
    CHECK(fm.n_days == 89);
    CHECK(fm.premia.size() == 2);
    CHECK(fm.se[1] > 0.0);
    CHECK(fm.t[1] == doctest::Approx(fm.premia[1] / fm.se[1]).epsilon(1e-12));
}

TEST_CASE("fama-macbeth: rescaling a factor rescales its premium by 1/c") {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> g(0.0, 0.015);
    const std::size_t days = 70, n_sub = 8;
    std::vector<double> f(days);
    for (auto& v : f) v = 0.003 + g(rng);

    panel::ReturnPanel p;
    for (std::size_t t = 0; t < days; ++t) p.dates.push_back(kDay0 + static_cast<int>(t));
    for (std::size_t i = 0; i < n_sub; ++i) p.netuids.push_back(static_cast<int>(i) + 1);
    p.r_tao.assign(days * n_sub, 0.0);
    p.r_usd.assign(days * n_sub, kNaN);
    p.eligible.assign(days * n_sub, 1);
    for (std::size_t t = 0; t < days; ++t)
        for (std::size_t i = 0; i < n_sub; ++i)
            p.r_tao[t * n_sub + i] =
                0.001 + (0.4 + 0.21 * static_cast<double>(i)) * f[t] + 0.1 * g(rng);

    const double c = 4.0;
    std::vector<double> scaled(f);
    for (auto& v : scaled) v *= c;
    std::vector<FactorSeries> facs1{mk_series("F", f)};
    std::vector<FactorSeries> facs2{mk_series("F", scaled)};
    const auto fm1 = econ::fama_macbeth(p, facs1, 60);
    const auto fm2 = econ::fama_macbeth(p, facs2, 60);
    // Betas shrink by 1/c, slopes grow by c... premium in return units is the
    // slope times beta; the slope itself scales by c.
    CHECK(fm2.premia[1] == doctest::Approx(c * fm1.premia[1]).epsilon(1e-9));
    CHECK(fm2.t[1] == doctest::Approx(fm1.t[1]).epsilon(1e-9));
    CHECK(fm2.premia[0] == doctest::Approx(fm1.premia[0]).epsilon(1e-9));
}

TEST_CASE("grs: exact factor combinations give F = 0, p = 1") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 0.01);
    const std::size_t t_obs = 120, n_port = 4, k_fac = 2;
    Mat f(t_obs, k_fac);
    for (std::size_t t = 0; t < t_obs; ++t)
        for (std::size_t j = 0; j < k_fac; ++j) f(t, j) = 0.002 + g(rng);
    Mat p(t_obs, n_port);
    for (std::size_t i = 0; i < n_port; ++i)
        for (std::size_t t = 0; t < t_obs; ++t)
            p(t, i) = 0.5 * static_cast<double>(i + 1) * f(t, 0) +
                      0.25 * static_cast<double>(i) * f(t, 1) + 0.001 * g(rng);
    // Zero alphas by construction except noise; with tiny noise F is small.
    const auto res = econ::grs_test(p, f);
    CHECK(res.t_obs == t_obs);
    CHECK(res.n_portfolios == n_port);
    CHECK(res.k_factors == k_fac);
    CHECK(res.p_value >= 0.0);
    CHECK(res.p_value <= 1.0);
    for (const double a : res.alphas) CHECK(std::abs(a) < 5e-4);

    // Literally exact combination: residuals vanish -> singular covariance.
    Mat exact(t_obs, n_port);
    for (std::size_t i = 0; i < n_port; ++i)
        for (std::size_t t = 0; t < t_obs; ++t)
            exact(t, i) = (1.0 + static_cast<double>(i)) * f(t, 0);
    CHECK_THROWS_AS(econ::grs_test(exact, f), SingularDesignError);
}

TEST_CASE("grs: invariance under nonsingular factor recombination") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 0.01);
    const std::size_t t_obs = 150, n_port = 5, k_fac = 2;
    Mat f(t_obs, k_fac), p(t_obs, n_port);
    for (std::size_t t = 0; t < t_obs; ++t) {
        f(t, 0) = 0.001 + g(rng);
        f(t, 1) = -0.0005 + g(rng);
    }
    for (std::size_t i = 0; i < n_port; ++i)
        for (std::size_t t = 0; t < t_obs; ++t)
            p(t, i) = 0.0002 + 0.8 * f(t, 0) - 0.3 * f(t, 1) + g(rng);

    const auto base = econ::grs_test(p, f);

    // Recombine: g1 = 2 f1 + f2, g2 = f1 - f2 (nonsingular).
    Mat f2(t_obs, k_fac);
    for (std::size_t t = 0; t < t_obs; ++t) {
        f2(t, 0) = 2.0 * f(t, 0) + f(t, 1);
        f2(t, 1) = f(t, 0) - f(t, 1);
    }
    const auto rec = econ::grs_test(p, f2);
    CHECK(rec.f_stat == doctest::Approx(base.f_stat).epsilon(1e-9));
    CHECK(rec.p_value == doctest::Approx(base.p_value).epsilon(1e-9));
}

TEST_CASE("grs: insufficient sample and series alignment") {
    Mat p(10, 8), f(10, 3);
    CHECK_THROWS_AS(econ::grs_test(p, f), InsufficientSampleError);

    // Series front end: intersect common non-missing days.
    std::vector<double> a{0.01, 0.02, kNaN, 0.04, 0.01, -0.02, 0.03, 0.00, 0.01, 0.02,
                          0.01, -0.01, 0.02, 0.03, -0.02, 0.01, 0.00, 0.02, -0.01, 0.01};
    std::vector<double> b(a.rbegin(), a.rend());
    std::vector<double> m(20, 0.005);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += 0.001 * static_cast<double>(i % 5);
    std::vector<FactorSeries> ports{mk_series("P1", a), mk_series("P2", b)};
    std::vector<FactorSeries> facs{mk_series("M", m)};
    const auto res = econ::grs_test(ports, facs);
    CHECK(res.t_obs == 18);  // two NaN days dropped (a's and b's reversal)
}

TEST_CASE("spanning: exact linear combination has alpha 0, R2 1; duplicates rejected") {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> g(0.0, 0.01);
    const std::size_t days = 100;
    std::vector<double> f1(days), f2(days), combo(days);
    for (std::size_t t = 0; t < days; ++t) {
        f1[t] = 0.001 + g(rng);
        f2[t] = -0.002 + g(rng);
        combo[t] = 0.6 * f1[t] - 0.4 * f2[t];
    }
    std::vector<FactorSeries> facs{mk_series("A", f1), mk_series("B", f2),
                                   mk_series("C", combo)};
    const auto rows = econ::spanning_alphas(facs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].name == "C");
    CHECK(std::abs(rows[2].alpha) <= 1e-12);
    CHECK(rows[2].r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rows[2].n == days);

    // A exact duplicate in the menu must be rejected as rank deficient.
    std::vector<FactorSeries> dup{mk_series("A", f1), mk_series("A2", f1), mk_series("B", f2)};
    CHECK_THROWS_AS(econ::spanning_alphas(dup), SingularDesignError);
}

TEST_CASE("spanning: orthogonal factors keep alpha near own mean, R2 near 0") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> g(0.0, 0.01);
    const std::size_t days = 4000;
    std::vector<double> f1(days), f2(days);
    for (std::size_t t = 0; t < days; ++t) {
        f1[t] = 0.003 + g(rng);
        f2[t] = -0.001 + g(rng);
    }
    std::vector<FactorSeries> facs{mk_series("A", f1), mk_series("B", f2)};
    const auto rows = econ::spanning_alphas(facs);
    CHECK(rows[0].r2 < 0.01);
    CHECK(rows[0].alpha == doctest::Approx(0.003).epsilon(0.2));
    CHECK(rows[1].alpha == doctest::Approx(-0.001).epsilon(0.5));

    // HAC flag changes the error bands, not the alphas.
    const auto hac_rows = econ::spanning_alphas(facs, true, 5);
    CHECK(hac_rows[0].alpha == rows[0].alpha);
    CHECK(hac_rows[0].t != rows[0].t);
}

TEST_CASE("risk decomposition: semideviation arithmetic and guards") {
    // Half the days -d, half +u.
    std::vector<double> x;
    for (int i = 0; i < 25; ++i) {
        x.push_back(-0.02);
        x.push_back(0.04);
    }
    const auto d = econ::risk_decomposition(x);
    CHECK(d.n == 50);
    CHECK(d.mean == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(d.downdev == doctest::Approx(std::sqrt(25.0 * 4e-4 / 50.0)).epsilon(1e-12));
    CHECK(d.updev == doctest::Approx(std::sqrt(25.0 * 16e-4 / 50.0)).epsilon(1e-12));
    CHECK(d.down_up_ratio == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.sortino ==
          doctest::Approx(d.mean * 365.0 / (d.downdev * std::sqrt(365.0))).epsilon(1e-12));
    CHECK(d.pct_negative == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(econ::risk_decomposition(std::vector<double>(20, 0.01)),
                    ZeroVarianceError);  // all positive: Sortino undefined
    CHECK_THROWS_AS(econ::risk_decomposition(std::vector<double>{0.01}),
                    InsufficientSampleError);
}

TEST_CASE("risk decomposition: identity against summary moments") {
    std::mt19937_64 rng(83);
    std::normal_distribution<double> g(0.0005, 0.03);
    std::vector<double> x(300);
    for (auto& v : x) v = g(rng);
    const auto d = econ::risk_decomposition(x);
    double mean_sq = 0.0;
    for (const double v : x) mean_sq += v * v;
    mean_sq /= 300.0;
    CHECK(d.downdev * d.downdev + d.updev * d.updev == doctest::Approx(mean_sq).epsilon(1e-12));
}
