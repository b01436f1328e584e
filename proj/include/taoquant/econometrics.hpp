#pragma once

#include <span>
#include <string>
#include <vector>

#include "taoquant/factors.hpp"
#include "taoquant/linalg.hpp"
#include "taoquant/panel.hpp"

namespace taoquant::econ {

/// OLS fit with both error flavors. `X` keeps the augmented design (intercept
/// column first when requested) so HAC estimation and diagnostics can rerun
/// against the exact sample the fit used.
struct RegressionResult {
    std::vector<std::string> names;
    std::vector<double> coef;
    std::vector<double> ols_se;
    std::vector<double> hac_se;  // filled by newey_west_se; hac_lags records L
    int hac_lags = -1;
    std::vector<double> residuals;
    double r2 = 0.0;
    linalg::Mat X;
    bool intercept = false;

    [[nodiscard]] std::size_t n() const { return X.rows(); }
    [[nodiscard]] std::size_t k() const { return X.cols(); }
    [[nodiscard]] double ols_t(std::size_t j) const { return coef[j] / ols_se[j]; }
    [[nodiscard]] double hac_t(std::size_t j) const { return coef[j] / hac_se[j]; }
    /// Student-t reference with n-k degrees of freedom.
    [[nodiscard]] double ols_p(std::size_t j) const;
    /// Normal reference (the large-sample convention for HAC t-statistics).
    [[nodiscard]] double hac_p(std::size_t j) const;
};

/// Least squares of y on the columns of x (plus a leading intercept when
/// requested). Standard errors from sigma^2 (X'X)^{-1} with n-k df.
/// Throws SingularDesignError naming the offending column on rank deficiency,
/// InsufficientSampleError when n <= k, DataError on NaN inputs.
RegressionResult ols(std::span<const double> y, const linalg::Mat& x,
                     std::vector<std::string> names = {}, bool intercept = true);

/// Bartlett-kernel HAC standard errors, (X'X)^{-1} S (X'X)^{-1} with
/// S = sum_{|j|<=L} w_j Gamma_j and w_j = 1 - |j|/(L+1); no small-sample df
/// adjustment. lags = 0 reproduces White errors. Stores into r and returns
/// the vector. Throws ConfigError for lags < 0 or lags >= n.
const std::vector<double>& newey_west_se(RegressionResult& r, int lags = 5);

/// One summary row: moments, annualized Sharpe, both t-statistics.
struct SummaryStats {
    double mean = 0.0;
    double stddev = 0.0;   // sample, n-1
    double sharpe = 0.0;   // (mean*365)/(stddev*sqrt(365))
    double t_ols = 0.0;    // mean/(stddev/sqrt(n))
    double t_nw = 0.0;     // mean-only regression with HAC(lags) errors
    double skew = 0.0;     // third central moment over s^3
    double kurt = 0.0;     // raw (not excess) by default
    std::size_t n = 0;
    int nw_lags = 5;
};

/// Drops NaNs, then computes every column of the factor summary table.
/// Throws InsufficientSampleError (< 2 obs) and ZeroVarianceError (flat
/// series: Sharpe and t undefined). `excess_kurtosis` subtracts 3.
SummaryStats summary_stats(std::span<const double> series, int lags = 5,
                           bool excess_kurtosis = false);

/// Two-pass cross-sectional premia. First pass: per-subnet full-sample OLS of
/// returns on the factor list (intercept included), keeping subnets with at
/// least min_history usable days. Second pass: daily cross-sections of
/// returns on the first-pass betas; a day is used only when it has at least
/// (#factors + 2) observations and a non-singular design. Premia are means of
/// the daily slopes with se = std(slopes)/sqrt(T).
struct FamaMacbethResult {
    std::vector<std::string> names;  // "const" then factor names
    std::vector<double> premia;
    std::vector<double> se;
    std::vector<double> t;
    std::vector<double> p;  // normal reference
    std::size_t n_days = 0;             // cross-sections used
    double avg_cross_section = 0.0;     // average subnets per used day
    std::size_t n_subnets = 0;          // subnets that cleared the history bar
    std::size_t skipped_days = 0;       // too thin or singular
    std::size_t excluded_subnets = 0;   // insufficient history
    int min_history = 60;
};

FamaMacbethResult fama_macbeth(const panel::ReturnPanel& panel,
                               std::span<const factors::FactorSeries> facs,
                               int min_history = 60,
                               factors::Denomination denom = factors::Denomination::tao);

/// Joint test that all portfolio alphas are zero against a factor model,
/// using the finite-sample F form with MLE (1/T) covariance estimates:
/// F = (T-N-K)/N * alpha' Sigma^{-1} alpha / (1 + mu' Omega^{-1} mu),
/// referred to F(N, T-N-K).
struct GrsResult {
    double f_stat = 0.0;
    double p_value = 1.0;
    std::vector<double> alphas;
    double avg_abs_alpha = 0.0;
    std::size_t t_obs = 0;
    std::size_t n_portfolios = 0;
    std::size_t k_factors = 0;
};

/// Matrix core: aligned samples, portfolios T x N, factors T x K.
GrsResult grs_test(const linalg::Mat& portfolios, const linalg::Mat& factor_mat);

/// Series front end: intersects the common non-missing dates first.
GrsResult grs_test(std::span<const factors::FactorSeries> portfolios,
                   std::span<const factors::FactorSeries> facs);

/// Spanning regression of each factor on all the others (with intercept) over
/// their common non-missing sample.
struct SpanningRow {
    std::string name;
    double alpha = 0.0;
    double t = 0.0;
    double p = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// t/p use OLS errors by default; hac switches both to Newey-West(lags).
std::vector<SpanningRow> spanning_alphas(std::span<const factors::FactorSeries> facs,
                                         bool hac = false, int lags = 5);

/// Semideviation risk split of a return series.
struct RiskDecomposition {
    double mean = 0.0;
    double stddev = 0.0;
    double downdev = 0.0;  // sqrt(mean(min(r,0)^2))
    double updev = 0.0;    // sqrt(mean(max(r,0)^2))
    double down_up_ratio = 0.0;
    double sortino = 0.0;  // (mean*365)/(downdev*sqrt(365))
    double pct_negative = 0.0;  // fraction of days with r < 0
    std::size_t n = 0;
};

/// NaNs dropped first. Throws InsufficientSampleError (< 2 obs) and
/// ZeroVarianceError when downdev = 0 (Sortino undefined).
RiskDecomposition risk_decomposition(std::span<const double> series);

}  // namespace taoquant::econ
