#include "taoquant/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "taoquant/distributions.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/kernels.hpp"

namespace taoquant::econ {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> default_names(std::size_t k, bool intercept) {
    std::vector<std::string> names;
    if (intercept) names.emplace_back("const");
    for (std::size_t j = names.size(); j < k; ++j)
        names.push_back("x" + std::to_string(j - (intercept ? 1 : 0) + 1));
    return names;
}

/// Sample standard deviation (n-1) of a clean series; exactly 0 for a
/// constant series (a rounded mean must not manufacture variance).
double sample_std(std::span<const double> x) {
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return 0.0;
    const double mean = kernels::sum(x) / static_cast<double>(x.size());
    return std::sqrt(kernels::centered_sumsq(x, mean) / (static_cast<double>(x.size()) - 1.0));
}

std::vector<double> drop_nan(std::span<const double> series) {
    std::vector<double> clean;
    clean.reserve(series.size());
    for (const double x : series)
        if (!std::isnan(x)) clean.push_back(x);
    return clean;
}

/// Dates where every series in `all` has a return. Returns per-series aligned
/// columns stacked in one matrix, one row per common date.
linalg::Mat align_series(std::span<const factors::FactorSeries> all) {
    if (all.empty()) throw DataError("no series to align");
    std::vector<Date> common;
    for (std::size_t t = 0; t < all[0].n_days(); ++t) {
        const Date d = all[0].dates[t];
        bool ok = true;
        for (const auto& f : all) {
            const auto it = std::lower_bound(f.dates.begin(), f.dates.end(), d);
            if (it == f.dates.end() || *it != d ||
                std::isnan(f.returns[static_cast<std::size_t>(it - f.dates.begin())])) {
                ok = false;
                break;
            }
        }
        if (ok) common.push_back(d);
    }
    linalg::Mat m(common.size(), all.size());
    for (std::size_t j = 0; j < all.size(); ++j) {
        const auto& f = all[j];
        for (std::size_t i = 0; i < common.size(); ++i) {
            const auto it = std::lower_bound(f.dates.begin(), f.dates.end(), common[i]);
            m(i, j) = f.returns[static_cast<std::size_t>(it - f.dates.begin())];
        }
    }
    return m;
}

}  // namespace

double RegressionResult::ols_p(std::size_t j) const {
    return dist::student_t_two_sided_p(ols_t(j), static_cast<double>(n() - k()));
}

double RegressionResult::hac_p(std::size_t j) const {
    return dist::normal_two_sided_p(hac_t(j));
}

RegressionResult ols(std::span<const double> y, const linalg::Mat& x,
                     std::vector<std::string> names, bool intercept) {
    if (x.cols() > 0 && x.rows() != y.size())
        throw DataError("ols: y and X row counts differ");
    const std::size_t n = y.size();
    const std::size_t k = x.cols() + (intercept ? 1 : 0);
    if (k == 0) throw ConfigError("ols: no regressors");
    if (n <= k)
        throw InsufficientSampleError("ols: " + std::to_string(n) + " observations for " +
                                      std::to_string(k) + " coefficients");
    for (const double v : y)
        if (std::isnan(v)) throw DataError("ols: NaN in response");

    RegressionResult r;
    r.intercept = intercept;
    r.X = linalg::Mat(n, k);
    std::size_t j0 = 0;
    if (intercept) {
        for (std::size_t i = 0; i < n; ++i) r.X(i, 0) = 1.0;
        j0 = 1;
    }
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto src = x.col(j);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::isnan(src[i])) throw DataError("ols: NaN in design matrix");
            r.X(i, j0 + j) = src[i];
        }
    }
    r.names = names.empty() ? default_names(k, intercept) : std::move(names);
    if (r.names.size() == x.cols() && intercept) r.names.insert(r.names.begin(), "const");
    if (r.names.size() != k) throw ConfigError("ols: column name count mismatch");

    const linalg::Mat xtx = linalg::gram(r.X);
    const std::vector<double> xty = linalg::tvec(r.X, y);
    const linalg::Cholesky chol(xtx, r.names);
    r.coef = chol.solve(xty);

    r.residuals.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < k; ++j) fit += r.X(i, j) * r.coef[j];
        r.residuals[i] = y[i] - fit;
    }

    const double sse = kernels::dot(r.residuals, r.residuals);
    const double sigma2 = sse / static_cast<double>(n - k);
    const linalg::Mat xtx_inv = chol.inverse();
    r.ols_se.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) r.ols_se[j] = std::sqrt(sigma2 * xtx_inv(j, j));

    // R^2 about the mean with an intercept, uncentered otherwise.
    double tss = 0.0;
    if (intercept) {
        const double ymean = kernels::sum(y) / static_cast<double>(n);
        tss = kernels::centered_sumsq(y, ymean);
    } else {
        tss = kernels::dot(y, y);
    }
    r.r2 = tss > 0.0 ? 1.0 - sse / tss : 0.0;
    if (intercept) r.r2 = std::clamp(r.r2, 0.0, 1.0);
    return r;
}

const std::vector<double>& newey_west_se(RegressionResult& r, int lags) {
    const std::size_t n = r.n();
    const std::size_t k = r.k();
    if (lags < 0) throw ConfigError("newey-west: negative lag count");
    if (static_cast<std::size_t>(lags) >= n)
        throw ConfigError("newey-west: lags must be smaller than the sample");

    // Score matrix u_t = x_t e_t, one row per observation.
    linalg::Mat u(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto xj = r.X.col(j);
        auto uj = u.col(j);
        for (std::size_t i = 0; i < n; ++i) uj[i] = xj[i] * r.residuals[i];
    }

    // S = Gamma_0 + sum_j w_j (Gamma_j + Gamma_j'), Gamma_j = sum_t u_t u_{t-j}'.
    linalg::Mat s(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            double v = kernels::dot(u.col(a), u.col(b));
            for (int j = 1; j <= lags; ++j) {
                const double w = 1.0 - static_cast<double>(j) / (lags + 1.0);
                const auto lag = static_cast<std::size_t>(j);
                // Gamma_j(a,b) + Gamma_j(b,a)
                v += w * (kernels::dot_lagged(u.col(a), u.col(b), lag) +
                          kernels::dot_lagged(u.col(b), u.col(a), lag));
            }
            s(a, b) = v;
            s(b, a) = v;
        }

    const linalg::Cholesky chol(linalg::gram(r.X), r.names);
    const linalg::Mat xtx_inv = chol.inverse();
    const linalg::Mat cov = linalg::matmul(linalg::matmul(xtx_inv, s), xtx_inv);
    r.hac_se.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) r.hac_se[j] = std::sqrt(cov(j, j));
    r.hac_lags = lags;
    return r.hac_se;
}

SummaryStats summary_stats(std::span<const double> series, int lags, bool excess_kurtosis) {
    const std::vector<double> x = drop_nan(series);
    if (x.size() < 2)
        throw InsufficientSampleError("summary_stats: need at least 2 observations");
    const auto n = static_cast<double>(x.size());

    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }))
        throw ZeroVarianceError("summary_stats: flat series, Sharpe and t undefined");

    SummaryStats s;
    s.n = x.size();
    s.nw_lags = lags;
    s.mean = kernels::sum(x) / n;
    const auto cs = kernels::centered_sums(x, s.mean);
    s.stddev = std::sqrt(cs.m2 / (n - 1.0));
    s.sharpe = s.mean / s.stddev * std::sqrt(365.0);
    s.t_ols = s.mean / (s.stddev / std::sqrt(n));
    const double sd3 = s.stddev * s.stddev * s.stddev;
    s.skew = (cs.m3 / n) / sd3;
    s.kurt = (cs.m4 / n) / (sd3 * s.stddev) - (excess_kurtosis ? 3.0 : 0.0);

    RegressionResult mean_only = ols(x, linalg::Mat(x.size(), 0), {"const"}, true);
    newey_west_se(mean_only, lags);
    s.t_nw = mean_only.hac_t(0);
    return s;
}

FamaMacbethResult fama_macbeth(const panel::ReturnPanel& panel,
                               std::span<const factors::FactorSeries> facs, int min_history,
                               factors::Denomination denom) {
    if (facs.empty()) throw ConfigError("fama-macbeth: no factors");
    const std::size_t kf = facs.size();
    // Factor values aligned to panel dates; NaN where a factor is missing.
    linalg::Mat f(panel.n_days(), kf);
    for (std::size_t j = 0; j < kf; ++j) {
        auto col = f.col(j);
        std::fill(col.begin(), col.end(), kNaN);
        for (std::size_t t = 0; t < facs[j].n_days(); ++t) {
            const auto idx = panel.day_index(facs[j].dates[t]);
            if (idx) col[*idx] = facs[j].returns[t];
        }
    }
    std::vector<std::uint8_t> day_ok(panel.n_days(), 1);
    for (std::size_t t = 0; t < panel.n_days(); ++t)
        for (std::size_t j = 0; j < kf && day_ok[t]; ++j)
            if (std::isnan(f(t, j))) day_ok[t] = 0;

    FamaMacbethResult out;
    out.min_history = min_history;
    out.names.emplace_back("const");
    for (const auto& fac : facs) out.names.push_back(fac.name);

    // First pass: full-sample betas per subnet.
    std::vector<std::vector<double>> betas;  // [subnet] -> kf slopes
    std::vector<std::size_t> kept;           // subnet indices
    for (std::size_t i = 0; i < panel.n_subnets(); ++i) {
        std::vector<std::size_t> days;
        for (std::size_t t = 0; t < panel.n_days(); ++t) {
            const double r = denom == factors::Denomination::tao ? panel.rtao(t, i)
                                                                 : panel.rusd(t, i);
            if (day_ok[t] && !std::isnan(r)) days.push_back(t);
        }
        if (days.size() < static_cast<std::size_t>(min_history)) {
            ++out.excluded_subnets;
            continue;
        }
        std::vector<double> y(days.size());
        linalg::Mat x(days.size(), kf);
        for (std::size_t d = 0; d < days.size(); ++d) {
            y[d] = denom == factors::Denomination::tao ? panel.rtao(days[d], i)
                                                       : panel.rusd(days[d], i);
            for (std::size_t j = 0; j < kf; ++j) x(d, j) = f(days[d], j);
        }
        const RegressionResult reg = ols(y, x, {}, true);
        betas.push_back({reg.coef.begin() + 1, reg.coef.end()});
        kept.push_back(i);
    }
    out.n_subnets = kept.size();
    if (kept.size() < kf + 2)
        throw InsufficientSampleError("fama-macbeth: only " + std::to_string(kept.size()) +
                                      " subnets cleared the history bar");

    // Second pass: daily cross-sections of returns on betas.
    const std::size_t kc = kf + 1;  // const + kf premia
    std::vector<std::vector<double>> slopes(kc);
    std::size_t member_days = 0;
    for (std::size_t t = 0; t < panel.n_days(); ++t) {
        std::vector<double> y;
        std::vector<std::size_t> rows;
        for (std::size_t s = 0; s < kept.size(); ++s) {
            const double r = denom == factors::Denomination::tao ? panel.rtao(t, kept[s])
                                                                 : panel.rusd(t, kept[s]);
            if (std::isnan(r)) continue;
            y.push_back(r);
            rows.push_back(s);
        }
        if (y.size() < kc + 1) {
            if (!y.empty()) ++out.skipped_days;
            continue;
        }
        linalg::Mat x(y.size(), kf);
        for (std::size_t d = 0; d < rows.size(); ++d)
            for (std::size_t j = 0; j < kf; ++j) x(d, j) = betas[rows[d]][j];
        try {
            const RegressionResult reg = ols(y, x, {}, true);
            for (std::size_t j = 0; j < kc; ++j) slopes[j].push_back(reg.coef[j]);
            member_days += y.size();
        } catch (const SingularDesignError&) {
            ++out.skipped_days;  // degenerate beta spread that day
        }
    }
    out.n_days = slopes[0].size();
    if (out.n_days < 2)
        throw InsufficientSampleError("fama-macbeth: fewer than 2 usable cross-sections");
    out.avg_cross_section = static_cast<double>(member_days) / static_cast<double>(out.n_days);

    const auto tt = static_cast<double>(out.n_days);
    for (std::size_t j = 0; j < kc; ++j) {
        const double premium = kernels::sum(slopes[j]) / tt;
        const double sd = sample_std(slopes[j]);
        const double se = sd / std::sqrt(tt);
        out.premia.push_back(premium);
        out.se.push_back(se);
        out.t.push_back(se > 0.0 ? premium / se : (premium == 0.0 ? 0.0 : kNaN));
        out.p.push_back(se > 0.0 ? dist::normal_two_sided_p(premium / se)
                                 : (premium == 0.0 ? 1.0 : 0.0));
    }
    return out;
}

GrsResult grs_test(const linalg::Mat& portfolios, const linalg::Mat& factor_mat) {
    const std::size_t t_obs = portfolios.rows();
    const std::size_t n = portfolios.cols();
    const std::size_t k = factor_mat.cols();
    if (factor_mat.rows() != t_obs) throw DataError("grs: misaligned inputs");
    if (n == 0 || k == 0) throw DataError("grs: empty inputs");
    if (t_obs <= n + k)
        throw InsufficientSampleError("grs: T = " + std::to_string(t_obs) +
                                      " too small for N + K = " + std::to_string(n + k));

    GrsResult out;
    out.t_obs = t_obs;
    out.n_portfolios = n;
    out.k_factors = k;

    linalg::Mat resid(t_obs, n);
    out.alphas.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const RegressionResult reg = ols(portfolios.col(i), factor_mat, {}, true);
        out.alphas[i] = reg.coef[0];
        std::copy(reg.residuals.begin(), reg.residuals.end(), resid.col(i).begin());
        out.avg_abs_alpha += std::abs(reg.coef[0]) / static_cast<double>(n);
    }

    // MLE (1/T) covariances.
    const auto tn = static_cast<double>(t_obs);
    linalg::Mat sigma(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            const double v = kernels::dot(resid.col(a), resid.col(b)) / tn;
            sigma(a, b) = v;
            sigma(b, a) = v;
        }
    std::vector<double> mu(k);
    linalg::Mat fc(t_obs, k);
    for (std::size_t j = 0; j < k; ++j) {
        mu[j] = kernels::sum(factor_mat.col(j)) / tn;
        auto col = fc.col(j);
        for (std::size_t t = 0; t < t_obs; ++t) col[t] = factor_mat(t, j) - mu[j];
    }
    linalg::Mat omega(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            const double v = kernels::dot(fc.col(a), fc.col(b)) / tn;
            omega(a, b) = v;
            omega(b, a) = v;
        }

    double quad_alpha = 0.0, quad_mu = 0.0;
    try {
        quad_alpha = linalg::Cholesky(sigma).inv_quad(out.alphas);
    } catch (const SingularDesignError&) {
        throw SingularDesignError("grs: singular residual covariance", {});
    }
    quad_mu = linalg::Cholesky(omega).inv_quad(mu);

    const auto nn = static_cast<double>(n);
    const auto dof = static_cast<double>(t_obs - n - k);
    out.f_stat = (dof / nn) * quad_alpha / (1.0 + quad_mu);
    out.p_value = dist::f_upper_tail_p(out.f_stat, nn, dof);
    return out;
}

GrsResult grs_test(std::span<const factors::FactorSeries> portfolios,
                   std::span<const factors::FactorSeries> facs) {
    std::vector<factors::FactorSeries> all(portfolios.begin(), portfolios.end());
    all.insert(all.end(), facs.begin(), facs.end());
    const linalg::Mat joint = align_series(all);
    linalg::Mat p(joint.rows(), portfolios.size());
    linalg::Mat f(joint.rows(), facs.size());
    for (std::size_t j = 0; j < portfolios.size(); ++j)
        std::copy(joint.col(j).begin(), joint.col(j).end(), p.col(j).begin());
    for (std::size_t j = 0; j < facs.size(); ++j)
        std::copy(joint.col(portfolios.size() + j).begin(),
                  joint.col(portfolios.size() + j).end(), f.col(j).begin());
    return grs_test(p, f);
}

std::vector<SpanningRow> spanning_alphas(std::span<const factors::FactorSeries> facs, bool hac,
                                         int lags) {
    if (facs.size() < 2) throw ConfigError("spanning: need at least 2 factors");
    const linalg::Mat m = align_series(facs);
    if (m.rows() <= facs.size() + 1)
        throw InsufficientSampleError("spanning: common sample too short");

    std::vector<SpanningRow> rows;
    for (std::size_t i = 0; i < facs.size(); ++i) {
        linalg::Mat x(m.rows(), facs.size() - 1);
        std::vector<std::string> names{"const"};
        std::size_t jj = 0;
        for (std::size_t j = 0; j < facs.size(); ++j) {
            if (j == i) continue;
            std::copy(m.col(j).begin(), m.col(j).end(), x.col(jj).begin());
            names.push_back(facs[j].name);
            ++jj;
        }
        RegressionResult reg = ols(m.col(i), x, std::move(names), true);
        SpanningRow row;
        row.name = facs[i].name;
        row.alpha = reg.coef[0];
        if (hac) {
            newey_west_se(reg, lags);
            row.t = reg.hac_t(0);
            row.p = reg.hac_p(0);
        } else {
            row.t = reg.ols_t(0);
            row.p = reg.ols_p(0);
        }
        row.r2 = reg.r2;
        row.n = reg.n();
        rows.push_back(row);
    }
    return rows;
}

RiskDecomposition risk_decomposition(std::span<const double> series) {
    const std::vector<double> x = drop_nan(series);
    if (x.size() < 2)
        throw InsufficientSampleError("risk_decomposition: need at least 2 observations");
    const auto n = static_cast<double>(x.size());

    RiskDecomposition d;
    d.n = x.size();
    d.mean = kernels::sum(x) / n;
    d.stddev = sample_std(x);
    const auto semi = kernels::semidev_sums(x);
    d.downdev = std::sqrt(semi.neg_sq / n);
    d.updev = std::sqrt(semi.pos_sq / n);
    if (d.downdev == 0.0)
        throw ZeroVarianceError("risk_decomposition: no negative days, Sortino undefined");
    d.down_up_ratio = d.updev > 0.0 ? d.downdev / d.updev : kNaN;
    d.sortino = d.mean / d.downdev * std::sqrt(365.0);
    std::size_t neg = 0;
    for (const double v : x) neg += v < 0.0;
    d.pct_negative = static_cast<double>(neg) / n;
    return d;
}

}  // namespace taoquant::econ
