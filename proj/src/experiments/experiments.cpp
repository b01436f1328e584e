#include "taoquant/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "taoquant/csv.hpp"
#include "taoquant/econometrics.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/linalg.hpp"

namespace taoquant::experiments {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeanT {
    double mean = kNaN;
    double t = kNaN;
    std::size_t n = 0;
};

MeanT mean_t(const std::vector<double>& v) {
    MeanT out;
    out.n = v.size();
    if (v.empty()) return out;
    double s = 0.0;
    for (double x : v) s += x;
    out.mean = s / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) return out;
    double ss = 0.0;
    for (double x : v) {
        const double d = x - out.mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    out.t = out.mean / (sd / std::sqrt(static_cast<double>(v.size())));
    return out;
}

/// Market return on a given date, NaN when the date is absent.
double series_at(const factors::FactorSeries& f, Date d) {
    const auto it = std::lower_bound(f.dates.begin(), f.dates.end(), d);
    if (it == f.dates.end() || *it != d) return kNaN;
    return f.returns[static_cast<std::size_t>(it - f.dates.begin())];
}

EventStudyResult event_row(const factors::FactorSeries& smb, const factors::FactorSeries& mkt,
                           Date event, int window, int hac_lags) {
    if (smb.dates.empty()) throw DataError("event study: empty factor series");
    EventStudyResult r;
    r.window = window;
    r.nw_lags = hac_lags;
    r.pre_mean = r.post_mean = r.ratio = kNaN;

    Date lo = smb.dates.front();
    Date hi = smb.dates.back();
    if (window > 0) {
        lo = event - window;
        hi = event + (window - 1);  // post side includes the event day
        if (lo < smb.dates.front() || hi > smb.dates.back()) {
            r.available = false;
            return r;
        }
    } else if (event <= lo || event > hi) {
        // Full-sample row still needs observations on both sides.
        r.available = false;
        return r;
    }

    std::vector<double> y;       // regression sample (factor and market both present)
    std::vector<double> dummy;
    std::vector<double> m;
    std::vector<double> pre, post;  // raw factor means ignore market availability
    for (std::size_t t = 0; t < smb.dates.size(); ++t) {
        const Date d = smb.dates[t];
        if (d < lo || d > hi) continue;
        const double s = smb.returns[t];
        const bool is_post = d >= event;
        if (!std::isnan(s)) (is_post ? post : pre).push_back(s);
        const double mk = series_at(mkt, d);
        if (std::isnan(s) || std::isnan(mk)) continue;
        y.push_back(s);
        dummy.push_back(is_post ? 1.0 : 0.0);
        m.push_back(mk);
    }
    r.pre_mean = mean_t(pre).mean;
    r.post_mean = mean_t(post).mean;
    if (!std::isnan(r.pre_mean) && r.pre_mean != 0.0) r.ratio = r.post_mean / r.pre_mean;

    // A constant market control is unidentifiable next to the intercept;
    // gamma is forced to 0 and the dummy reduces to the raw mean difference.
    // The same applies when the control is numerically collinear with the
    // intercept and the dummy (near-deterministic data), surfacing as a
    // singular design below.
    bool with_market =
        !m.empty() && !std::all_of(m.begin(), m.end(), [&](double x) { return x == m[0]; });
    const std::size_t k = with_market ? 3 : 2;
    if (y.size() < k + 2 || pre.empty() || post.empty()) {
        r.available = false;
        return r;
    }

    const auto fit = [&](bool market) {
        linalg::Mat x(y.size(), market ? 2 : 1);
        std::vector<std::string> names{"post"};
        if (market) names.emplace_back("mkt");
        for (std::size_t t = 0; t < y.size(); ++t) {
            x(t, 0) = dummy[t];
            if (market) x(t, 1) = m[t];
        }
        auto reg = econ::ols(y, x, std::move(names), true);
        econ::newey_west_se(reg, hac_lags);
        return reg;
    };
    std::optional<econ::RegressionResult> reg;
    if (with_market) {
        try {
            reg = fit(true);
        } catch (const SingularDesignError&) {
            with_market = false;
        }
    }
    if (!with_market) {
        try {
            reg = fit(false);
        } catch (const SingularDesignError&) {
            r.available = false;  // even the dummy is degenerate on this sample
            return r;
        }
    }
    r.n_obs = y.size();
    r.alpha = reg->coef[0];
    r.beta = reg->coef[1];
    r.gamma = with_market ? reg->coef[2] : 0.0;
    r.nw_t = reg->hac_t(1);
    r.p_value = reg->hac_p(1);
    return r;
}

}  // namespace

std::vector<SubsampleRow> subsample_split(std::span<const factors::FactorSeries> facs,
                                          Date split) {
    if (facs.empty()) throw ConfigError("subsample: empty factor list");
    bool any = false;
    Date first{}, last{};
    for (const auto& f : facs) {
        if (f.dates.empty()) continue;
        if (!any || f.dates.front() < first) first = f.dates.front();
        if (!any || f.dates.back() > last) last = f.dates.back();
        any = true;
    }
    if (!any) throw DataError("subsample: factors carry no dates");
    if (split < first || split >= last)
        throw ConfigError("subsample: split " + split.to_string() + " not interior to sample " +
                          first.to_string() + ".." + last.to_string());

    std::vector<SubsampleRow> rows;
    rows.reserve(facs.size());
    for (const auto& f : facs) {
        SubsampleRow row;
        row.name = f.name;
        std::vector<double> full, a, b;
        for (std::size_t t = 0; t < f.dates.size(); ++t) {
            const double r = f.returns[t];
            if (std::isnan(r)) continue;
            full.push_back(r);
            (f.dates[t] <= split ? a : b).push_back(r);  // first half keeps the split day
        }
        const auto mf = mean_t(full), ma = mean_t(a), mb = mean_t(b);
        row.full_mean = mf.mean;
        row.full_t = mf.t;
        row.full_n = mf.n;
        row.first_mean = ma.mean;
        row.first_t = ma.t;
        row.first_n = ma.n;
        row.second_mean = mb.mean;
        row.second_t = mb.t;
        row.second_n = mb.n;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<EventStudyResult> halving_event_study(const factors::FactorSeries& smb,
                                                  const factors::FactorSeries& mkt, Date event,
                                                  std::span<const int> windows, int hac_lags) {
    std::vector<EventStudyResult> out;
    out.reserve(windows.size() + 1);
    for (int w : windows) {
        if (w <= 0) throw ConfigError("event study: window must be positive");
        out.push_back(event_row(smb, mkt, event, w, hac_lags));
    }
    out.push_back(event_row(smb, mkt, event, 0, hac_lags));  // full sample
    return out;
}

std::vector<EventStudyResult> halving_event_study(const factors::FactorSeries& smb,
                                                  const factors::FactorSeries& mkt, Date event,
                                                  int hac_lags) {
    static constexpr int kWindows[] = {30, 45, 60, 90};
    return halving_event_study(smb, mkt, event, kWindows, hac_lags);
}

PlaceboResult placebo_scan(const factors::FactorSeries& smb, const factors::FactorSeries& mkt,
                           Date event, std::span<const int> offsets, int window, int hac_lags) {
    if (window <= 0) throw ConfigError("placebo: window must be positive");
    PlaceboResult out;
    out.actual = event_row(smb, mkt, event, window, hac_lags);
    out.placebos.reserve(offsets.size());
    for (int off : offsets) {
        auto row = event_row(smb, mkt, event + off, window, hac_lags);
        if (row.available && out.actual.available &&
            std::abs(row.beta) > std::abs(out.actual.beta))
            out.any_larger = true;
        out.placebos.emplace_back(off, std::move(row));
    }
    return out;
}

PlaceboResult placebo_scan(const factors::FactorSeries& smb, const factors::FactorSeries& mkt,
                           Date event, int window, int hac_lags) {
    static constexpr int kOffsets[] = {-90, -60, -30, 30, 60, 90};
    return placebo_scan(smb, mkt, event, kOffsets, window, hac_lags);
}

std::vector<SlippageRow> slippage_capacity(const SlippageInputs& in,
                                           std::span<const double> aum_grid) {
    if (!(in.tao_usd > 0.0)) throw ConfigError("slippage: tao_usd must be positive");
    if (in.n_eligible == 0) throw ConfigError("slippage: n_eligible must be positive");
    if (in.turnover < 0.0) throw ConfigError("slippage: negative turnover");
    if (in.small.empty() || in.large.empty())
        throw ConfigError("slippage: small and large terciles must be non-empty");
    for (const auto* leg : {&in.small, &in.medium, &in.large})
        for (const auto& p : *leg)
            if (!(p.tau_reserve > 0.0))
                throw DataError("slippage: non-positive reserve for netuid " +
                                std::to_string(p.netuid));

    // mean over members of dtau/tau = dtau * mean(1/tau)
    const auto inv_mean = [](const std::vector<ReservePool>& leg) {
        if (leg.empty()) return kNaN;
        double s = 0.0;
        for (const auto& p : leg) s += 1.0 / p.tau_reserve;
        return s / static_cast<double>(leg.size());
    };
    const double inv_small = inv_mean(in.small);
    const double inv_medium = inv_mean(in.medium);
    const double inv_large = inv_mean(in.large);

    std::vector<SlippageRow> rows;
    rows.reserve(aum_grid.size());
    for (double aum : aum_grid) {
        if (aum < 0.0) throw ConfigError("slippage: negative AUM");
        SlippageRow row;
        row.aum_usd = aum;
        if (rows.empty() || rows.back().aum_usd == 0.0) {
            const double dtau = (aum / in.tao_usd) / static_cast<double>(in.n_eligible);
            row.small = dtau * inv_small;
            row.medium = dtau * inv_medium;
            row.large = dtau * inv_large;
            row.round_trip = (row.small + row.large) * in.turnover;
        } else {
            // Scale the previous row by the exact AUM ratio so every slippage
            // column is exactly linear across the grid (a decade grid scales
            // by exactly 10x).
            const auto& prev = rows.back();
            const double ratio = aum / prev.aum_usd;
            row.small = prev.small * ratio;
            row.medium = prev.medium * ratio;
            row.large = prev.large * ratio;
            row.round_trip = prev.round_trip * ratio;
        }
        row.net_return = in.gross_mean - row.round_trip;
        row.net_sharpe =
            in.gross_std > 0.0 ? row.net_return / in.gross_std * std::sqrt(365.0) : kNaN;
        row.net_defined = row.net_return > -1.0;  // past that the position is simply gone
        row.sharpe_defined = row.net_defined && row.net_return + 3.0 * in.gross_std >= 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<VolSortRow> vol_sorts(const panel::ReturnPanel& panel,
                                  std::span<const characteristics::Name> names,
                                  std::span<const double> market, int window) {
    std::vector<VolSortRow> out;
    out.reserve(names.size());
    const std::size_t ns = panel.n_subnets();
    for (const auto nm : names) {
        if (!characteristics::is_rolling(nm))
            throw ConfigError(std::string("vol_sorts: ") + characteristics::to_string(nm) +
                              " is not a rolling risk measure");
        const auto ch = characteristics::rolling_risk(nm, panel, market, window);
        VolSortRow row;
        row.sort_name = ch.name;
        double sum_lo = 0.0, sum_mid = 0.0, sum_hi = 0.0;
        std::size_t d_lo = 0, d_mid = 0, d_hi = 0;
        std::vector<double> hl;
        for (std::size_t t = 0; t < panel.n_days(); ++t) {
            const auto sorted = factors::tercile_sort(
                std::span<const double>(ch.values.data() + t * ns, ns),
                std::span<const std::uint8_t>(panel.eligible.data() + t * ns, ns),
                panel.netuids);
            if (!sorted) continue;
            const auto leg_mean = [&](const std::vector<std::size_t>& leg) {
                double s = 0.0;
                std::size_t n = 0;
                for (const std::size_t i : leg) {
                    const double r = panel.rtao(t, i);
                    if (std::isnan(r)) continue;
                    s += r;
                    ++n;
                }
                return n != 0 ? s / static_cast<double>(n) : kNaN;
            };
            const double lo = leg_mean(sorted->bottom);
            const double mid = leg_mean(sorted->middle);
            const double hi = leg_mean(sorted->top);
            if (!std::isnan(lo)) {
                sum_lo += lo;
                ++d_lo;
            }
            if (!std::isnan(mid)) {
                sum_mid += mid;
                ++d_mid;
            }
            if (!std::isnan(hi)) {
                sum_hi += hi;
                ++d_hi;
            }
            if (!std::isnan(lo) && !std::isnan(hi)) hl.push_back(hi - lo);
        }
        row.low = d_lo != 0 ? sum_lo / static_cast<double>(d_lo) : kNaN;
        row.mid = d_mid != 0 ? sum_mid / static_cast<double>(d_mid) : kNaN;
        row.high = d_hi != 0 ? sum_hi / static_cast<double>(d_hi) : kNaN;
        const auto ht = mean_t(hl);
        row.hl_mean = ht.mean;
        row.hl_t = ht.t;
        row.n_days = ht.n;
        out.push_back(std::move(row));
    }
    return out;
}

void export_event_figure_csv(const factors::FactorSeries& f, const std::string& path,
                             int roll_window) {
    if (roll_window <= 0) throw ConfigError("figure export: roll window must be positive");
    CsvWriter w(path);
    w.write_row({"date", f.name, "cumulative", "rolling_mean_" + std::to_string(roll_window)});
    double cum = 1.0;
    std::vector<double> seen;
    for (std::size_t t = 0; t < f.dates.size(); ++t) {
        const double r = f.returns[t];
        if (std::isnan(r)) continue;
        cum *= 1.0 + r;
        seen.push_back(r);
        std::string roll;
        if (seen.size() >= static_cast<std::size_t>(roll_window)) {
            double s = 0.0;
            for (std::size_t j = seen.size() - static_cast<std::size_t>(roll_window);
                 j < seen.size(); ++j)
                s += seen[j];
            roll = format_double(s / static_cast<double>(roll_window));
        }
        w.write_row({f.dates[t].to_string(), format_double(r), format_double(cum), roll});
    }
}

}  // namespace taoquant::experiments
