#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taoquant/characteristics.hpp"
#include "taoquant/factors.hpp"
#include "taoquant/panel.hpp"

namespace taoquant::experiments {

/// Per-factor mean and OLS t over the full sample and the two halves around
/// the split date (first half inclusive of the split day).
struct SubsampleRow {
    std::string name;
    double full_mean = 0.0, full_t = 0.0;
    double first_mean = 0.0, first_t = 0.0;
    double second_mean = 0.0, second_t = 0.0;
    std::size_t full_n = 0, first_n = 0, second_n = 0;
};

/// Throws ConfigError when the split date is not interior to the sample.
std::vector<SubsampleRow> subsample_split(std::span<const factors::FactorSeries> facs,
                                          Date split);

/// One row of the halving event study: symmetric window of `window` days per
/// side (pre = [event-w, event-1], post = [event, event+w-1]; the event day
/// itself counts as post). window = 0 marks the full-sample row. The
/// regression is factor_t = alpha + beta 1{t>=event} + gamma MKT_t with
/// Newey-West errors; gamma is dropped (forced to 0) when the market control
/// is constant over the window, where it is unidentifiable next to the
/// intercept.
struct EventStudyResult {
    int window = 0;
    bool available = true;
    std::size_t n_obs = 0;       // regression sample
    double pre_mean = 0.0;
    double post_mean = 0.0;
    double ratio = 0.0;          // post/pre, NaN when pre_mean == 0
    double alpha = 0.0;
    double beta = 0.0;           // post dummy coefficient
    double gamma = 0.0;          // market control (0 when dropped)
    double nw_t = 0.0;
    double p_value = 1.0;        // normal reference
    int nw_lags = 5;
};

/// One result per window plus a trailing full-sample row (window = 0).
/// Windows that do not fit inside the series span come back available=false.
std::vector<EventStudyResult> halving_event_study(const factors::FactorSeries& smb,
                                                  const factors::FactorSeries& mkt, Date event,
                                                  std::span<const int> windows,
                                                  int hac_lags = 5);
std::vector<EventStudyResult> halving_event_study(const factors::FactorSeries& smb,
                                                  const factors::FactorSeries& mkt, Date event,
                                                  int hac_lags = 5);  // {30,45,60,90}

/// The same regression at shifted (false) event dates.
struct PlaceboResult {
    EventStudyResult actual;
    std::vector<std::pair<int, EventStudyResult>> placebos;  // offset -> row
    bool any_larger = false;  // some available placebo |beta| >= actual |beta|
};

PlaceboResult placebo_scan(const factors::FactorSeries& smb, const factors::FactorSeries& mkt,
                           Date event, std::span<const int> offsets, int window = 60,
                           int hac_lags = 5);
PlaceboResult placebo_scan(const factors::FactorSeries& smb, const factors::FactorSeries& mkt,
                           Date event, int window = 60,
                           int hac_lags = 5);  // {-90,-60,-30,30,60,90}

/// A pool in scope for the capacity analysis.
struct ReservePool {
    int netuid = 0;
    double tau_reserve = 0.0;
};

struct SlippageInputs {
    std::vector<ReservePool> small;   // SMB long leg
    std::vector<ReservePool> medium;
    std::vector<ReservePool> large;   // SMB short leg
    std::size_t n_eligible = 0;       // breadth the AUM is split across
    double tao_usd = 0.0;
    double gross_mean = 0.0;          // gross factor return, fraction/day
    double gross_std = 0.0;           // daily fraction
    double turnover = 1.0;
};

/// One AUM row. Slippage is one-way Delta_tau/tau averaged over tercile
/// members; RT = (small + large) * turnover; net = gross - RT. The display
/// flags mirror the reporting convention: net is unavailable once it implies
/// losing more than 100%/day, the Sharpe additionally when the net mean sits
/// more than 3 gross sigmas below zero (certain loss).
struct SlippageRow {
    double aum_usd = 0.0;
    double small = 0.0;
    double medium = 0.0;
    double large = 0.0;
    double round_trip = 0.0;
    double net_return = 0.0;
    double net_sharpe = 0.0;
    bool net_defined = true;
    bool sharpe_defined = true;
};

/// The first row is computed from the reserves; later rows scale the previous
/// row by the exact AUM ratio, so a decade grid scales every slippage column
/// by exactly 10x. Throws DataError naming the netuid on a non-positive
/// reserve, ConfigError on a non-positive price or empty small/large legs
/// (an empty medium leg just leaves that column missing).
std::vector<SlippageRow> slippage_capacity(const SlippageInputs& in,
                                           std::span<const double> aum_grid);

/// Tercile mean returns after sorting on a 30-day rolling risk measure, with
/// the high-minus-low spread and its OLS t.
struct VolSortRow {
    std::string sort_name;
    double low = 0.0;
    double mid = 0.0;
    double high = 0.0;
    double hl_mean = 0.0;
    double hl_t = 0.0;
    std::size_t n_days = 0;  // days with a defined H-L spread
};

/// `market` aligned to panel dates (needed for BETA30/IVOL30 sorts).
std::vector<VolSortRow> vol_sorts(const panel::ReturnPanel& panel,
                                  std::span<const characteristics::Name> names,
                                  std::span<const double> market, int window = 30);

/// Figure data behind the event study: date, daily return, cumulative growth
/// of 1, and the trailing rolling mean (blank until the window fills).
/// Missing days are skipped.
void export_event_figure_csv(const factors::FactorSeries& f, const std::string& path,
                             int roll_window = 30);

}  // namespace taoquant::experiments
