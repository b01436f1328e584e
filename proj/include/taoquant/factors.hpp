#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taoquant/characteristics.hpp"
#include "taoquant/panel.hpp"

namespace taoquant::factors {

enum class Denomination { tao, usd };

/// Membership of one day's tercile sort, as subnet indices into the panel.
struct TercileSort {
    std::vector<std::size_t> bottom;
    std::vector<std::size_t> middle;
    std::vector<std::size_t> top;
};

/// Sorts the subnets with eligible(i) and a non-missing value ascending by
/// (value, netuid) and cuts at ranks ceil(N/3), ceil(2N/3). Returns nullopt
/// (the no-sort signal) when fewer than 3 subnets qualify.
std::optional<TercileSort> tercile_sort(std::span<const double> values,
                                        std::span<const std::uint8_t> eligible,
                                        std::span<const int> netuids);

/// A named daily return series with construction metadata. For long-short
/// factors the legs record which tercile is long/short; MKT has no legs.
struct FactorSeries {
    std::string name;
    std::string sort_characteristic;  // empty for MKT
    std::string long_leg;             // "bottom" | "top" | "" for MKT
    std::string short_leg;
    std::vector<Date> dates;
    std::vector<double> returns;  // NaN missing
    std::vector<std::size_t> long_count;   // members with a usable return, per day
    std::vector<std::size_t> short_count;  // (for MKT: long_count = breadth, short = 0)

    [[nodiscard]] std::size_t n_days() const { return dates.size(); }
};

enum class LongLeg { bottom, top };

/// Daily equal-weighted long-minus-short return on the characteristic's
/// terciles. A day's factor return exists when both legs contain at least one
/// member with a non-missing return; no-sort days are missing.
FactorSeries build_factor(const std::string& name,
                          const characteristics::CharacteristicMatrix& ch,
                          const panel::ReturnPanel& panel, LongLeg long_leg,
                          Denomination denom = Denomination::tao);

/// Equal-weighted mean return across all eligible subnets each day.
FactorSeries market_factor(const panel::ReturnPanel& panel,
                           Denomination denom = Denomination::tao);

/// The standard factor menu with its sign conventions:
/// SMB = bottom-top on MCAP; HML_EMIS, WML7, WML30, STAKE = top-bottom;
/// REV, LIQ = bottom-top. Order: MKT, SMB, HML_EMIS, WML7, WML30, REV, LIQ,
/// STAKE.
std::vector<FactorSeries> standard_factors(const panel::SnapshotGrid& grid,
                                           const panel::ReturnPanel& panel,
                                           Denomination denom = Denomination::tao);

/// One row of a tercile portfolio table.
struct TercileRow {
    std::string tercile;  // "bottom" | "middle" | "top"
    double mean_daily = 0.0;   // fraction/day
    double ann_return = 0.0;   // mean * 365
    double ann_std = 0.0;      // daily std * sqrt(365)
    double sharpe = 0.0;       // ann_return / ann_std
    std::size_t n_days = 0;
    double avg_members = 0.0;
};

/// Equal-weighted per-tercile performance. Annualization is arithmetic over
/// 365 days.
std::vector<TercileRow> tercile_table(const characteristics::CharacteristicMatrix& ch,
                                      const panel::ReturnPanel& panel,
                                      Denomination denom = Denomination::tao);

/// Long CSV: `date,<name>`, missing days skipped.
void export_factor_csv(const FactorSeries& f, const std::string& path);

/// Wide CSV over the union of dates: `date,<name1>,<name2>,...`.
void export_factors_csv(std::span<const FactorSeries> fs, const std::string& path);

}  // namespace taoquant::factors
