#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taoquant/panel.hpp"

namespace taoquant::characteristics {

enum class Name {
    MCAP,
    EY,
    MOM7,
    MOM30,
    REV,
    LIQ,
    STAKE,
    VOL30,
    DOWNVOL30,
    UPVOL30,
    IVOL30,
    BETA30,
    SKEW30,
};

/// Throws ConfigError for an unknown id.
Name parse_name(std::string_view id);
const char* to_string(Name name);

/// True for the measures computed from rolling return windows rather than
/// lagged point-in-time state.
bool is_rolling(Name name);

/// date x subnet matrix of a sorting characteristic. The value stored at
/// formation day t is measured entirely from information up to day t-1.
/// NaN marks missing; `masked` flags the subset of missing values that were
/// nullified because a price window spanned a gap or lifecycle break (as
/// opposed to plainly lacking an endpoint observation).
struct CharacteristicMatrix {
    std::string name;
    std::vector<Date> dates;
    std::vector<int> netuids;
    std::vector<double> values;
    std::vector<std::uint8_t> masked;

    [[nodiscard]] std::size_t n_days() const { return dates.size(); }
    [[nodiscard]] std::size_t n_subnets() const { return netuids.size(); }
    [[nodiscard]] std::size_t at(std::size_t t, std::size_t i) const {
        return t * netuids.size() + i;
    }
    [[nodiscard]] double value(std::size_t t, std::size_t i) const { return values[at(t, i)]; }
    [[nodiscard]] bool is_masked(std::size_t t, std::size_t i) const {
        return masked[at(t, i)] != 0;
    }
    [[nodiscard]] std::size_t masked_count() const;
};

/// Point-in-time characteristics (MCAP, EY, MOM7, MOM30, REV, LIQ, STAKE).
/// Momentum/reversal windows require a continuous single-lifecycle price path;
/// values whose windows span an internal gap are masked per the rules above.
/// Negative raw MCAP/LIQ/STAKE fields and non-positive MCAP under EY yield
/// missing values, keeping every present value non-negative for those names.
CharacteristicMatrix characteristic(Name name, const panel::SnapshotGrid& grid);

/// Rolling risk measures over the trailing `window` returns (days t-window ..
/// t-1, all non-missing). `market` is the market return series aligned to
/// panel dates (NaN missing); only BETA30/IVOL30 read it.
CharacteristicMatrix rolling_risk(Name name, const panel::ReturnPanel& panel,
                                  std::span<const double> market, int window = 30);

/// Dispatch on is_rolling(name).
CharacteristicMatrix compute(Name name, const panel::SnapshotGrid& grid,
                             const panel::ReturnPanel& panel, std::span<const double> market);

/// Wide CSV, same layout as the panel exports.
void export_csv(const CharacteristicMatrix& m, const std::string& path);

}  // namespace taoquant::characteristics
