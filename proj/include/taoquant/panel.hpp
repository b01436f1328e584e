#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taoquant/dates.hpp"
#include "taoquant/ingest.hpp"

namespace taoquant::panel {

/// Dense date x subnet grid of raw snapshot fields. Dates run daily from the
/// first to the last observed day; a subnet-day with no row is "absent".
///
/// Rows violating the non-startup sanity invariant (price and tau reserve
/// must be positive) are quarantined: dropped from the grid and reported, so
/// one corrupt row never poisons downstream statistics.
///
/// Lifecycles: a subnet's lifecycle ordinal increments when it enters startup
/// mode, so a startup run and the days after it form a new lifecycle. Returns,
/// eligibility history and characteristic windows never cross lifecycles.
class SnapshotGrid {
  public:
    explicit SnapshotGrid(std::span<const ingest::RawSnapshotRow> rows);

    [[nodiscard]] const std::vector<Date>& dates() const { return dates_; }
    [[nodiscard]] const std::vector<int>& netuids() const { return netuids_; }
    [[nodiscard]] std::size_t n_days() const { return dates_.size(); }
    [[nodiscard]] std::size_t n_subnets() const { return netuids_.size(); }

    [[nodiscard]] std::optional<std::size_t> day_index(Date d) const;
    [[nodiscard]] std::optional<std::size_t> subnet_index(int netuid) const;

    [[nodiscard]] bool present(std::size_t t, std::size_t i) const { return present_[at(t, i)]; }
    [[nodiscard]] bool startup(std::size_t t, std::size_t i) const { return startup_[at(t, i)]; }
    /// Lifecycle ordinal; -1 on absent days.
    [[nodiscard]] int lifecycle(std::size_t t, std::size_t i) const { return lifecycle_[at(t, i)]; }

    // NaN on absent days.
    [[nodiscard]] double price(std::size_t t, std::size_t i) const { return price_[at(t, i)]; }
    [[nodiscard]] double mcap(std::size_t t, std::size_t i) const { return mcap_[at(t, i)]; }
    [[nodiscard]] double tau_reserve(std::size_t t, std::size_t i) const {
        return tau_reserve_[at(t, i)];
    }
    [[nodiscard]] double alpha_reserve(std::size_t t, std::size_t i) const {
        return alpha_reserve_[at(t, i)];
    }
    [[nodiscard]] double alpha_staked(std::size_t t, std::size_t i) const {
        return alpha_staked_[at(t, i)];
    }
    [[nodiscard]] double emission_rao(std::size_t t, std::size_t i) const {
        return emission_[at(t, i)];
    }

    [[nodiscard]] const std::vector<std::string>& quarantined() const { return quarantined_; }

  private:
    [[nodiscard]] std::size_t at(std::size_t t, std::size_t i) const {
        return t * netuids_.size() + i;
    }

    std::vector<Date> dates_;
    std::vector<int> netuids_;
    std::vector<std::uint8_t> present_;
    std::vector<std::uint8_t> startup_;
    std::vector<int> lifecycle_;
    std::vector<double> price_, mcap_, tau_reserve_, alpha_reserve_, alpha_staked_, emission_;
    std::vector<std::string> quarantined_;
};

/// Survivorship-safe return panel. NaN marks a missing return.
struct ReturnPanel {
    std::vector<Date> dates;
    std::vector<int> netuids;
    std::vector<double> r_tao;          // [t * n_subnets + i]
    std::vector<double> r_usd;
    std::vector<std::uint8_t> eligible;
    std::vector<std::string> quarantined;

    [[nodiscard]] std::size_t n_days() const { return dates.size(); }
    [[nodiscard]] std::size_t n_subnets() const { return netuids.size(); }
    [[nodiscard]] std::size_t at(std::size_t t, std::size_t i) const {
        return t * netuids.size() + i;
    }
    [[nodiscard]] double rtao(std::size_t t, std::size_t i) const { return r_tao[at(t, i)]; }
    [[nodiscard]] double rusd(std::size_t t, std::size_t i) const { return r_usd[at(t, i)]; }
    [[nodiscard]] bool is_eligible(std::size_t t, std::size_t i) const {
        return eligible[at(t, i)] != 0;
    }
    [[nodiscard]] std::optional<std::size_t> day_index(Date d) const;
    [[nodiscard]] std::optional<std::size_t> subnet_index(int netuid) const;
};

/// r_tao(t,i) = p_t/p_{t-1} - 1 for consecutive present, non-startup days in
/// one lifecycle; r_usd compounds with the FX return where available. Pass a
/// null fx to leave r_usd entirely missing. Eligibility starts all-false.
ReturnPanel compute_returns(const SnapshotGrid& grid, const ingest::FxSeries* fx);

/// Clamp every present return into [-bound, +bound]; missing stays missing.
void winsorize(ReturnPanel& panel, double bound = 1.0);

/// eligible(t,i) iff subnet present and non-startup at t, netuid != 0, and
/// at least min_history non-missing returns occurred strictly before t within
/// the current lifecycle.
void apply_eligibility(ReturnPanel& panel, const SnapshotGrid& grid, int min_history = 7);

/// compute_returns + winsorize + apply_eligibility in the canonical order.
ReturnPanel build_panel(const SnapshotGrid& grid, const ingest::FxSeries* fx,
                        double winsor_bound = 1.0, int min_history = 7);

/// Wide per-matrix CSVs (r_tao.csv, r_usd.csv, eligibility.csv) under dir.
void export_panel_csv(const ReturnPanel& panel, const std::string& dir);

}  // namespace taoquant::panel
