#include "taoquant/panel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "taoquant/csv.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/kernels.hpp"

namespace taoquant::panel {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

SnapshotGrid::SnapshotGrid(std::span<const ingest::RawSnapshotRow> rows) {
    if (rows.empty()) throw DataError("cannot build a grid from zero snapshot rows");

    Date lo = rows.front().date;
    Date hi = rows.front().date;
    std::vector<int> uids;
    for (const auto& row : rows) {
        lo = std::min(lo, row.date);
        hi = std::max(hi, row.date);
        uids.push_back(row.netuid);
    }
    std::sort(uids.begin(), uids.end());
    uids.erase(std::unique(uids.begin(), uids.end()), uids.end());
    netuids_ = std::move(uids);

    const auto n_days = static_cast<std::size_t>(hi - lo + 1);
    dates_.reserve(n_days);
    for (Date d = lo; d <= hi; ++d) dates_.push_back(d);

    const std::size_t cells = n_days * netuids_.size();
    present_.assign(cells, 0);
    startup_.assign(cells, 0);
    lifecycle_.assign(cells, -1);
    price_.assign(cells, kNaN);
    mcap_.assign(cells, kNaN);
    tau_reserve_.assign(cells, kNaN);
    alpha_reserve_.assign(cells, kNaN);
    alpha_staked_.assign(cells, kNaN);
    emission_.assign(cells, kNaN);

    for (const auto& row : rows) {
        const std::size_t t = static_cast<std::size_t>(row.date - lo);
        const std::size_t i = *subnet_index(row.netuid);
        const std::size_t c = at(t, i);
        if (present_[c])
            throw DataError("duplicate snapshot key (" + row.date.to_string() + ", netuid " +
                            std::to_string(row.netuid) + ")");
        if (!row.startup_mode && (!(row.price_tao > 0.0) || !(row.tau_reserve > 0.0))) {
            quarantined_.push_back(row.date.to_string() + " netuid " +
                                   std::to_string(row.netuid) +
                                   ": non-startup row with non-positive price_tao (" +
                                   format_double(row.price_tao) + ") or tau_reserve (" +
                                   format_double(row.tau_reserve) + ")");
            continue;
        }
        present_[c] = 1;
        startup_[c] = row.startup_mode ? 1 : 0;
        price_[c] = row.price_tao;
        mcap_[c] = row.mcap_tao;
        tau_reserve_[c] = row.tau_reserve;
        alpha_reserve_[c] = row.alpha_reserve;
        alpha_staked_[c] = row.alpha_staked;
        emission_[c] = row.emission_rao_per_day;
    }

    // Lifecycle ordinals: entering startup opens a new lifecycle.
    for (std::size_t i = 0; i < netuids_.size(); ++i) {
        int life = 0;
        bool in_startup = false;
        for (std::size_t t = 0; t < dates_.size(); ++t) {
            const std::size_t c = at(t, i);
            if (!present_[c]) continue;
            if (startup_[c]) {
                if (!in_startup) {
                    in_startup = true;
                    ++life;
                }
            } else {
                in_startup = false;
            }
            lifecycle_[c] = life;
        }
    }
}

std::optional<std::size_t> SnapshotGrid::day_index(Date d) const {
    if (dates_.empty() || d < dates_.front() || d > dates_.back()) return std::nullopt;
    return static_cast<std::size_t>(d - dates_.front());
}

std::optional<std::size_t> SnapshotGrid::subnet_index(int netuid) const {
    const auto it = std::lower_bound(netuids_.begin(), netuids_.end(), netuid);
    if (it == netuids_.end() || *it != netuid) return std::nullopt;
    return static_cast<std::size_t>(it - netuids_.begin());
}

std::optional<std::size_t> ReturnPanel::day_index(Date d) const {
    if (dates.empty() || d < dates.front() || d > dates.back()) return std::nullopt;
    return static_cast<std::size_t>(d - dates.front());
}

std::optional<std::size_t> ReturnPanel::subnet_index(int netuid) const {
    const auto it = std::lower_bound(netuids.begin(), netuids.end(), netuid);
    if (it == netuids.end() || *it != netuid) return std::nullopt;
    return static_cast<std::size_t>(it - netuids.begin());
}

ReturnPanel compute_returns(const SnapshotGrid& grid, const ingest::FxSeries* fx) {
    if (grid.n_days() < 2) throw DataError("return panel needs at least 2 days of data");

    ReturnPanel panel;
    panel.dates = grid.dates();
    panel.netuids = grid.netuids();
    panel.quarantined = grid.quarantined();
    const std::size_t cells = grid.n_days() * grid.n_subnets();
    panel.r_tao.assign(cells, kNaN);
    panel.r_usd.assign(cells, kNaN);
    panel.eligible.assign(cells, 0);

    for (std::size_t t = 1; t < grid.n_days(); ++t) {
        const auto fx_ret = fx ? fx->daily_return(panel.dates[t]) : std::nullopt;
        for (std::size_t i = 0; i < grid.n_subnets(); ++i) {
            if (!grid.present(t, i) || !grid.present(t - 1, i)) continue;
            if (grid.startup(t, i) || grid.startup(t - 1, i)) continue;
            if (grid.lifecycle(t, i) != grid.lifecycle(t - 1, i)) continue;
            const double p0 = grid.price(t - 1, i);
            const double p1 = grid.price(t, i);
            const double r = p1 / p0 - 1.0;
            panel.r_tao[panel.at(t, i)] = r;
            if (fx_ret) panel.r_usd[panel.at(t, i)] = (1.0 + r) * (1.0 + *fx_ret) - 1.0;
        }
    }
    return panel;
}

void winsorize(ReturnPanel& panel, double bound) {
    if (!(bound > 0.0)) throw ConfigError("winsorization bound must be positive");
    kernels::clamp(panel.r_tao, -bound, bound);
    kernels::clamp(panel.r_usd, -bound, bound);
}

void apply_eligibility(ReturnPanel& panel, const SnapshotGrid& grid, int min_history) {
    if (min_history < 0) throw ConfigError("min_history must be >= 0");
    if (panel.dates != grid.dates() || panel.netuids != grid.netuids())
        throw DataError("panel and grid are not aligned");

    for (std::size_t i = 0; i < grid.n_subnets(); ++i) {
        const bool is_root = grid.netuids()[i] == 0;
        int cur_life = -1;
        int count = 0;
        for (std::size_t t = 0; t < grid.n_days(); ++t) {
            if (!grid.present(t, i)) continue;
            const int life = grid.lifecycle(t, i);
            if (life != cur_life) {
                cur_life = life;
                count = 0;
            }
            panel.eligible[panel.at(t, i)] =
                (!is_root && !grid.startup(t, i) && count >= min_history) ? 1 : 0;
            if (!std::isnan(panel.rtao(t, i))) ++count;
        }
    }
}

ReturnPanel build_panel(const SnapshotGrid& grid, const ingest::FxSeries* fx, double winsor_bound,
                        int min_history) {
    ReturnPanel panel = compute_returns(grid, fx);
    winsorize(panel, winsor_bound);
    apply_eligibility(panel, grid, min_history);
    return panel;
}

void export_panel_csv(const ReturnPanel& panel, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto path = [&dir](const char* name) {
        return (std::filesystem::path(dir) / name).string();
    };

    std::vector<std::string> header{"date"};
    for (const int uid : panel.netuids) header.push_back(format_int(uid));

    const auto write_matrix = [&](const char* name, const std::vector<double>& m) {
        CsvWriter w(path(name));
        w.write_row(header);
        std::vector<std::string> row(header.size());
        for (std::size_t t = 0; t < panel.n_days(); ++t) {
            row[0] = panel.dates[t].to_string();
            for (std::size_t i = 0; i < panel.n_subnets(); ++i)
                row[i + 1] = format_double(m[panel.at(t, i)]);
            w.write_row(row);
        }
    };
    write_matrix("r_tao.csv", panel.r_tao);
    write_matrix("r_usd.csv", panel.r_usd);

    CsvWriter w(path("eligibility.csv"));
    w.write_row(header);
    std::vector<std::string> row(header.size());
    for (std::size_t t = 0; t < panel.n_days(); ++t) {
        row[0] = panel.dates[t].to_string();
        for (std::size_t i = 0; i < panel.n_subnets(); ++i)
            row[i + 1] = panel.is_eligible(t, i) ? "true" : "false";
        w.write_row(row);
    }
}

}  // namespace taoquant::panel
