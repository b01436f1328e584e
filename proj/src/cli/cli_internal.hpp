#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taoquant/dates.hpp"
#include "taoquant/factors.hpp"
#include "taoquant/ingest.hpp"
#include "taoquant/panel.hpp"

namespace taoquant::cli {

/// Effective run configuration. Persisted to <out>/run_config.json by the
/// first command and merged (stored values, then explicit flags) on every
/// later one, so a multi-stage run stays internally consistent.
struct RunCfg {
    std::string out = "taoquant-run";

    // Exactly one data source for the commands that consume one.
    std::string snapshot;      // CSV or JSON snapshot path
    std::string remote_url;    // API base URL
    std::string synth_config;  // synthetic network config path

    std::string fx;         // optional USD/TAO series
    std::string cache_dir;  // HTTP response cache
    std::string from, to;   // inclusive date range (ISO), empty = open
    std::string denom = "tao";
    int hac_lags = 5;
    double winsor = 1.0;
    bool flip_legs = false;
    double tao_usd = 0.0;  // 0 = take the FX series' last price
    std::uint64_t seed = 0;
    bool seed_set = false;  // explicit --seed overrides the synth config
    std::string halving_date = "2025-12-14";
    std::string split_date;  // empty = sample midpoint
    bool svg = true;

    [[nodiscard]] std::filesystem::path out_dir() const { return out; }
    [[nodiscard]] int sources() const {
        return (snapshot.empty() ? 0 : 1) + (remote_url.empty() ? 0 : 1) +
               (synth_config.empty() ? 0 : 1);
    }
};

void save_run_config(const RunCfg& rc);
RunCfg load_run_config(const std::filesystem::path& out);

/// Everything the analysis commands share, rebuilt deterministically from the
/// staged snapshot artifact.
struct Pipeline {
    std::vector<ingest::RawSnapshotRow> rows;
    std::optional<ingest::FxSeries> fx;
    panel::SnapshotGrid grid;
    panel::ReturnPanel pnl;
    std::vector<factors::FactorSeries> facs;  // standard menu, MKT first
    std::vector<double> mkt;                  // MKT aligned to panel dates
    factors::Denomination denom = factors::Denomination::tao;
};

/// Path of the staged snapshot (ingest/ or synth/). Throws DataError naming
/// the command to run when neither exists, ConfigError when both do.
std::filesystem::path resolve_snapshot(const RunCfg& rc);

/// Throws DataError("...run `taoquant <cmd>` first") when a stage's artifact
/// is missing.
void require_artifact(const std::filesystem::path& file, const std::string& cmd);

Pipeline load_pipeline(const RunCfg& rc);

const factors::FactorSeries& find_factor(const Pipeline& p, const std::string& name);

/// Daily equal-weighted return of one tercile (0 bottom, 1 middle, 2 top) of
/// a characteristic sort, on panel dates.
factors::FactorSeries tercile_series(const characteristics::CharacteristicMatrix& m,
                                     const panel::ReturnPanel& pnl, int which,
                                     factors::Denomination denom, std::string name);

/// Fixed-point display formatting for the table CSVs ("" for NaN).
std::string fmt(double v, int decimals);

// Command implementations. Each writes its artifacts under <out>/<command>/
// and returns the files written (relative to the run root) for the manifest.
using Written = std::map<std::string, std::string>;  // rel path -> abs path

Written cmd_ingest(const RunCfg& rc);
Written cmd_synth(const RunCfg& rc);
Written cmd_build_panel(const RunCfg& rc);
Written cmd_factors(const RunCfg& rc);
Written cmd_stats(const RunCfg& rc);
Written cmd_fm(const RunCfg& rc);
Written cmd_grs(const RunCfg& rc);
Written cmd_spanning(const RunCfg& rc);
Written cmd_halving(const RunCfg& rc);
Written cmd_placebo(const RunCfg& rc);
Written cmd_slippage(const RunCfg& rc);
Written cmd_vol_sorts(const RunCfg& rc);
Written cmd_risk_decomp(const RunCfg& rc);
Written cmd_subsample(const RunCfg& rc);
int cmd_report(const RunCfg& rc);

}  // namespace taoquant::cli
