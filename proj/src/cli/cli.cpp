#include "taoquant/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_internal.hpp"
#include "taoquant/errors.hpp"

namespace taoquant::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

/// Exclusive advisory lock on the run directory; concurrent invocations
/// against the same tree are rejected rather than interleaved.
class RunLock {
  public:
    explicit RunLock(const fs::path& out) : path_(out / ".lock") {
        fs::create_directories(out);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw DataError("another invocation holds " + path_.string() +
                            " (remove the file if it is stale)");
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] const auto n = ::write(fd_, pid.data(), pid.size());
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;
    ~RunLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }

  private:
    fs::path path_;
    int fd_ = -1;
};

std::string get_str(const json& j, const char* key, std::string fallback) {
    if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
    return fallback;
}

}  // namespace

void save_run_config(const RunCfg& rc) {
    json j;
    j["snapshot"] = rc.snapshot;
    j["remote_url"] = rc.remote_url;
    j["synth_config"] = rc.synth_config;
    j["fx"] = rc.fx;
    j["cache_dir"] = rc.cache_dir;
    j["from"] = rc.from;
    j["to"] = rc.to;
    j["denomination"] = rc.denom;
    j["hac_lags"] = rc.hac_lags;
    j["winsor_bound"] = rc.winsor;
    j["flip_legs"] = rc.flip_legs;
    j["tao_usd"] = rc.tao_usd;
    j["seed"] = rc.seed;
    j["halving_date"] = rc.halving_date;
    j["split_date"] = rc.split_date;
    j["svg"] = rc.svg;
    std::ofstream out(rc.out_dir() / "run_config.json");
    if (!out) throw ConfigError("output directory is not writable: " + rc.out);
    out << j.dump(2) << '\n';
}

RunCfg load_run_config(const fs::path& out) {
    RunCfg rc;
    rc.out = out.string();
    const fs::path p = out / "run_config.json";
    if (!fs::exists(p)) return rc;
    std::ifstream in(p);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(p.string(), 0, std::string("bad run config: ") + e.what());
    }
    rc.snapshot = get_str(j, "snapshot", "");
    rc.remote_url = get_str(j, "remote_url", "");
    rc.synth_config = get_str(j, "synth_config", "");
    rc.fx = get_str(j, "fx", "");
    rc.cache_dir = get_str(j, "cache_dir", "");
    rc.from = get_str(j, "from", "");
    rc.to = get_str(j, "to", "");
    rc.denom = get_str(j, "denomination", "tao");
    if (j.contains("hac_lags")) rc.hac_lags = j["hac_lags"].get<int>();
    if (j.contains("winsor_bound")) rc.winsor = j["winsor_bound"].get<double>();
    if (j.contains("flip_legs")) rc.flip_legs = j["flip_legs"].get<bool>();
    if (j.contains("tao_usd")) rc.tao_usd = j["tao_usd"].get<double>();
    if (j.contains("seed")) rc.seed = j["seed"].get<std::uint64_t>();
    rc.halving_date = get_str(j, "halving_date", "2025-12-14");
    rc.split_date = get_str(j, "split_date", "");
    if (j.contains("svg")) rc.svg = j["svg"].get<bool>();
    return rc;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"taoquant: factor research on AMM-priced subnet token cross-sections"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read default option values from an INI file");

    RunCfg flags;
    auto* o_out = app.add_option("--out", flags.out, "Run output directory")
                      ->capture_default_str();
    auto* o_snap = app.add_option("--snapshot", flags.snapshot,
                                  "Local snapshot file (.csv or .json)");
    auto* o_remote = app.add_option(
        "--remote-url", flags.remote_url,
        "API base URL; the key is read from $TAOQUANT_API_KEY");
    auto* o_synth = app.add_option("--synth-config", flags.synth_config,
                                   "Synthetic network config (key = value file)");
    auto* o_fx = app.add_option("--fx", flags.fx, "USD/TAO daily price CSV (date,tao_usd)");
    auto* o_cache = app.add_option("--cache-dir", flags.cache_dir,
                                   "Cache directory for remote responses");
    auto* o_from = app.add_option("--from", flags.from, "First date, YYYY-MM-DD (inclusive)");
    auto* o_to = app.add_option("--to", flags.to, "Last date, YYYY-MM-DD (inclusive)");
    auto* o_denom = app.add_option("--denom", flags.denom, "Return denomination: tao | usd")
                        ->check(CLI::IsMember({"tao", "usd"}));
    auto* o_lags = app.add_option("--hac-lags", flags.hac_lags, "Newey-West lag count")
                       ->check(CLI::NonNegativeNumber);
    auto* o_winsor =
        app.add_option("--winsor", flags.winsor, "Winsorization bound on daily returns")
            ->check(CLI::PositiveNumber);
    auto* o_flip = app.add_flag("--flip-legs", flags.flip_legs,
                                "Swap the long and short tercile of every sorted factor");
    auto* o_tao_usd = app.add_option("--tao-usd", flags.tao_usd,
                                     "USD/TAO price override for the slippage table");
    auto* o_seed = app.add_option("--seed", flags.seed,
                                  "Override the synth config seed");
    auto* o_halving = app.add_option("--halving-date", flags.halving_date,
                                     "Event date for halving/placebo")
                          ->capture_default_str();
    auto* o_split = app.add_option("--split-date", flags.split_date,
                                   "Subsample split date (default: sample midpoint)");
    auto* o_nosvg = app.add_flag("--no-svg", "Skip SVG chart output");

    const char* commands[][2] = {
        {"ingest", "Load the snapshot (local file or remote API) into the run tree"},
        {"synth", "Simulate a synthetic network into the run tree"},
        {"build-panel", "Build the survivorship-safe daily return panel"},
        {"factors", "Construct the factor menu and tercile portfolio tables"},
        {"stats", "Factor summary statistics and correlation matrix"},
        {"fm", "Fama-MacBeth cross-sectional premia"},
        {"grs", "GRS test of the three-factor model on 12 sorted portfolios"},
        {"spanning", "Spanning-test alphas for every factor"},
        {"halving", "Event study of SMB around the halving date"},
        {"placebo", "Placebo scan of the halving regression at shifted dates"},
        {"slippage", "AMM slippage and net-of-cost capacity by AUM"},
        {"vol-sorts", "Tercile sorts on rolling risk measures"},
        {"risk-decomp", "Downside/upside risk decomposition of the factors"},
        {"subsample", "Factor means and t-statistics per sample half"},
        {"report", "Run every stage, emit all tables, figures and manifest.json"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);

        RunCfg rc = load_run_config(flags.out);
        rc.out = flags.out;
        if (o_snap->count()) rc.snapshot = flags.snapshot;
        if (o_remote->count()) rc.remote_url = flags.remote_url;
        if (o_synth->count()) rc.synth_config = flags.synth_config;
        if (o_fx->count()) rc.fx = flags.fx;
        if (o_cache->count()) rc.cache_dir = flags.cache_dir;
        if (o_from->count()) rc.from = flags.from;
        if (o_to->count()) rc.to = flags.to;
        if (o_denom->count()) rc.denom = flags.denom;
        if (o_lags->count()) rc.hac_lags = flags.hac_lags;
        if (o_winsor->count()) rc.winsor = flags.winsor;
        if (o_flip->count()) rc.flip_legs = flags.flip_legs;
        if (o_tao_usd->count()) rc.tao_usd = flags.tao_usd;
        if (o_seed->count()) {
            rc.seed = flags.seed;
            rc.seed_set = true;
        }
        if (o_halving->count()) rc.halving_date = flags.halving_date;
        if (o_split->count()) rc.split_date = flags.split_date;
        if (o_nosvg->count()) rc.svg = false;

        if (rc.sources() > 1)
            throw ConfigError(
                "exactly one data source: --snapshot, --remote-url or --synth-config");

        const RunLock lock(rc.out_dir());
        save_run_config(rc);

        const std::map<std::string, Written (*)(const RunCfg&)> dispatch{
            {"ingest", cmd_ingest},         {"synth", cmd_synth},
            {"build-panel", cmd_build_panel}, {"factors", cmd_factors},
            {"stats", cmd_stats},           {"fm", cmd_fm},
            {"grs", cmd_grs},               {"spanning", cmd_spanning},
            {"halving", cmd_halving},       {"placebo", cmd_placebo},
            {"slippage", cmd_slippage},     {"vol-sorts", cmd_vol_sorts},
            {"risk-decomp", cmd_risk_decomp}, {"subsample", cmd_subsample},
        };
        for (const auto* sub : app.get_subcommands()) {
            if (sub->get_name() == "report") {
                const int code = cmd_report(rc);
                if (code != 0) return code;
                continue;
            }
            dispatch.at(sub->get_name())(rc);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help/--version; anything else is a usage error.
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace taoquant::cli
