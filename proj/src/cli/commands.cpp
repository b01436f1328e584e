#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_internal.hpp"
#include "taoquant/characteristics.hpp"
#include "taoquant/csv.hpp"
#include "taoquant/econometrics.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/experiments.hpp"
#include "taoquant/synth.hpp"

namespace taoquant::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
namespace ch = taoquant::characteristics;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

fs::path ensure_dir(const fs::path& dir) {
    fs::create_directories(dir);
    return dir;
}

void track(Written& w, const RunCfg& rc, const fs::path& file) {
    w.emplace(fs::relative(file, rc.out_dir()).generic_string(), fs::absolute(file).string());
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::optional<Date> parse_opt_date(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return Date::parse(s);
}

std::vector<ingest::RawSnapshotRow> filter_range(std::vector<ingest::RawSnapshotRow> rows,
                                                 const RunCfg& rc) {
    const auto from = parse_opt_date(rc.from);
    const auto to = parse_opt_date(rc.to);
    if (!from && !to) return rows;
    std::erase_if(rows, [&](const ingest::RawSnapshotRow& r) {
        return (from && r.date < *from) || (to && r.date > *to);
    });
    return rows;
}

double pairwise_corr(const factors::FactorSeries& a, const factors::FactorSeries& b) {
    std::vector<double> x, y;
    std::size_t ia = 0, ib = 0;
    while (ia < a.n_days() && ib < b.n_days()) {
        if (a.dates[ia] < b.dates[ib]) {
            ++ia;
        } else if (b.dates[ib] < a.dates[ia]) {
            ++ib;
        } else {
            if (!std::isnan(a.returns[ia]) && !std::isnan(b.returns[ib])) {
                x.push_back(a.returns[ia]);
                y.push_back(b.returns[ib]);
            }
            ++ia;
            ++ib;
        }
    }
    const std::size_t n = x.size();
    if (n < 2) return kNan;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return kNan;
    return sxy / std::sqrt(sxx * syy);
}

Date halving_date(const RunCfg& rc) { return Date::parse(rc.halving_date); }

struct FactorStats {
    bool ok = false;
    econ::SummaryStats s;
    std::string why;
};

FactorStats try_stats(const factors::FactorSeries& f, int lags) {
    FactorStats out;
    try {
        out.s = econ::summary_stats(f.returns, lags);
        out.ok = true;
    } catch (const Error& e) {
        out.why = e.what();
    }
    return out;
}

}  // namespace

factors::FactorSeries tercile_series(const ch::CharacteristicMatrix& m,
                                     const panel::ReturnPanel& pnl, int which,
                                     factors::Denomination denom, std::string name) {
    const std::size_t ns = pnl.n_subnets();
    factors::FactorSeries f;
    f.name = std::move(name);
    f.sort_characteristic = m.name;
    f.dates = pnl.dates;
    f.returns.assign(pnl.n_days(), kNan);
    f.long_count.assign(pnl.n_days(), 0);
    f.short_count.assign(pnl.n_days(), 0);
    for (std::size_t t = 0; t < pnl.n_days(); ++t) {
        const auto sort = factors::tercile_sort(
            std::span(m.values.data() + t * ns, ns),
            std::span(pnl.eligible.data() + t * ns, ns), pnl.netuids);
        if (!sort) continue;
        const auto& leg = which == 0 ? sort->bottom : which == 1 ? sort->middle : sort->top;
        double sum = 0.0;
        std::size_t n = 0;
        for (const std::size_t i : leg) {
            const double r = denom == factors::Denomination::usd ? pnl.rusd(t, i)
                                                                 : pnl.rtao(t, i);
            if (std::isnan(r)) continue;
            sum += r;
            ++n;
        }
        if (n == 0) continue;
        f.returns[t] = sum / static_cast<double>(n);
        f.long_count[t] = n;
    }
    return f;
}

std::string fmt(double v, int decimals) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::filesystem::path resolve_snapshot(const RunCfg& rc) {
    const fs::path ing = rc.out_dir() / "ingest" / "snapshot.csv";
    const fs::path syn = rc.out_dir() / "synth" / "snapshot.csv";
    const bool has_ing = fs::exists(ing);
    const bool has_syn = fs::exists(syn);
    if (has_ing && has_syn)
        throw ConfigError("both " + ing.string() + " and " + syn.string() +
                          " exist; remove the one that is stale");
    if (has_ing) return ing;
    if (has_syn) return syn;
    throw DataError("no snapshot artifact under " + rc.out +
                    "; run `taoquant ingest` (or `taoquant synth`) first");
}

void require_artifact(const std::filesystem::path& file, const std::string& cmd) {
    if (!fs::exists(file))
        throw DataError(file.string() + " is missing; run `taoquant " + cmd + "` first");
}

Pipeline load_pipeline(const RunCfg& rc) {
    const fs::path snap = resolve_snapshot(rc);
    require_artifact(rc.out_dir() / "panel" / "r_tao.csv", "build-panel");

    auto rows = ingest::load_snapshot_csv(snap.string());
    std::optional<ingest::FxSeries> fx;
    const fs::path fx_path = rc.out_dir() / "ingest" / "fx.csv";
    if (fs::exists(fx_path)) fx = ingest::FxSeries::load(fx_path.string());

    const auto denom =
        rc.denom == "usd" ? factors::Denomination::usd : factors::Denomination::tao;
    if (denom == factors::Denomination::usd && !fx)
        throw ConfigError("USD denomination needs an FX series; rerun ingest with --fx");

    panel::SnapshotGrid grid(rows);
    auto pnl = panel::build_panel(grid, fx ? &*fx : nullptr, rc.winsor);
    auto facs = factors::standard_factors(grid, pnl, denom);
    if (rc.flip_legs) {
        // Swap the legs of every sorted factor: the series negates exactly.
        for (auto& f : facs) {
            if (f.sort_characteristic.empty()) continue;
            std::swap(f.long_leg, f.short_leg);
            std::swap(f.long_count, f.short_count);
            for (auto& r : f.returns)
                if (!std::isnan(r)) r = -r;
        }
    }

    std::vector<double> mkt(pnl.n_days(), kNan);
    const auto& m = facs.front();
    for (std::size_t j = 0; j < m.n_days(); ++j) {
        if (const auto t = pnl.day_index(m.dates[j])) mkt[*t] = m.returns[j];
    }
    return Pipeline{std::move(rows), std::move(fx),  std::move(grid), std::move(pnl),
                    std::move(facs), std::move(mkt), denom};
}

const factors::FactorSeries& find_factor(const Pipeline& p, const std::string& name) {
    for (const auto& f : p.facs)
        if (f.name == name) return f;
    throw DataError("factor " + name + " not in the standard menu");
}

Written cmd_ingest(const RunCfg& rc) {
    Written w;
    if (!rc.synth_config.empty())
        throw ConfigError("the configured data source is a synth config; run `taoquant synth`");
    if (rc.snapshot.empty() && rc.remote_url.empty())
        throw ConfigError("ingest needs a data source: --snapshot or --remote-url");

    std::vector<ingest::RawSnapshotRow> rows;
    std::string fetch_note;
    if (!rc.snapshot.empty()) {
        const auto format = rc.snapshot.ends_with(".json") ? ingest::SnapshotFormat::json
                                                           : ingest::SnapshotFormat::csv;
        rows = ingest::load_snapshot(rc.snapshot, format);
    } else {
        const auto from = parse_opt_date(rc.from);
        const auto to = parse_opt_date(rc.to);
        if (!from || !to)
            throw ConfigError("remote ingest needs --from and --to "
                              "(one request per day in the range)");
        ingest::HttpConfig http;
        http.base_url = rc.remote_url;
        http.cache_dir = rc.cache_dir;
        ingest::FetchReport report;
        rows = ingest::fetch_remote(http, *from, *to, &report);
        fetch_note = "rows_accepted=" + std::to_string(report.rows_accepted) +
                     " rejected=" + std::to_string(report.rejected.size()) +
                     " cache_hits=" + std::to_string(report.cache_hits) +
                     " cache_misses=" + std::to_string(report.cache_misses);
    }
    rows = filter_range(std::move(rows), rc);
    if (rows.empty()) throw DataError("ingest produced no rows in the requested range");

    const fs::path dir = ensure_dir(rc.out_dir() / "ingest");
    const fs::path snap = dir / "snapshot.csv";
    ingest::write_snapshot_csv(snap.string(), rows);
    track(w, rc, snap);

    if (!rc.fx.empty()) {
        std::vector<std::string> warnings;
        const auto fx = ingest::FxSeries::load(rc.fx, &warnings);
        CsvWriter out((dir / "fx.csv").string());
        out.write_row({"date", "tao_usd"});
        for (Date d = fx.first_date(); d <= fx.last_date(); ++d)
            out.write_row({d.to_string(), format_double(fx.price(d))});
        track(w, rc, dir / "fx.csv");
        for (const auto& warn : warnings) std::fprintf(stderr, "warning: %s\n", warn.c_str());
    }
    if (!fetch_note.empty()) {
        std::ofstream note(dir / "fetch_report.txt");
        note << fetch_note << '\n';
    }
    return w;
}

Written cmd_synth(const RunCfg& rc) {
    Written w;
    if (rc.synth_config.empty())
        throw ConfigError("synth needs --synth-config (a key = value file)");
    auto config = synth::parse_config(rc.synth_config);
    if (rc.seed_set) config.seed = rc.seed;

    const fs::path dir = ensure_dir(rc.out_dir() / "synth");
    const fs::path snap = dir / "snapshot.csv";
    ingest::write_snapshot_csv(snap.string(), synth::generate(config));
    track(w, rc, snap);

    // Measured-vs-predicted SMB on the same configuration: the simulator's
    // self-check, kept next to the data it validates.  Best-effort — a config
    // too short or too uniform for terciles still yields a valid snapshot.
    CsvWriter out((dir / "prop1.csv").string());
    out.write_row({"measured_smb", "predicted_smb", "relative_gap", "n_days"});
    try {
        const auto p1 = synth::prop1_experiment(config);
        out.write_row({format_double(p1.measured_smb), format_double(p1.predicted_smb),
                       format_double(p1.relative_gap),
                       format_int(static_cast<std::int64_t>(p1.n_days))});
    } catch (const DataError& e) {
        std::fprintf(stderr, "note: prop1 tracking unavailable: %s\n", e.what());
        out.write_row({"", "", "", "0"});
    }
    track(w, rc, dir / "prop1.csv");
    return w;
}

Written cmd_build_panel(const RunCfg& rc) {
    Written w;
    const fs::path snap = resolve_snapshot(rc);
    auto rows = ingest::load_snapshot_csv(snap.string());

    std::optional<ingest::FxSeries> fx;
    const fs::path fx_path = rc.out_dir() / "ingest" / "fx.csv";
    if (fs::exists(fx_path)) fx = ingest::FxSeries::load(fx_path.string());

    panel::SnapshotGrid grid(rows);
    const auto pnl = panel::build_panel(grid, fx ? &*fx : nullptr, rc.winsor);

    const fs::path dir = ensure_dir(rc.out_dir() / "panel");
    panel::export_panel_csv(pnl, dir.string());
    for (const char* f : {"r_tao.csv", "r_usd.csv", "eligibility.csv"}) track(w, rc, dir / f);

    {
        std::ofstream q(dir / "quarantined.txt");
        for (const auto& line : grid.quarantined()) q << line << '\n';
    }
    std::size_t eligible = 0;
    for (const auto e : pnl.eligible) eligible += e != 0;
    json meta;
    meta["n_days"] = pnl.n_days();
    meta["n_subnets"] = pnl.n_subnets();
    meta["first_date"] = pnl.dates.empty() ? "" : pnl.dates.front().to_string();
    meta["last_date"] = pnl.dates.empty() ? "" : pnl.dates.back().to_string();
    meta["eligible_observations"] = eligible;
    meta["quarantined_rows"] = grid.quarantined().size();
    write_json(dir / "meta.json", meta);
    track(w, rc, dir / "meta.json");
    return w;
}

Written cmd_factors(const RunCfg& rc) {
    Written w;
    const auto p = load_pipeline(rc);
    const fs::path dir = ensure_dir(rc.out_dir() / "factors");

    factors::export_factors_csv(p.facs, (dir / "factors.csv").string());
    track(w, rc, dir / "factors.csv");

    {
        CsvWriter meta((dir / "factor_meta.csv").string());
        meta.write_row({"factor", "characteristic", "long_leg", "short_leg", "n_obs",
                        "avg_long_members", "avg_short_members"});
        for (const auto& f : p.facs) {
            std::size_t n = 0, lsum = 0, ssum = 0;
            for (std::size_t t = 0; t < f.n_days(); ++t) {
                if (std::isnan(f.returns[t])) continue;
                ++n;
                lsum += f.long_count[t];
                ssum += f.short_count[t];
            }
            const double dn = n ? static_cast<double>(n) : 1.0;
            meta.write_row({f.name, f.sort_characteristic, f.long_leg, f.short_leg,
                            format_int(static_cast<std::int64_t>(n)),
                            fmt(static_cast<double>(lsum) / dn, 1),
                            fmt(static_cast<double>(ssum) / dn, 1)});
        }
        track(w, rc, dir / "factor_meta.csv");
    }

    // Tercile portfolio tables for the size / momentum / emission-yield sorts,
    // each with its long-short row appended.
    struct Sort {
        ch::Name name;
        const char* file;
        const char* factor;
        const char* low_label;
        const char* high_label;
    };
    const Sort sorts[] = {
        {ch::Name::MCAP, "terciles_size.csv", "SMB", "Small (bottom tercile)",
         "Large (top tercile)"},
        {ch::Name::MOM7, "terciles_mom7.csv", "WML7", "Losers (bottom tercile)",
         "Winners (top tercile)"},
        {ch::Name::MOM30, "terciles_mom30.csv", "WML30", "Losers (bottom tercile)",
         "Winners (top tercile)"},
        {ch::Name::EY, "terciles_ey.csv", "HML_EMIS", "Low yield (bottom tercile)",
         "High yield (top tercile)"},
    };
    for (const auto& s : sorts) {
        const auto m = ch::compute(s.name, p.grid, p.pnl, p.mkt);
        const auto table = factors::tercile_table(m, p.pnl, p.denom);
        CsvWriter out((dir / s.file).string());
        out.write_row({"portfolio", "mean_pct_day", "ann_return_pct", "ann_std_pct", "sharpe",
                       "n_days", "avg_members"});
        for (const auto& row : table) {
            const std::string label = row.tercile == "bottom" ? s.low_label
                                      : row.tercile == "top"  ? s.high_label
                                                              : "Middle";
            out.write_row({label, fmt(row.mean_daily * 100.0, 2), fmt(row.ann_return * 100.0, 1),
                           fmt(row.ann_std * 100.0, 1), fmt(row.sharpe, 2),
                           format_int(static_cast<std::int64_t>(row.n_days)),
                           fmt(row.avg_members, 1)});
        }
        const auto st = try_stats(find_factor(p, s.factor), rc.hac_lags);
        if (st.ok) {
            out.write_row({s.factor, fmt(st.s.mean * 100.0, 2), fmt(st.s.mean * 365.0 * 100.0, 1),
                           fmt(st.s.stddev * std::sqrt(365.0) * 100.0, 1), fmt(st.s.sharpe, 2),
                           format_int(static_cast<std::int64_t>(st.s.n)), ""});
        }
        track(w, rc, dir / s.file);
    }
    return w;
}

Written cmd_stats(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);

    std::size_t usable = 0;
    for (const auto& f : p.facs)
        for (const double r : f.returns) usable += !std::isnan(r);
    if (usable == 0) throw DataError("no eligible observations");

    const fs::path dir = ensure_dir(rc.out_dir() / "stats");
    CsvWriter out((dir / "table1_factor_stats.csv").string());
    out.write_row({"factor", "mean_pct_day", "std_pct_day", "sharpe_ann", "t_ols", "t_nw",
                   "skew", "kurt", "n_days"});
    json rows = json::array();
    for (const auto& f : p.facs) {
        const auto st = try_stats(f, rc.hac_lags);
        if (!st.ok) {
            std::fprintf(stderr, "warning: %s skipped: %s\n", f.name.c_str(), st.why.c_str());
            continue;
        }
        out.write_row({f.name, fmt(st.s.mean * 100.0, 2), fmt(st.s.stddev * 100.0, 2),
                       fmt(st.s.sharpe, 2), fmt(st.s.t_ols, 2), fmt(st.s.t_nw, 2),
                       fmt(st.s.skew, 2), fmt(st.s.kurt, 2),
                       format_int(static_cast<std::int64_t>(st.s.n))});
        json r;
        r["factor"] = f.name;
        r["mean"] = st.s.mean;
        r["stddev"] = st.s.stddev;
        r["sharpe"] = st.s.sharpe;
        r["t_ols"] = st.s.t_ols;
        r["t_nw"] = st.s.t_nw;
        r["skew"] = st.s.skew;
        r["kurt"] = st.s.kurt;
        r["n"] = st.s.n;
        r["nw_lags"] = st.s.nw_lags;
        rows.push_back(r);
    }
    write_json(dir / "table1_factor_stats.json", rows);
    track(w, rc, dir / "table1_factor_stats.csv");
    track(w, rc, dir / "table1_factor_stats.json");

    CsvWriter corr((dir / "correlations.csv").string());
    std::vector<std::string> head{"factor"};
    for (const auto& f : p.facs) head.push_back(f.name);
    corr.write_row(head);
    for (const auto& a : p.facs) {
        std::vector<std::string> row{a.name};
        for (const auto& b : p.facs) row.push_back(fmt(pairwise_corr(a, b), 2));
        corr.write_row(row);
    }
    track(w, rc, dir / "correlations.csv");
    return w;
}

Written cmd_fm(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);

    const std::vector<factors::FactorSeries> menu{find_factor(p, "MKT"), find_factor(p, "SMB"),
                                                  find_factor(p, "HML_EMIS"),
                                                  find_factor(p, "WML7")};
    const auto fm = econ::fama_macbeth(p.pnl, menu, 60, p.denom);

    const fs::path dir = ensure_dir(rc.out_dir() / "fm");
    CsvWriter out((dir / "fama_macbeth.csv").string());
    out.write_row({"variable", "premium_pct_day", "se_pct", "t", "p"});
    json j;
    j["n_days"] = fm.n_days;
    j["avg_cross_section"] = fm.avg_cross_section;
    j["n_subnets"] = fm.n_subnets;
    j["skipped_days"] = fm.skipped_days;
    j["excluded_subnets"] = fm.excluded_subnets;
    j["min_history"] = fm.min_history;
    json rows = json::array();
    for (std::size_t i = 0; i < fm.names.size(); ++i) {
        const std::string label =
            fm.names[i] == "const" ? "Intercept" : "beta_" + fm.names[i];
        out.write_row({label, fmt(fm.premia[i] * 100.0, 2), fmt(fm.se[i] * 100.0, 2),
                       fmt(fm.t[i], 2), fmt(fm.p[i], 3)});
        json r;
        r["variable"] = label;
        r["premium"] = fm.premia[i];
        r["se"] = fm.se[i];
        r["t"] = fm.t[i];
        r["p"] = fm.p[i];
        rows.push_back(r);
    }
    j["rows"] = rows;
    write_json(dir / "fama_macbeth.json", j);
    track(w, rc, dir / "fama_macbeth.csv");
    track(w, rc, dir / "fama_macbeth.json");
    return w;
}

Written cmd_grs(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);

    // Twelve test portfolios: terciles on size, emission yield and both
    // momentum horizons; the model is MKT + SMB + WML30.
    std::vector<factors::FactorSeries> ports;
    const struct {
        ch::Name name;
        const char* tag;
    } sorts[] = {{ch::Name::MCAP, "size"},
                 {ch::Name::EY, "ey"},
                 {ch::Name::MOM7, "mom7"},
                 {ch::Name::MOM30, "mom30"}};
    const char* leg_tag[] = {"low", "mid", "high"};
    for (const auto& s : sorts) {
        const auto m = ch::compute(s.name, p.grid, p.pnl, p.mkt);
        for (int leg = 0; leg < 3; ++leg)
            ports.push_back(tercile_series(m, p.pnl, leg, p.denom,
                                           std::string(s.tag) + "_" + leg_tag[leg]));
    }
    const std::vector<factors::FactorSeries> model{find_factor(p, "MKT"), find_factor(p, "SMB"),
                                                   find_factor(p, "WML30")};
    const auto grs = econ::grs_test(ports, model);

    const fs::path dir = ensure_dir(rc.out_dir() / "grs");
    CsvWriter out((dir / "grs.csv").string());
    out.write_row({"f_stat", "p_value", "avg_abs_alpha_pct_day", "t_obs", "n_portfolios",
                   "k_factors"});
    out.write_row({fmt(grs.f_stat, 2), fmt(grs.p_value, 3), fmt(grs.avg_abs_alpha * 100.0, 3),
                   format_int(static_cast<std::int64_t>(grs.t_obs)),
                   format_int(static_cast<std::int64_t>(grs.n_portfolios)),
                   format_int(static_cast<std::int64_t>(grs.k_factors))});
    track(w, rc, dir / "grs.csv");

    CsvWriter al((dir / "grs_alphas.csv").string());
    al.write_row({"portfolio", "alpha_pct_day"});
    for (std::size_t i = 0; i < ports.size(); ++i)
        al.write_row({ports[i].name, fmt(grs.alphas[i] * 100.0, 3)});
    track(w, rc, dir / "grs_alphas.csv");

    json j;
    j["f_stat"] = grs.f_stat;
    j["p_value"] = grs.p_value;
    j["avg_abs_alpha"] = grs.avg_abs_alpha;
    j["t_obs"] = grs.t_obs;
    j["n_portfolios"] = grs.n_portfolios;
    j["k_factors"] = grs.k_factors;
    j["alphas"] = grs.alphas;
    write_json(dir / "grs.json", j);
    track(w, rc, dir / "grs.json");
    return w;
}

Written cmd_spanning(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);
    const auto rows = econ::spanning_alphas(p.facs);

    const fs::path dir = ensure_dir(rc.out_dir() / "spanning");
    CsvWriter out((dir / "spanning.csv").string());
    out.write_row({"factor", "alpha_pct_day", "t", "p", "r2", "n_days"});
    json jr = json::array();
    for (const auto& r : rows) {
        out.write_row({r.name, fmt(r.alpha * 100.0, 2), fmt(r.t, 2), fmt(r.p, 3), fmt(r.r2, 2),
                       format_int(static_cast<std::int64_t>(r.n))});
        json o;
        o["factor"] = r.name;
        o["alpha"] = r.alpha;
        o["t"] = r.t;
        o["p"] = r.p;
        o["r2"] = r.r2;
        o["n"] = r.n;
        jr.push_back(o);
    }
    write_json(dir / "spanning.json", jr);
    track(w, rc, dir / "spanning.csv");
    track(w, rc, dir / "spanning.json");
    return w;
}

namespace {

void write_event_rows(CsvWriter& out, json& jr,
                      const std::vector<experiments::EventStudyResult>& rows) {
    for (const auto& r : rows) {
        const std::string label = r.window == 0 ? "full" : std::to_string(r.window);
        if (r.available) {
            out.write_row({label, fmt(r.pre_mean * 100.0, 2), fmt(r.post_mean * 100.0, 2),
                           fmt(r.ratio, 2), fmt(r.beta * 100.0, 2), fmt(r.nw_t, 2),
                           fmt(r.p_value, 3),
                           format_int(static_cast<std::int64_t>(r.n_obs))});
        } else {
            out.write_row({label, "", "", "", "", "", "", "0"});
        }
        json o;
        o["window"] = r.window;
        o["available"] = r.available;
        o["n_obs"] = r.n_obs;
        o["pre_mean"] = r.pre_mean;
        o["post_mean"] = r.post_mean;
        o["ratio"] = r.ratio;
        o["alpha"] = r.alpha;
        o["beta"] = r.beta;
        o["gamma"] = r.gamma;
        o["nw_t"] = r.nw_t;
        o["p_value"] = r.p_value;
        jr.push_back(o);
    }
}

}  // namespace

Written cmd_halving(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);
    const auto& smb = find_factor(p, "SMB");
    const auto& mkt = find_factor(p, "MKT");
    const auto rows =
        experiments::halving_event_study(smb, mkt, halving_date(rc), rc.hac_lags);

    const fs::path dir = ensure_dir(rc.out_dir() / "halving");
    CsvWriter out((dir / "halving.csv").string());
    out.write_row({"window_days", "pre_mean_pct_day", "post_mean_pct_day", "ratio",
                   "beta_pct_day", "nw_t", "p_value", "n_obs"});
    json jr = json::array();
    write_event_rows(out, jr, rows);
    write_json(dir / "halving.json", jr);
    track(w, rc, dir / "halving.csv");
    track(w, rc, dir / "halving.json");

    experiments::export_event_figure_csv(smb, (dir / "smb_event_series.csv").string());
    track(w, rc, dir / "smb_event_series.csv");
    return w;
}

Written cmd_placebo(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);
    const auto scan = experiments::placebo_scan(find_factor(p, "SMB"), find_factor(p, "MKT"),
                                                halving_date(rc), 60, rc.hac_lags);

    const fs::path dir = ensure_dir(rc.out_dir() / "placebo");
    CsvWriter out((dir / "placebo.csv").string());
    out.write_row({"offset_days", "available", "beta_pct_day", "nw_t", "p_value", "n_obs"});
    auto emit = [&](int offset, const experiments::EventStudyResult& r) {
        out.write_row({format_int(offset), r.available ? "true" : "false",
                       r.available ? fmt(r.beta * 100.0, 2) : "",
                       r.available ? fmt(r.nw_t, 2) : "",
                       r.available ? fmt(r.p_value, 3) : "",
                       format_int(static_cast<std::int64_t>(r.n_obs))});
    };
    emit(0, scan.actual);
    for (const auto& [offset, row] : scan.placebos) emit(offset, row);
    track(w, rc, dir / "placebo.csv");

    json j;
    j["window"] = scan.actual.window;
    j["actual_beta"] = scan.actual.beta;
    j["actual_available"] = scan.actual.available;
    j["any_placebo_larger"] = scan.any_larger;
    json rows = json::array();
    for (const auto& [offset, row] : scan.placebos) {
        json o;
        o["offset"] = offset;
        o["available"] = row.available;
        o["beta"] = row.beta;
        o["nw_t"] = row.nw_t;
        o["p_value"] = row.p_value;
        rows.push_back(o);
    }
    j["placebos"] = rows;
    write_json(dir / "placebo.json", j);
    track(w, rc, dir / "placebo.json");
    return w;
}

Written cmd_slippage(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);

    // Reserves are taken from the last day with a valid size sort; the AUM is
    // split across that day's eligible breadth.
    const auto mcap = ch::compute(ch::Name::MCAP, p.grid, p.pnl, p.mkt);
    const std::size_t ns = p.pnl.n_subnets();
    experiments::SlippageInputs in;
    bool found = false;
    for (std::size_t t = p.pnl.n_days(); t-- > 0;) {
        const auto sort = factors::tercile_sort(
            std::span(mcap.values.data() + t * ns, ns),
            std::span(p.pnl.eligible.data() + t * ns, ns), p.pnl.netuids);
        if (!sort) continue;
        auto leg = [&](const std::vector<std::size_t>& ix) {
            std::vector<experiments::ReservePool> pools;
            pools.reserve(ix.size());
            for (const std::size_t i : ix)
                pools.push_back({p.pnl.netuids[i], p.grid.tau_reserve(t, i)});
            return pools;
        };
        in.small = leg(sort->bottom);
        in.medium = leg(sort->middle);
        in.large = leg(sort->top);
        std::size_t breadth = 0;
        for (std::size_t i = 0; i < ns; ++i) breadth += p.pnl.is_eligible(t, i);
        in.n_eligible = breadth;
        if (rc.tao_usd > 0.0) {
            in.tao_usd = rc.tao_usd;
        } else if (p.fx) {
            const auto px = p.fx->try_price(p.pnl.dates[t]);
            if (!px)
                throw ConfigError("the FX series does not cover " +
                                  p.pnl.dates[t].to_string() + "; pass --tao-usd");
            in.tao_usd = *px;
        } else if (!rc.synth_config.empty()) {
            in.tao_usd = 1.0;  // synthetic network: read the AUM grid as TAO
        } else {
            throw ConfigError("slippage needs a USD/TAO price: pass --fx or --tao-usd");
        }
        found = true;
        break;
    }
    if (!found) throw DataError("no day with a valid size sort; cannot size the terciles");

    const auto& smb = find_factor(p, "SMB");
    const auto st = econ::summary_stats(smb.returns, rc.hac_lags);
    in.gross_mean = st.mean;
    in.gross_std = st.stddev;

    const double grid[] = {1e4, 1e5, 1e6, 1e7};
    const auto rows = experiments::slippage_capacity(in, grid);

    const fs::path dir = ensure_dir(rc.out_dir() / "slippage");
    CsvWriter out((dir / "slippage.csv").string());
    out.write_row({"aum_usd", "small_oneway_pct", "medium_oneway_pct", "large_oneway_pct",
                   "round_trip_pct_day", "net_smb_pct_day", "net_sharpe_ann"});
    json jr = json::array();
    for (const auto& r : rows) {
        out.write_row({fmt(r.aum_usd, 0), fmt(r.small * 100.0, 2), fmt(r.medium * 100.0, 2),
                       fmt(r.large * 100.0, 2), fmt(r.round_trip * 100.0, 2),
                       r.net_defined ? fmt(r.net_return * 100.0, 2) : "",
                       r.sharpe_defined ? fmt(r.net_sharpe, 2) : ""});
        json o;
        o["aum_usd"] = r.aum_usd;
        o["small"] = r.small;
        o["medium"] = r.medium;
        o["large"] = r.large;
        o["round_trip"] = r.round_trip;
        o["net_return"] = r.net_return;
        o["net_sharpe"] = r.net_sharpe;
        o["net_defined"] = r.net_defined;
        o["sharpe_defined"] = r.sharpe_defined;
        jr.push_back(o);
    }
    json j;
    j["n_eligible"] = in.n_eligible;
    j["tao_usd"] = in.tao_usd;
    j["gross_mean"] = in.gross_mean;
    j["gross_std"] = in.gross_std;
    j["turnover"] = in.turnover;
    j["rows"] = jr;
    write_json(dir / "slippage.json", j);
    track(w, rc, dir / "slippage.csv");
    track(w, rc, dir / "slippage.json");
    return w;
}

Written cmd_vol_sorts(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);

    const ch::Name names[] = {ch::Name::VOL30,  ch::Name::DOWNVOL30, ch::Name::UPVOL30,
                              ch::Name::IVOL30, ch::Name::BETA30,    ch::Name::SKEW30};
    const auto rows = experiments::vol_sorts(p.pnl, names, p.mkt);
    const char* labels[] = {"Total Volatility",   "Downside Vol", "Upside Vol",
                            "Idiosyncratic Vol", "Market Beta",  "Skewness"};

    const fs::path dir = ensure_dir(rc.out_dir() / "vol-sorts");
    CsvWriter out((dir / "vol_sorts.csv").string());
    out.write_row({"sort_variable", "low_pct_day", "mid_pct_day", "high_pct_day",
                   "hl_pct_day", "t_hl", "n_days"});
    json jr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out.write_row({labels[i], fmt(r.low * 100.0, 2), fmt(r.mid * 100.0, 2),
                       fmt(r.high * 100.0, 2), fmt(r.hl_mean * 100.0, 2), fmt(r.hl_t, 2),
                       format_int(static_cast<std::int64_t>(r.n_days))});
        json o;
        o["sort"] = r.sort_name;
        o["low"] = r.low;
        o["mid"] = r.mid;
        o["high"] = r.high;
        o["hl_mean"] = r.hl_mean;
        o["hl_t"] = r.hl_t;
        o["n_days"] = r.n_days;
        jr.push_back(o);
    }
    write_json(dir / "vol_sorts.json", jr);
    track(w, rc, dir / "vol_sorts.csv");
    track(w, rc, dir / "vol_sorts.json");
    return w;
}

Written cmd_risk_decomp(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);

    const char* menu[] = {"MKT", "SMB", "HML_EMIS", "WML7", "WML30", "REV"};
    const fs::path dir = ensure_dir(rc.out_dir() / "risk-decomp");
    CsvWriter out((dir / "risk_decomp.csv").string());
    out.write_row({"factor", "mean_pct_day", "std_pct_day", "downdev_pct_day",
                   "updev_pct_day", "down_up_ratio", "sortino_ann", "pct_negative_days"});
    json jr = json::array();
    for (const char* name : menu) {
        const auto& f = find_factor(p, name);
        econ::RiskDecomposition d;
        try {
            d = econ::risk_decomposition(f.returns);
        } catch (const Error& e) {
            std::fprintf(stderr, "warning: %s skipped: %s\n", name, e.what());
            continue;
        }
        out.write_row({name, fmt(d.mean * 100.0, 2), fmt(d.stddev * 100.0, 2),
                       fmt(d.downdev * 100.0, 2), fmt(d.updev * 100.0, 2),
                       fmt(d.down_up_ratio, 2), fmt(d.sortino, 2),
                       fmt(d.pct_negative * 100.0, 0)});
        json o;
        o["factor"] = name;
        o["mean"] = d.mean;
        o["stddev"] = d.stddev;
        o["downdev"] = d.downdev;
        o["updev"] = d.updev;
        o["down_up_ratio"] = d.down_up_ratio;
        o["sortino"] = d.sortino;
        o["pct_negative"] = d.pct_negative;
        o["n"] = d.n;
        jr.push_back(o);
    }
    write_json(dir / "risk_decomp.json", jr);
    track(w, rc, dir / "risk_decomp.csv");
    track(w, rc, dir / "risk_decomp.json");
    return w;
}

Written cmd_subsample(const RunCfg& rc) {
    Written w;
    require_artifact(rc.out_dir() / "factors" / "factors.csv", "factors");
    const auto p = load_pipeline(rc);

    const char* menu[] = {"MKT", "SMB", "HML_EMIS", "WML7", "WML30", "REV"};
    std::vector<factors::FactorSeries> facs;
    for (const char* name : menu) facs.push_back(find_factor(p, name));

    Date split;
    if (!rc.split_date.empty()) {
        split = Date::parse(rc.split_date);
    } else {
        const auto& d = p.pnl.dates;
        if (d.size() < 3) throw DataError("panel too short to split");
        split = d.front() + (d.back() - d.front()) / 2;
    }
    const auto rows = experiments::subsample_split(facs, split);

    const fs::path dir = ensure_dir(rc.out_dir() / "subsample");
    CsvWriter out((dir / "subsample.csv").string());
    out.write_row({"factor", "full_mean_pct", "full_t", "first_mean_pct", "first_t",
                   "second_mean_pct", "second_t"});
    json j;
    j["split_date"] = split.to_string();
    json jr = json::array();
    for (const auto& r : rows) {
        out.write_row({r.name, fmt(r.full_mean * 100.0, 2), fmt(r.full_t, 2),
                       fmt(r.first_mean * 100.0, 2), fmt(r.first_t, 2),
                       fmt(r.second_mean * 100.0, 2), fmt(r.second_t, 2)});
        json o;
        o["factor"] = r.name;
        o["full_mean"] = r.full_mean;
        o["full_t"] = r.full_t;
        o["full_n"] = r.full_n;
        o["first_mean"] = r.first_mean;
        o["first_t"] = r.first_t;
        o["first_n"] = r.first_n;
        o["second_mean"] = r.second_mean;
        o["second_t"] = r.second_t;
        o["second_n"] = r.second_n;
        jr.push_back(o);
    }
    j["rows"] = jr;
    write_json(dir / "subsample.json", j);
    track(w, rc, dir / "subsample.csv");
    track(w, rc, dir / "subsample.json");
    return w;
}

}  // namespace taoquant::cli
