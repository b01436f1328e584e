#include "taoquant/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "taoquant/characteristics.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/factors.hpp"
#include "taoquant/panel.hpp"

namespace taoquant::synth {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRaoPerTao = 1e9;
constexpr int kRecycleGapDays = 2;  // absent days before the startup re-entry

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct PoolSim {
    int netuid = 0;
    amm::PoolState pool;
    double initial_tau = 0.0;
    double supply = 0.0;        // circulating alpha, fixed per lifecycle
    double alpha_staked = 0.0;
    double ema = 1.0;           // flow-policy state
    double prev_flow = 0.0;     // yesterday's restaked inflow
    bool active = true;
    int gap_left = 0;
    bool startup_today = false;
};

}  // namespace

void validate(const SynthConfig& config) {
    if (config.n_subnets < 1) throw ConfigError("synth: n_subnets must be positive");
    if (!(config.reserve_min_tao > 0.0) || !(config.reserve_max_tao >= config.reserve_min_tao))
        throw ConfigError("synth: reserve bounds must satisfy 0 < min <= max");
    if (!(config.daily_emission_tao >= 0.0))
        throw ConfigError("synth: daily emission must be non-negative");
    if (!(config.restake_fraction >= 0.0) || !(config.restake_fraction <= 1.0))
        throw ConfigError("synth: restake fraction must lie in [0, 1]");
    if (!(config.noise_std >= 0.0)) throw ConfigError("synth: noise std must be non-negative");
    if (config.n_days < 1) throw ConfigError("synth: n_days must be positive");
    if (config.halving_day &&
        (*config.halving_day < 1 || *config.halving_day > config.n_days - 1))
        throw ConfigError("synth: halving day must be interior to the run");
    if (config.recycle_every < 0) throw ConfigError("synth: recycle_every must be >= 0");
    if (config.policy.variant == amm::EmissionPolicy::Variant::flow_ema &&
        !(config.policy.ema_half_life > 0.0))
        throw ConfigError("synth: EMA half-life must be positive");
}

SynthConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("synth config: cannot open " + path);
    SynthConfig c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path, line_no, "expected key = value");
        const std::string key{trim(s.substr(0, eq))};
        const std::string value{trim(s.substr(eq + 1))};
        try {
            if (key == "n_subnets") {
                c.n_subnets = std::stoi(value);
            } else if (key == "reserve_min_tao") {
                c.reserve_min_tao = std::stod(value);
            } else if (key == "reserve_max_tao") {
                c.reserve_max_tao = std::stod(value);
            } else if (key == "daily_emission_tao") {
                c.daily_emission_tao = std::stod(value);
            } else if (key == "policy") {
                if (value == "price") {
                    c.policy.variant = amm::EmissionPolicy::Variant::price_proportional;
                } else if (value == "flow_ema") {
                    c.policy.variant = amm::EmissionPolicy::Variant::flow_ema;
                } else {
                    throw ParseError(path, line_no, "policy must be price or flow_ema");
                }
            } else if (key == "ema_half_life") {
                c.policy.ema_half_life = std::stod(value);
            } else if (key == "restake_fraction") {
                c.restake_fraction = std::stod(value);
            } else if (key == "noise_std") {
                c.noise_std = std::stod(value);
            } else if (key == "n_days") {
                c.n_days = std::stoi(value);
            } else if (key == "halving_day") {
                c.halving_day = std::stoi(value);
            } else if (key == "recycle_every") {
                c.recycle_every = std::stoi(value);
            } else if (key == "seed") {
                c.seed = std::stoull(value);
            } else if (key == "start_date") {
                c.start_date = Date::parse(value);
            } else {
                throw ParseError(path, line_no, "unknown key '" + key + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(path, line_no, "bad value for '" + key + "': " + value);
        }
    }
    validate(c);
    return c;
}

namespace {

std::vector<ingest::RawSnapshotRow> generate_from(const SynthConfig& config,
                                                  std::span<const double> initial_reserves,
                                                  std::mt19937_64& rng) {
    const std::size_t n = initial_reserves.size();
    std::vector<PoolSim> pools(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = pools[i];
        p.netuid = static_cast<int>(i) + 1;  // netuid 0 is the root network
        p.initial_tau = initial_reserves[i];
        p.pool = {p.initial_tau, p.initial_tau};
        p.supply = p.initial_tau;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double tau_sigma = config.noise_std / 2.0;

    std::vector<ingest::RawSnapshotRow> rows;
    rows.reserve(n * static_cast<std::size_t>(config.n_days));
    const auto emit = [&](Date d, const PoolSim& p, double alloc_tao) {
        ingest::RawSnapshotRow row;
        row.date = d;
        row.netuid = p.netuid;
        row.price_tao = amm::spot_price(p.pool);
        row.mcap_tao = row.price_tao * p.supply;
        row.tau_reserve = p.pool.tau_reserve;
        row.alpha_reserve = p.pool.alpha_reserve;
        row.alpha_staked = p.alpha_staked;
        row.emission_rao_per_day = alloc_tao * kRaoPerTao;
        row.startup_mode = p.startup_today;
        rows.push_back(row);
    };

    for (auto& p : pools) emit(config.start_date, p, 0.0);

    std::size_t recycle_cursor = 0;
    for (int t = 1; t < config.n_days; ++t) {
        const Date day = config.start_date + t;
        double total = config.daily_emission_tao;
        if (config.halving_day && t >= *config.halving_day) total *= 0.5;

        if (config.recycle_every > 0 && t % config.recycle_every == 0 && n > 1) {
            auto& victim = pools[recycle_cursor % n];
            ++recycle_cursor;
            if (victim.active) {
                victim.active = false;
                victim.gap_left = kRecycleGapDays;
            }
        }
        for (auto& p : pools) {
            p.startup_today = false;
            if (p.active) continue;
            if (p.gap_left > 0) {
                --p.gap_left;
                continue;
            }
            // Re-registration: a fresh pool, a fresh lifecycle.
            p.active = true;
            p.startup_today = true;
            p.pool = {p.initial_tau, p.initial_tau};
            p.supply = p.initial_tau;
            p.alpha_staked = 0.0;
            p.ema = 1.0;
            p.prev_flow = 0.0;
        }

        std::vector<std::size_t> live;
        live.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            if (pools[i].active) live.push_back(i);

        std::vector<double> alloc(live.size(), 0.0);
        if (config.policy.variant == amm::EmissionPolicy::Variant::price_proportional) {
            std::vector<double> prices(live.size());
            for (std::size_t j = 0; j < live.size(); ++j)
                prices[j] = amm::spot_price(pools[live[j]].pool);
            alloc = amm::allocate_emissions_price(prices, total);
        } else {
            std::vector<double> ema(live.size()), flows(live.size());
            for (std::size_t j = 0; j < live.size(); ++j) {
                ema[j] = pools[live[j]].ema;
                flows[j] = pools[live[j]].prev_flow;
            }
            auto fa = amm::allocate_emissions_flow(ema, flows, total, config.policy);
            alloc = std::move(fa.emissions);
            for (std::size_t j = 0; j < live.size(); ++j) pools[live[j]].ema = fa.ema_state[j];
        }

        for (std::size_t j = 0; j < live.size(); ++j) {
            auto& p = pools[live[j]];
            const double staked_tau = config.restake_fraction * alloc[j];
            if (staked_tau > 0.0) {
                const auto res = amm::stake(p.pool, staked_tau);
                p.pool = res.pool;
                p.alpha_staked += res.alpha_out;
            }
            p.prev_flow = staked_tau;
            if (config.noise_std > 0.0) {
                const double k = p.pool.k();
                const double m = std::max(1.0 + tau_sigma * gauss(rng), 1e-3);
                p.pool.tau_reserve *= m;
                p.pool.alpha_reserve = k / p.pool.tau_reserve;
            }
            emit(day, p, alloc[j]);
        }
    }
    // Day-major emission order with ascending netuids inside a day is already
    // the (date, netuid) order the ingest contract promises.
    return rows;
}

}  // namespace

std::vector<ingest::RawSnapshotRow> generate(const SynthConfig& config) {
    validate(config);
    std::mt19937_64 rng(config.seed);
    std::vector<double> reserves(static_cast<std::size_t>(config.n_subnets));
    std::uniform_real_distribution<double> logu(std::log(config.reserve_min_tao),
                                                std::log(config.reserve_max_tao));
    for (auto& r : reserves) r = std::exp(logu(rng));
    return generate_from(config, reserves, rng);
}

std::vector<ingest::RawSnapshotRow> generate(const SynthConfig& config,
                                             std::span<const double> initial_reserves) {
    validate(config);
    if (initial_reserves.empty()) throw ConfigError("synth: initial reserves are empty");
    for (const double r : initial_reserves)
        if (!(r > 0.0)) throw ConfigError("synth: initial reserves must be positive");
    std::mt19937_64 rng(config.seed);
    return generate_from(config, initial_reserves, rng);
}

namespace {

struct SynthPipeline {
    panel::SnapshotGrid grid;
    panel::ReturnPanel panel;
    factors::FactorSeries smb;
    factors::FactorSeries mkt;
};

SynthPipeline run_pipeline(const std::vector<ingest::RawSnapshotRow>& rows) {
    panel::SnapshotGrid grid(rows);
    auto pnl = panel::build_panel(grid, nullptr);
    auto mcap = characteristics::characteristic(characteristics::Name::MCAP, grid);
    auto smb = factors::build_factor("SMB", mcap, pnl, factors::LongLeg::bottom);
    auto mkt = factors::market_factor(pnl);
    return SynthPipeline{std::move(grid), std::move(pnl), std::move(smb), std::move(mkt)};
}

}  // namespace

Prop1Result prop1_experiment(const SynthConfig& config) {
    const auto rows = generate(config);
    const auto pipe = run_pipeline(rows);
    const auto& pnl = pipe.panel;
    const auto& grid = pipe.grid;
    const auto mcap = characteristics::characteristic(characteristics::Name::MCAP, grid);

    const std::size_t ns = pnl.n_subnets();
    double sum_measured = 0.0, sum_predicted = 0.0;
    std::size_t days = 0;
    for (std::size_t t = 0; t < pipe.smb.n_days(); ++t) {
        const double measured = pipe.smb.returns[t];
        if (std::isnan(measured)) continue;
        const auto sorted = factors::tercile_sort(
            std::span<const double>(mcap.values.data() + t * ns, ns),
            std::span<const std::uint8_t>(pnl.eligible.data() + t * ns, ns), pnl.netuids);
        if (!sorted) continue;
        // First-order return of each member that entered the measured legs:
        // 2 * staked inflow / start-of-day reserve, both from the snapshots.
        const auto leg_pred = [&](const std::vector<std::size_t>& leg) {
            double s = 0.0;
            std::size_t cnt = 0;
            for (const std::size_t i : leg) {
                if (std::isnan(pnl.rtao(t, i))) continue;
                const double tau_prev = grid.tau_reserve(t - 1, i);
                const double alloc_tao = grid.emission_rao(t, i) / kRaoPerTao;
                if (std::isnan(tau_prev) || !(tau_prev > 0.0)) continue;
                s += 2.0 * config.restake_fraction * alloc_tao / tau_prev;
                ++cnt;
            }
            return cnt != 0 ? s / static_cast<double>(cnt) : kNaN;
        };
        const double lo = leg_pred(sorted->bottom);
        const double hi = leg_pred(sorted->top);
        if (std::isnan(lo) || std::isnan(hi)) continue;
        sum_measured += measured;
        sum_predicted += lo - hi;
        ++days;
    }
    if (days == 0) throw DataError("prop1: no factor days (degenerate terciles)");

    Prop1Result out;
    out.n_days = days;
    out.measured_smb = sum_measured / static_cast<double>(days);
    out.predicted_smb = sum_predicted / static_cast<double>(days);
    if (out.predicted_smb != 0.0) {
        out.relative_gap =
            std::abs(out.measured_smb - out.predicted_smb) / std::abs(out.predicted_smb);
    } else {
        out.relative_gap = out.measured_smb == 0.0 ? 0.0 : kNaN;
    }
    return out;
}

experiments::EventStudyResult halving_experiment(const SynthConfig& config) {
    validate(config);
    const int event_day = config.halving_day ? *config.halving_day : config.n_days / 2;
    if (event_day < 1 || event_day > config.n_days - 1)
        throw ConfigError("synth: event day must be interior to the run");
    const auto rows = generate(config);
    const auto pipe = run_pipeline(rows);
    const auto study = experiments::halving_event_study(
        pipe.smb, pipe.mkt, config.start_date + event_day, std::span<const int>{}, 5);
    return study.back();  // the full-sample row
}

}  // namespace taoquant::synth
