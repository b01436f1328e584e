#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taoquant/amm.hpp"
#include "taoquant/dates.hpp"
#include "taoquant/experiments.hpp"
#include "taoquant/ingest.hpp"

namespace taoquant::synth {

/// Synthetic constant-product network. Initial reserves are log-uniform in
/// [reserve_min_tao, reserve_max_tao] with alpha = tau (all pools list at
/// price 1). Each day emissions are allocated by policy on start-of-day
/// prices, restake_fraction of each allocation is staked into its own pool,
/// and a mean-one multiplicative shock hits tau with alpha following k, so
/// noise never violates the constant-product invariant. noise_std is the
/// daily *price* shock std; the tau multiplier uses half of it since the
/// price moves with the square of the reserve shift.
struct SynthConfig {
    int n_subnets = 60;
    double reserve_min_tao = 100.0;
    double reserve_max_tao = 10000.0;
    double daily_emission_tao = 50.0;
    amm::EmissionPolicy policy;
    double restake_fraction = 1.0;
    double noise_std = 0.0;
    int n_days = 90;
    std::optional<int> halving_day;  // emission halves from this day index on
    int recycle_every = 0;  // > 0: every k-th day one subnet gaps out and re-registers
    std::uint64_t seed = 0;
    Date start_date = Date(2025, 2, 14);
};

/// Throws ConfigError on out-of-range fields (non-positive bounds, restake
/// outside [0,1], halving day not interior, ...).
void validate(const SynthConfig& config);

/// `key = value` lines, `#` comments. Keys mirror the SynthConfig fields:
/// n_subnets, reserve_min_tao, reserve_max_tao, daily_emission_tao,
/// policy (price|flow_ema), ema_half_life, restake_fraction, noise_std,
/// n_days, halving_day, recycle_every, seed, start_date. Unknown keys throw.
SynthConfig parse_config(const std::string& path);

/// Simulates the network and returns rows in the ingest snapshot schema,
/// sorted by (date, netuid). Day 0 carries the initial state with zero
/// emission; day t's emission field records that day's allocation in rao.
/// A fixed seed yields identical rows (and identical CSV bytes through
/// ingest::write_snapshot_csv) on every run.
std::vector<ingest::RawSnapshotRow> generate(const SynthConfig& config);

/// Same dynamics with pinned initial reserves (one per subnet, overriding the
/// log-uniform draw; n_subnets follows the span's length).
std::vector<ingest::RawSnapshotRow> generate(const SynthConfig& config,
                                             std::span<const double> initial_reserves);

/// Measured-vs-predicted SMB on one synthetic panel. Measured runs the full
/// pipeline (grid, returns, eligibility, MCAP terciles); predicted applies
/// the first-order approximation 2*restake*alloc/tau along the realized
/// trajectory to the same tercile members, averaged over the same days.
struct Prop1Result {
    double measured_smb = 0.0;
    double predicted_smb = 0.0;
    double relative_gap = 0.0;  // |measured-predicted|/|predicted|
    std::size_t n_days = 0;
};

/// Throws DataError when the panel never produces a factor day (degenerate
/// terciles).
Prop1Result prop1_experiment(const SynthConfig& config);

/// Generates a panel (halving day from the config, midpoint when unset, so a
/// no-halving run measures a null effect), runs the event study on synthetic
/// SMB with the synthetic market control, and returns the full-sample row.
experiments::EventStudyResult halving_experiment(const SynthConfig& config);

}  // namespace taoquant::synth
