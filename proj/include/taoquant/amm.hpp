#pragma once

#include <span>
#include <vector>

namespace taoquant::amm {

/// Reserves of one constant-product pool. The invariant k = tau * alpha is
/// derived, never stored, so it cannot drift from the reserves.
struct PoolState {
    double tau_reserve = 0.0;
    double alpha_reserve = 0.0;

    [[nodiscard]] double k() const { return tau_reserve * alpha_reserve; }
};

struct StakeResult {
    PoolState pool;
    double alpha_out = 0.0;
    /// (1 + dtau/tau)^2 - 1: the exact buy-side price impact.
    double exact_return = 0.0;
};

/// tau / alpha. Throws PoolError on non-positive reserves.
double spot_price(const PoolState& pool);

/// Swap delta_tau into the pool: tau grows, alpha shrinks along k = const.
/// Throws PoolError on an invalid pool, AllocationError never; negative
/// delta_tau throws PoolError.
StakeResult stake(const PoolState& pool, double delta_tau);

/// First-order price impact 2*dtau/tau.
double price_impact_approx(const PoolState& pool, double delta_tau);

/// One-way slippage dtau/tau (exactly linear in dtau).
double slippage_one_way(const PoolState& pool, double delta_tau);

/// Split total_emission across pools proportional to price. Throws
/// AllocationError if every price is zero.
std::vector<double> allocate_emissions_price(std::span<const double> prices,
                                             double total_emission);

struct EmissionPolicy {
    enum class Variant { price_proportional, flow_ema };
    Variant variant = Variant::price_proportional;
    double ema_half_life = 30.0;
};

struct FlowAllocation {
    std::vector<double> ema_state;
    std::vector<double> emissions;
};

/// Update per-pool inflow EMAs (decay 2^(-1/half_life) per day) and split
/// total_emission proportional to the EMAs clipped at zero. Throws
/// AllocationError if every clipped EMA is zero.
FlowAllocation allocate_emissions_flow(std::span<const double> ema_state,
                                       std::span<const double> todays_flows,
                                       double total_emission, const EmissionPolicy& policy);

}  // namespace taoquant::amm
