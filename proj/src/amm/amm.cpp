#include "taoquant/amm.hpp"

#include <cmath>

#include "taoquant/errors.hpp"

namespace taoquant::amm {

namespace {

void require_valid(const PoolState& pool) {
    if (!(pool.tau_reserve > 0.0) || !(pool.alpha_reserve > 0.0))
        throw PoolError("invalid pool: reserves must be positive (tau=" +
                        std::to_string(pool.tau_reserve) +
                        ", alpha=" + std::to_string(pool.alpha_reserve) + ")");
}

}  // namespace

double spot_price(const PoolState& pool) {
    require_valid(pool);
    return pool.tau_reserve / pool.alpha_reserve;
}

StakeResult stake(const PoolState& pool, double delta_tau) {
    require_valid(pool);
    if (delta_tau < 0.0) throw PoolError("stake requires delta_tau >= 0");
    const double k = pool.k();
    const double new_tau = pool.tau_reserve + delta_tau;
    const double new_alpha = k / new_tau;
    const double ratio = 1.0 + delta_tau / pool.tau_reserve;
    StakeResult r;
    r.pool = PoolState{new_tau, new_alpha};
    r.alpha_out = pool.alpha_reserve - new_alpha;
    r.exact_return = ratio * ratio - 1.0;
    return r;
}

double price_impact_approx(const PoolState& pool, double delta_tau) {
    require_valid(pool);
    if (delta_tau < 0.0) throw PoolError("price_impact_approx requires delta_tau >= 0");
    return 2.0 * delta_tau / pool.tau_reserve;
}

double slippage_one_way(const PoolState& pool, double delta_tau) {
    require_valid(pool);
    if (delta_tau < 0.0) throw PoolError("slippage_one_way requires delta_tau >= 0");
    return delta_tau / pool.tau_reserve;
}

std::vector<double> allocate_emissions_price(std::span<const double> prices,
                                             double total_emission) {
    if (total_emission < 0.0) throw AllocationError("total_emission must be >= 0");
    double sum = 0.0;
    for (const double p : prices) {
        if (p < 0.0) throw AllocationError("prices must be non-negative");
        sum += p;
    }
    if (!(sum > 0.0)) throw AllocationError("cannot allocate emissions: all prices are zero");
    std::vector<double> out(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) out[i] = prices[i] / sum * total_emission;
    return out;
}

FlowAllocation allocate_emissions_flow(std::span<const double> ema_state,
                                       std::span<const double> todays_flows,
                                       double total_emission, const EmissionPolicy& policy) {
    if (!(policy.ema_half_life > 0.0)) throw AllocationError("EMA half-life must be > 0");
    if (ema_state.size() != todays_flows.size())
        throw AllocationError("EMA state and flow vectors differ in length");
    if (total_emission < 0.0) throw AllocationError("total_emission must be >= 0");

    const double lambda = std::exp2(-1.0 / policy.ema_half_life);
    FlowAllocation out;
    out.ema_state.resize(ema_state.size());
    double clipped_sum = 0.0;
    for (std::size_t i = 0; i < ema_state.size(); ++i) {
        out.ema_state[i] = lambda * ema_state[i] + (1.0 - lambda) * todays_flows[i];
        clipped_sum += std::max(out.ema_state[i], 0.0);
    }
    if (!(clipped_sum > 0.0))
        throw AllocationError("cannot allocate emissions: all flow EMAs are <= 0");
    out.emissions.resize(ema_state.size());
    for (std::size_t i = 0; i < ema_state.size(); ++i)
        out.emissions[i] = std::max(out.ema_state[i], 0.0) / clipped_sum * total_emission;
    return out;
}

}  // namespace taoquant::amm
