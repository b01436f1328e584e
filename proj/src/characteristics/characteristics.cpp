#include "taoquant/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "taoquant/csv.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/kernels.hpp"

namespace taoquant::characteristics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct NameEntry {
    const char* id;
    Name name;
    bool rolling;
};

constexpr NameEntry kNames[] = {
    {"MCAP", Name::MCAP, false},       {"EY", Name::EY, false},
    {"MOM7", Name::MOM7, false},       {"MOM30", Name::MOM30, false},
    {"REV", Name::REV, false},         {"LIQ", Name::LIQ, false},
    {"STAKE", Name::STAKE, false},     {"VOL30", Name::VOL30, true},
    {"DOWNVOL30", Name::DOWNVOL30, true}, {"UPVOL30", Name::UPVOL30, true},
    {"IVOL30", Name::IVOL30, true},    {"BETA30", Name::BETA30, true},
    {"SKEW30", Name::SKEW30, true},
};

CharacteristicMatrix make_matrix(Name name, const std::vector<Date>& dates,
                                 const std::vector<int>& netuids) {
    CharacteristicMatrix m;
    m.name = to_string(name);
    m.dates = dates;
    m.netuids = netuids;
    m.values.assign(dates.size() * netuids.size(), kNaN);
    m.masked.assign(dates.size() * netuids.size(), 0);
    return m;
}

/// A day usable inside a price window: present, out of startup, and in the
/// given lifecycle (quarantine already guarantees a positive price).
bool usable(const panel::SnapshotGrid& grid, std::size_t t, std::size_t i, int life) {
    return grid.present(t, i) && !grid.startup(t, i) && grid.lifecycle(t, i) == life;
}

/// p_{t-1}/p_{t-1-lag} - 1 with full-window continuity; masks the value when
/// both endpoints exist but the window breaks in between.
void price_ratio(CharacteristicMatrix& m, const panel::SnapshotGrid& grid, std::size_t lag) {
    for (std::size_t i = 0; i < grid.n_subnets(); ++i) {
        for (std::size_t t = lag + 1; t < grid.n_days(); ++t) {
            const std::size_t hi = t - 1;
            const std::size_t lo = t - 1 - lag;
            const bool hi_obs = grid.present(hi, i) && !grid.startup(hi, i);
            const bool lo_obs = grid.present(lo, i) && !grid.startup(lo, i);
            if (!hi_obs || !lo_obs) continue;  // plain missingness
            const int life = grid.lifecycle(hi, i);
            bool broken = grid.lifecycle(lo, i) != life;
            for (std::size_t s = lo + 1; !broken && s < hi; ++s)
                broken = !usable(grid, s, i, life);
            if (broken) {
                m.masked[m.at(t, i)] = 1;
                continue;
            }
            m.values[m.at(t, i)] = grid.price(hi, i) / grid.price(lo, i) - 1.0;
        }
    }
}

void lagged_field(CharacteristicMatrix& m, const panel::SnapshotGrid& grid, Name name) {
    for (std::size_t i = 0; i < grid.n_subnets(); ++i) {
        for (std::size_t t = 1; t < grid.n_days(); ++t) {
            const std::size_t s = t - 1;
            if (!grid.present(s, i) || grid.startup(s, i)) continue;
            double v = kNaN;
            switch (name) {
                case Name::MCAP:
                    v = grid.mcap(s, i);
                    break;
                case Name::LIQ:
                    v = grid.tau_reserve(s, i);
                    break;
                case Name::STAKE:
                    v = grid.alpha_staked(s, i);
                    break;
                case Name::EY: {
                    const double mcap = grid.mcap(s, i);
                    const double emission = grid.emission_rao(s, i);
                    // Same-unit ratio: mcap_tao converted to rao.
                    if (mcap > 0.0 && emission >= 0.0) v = emission / (mcap * 1e9);
                    break;
                }
                default:
                    throw ConfigError("lagged_field: not a point-in-time characteristic");
            }
            if (v < 0.0) v = kNaN;  // MCAP/LIQ/STAKE/EY are non-negative where present
            m.values[m.at(t, i)] = v;
        }
    }
}

}  // namespace

std::size_t CharacteristicMatrix::masked_count() const {
    std::size_t n = 0;
    for (const auto flag : masked) n += flag;
    return n;
}

Name parse_name(std::string_view id) {
    for (const auto& e : kNames)
        if (id == e.id) return e.name;
    throw ConfigError("unknown characteristic '" + std::string(id) + "'");
}

const char* to_string(Name name) {
    for (const auto& e : kNames)
        if (name == e.name) return e.id;
    return "?";
}

bool is_rolling(Name name) {
    for (const auto& e : kNames)
        if (name == e.name) return e.rolling;
    return false;
}

CharacteristicMatrix characteristic(Name name, const panel::SnapshotGrid& grid) {
    if (is_rolling(name))
        throw ConfigError(std::string(to_string(name)) +
                          " is a rolling risk measure; use rolling_risk()");
    CharacteristicMatrix m = make_matrix(name, grid.dates(), grid.netuids());
    switch (name) {
        case Name::MOM7:
            price_ratio(m, grid, 7);
            break;
        case Name::MOM30:
            price_ratio(m, grid, 30);
            break;
        case Name::REV:
            price_ratio(m, grid, 1);
            break;
        default:
            lagged_field(m, grid, name);
            break;
    }
    return m;
}

CharacteristicMatrix rolling_risk(Name name, const panel::ReturnPanel& panel,
                                  std::span<const double> market, int window) {
    if (!is_rolling(name))
        throw ConfigError(std::string(to_string(name)) +
                          " is a point-in-time characteristic; use characteristic()");
    if (window < 2) throw ConfigError("rolling window must cover at least 2 returns");
    const bool needs_market = name == Name::BETA30 || name == Name::IVOL30;
    if (needs_market && market.size() != panel.n_days())
        throw ConfigError("market series must align with panel dates");

    CharacteristicMatrix m = make_matrix(name, panel.dates, panel.netuids);
    const auto w = static_cast<std::size_t>(window);
    const double n = static_cast<double>(window);
    std::vector<double> r(w), mkt(w);

    for (std::size_t i = 0; i < panel.n_subnets(); ++i) {
        for (std::size_t t = w; t < panel.n_days(); ++t) {
            bool complete = true;
            for (std::size_t s = 0; s < w && complete; ++s) {
                r[s] = panel.rtao(t - w + s, i);
                complete = !std::isnan(r[s]);
                if (needs_market && complete) {
                    mkt[s] = market[t - w + s];
                    complete = !std::isnan(mkt[s]);
                }
            }
            if (!complete) continue;
            // A literally constant window has zero variance; don't let the
            // rounding of mean() manufacture any.
            const bool flat = std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; });

            double v = kNaN;
            switch (name) {
                case Name::VOL30: {
                    if (flat) {
                        v = 0.0;
                        break;
                    }
                    const double mean = kernels::sum(r) / n;
                    v = std::sqrt(kernels::centered_sumsq(r, mean) / (n - 1.0));
                    break;
                }
                case Name::DOWNVOL30:
                case Name::UPVOL30: {
                    const auto sums = kernels::semidev_sums(r);
                    v = std::sqrt((name == Name::DOWNVOL30 ? sums.neg_sq : sums.pos_sq) / n);
                    break;
                }
                case Name::SKEW30: {
                    if (flat) break;  // zero variance: skewness undefined
                    const double mean = kernels::sum(r) / n;
                    const auto cs = kernels::centered_sums(r, mean);
                    const double s = std::sqrt(cs.m2 / (n - 1.0));
                    if (s > 0.0) v = (cs.m3 / n) / (s * s * s);
                    break;
                }
                case Name::BETA30:
                case Name::IVOL30: {
                    const bool flat_mkt = std::all_of(mkt.begin(), mkt.end(),
                                                      [&](double x) { return x == mkt[0]; });
                    if (flat_mkt) break;  // slope undefined
                    const double mx = kernels::sum(mkt) / n;
                    const double my = kernels::sum(r) / n;
                    const double sxx = kernels::centered_sumsq(mkt, mx);
                    double sxy = 0.0;
                    for (std::size_t s = 0; s < w; ++s) sxy += (mkt[s] - mx) * (r[s] - my);
                    const double beta = sxy / sxx;
                    if (name == Name::BETA30) {
                        v = beta;
                    } else {
                        // Explicit residuals: syy - beta*sxy cancels
                        // catastrophically when the fit is near-perfect.
                        const double alpha = my - beta * mx;
                        double ssr = 0.0;
                        for (std::size_t s = 0; s < w; ++s) {
                            const double e = r[s] - alpha - beta * mkt[s];
                            ssr += e * e;
                        }
                        v = std::sqrt(ssr / (n - 2.0));
                    }
                    break;
                }
                default:
                    break;
            }
            m.values[m.at(t, i)] = v;
        }
    }
    return m;
}

CharacteristicMatrix compute(Name name, const panel::SnapshotGrid& grid,
                             const panel::ReturnPanel& panel, std::span<const double> market) {
    return is_rolling(name) ? rolling_risk(name, panel, market) : characteristic(name, grid);
}

void export_csv(const CharacteristicMatrix& m, const std::string& path) {
    CsvWriter w(path);
    std::vector<std::string> header{"date"};
    for (const int uid : m.netuids) header.push_back(format_int(uid));
    w.write_row(header);
    std::vector<std::string> row(header.size());
    for (std::size_t t = 0; t < m.n_days(); ++t) {
        row[0] = m.dates[t].to_string();
        for (std::size_t i = 0; i < m.n_subnets(); ++i)
            row[i + 1] = format_double(m.value(t, i));
        w.write_row(row);
    }
}

}  // namespace taoquant::characteristics
