#include "taoquant/factors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "taoquant/csv.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/kernels.hpp"

namespace taoquant::factors {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double panel_return(const panel::ReturnPanel& panel, std::size_t t, std::size_t i,
                    Denomination denom) {
    return denom == Denomination::tao ? panel.rtao(t, i) : panel.rusd(t, i);
}

/// Equal-weighted mean return of the members with a usable return.
/// Returns (mean, count); count 0 means the leg produced nothing.
std::pair<double, std::size_t> leg_return(const panel::ReturnPanel& panel, std::size_t t,
                                          std::span<const std::size_t> members,
                                          Denomination denom) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const std::size_t i : members) {
        const double r = panel_return(panel, t, i, denom);
        if (std::isnan(r)) continue;
        sum += r;
        ++n;
    }
    return {n ? sum / static_cast<double>(n) : kNaN, n};
}

void check_alignment(const characteristics::CharacteristicMatrix& ch,
                     const panel::ReturnPanel& panel) {
    if (ch.dates != panel.dates || ch.netuids != panel.netuids)
        throw DataError("characteristic matrix and panel are not aligned");
}

}  // namespace

std::optional<TercileSort> tercile_sort(std::span<const double> values,
                                        std::span<const std::uint8_t> eligible,
                                        std::span<const int> netuids) {
    if (values.size() != eligible.size() || values.size() != netuids.size())
        throw DataError("tercile_sort inputs differ in length");

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (eligible[i] && !std::isnan(values[i])) order.push_back(i);
    if (order.size() < 3) return std::nullopt;

    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return netuids[a] < netuids[b];
    });

    const std::size_t n = order.size();
    const std::size_t b = (n + 2) / 3;        // ceil(n/3)
    const std::size_t m = (2 * n + 2) / 3;    // ceil(2n/3)
    TercileSort out;
    out.bottom.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b));
    out.middle.assign(order.begin() + static_cast<std::ptrdiff_t>(b),
                      order.begin() + static_cast<std::ptrdiff_t>(m));
    out.top.assign(order.begin() + static_cast<std::ptrdiff_t>(m), order.end());
    // Canonical member order inside each leg, so leg means are reproducible
    // bit-for-bit regardless of how the sort arranged equal-rank entries.
    for (auto* leg : {&out.bottom, &out.middle, &out.top}) std::sort(leg->begin(), leg->end());
    return out;
}

FactorSeries build_factor(const std::string& name,
                          const characteristics::CharacteristicMatrix& ch,
                          const panel::ReturnPanel& panel, LongLeg long_leg,
                          Denomination denom) {
    check_alignment(ch, panel);

    FactorSeries f;
    f.name = name;
    f.sort_characteristic = ch.name;
    f.long_leg = long_leg == LongLeg::bottom ? "bottom" : "top";
    f.short_leg = long_leg == LongLeg::bottom ? "top" : "bottom";
    f.dates = panel.dates;
    f.returns.assign(panel.n_days(), kNaN);
    f.long_count.assign(panel.n_days(), 0);
    f.short_count.assign(panel.n_days(), 0);

    const std::size_t n_sub = panel.n_subnets();
    for (std::size_t t = 0; t < panel.n_days(); ++t) {
        const std::span<const double> day_values(ch.values.data() + t * n_sub, n_sub);
        const std::span<const std::uint8_t> day_elig(panel.eligible.data() + t * n_sub, n_sub);
        const auto sorted = tercile_sort(day_values, day_elig, panel.netuids);
        if (!sorted) continue;

        const auto& long_members = long_leg == LongLeg::bottom ? sorted->bottom : sorted->top;
        const auto& short_members = long_leg == LongLeg::bottom ? sorted->top : sorted->bottom;
        const auto [long_ret, long_n] = leg_return(panel, t, long_members, denom);
        const auto [short_ret, short_n] = leg_return(panel, t, short_members, denom);
        f.long_count[t] = long_n;
        f.short_count[t] = short_n;
        if (long_n == 0 || short_n == 0) continue;
        f.returns[t] = long_ret - short_ret;
    }
    return f;
}

FactorSeries market_factor(const panel::ReturnPanel& panel, Denomination denom) {
    FactorSeries f;
    f.name = denom == Denomination::tao ? "MKT" : "MKT_USD";
    f.dates = panel.dates;
    f.returns.assign(panel.n_days(), kNaN);
    f.long_count.assign(panel.n_days(), 0);
    f.short_count.assign(panel.n_days(), 0);

    for (std::size_t t = 0; t < panel.n_days(); ++t) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < panel.n_subnets(); ++i) {
            if (!panel.is_eligible(t, i)) continue;
            const double r = panel_return(panel, t, i, denom);
            if (std::isnan(r)) continue;
            sum += r;
            ++n;
        }
        f.long_count[t] = n;
        if (n) f.returns[t] = sum / static_cast<double>(n);
    }
    return f;
}

std::vector<FactorSeries> standard_factors(const panel::SnapshotGrid& grid,
                                           const panel::ReturnPanel& panel,
                                           Denomination denom) {
    using characteristics::Name;
    const auto ch = [&](Name n) { return characteristics::characteristic(n, grid); };

    std::vector<FactorSeries> out;
    out.push_back(market_factor(panel, denom));
    out.push_back(build_factor("SMB", ch(Name::MCAP), panel, LongLeg::bottom, denom));
    out.push_back(build_factor("HML_EMIS", ch(Name::EY), panel, LongLeg::top, denom));
    out.push_back(build_factor("WML7", ch(Name::MOM7), panel, LongLeg::top, denom));
    out.push_back(build_factor("WML30", ch(Name::MOM30), panel, LongLeg::top, denom));
    out.push_back(build_factor("REV", ch(Name::REV), panel, LongLeg::bottom, denom));
    out.push_back(build_factor("LIQ", ch(Name::LIQ), panel, LongLeg::bottom, denom));
    out.push_back(build_factor("STAKE", ch(Name::STAKE), panel, LongLeg::top, denom));
    return out;
}

std::vector<TercileRow> tercile_table(const characteristics::CharacteristicMatrix& ch,
                                      const panel::ReturnPanel& panel, Denomination denom) {
    check_alignment(ch, panel);

    const std::size_t n_sub = panel.n_subnets();
    std::vector<std::vector<double>> series(3);
    std::vector<std::size_t> member_sum(3, 0);

    for (std::size_t t = 0; t < panel.n_days(); ++t) {
        const std::span<const double> day_values(ch.values.data() + t * n_sub, n_sub);
        const std::span<const std::uint8_t> day_elig(panel.eligible.data() + t * n_sub, n_sub);
        const auto sorted = tercile_sort(day_values, day_elig, panel.netuids);
        if (!sorted) continue;
        const std::vector<std::size_t>* legs[3] = {&sorted->bottom, &sorted->middle, &sorted->top};
        for (int leg = 0; leg < 3; ++leg) {
            const auto [ret, n] = leg_return(panel, t, *legs[leg], denom);
            if (n == 0) continue;
            series[static_cast<std::size_t>(leg)].push_back(ret);
            member_sum[static_cast<std::size_t>(leg)] += n;
        }
    }

    static constexpr const char* kLabels[3] = {"bottom", "middle", "top"};
    std::vector<TercileRow> rows;
    for (int leg = 0; leg < 3; ++leg) {
        const auto& s = series[static_cast<std::size_t>(leg)];
        TercileRow row;
        row.tercile = kLabels[leg];
        row.n_days = s.size();
        if (s.empty()) {
            row.mean_daily = row.ann_return = row.ann_std = row.sharpe = kNaN;
        } else {
            const double n = static_cast<double>(s.size());
            const double mean = kernels::sum(s) / n;
            const double sd =
                s.size() > 1 ? std::sqrt(kernels::centered_sumsq(s, mean) / (n - 1.0)) : kNaN;
            row.mean_daily = mean;
            row.ann_return = mean * 365.0;
            row.ann_std = sd * std::sqrt(365.0);
            row.sharpe = sd > 0.0 ? row.ann_return / row.ann_std : kNaN;
            row.avg_members =
                static_cast<double>(member_sum[static_cast<std::size_t>(leg)]) / n;
        }
        rows.push_back(row);
    }
    return rows;
}

void export_factor_csv(const FactorSeries& f, const std::string& path) {
    CsvWriter w(path);
    w.write_row({"date", f.name});
    for (std::size_t t = 0; t < f.n_days(); ++t) {
        if (std::isnan(f.returns[t])) continue;
        w.write_row({f.dates[t].to_string(), format_double(f.returns[t])});
    }
}

void export_factors_csv(std::span<const FactorSeries> fs, const std::string& path) {
    std::map<Date, std::vector<double>> by_date;
    for (std::size_t j = 0; j < fs.size(); ++j) {
        for (std::size_t t = 0; t < fs[j].n_days(); ++t) {
            auto& row = by_date.try_emplace(fs[j].dates[t], fs.size(), kNaN).first->second;
            row[j] = fs[j].returns[t];
        }
    }
    CsvWriter w(path);
    std::vector<std::string> header{"date"};
    for (const auto& f : fs) header.push_back(f.name);
    w.write_row(header);
    std::vector<std::string> row(header.size());
    for (const auto& [date, values] : by_date) {
        row[0] = date.to_string();
        for (std::size_t j = 0; j < values.size(); ++j) row[j + 1] = format_double(values[j]);
        w.write_row(row);
    }
}

}  // namespace taoquant::factors
