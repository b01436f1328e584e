#include <algorithm>
#include <cmath>

#include "taoquant/csv.hpp"
#include "taoquant/errors.hpp"
#include "taoquant/ingest.hpp"

namespace taoquant::ingest {

namespace {
constexpr int kMaxFillDays = 3;
}

FxSeries FxSeries::load(const std::string& path, std::vector<std::string>* warnings) {
    CsvReader r(path);
    const std::size_t date_col = r.column("date");
    const std::size_t px_col = r.column("tao_usd");
    std::vector<std::pair<Date, double>> points;
    while (r.next()) {
        const Date d = r.date(date_col);
        const double px = r.number(px_col);
        if (!(px > 0.0))
            throw DataError(path + ":" + std::to_string(r.line()) +
                            ": non-positive tao_usd price " + format_double(px) + " on " +
                            d.to_string());
        points.emplace_back(d, px);
    }
    try {
        return from_points(std::move(points), warnings);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

FxSeries FxSeries::from_points(std::vector<std::pair<Date, double>> points,
                               std::vector<std::string>* warnings) {
    if (points.empty()) throw DataError("FX series is empty");
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].first == points[i - 1].first)
            throw DataError("duplicate FX date " + points[i].first.to_string());
    }
    for (const auto& [d, px] : points) {
        if (!(px > 0.0))
            throw DataError("non-positive tao_usd price on " + d.to_string());
    }

    FxSeries fx;
    fx.first_ = points.front().first;
    const std::int64_t span = points.back().first - points.front().first + 1;
    fx.px_.reserve(static_cast<std::size_t>(span));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) {
            const std::int64_t gap = points[i].first - points[i - 1].first - 1;
            if (gap > kMaxFillDays)
                throw DataError("FX gap of " + std::to_string(gap) + " days after " +
                                points[i - 1].first.to_string() + " exceeds the " +
                                std::to_string(kMaxFillDays) + "-day forward-fill limit");
            if (gap > 0 && warnings)
                warnings->push_back("forward-filled " + std::to_string(gap) +
                                    " FX day(s) after " + points[i - 1].first.to_string());
            for (std::int64_t g = 0; g < gap; ++g) fx.px_.push_back(points[i - 1].second);
        }
        fx.px_.push_back(points[i].second);
    }
    return fx;
}

std::optional<double> FxSeries::try_price(Date d) const {
    const std::int64_t idx = d - first_;
    if (idx < 0 || idx >= static_cast<std::int64_t>(px_.size())) return std::nullopt;
    return px_[static_cast<std::size_t>(idx)];
}

double FxSeries::price(Date d) const {
    if (const auto px = try_price(d)) return *px;
    throw DataError("no FX price for " + d.to_string());
}

std::optional<double> FxSeries::daily_return(Date d) const {
    const auto today = try_price(d);
    const auto prev = try_price(d - 1);
    if (!today || !prev) return std::nullopt;
    return *today / *prev - 1.0;
}

}  // namespace taoquant::ingest
