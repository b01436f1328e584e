#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace taoquant::cli {

/// One polyline. x is days since epoch when the chart's x axis is dated;
/// NaN y values break the line.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal static line chart: axes, ticks, legend, optional log y scale
/// (non-positive values are skipped) and an optional dashed vertical marker.
void write_svg_chart(const std::string& path, const std::string& title,
                     std::span<const SvgSeries> series, bool log_y, bool x_dates,
                     std::optional<double> vline_x = std::nullopt);

}  // namespace taoquant::cli
