#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "taoquant/dates.hpp"
#include "taoquant/errors.hpp"

namespace taoquant::cli {

namespace {

constexpr double kW = 960.0, kH = 540.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 44.0, kBottom = 52.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     std::span<const SvgSeries> series, bool log_y, bool x_dates,
                     std::optional<double> vline_x) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    const auto usable = [&](double y) { return !std::isnan(y) && (!log_y || y > 0.0); };
    const auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!(xmin <= xmax)) throw DataError("svg chart has no drawable points: " + path);
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    } else {
        const double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }

    const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return kTop + (ymax - ty(y)) / (ymax - ymin) * ph; };

    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << escape(title) << "</text>\n";

    // Gridlines and y tick labels (tick values live in transformed space).
    for (int i = 0; i <= 4; ++i) {
        const double tv = ymin + (ymax - ymin) * i / 4.0;
        const double yy = kTop + (ymax - tv) / (ymax - ymin) * ph;
        out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(yy) << "\" x2=\""
            << num(kLeft + pw) << "\" y2=\"" << num(yy)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        const double value = log_y ? std::pow(10.0, tv) : tv;
        out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(yy + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(value) << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double xx = px(xv);
        out << "<line x1=\"" << num(xx) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(xx)
            << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"#444444\"/>\n";
        const std::string label =
            x_dates ? Date(static_cast<std::int64_t>(std::llround(xv))).to_string()
                    : tick_label(xv);
        out << "<text x=\"" << num(xx) << "\" y=\"" << num(kTop + ph + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label
            << "</text>\n";
    }
    out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444444\"/>\n";

    if (vline_x && *vline_x >= xmin && *vline_x <= xmax) {
        out << "<line x1=\"" << num(px(*vline_x)) << "\" y1=\"" << num(kTop) << "\" x2=\""
            << num(px(*vline_x)) << "\" y2=\"" << num(kTop + ph)
            << "\" stroke=\"#666666\" stroke-dasharray=\"6,4\" stroke-width=\"1.5\"/>\n";
    }

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % std::size(kPalette)];
        std::string points;
        const auto flush = [&] {
            if (points.empty()) return;
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.y[i])) {
                flush();  // a gap breaks the line
                continue;
            }
            points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        }
        flush();
    }

    double ly = kTop + 14.0;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % std::size(kPalette)];
        const double lx = kLeft + pw - 150.0;
        out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
            << num(lx + 22) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(series[si].label)
            << "</text>\n";
        ly += 16.0;
    }
    out << "</svg>\n";
}

}  // namespace taoquant::cli
