// Minimal static SVG line charts for the benchmark outputs. Hand-rolled on
// purpose: the plots are simple polylines and shipping a plotting dependency
// for two files is not worth it. CSV remains the authoritative output.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hankeldoa/errors.hpp"

namespace hankeldoa {

struct SvgSeries {
    std::string label;
    std::string color;  ///< CSS color; empty picks from the default palette
    std::vector<std::pair<double, double>> points;
};

struct SvgChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

namespace detail {

inline std::string svg_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

inline std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Round x up (or to the nearest, when round is set) to 1/2/5 times a power
/// of ten. The usual nice-ticks helper.
inline double nice_num(double x, bool round) {
    const double expv = std::floor(std::log10(x));
    const double f = x / std::pow(10.0, expv);
    double nf;
    if (round) {
        nf = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
    } else {
        nf = f <= 1.0 ? 1.0 : f <= 2.0 ? 2.0 : f <= 5.0 ? 5.0 : 10.0;
    }
    return nf * std::pow(10.0, expv);
}

inline std::vector<double> linear_ticks(double lo, double hi, int target = 5) {
    const double range = nice_num(hi - lo, false);
    const double step = nice_num(range / (target - 1), true);
    const double tick_lo = std::floor(lo / step) * step;
    const double tick_hi = std::ceil(hi / step) * step;
    std::vector<double> ticks;
    for (double t = tick_lo; t <= tick_hi + 0.5 * step; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

}  // namespace detail

/// Render a line chart. With log_y, nonpositive values are clamped to a tenth
/// of the smallest positive value in the data (exact zeros happen whenever a
/// trial interpolates perfectly, and they should still plot).
inline std::string render_line_chart(const std::vector<SvgSeries>& series,
                                     const SvgChartOptions& opt) {
    if (series.empty()) throw ValidationError("render_line_chart: no series");
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#8c564b"};
    const double left = 80, right = 24, top = 48, bottom = 64;
    const double plot_w = opt.width - left - right;
    const double plot_h = opt.height - top - bottom;

    bool log_y = opt.log_y;
    double floor_y = std::numeric_limits<double>::infinity();
    if (log_y) {
        for (const auto& s : series) {
            for (const auto& [x, y] : s.points) {
                (void)x;
                if (y > 0.0) floor_y = std::min(floor_y, y);
            }
        }
        if (!std::isfinite(floor_y)) log_y = false;  // nothing positive to plot
        floor_y /= 10.0;
    }
    auto y_value = [&](double y) {
        if (!log_y) return y;
        return std::log10(std::max(y, floor_y));
    };

    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y_value(y));
            y_max = std::max(y_max, y_value(y));
        }
    }
    if (!std::isfinite(x_min)) throw ValidationError("render_line_chart: no points");
    if (x_max - x_min < 1e-12) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 1.0;
        y_max += 1.0;
    }

    std::vector<double> x_ticks = detail::linear_ticks(x_min, x_max);
    std::vector<double> y_ticks;
    if (log_y) {
        const int d_lo = static_cast<int>(std::floor(y_min));
        const int d_hi = static_cast<int>(std::ceil(y_max));
        for (int d = d_lo; d <= d_hi; ++d) y_ticks.push_back(static_cast<double>(d));
        y_min = d_lo;
        y_max = d_hi;
    } else {
        y_ticks = detail::linear_ticks(y_min, y_max);
        y_min = y_ticks.front();
        y_max = y_ticks.back();
    }
    x_min = x_ticks.front();
    x_max = x_ticks.back();

    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double yv) { return top + (y_max - yv) / (y_max - y_min) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\">\n";
    out << "<rect width=\"" << opt.width << "\" height=\"" << opt.height
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << opt.width / 2 << "\" y=\"28\" font-family=\"sans-serif\" "
        << "font-size=\"16\" text-anchor=\"middle\" font-weight=\"bold\">"
        << detail::svg_escape(opt.title) << "</text>\n";

    // Grid and tick labels.
    for (double t : x_ticks) {
        const std::string x = detail::svg_coord(px(t));
        out << "<line x1=\"" << x << "\" y1=\"" << detail::svg_coord(top) << "\" x2=\"" << x
            << "\" y2=\"" << detail::svg_coord(top + plot_h)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << detail::svg_coord(top + plot_h + 20)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << detail::tick_label(t) << "</text>\n";
    }
    for (double t : y_ticks) {
        const std::string y = detail::svg_coord(py(t));
        out << "<line x1=\"" << detail::svg_coord(left) << "\" y1=\"" << y << "\" x2=\""
            << detail::svg_coord(left + plot_w) << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << detail::svg_coord(left - 8) << "\" y=\"" << y
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" "
            << "dominant-baseline=\"middle\">"
            << (log_y ? "1e" + detail::tick_label(t) : detail::tick_label(t)) << "</text>\n";
    }

    // Axes.
    out << "<rect x=\"" << detail::svg_coord(left) << "\" y=\"" << detail::svg_coord(top)
        << "\" width=\"" << detail::svg_coord(plot_w) << "\" height=\""
        << detail::svg_coord(plot_h)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << detail::svg_coord(left + plot_w / 2) << "\" y=\""
        << detail::svg_coord(opt.height - 16)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << detail::svg_escape(opt.x_label) << "</text>\n";
    out << "<text x=\"20\" y=\"" << detail::svg_coord(top + plot_h / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 20 " << detail::svg_coord(top + plot_h / 2) << ")\">"
        << detail::svg_escape(opt.y_label) << "</text>\n";

    // Data series with point markers.
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color =
            s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
        auto sorted = s.points;
        std::sort(sorted.begin(), sorted.end());
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : sorted) {
            out << detail::svg_coord(px(x)) << ',' << detail::svg_coord(py(y_value(y))) << ' ';
        }
        out << "\"/>\n";
        for (const auto& [x, y] : sorted) {
            out << "<circle cx=\"" << detail::svg_coord(px(x)) << "\" cy=\""
                << detail::svg_coord(py(y_value(y))) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
    }

    // Legend, top-right corner of the plot area.
    const double legend_x = left + plot_w - 190;
    double legend_y = top + 14;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string color =
            s.color.empty() ? kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
        out << "<line x1=\"" << detail::svg_coord(legend_x) << "\" y1=\""
            << detail::svg_coord(legend_y) << "\" x2=\"" << detail::svg_coord(legend_x + 26)
            << "\" y2=\"" << detail::svg_coord(legend_y) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << detail::svg_coord(legend_x + 32) << "\" y=\""
            << detail::svg_coord(legend_y) << "\" font-family=\"sans-serif\" font-size=\"12\" "
            << "dominant-baseline=\"middle\">" << detail::svg_escape(s.label) << "</text>\n";
        legend_y += 18;
    }

    out << "</svg>\n";
    return out.str();
}

inline void write_line_chart(const std::filesystem::path& path,
                             const std::vector<SvgSeries>& series, const SvgChartOptions& opt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << render_line_chart(series, opt);
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace hankeldoa
