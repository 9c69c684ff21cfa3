#pragma once

// Minimal deterministic SVG plots: line charts for state profiles and stem
// charts for sampling instants / inter-event times. Output bytes depend
// only on the input series.

#include "etsmc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace etsmc {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

enum class PlotKind { line, stem };

struct PlotStyle {
    PlotKind kind = PlotKind::line;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::size_t max_points = 4000;  ///< longer series are decimated by a fixed stride
};

namespace detail {

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
    return colors[i % 5];
}

}  // namespace detail

/// Render `series` as an SVG document.
[[nodiscard]] inline std::string render_svg(std::span<const Series> series, const PlotStyle& style) {
    if (series.empty()) throw InvalidParameterError("nothing to plot");
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size()) {
            throw InvalidParameterError("series '" + s.name + "' is empty or has mismatched lengths");
        }
    }

    constexpr double W = 800, H = 480, left = 80, right = 20, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    double xmin = series[0].x[0], xmax = xmin, ymin = series[0].y[0], ymax = ymin;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (style.kind == PlotKind::stem) ymin = std::min(ymin, 0.0);
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymax += pad;
    if (style.kind == PlotKind::line) ymin -= pad;

    const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" viewBox=\"0 0 800 480\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           detail::xml_escape(style.title) + "</text>\n";
    svg += "<rect x=\"" + detail::fmt2(left) + "\" y=\"" + detail::fmt2(top) + "\" width=\"" + detail::fmt2(pw) +
           "\" height=\"" + detail::fmt2(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double xv = xmin + (xmax - xmin) * i / ticks;
        const double yv = ymin + (ymax - ymin) * i / ticks;
        svg += "<text x=\"" + detail::fmt2(px(xv)) + "\" y=\"" + detail::fmt2(top + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt_tick(xv) +
               "</text>\n";
        svg += "<text x=\"" + detail::fmt2(left - 6) + "\" y=\"" + detail::fmt2(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt_tick(yv) +
               "</text>\n";
    }
    svg += "<text x=\"" + detail::fmt2(left + pw / 2) + "\" y=\"" + detail::fmt2(H - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           detail::xml_escape(style.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + detail::fmt2(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           detail::fmt2(top + ph / 2) + ")\" font-family=\"sans-serif\" font-size=\"13\">" +
           detail::xml_escape(style.y_label) + "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const std::size_t stride = std::max<std::size_t>(1, (s.x.size() + style.max_points - 1) / style.max_points);
        const char* color = detail::palette(si);
        if (style.kind == PlotKind::line) {
            svg += "<polyline fill=\"none\" stroke=\"";
            svg += color;
            svg += "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); i += stride) {
                svg += detail::fmt2(px(s.x[i])) + "," + detail::fmt2(py(s.y[i])) + " ";
            }
            if ((s.x.size() - 1) % stride != 0) {
                svg += detail::fmt2(px(s.x.back())) + "," + detail::fmt2(py(s.y.back()));
            }
            svg += "\"/>\n";
        } else {
            const double base = py(std::max(ymin, 0.0));
            svg += "<g stroke=\"";
            svg += color;
            svg += "\" fill=\"";
            svg += color;
            svg += "\">\n";
            for (std::size_t i = 0; i < s.x.size(); i += stride) {
                const std::string x = detail::fmt2(px(s.x[i]));
                const std::string y = detail::fmt2(py(s.y[i]));
                svg += "<line x1=\"" + x + "\" y1=\"" + detail::fmt2(base) + "\" x2=\"" + x + "\" y2=\"" + y +
                       "\"/><circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"2\"/>\n";
            }
            svg += "</g>\n";
        }
        // legend
        const double ly = top + 14 + 16 * static_cast<double>(si);
        svg += "<line x1=\"" + detail::fmt2(left + pw - 150) + "\" y1=\"" + detail::fmt2(ly) + "\" x2=\"" +
               detail::fmt2(left + pw - 130) + "\" y2=\"" + detail::fmt2(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + detail::fmt2(left + pw - 124) + "\" y=\"" + detail::fmt2(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::xml_escape(s.name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

/// Render and write. Nothing is written when the input is invalid.
inline void emit_plot(std::span<const Series> series, const PlotStyle& style, const std::filesystem::path& path) {
    const std::string svg = render_svg(series, style);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write plot '" + path.string() + "'");
    out << svg;
    if (!out) throw IoError("failed writing plot '" + path.string() + "'");
}

}  // namespace etsmc
