#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "samlab/csv.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

// Dependency-free SVG charts. CSV files are the ground-truth artifacts;
// these are companions for quick visual inspection.

namespace svg_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace svg_detail

struct SvgSeries {
    std::string label;
    std::vector<double> ys;
};

/// Simple multi-series line chart over a shared x grid.
inline std::string line_chart_svg(const std::string& title, const std::vector<double>& xs,
                                  const std::vector<SvgSeries>& series) {
    using svg_detail::num;
    const double width = 640, height = 420, ml = 60, mr = 130, mt = 40, mb = 45;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (double y : s.ys) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double xmin = xs.front(), xmax = xs.back() > xs.front() ? xs.back() : xs.front() + 1.0;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                      num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title +
           "</text>\n";
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(height - mb) + "\" x2=\"" + num(width - mr) + "\" y2=\"" +
           num(height - mb) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" + num(height - mb) +
           "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double y = ymin + (ymax - ymin) * i / 4.0;
        const double x = xmin + (xmax - xmin) * i / 4.0;
        out += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(py(y) + 4) +
               "\" text-anchor=\"end\" font-size=\"10\">" + format_double(std::round(y * 1e4) / 1e4) + "</text>\n";
        out += "<text x=\"" + num(px(x)) + "\" y=\"" + num(height - mb + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + format_double(std::round(x * 1e4) / 1e4) +
               "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = svg_detail::kSeriesColors[s % 6];
        std::string points;
        for (std::size_t i = 0; i < xs.size() && i < series[s].ys.size(); ++i)
            points += num(px(xs[i])) + "," + num(py(series[s].ys[i])) + " ";
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
               points + "\"/>\n";
        out += "<text x=\"" + num(width - mr + 8) + "\" y=\"" + num(mt + 14.0 * (s + 1)) +
               "\" font-size=\"11\" fill=\"" + color + "\">" + series[s].label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

/// Heatmap with a blue-white-red diverging palette centred on the data range.
inline std::string heatmap_svg(const std::string& title, const Matrix& values,
                               const std::vector<std::string>& row_labels,
                               const std::vector<std::string>& col_labels) {
    using svg_detail::num;
    const double cell = std::min(40.0, 480.0 / std::max(values.rows, values.cols));
    const double ml = 70, mt = 50;
    const double width = ml + cell * values.cols + 30, height = mt + cell * values.rows + 30;
    double vmin = 1e300, vmax = -1e300;
    for (double v : values.data) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (!(vmax > vmin)) vmax = vmin + 1.0;

    auto shade = [&](double v) {
        const double t = (v - vmin) / (vmax - vmin);
        const int r = static_cast<int>(255 * std::min(1.0, 2.0 * t));
        const int b = static_cast<int>(255 * std::min(1.0, 2.0 * (1.0 - t)));
        const int g = static_cast<int>(255 * (1.0 - std::abs(2.0 * t - 1.0)));
        char buf[16];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                      num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + title +
           "</text>\n";
    for (int r = 0; r < values.rows; ++r) {
        if (r < static_cast<int>(row_labels.size()))
            out += "<text x=\"" + num(ml - 5) + "\" y=\"" + num(mt + cell * r + cell / 2 + 4) +
                   "\" text-anchor=\"end\" font-size=\"10\">" + row_labels[static_cast<std::size_t>(r)] +
                   "</text>\n";
        for (int c = 0; c < values.cols; ++c) {
            out += "<rect x=\"" + num(ml + cell * c) + "\" y=\"" + num(mt + cell * r) + "\" width=\"" + num(cell) +
                   "\" height=\"" + num(cell) + "\" fill=\"" + shade(values.at(r, c)) + "\"/>\n";
        }
    }
    for (int c = 0; c < values.cols && c < static_cast<int>(col_labels.size()); ++c)
        out += "<text x=\"" + num(ml + cell * c + cell / 2) + "\" y=\"" + num(mt - 6) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + col_labels[static_cast<std::size_t>(c)] +
               "</text>\n";
    out += "</svg>\n";
    return out;
}

} // namespace samlab
