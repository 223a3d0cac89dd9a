#pragma once

#include "sgi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sgi {

inline constexpr std::size_t DENSITY_GRID_POINTS = 512;

struct DensityPoint {
    double x;
    double y;
};

struct DensityCurve {
    double bandwidth;
    std::vector<DensityPoint> points;
};

namespace detail {

inline double quantile_linear(const std::vector<double> &sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline void require_sample(const std::vector<double> &values) {
    if (values.size() < 2) {
        throw insufficient_data_error{"kernel density needs at least 2 values, got " +
                                      std::to_string(values.size())};
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw invalid_input_error{"values", "kernel density input contains a non-finite value"};
        }
    }
}

} // namespace detail

/// Silverman's rule of thumb, 0.9 * min(sd, IQR/1.34) * n^(-1/5).
///
/// Falls back to whichever spread measure is non-zero, and to 1e-3 * max(1, |mean|) when every
/// value is identical.
inline double silverman_bandwidth(const std::vector<double> &values) {
    detail::require_sample(values);
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double iqr =
        detail::quantile_linear(sorted, 0.75) - detail::quantile_linear(sorted, 0.25);

    double spread = std::min(sd, iqr / 1.34);
    if (spread <= 0.0) {
        spread = std::max(sd, iqr / 1.34);
    }
    if (spread <= 0.0) {
        return 1e-3 * std::max(1.0, std::abs(mean));
    }
    return 0.9 * spread * std::pow(n, -0.2);
}

/// Gaussian kernel density on an evenly spaced grid over [min - 3h, max + 3h].
inline DensityCurve emit_density(const std::vector<double> &values,
                                 std::optional<double> bandwidth = std::nullopt,
                                 std::size_t grid_points = DENSITY_GRID_POINTS) {
    detail::require_sample(values);
    if (grid_points < 2) {
        throw invalid_input_error{"grid_points", "need at least 2 grid points"};
    }
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw invalid_input_error{"bandwidth", "must be positive and finite"};
    }

    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *min_it - 3.0 * h;
    const double hi = *max_it + 3.0 * h;
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    const double norm =
        1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));

    DensityCurve curve{h, {}};
    curve.points.reserve(grid_points);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = i + 1 == grid_points ? hi : lo + step * static_cast<double>(i);
        double sum = 0.0;
        for (double v : values) {
            const double z = (x - v) / h;
            sum += std::exp(-0.5 * z * z);
        }
        curve.points.push_back({x, sum * norm});
    }
    return curve;
}

inline double trapezoid_integral(const DensityCurve &curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto &a = curve.points[i - 1];
        const auto &b = curve.points[i];
        area += 0.5 * (a.y + b.y) * (b.x - a.x);
    }
    return area;
}

/// Grid location of the highest density.
inline double density_mode(const DensityCurve &curve) {
    if (curve.points.empty()) {
        throw insufficient_data_error{"empty density curve"};
    }
    const auto peak = std::max_element(curve.points.begin(), curve.points.end(),
                                       [](const auto &a, const auto &b) { return a.y < b.y; });
    return peak->x;
}

struct ReferenceLine {
    double x;
    std::string color;
    std::string label;
};

/// Standalone SVG rendering of a density curve with vertical reference lines.
inline std::string render_density_svg(const DensityCurve &curve,
                                      const std::vector<ReferenceLine> &references,
                                      const std::string &title, const std::string &x_label) {
    constexpr double width = 720.0;
    constexpr double height = 440.0;
    constexpr double left = 70.0;
    constexpr double right = 30.0;
    constexpr double top = 50.0;
    constexpr double bottom = 60.0;

    double x_min = curve.points.front().x;
    double x_max = curve.points.back().x;
    for (const auto &ref : references) {
        x_min = std::min(x_min, ref.x);
        x_max = std::max(x_max, ref.x);
    }
    double y_max = 0.0;
    for (const auto &p : curve.points) {
        y_max = std::max(y_max, p.y);
    }
    if (y_max <= 0.0) {
        y_max = 1.0;
    }
    y_max *= 1.05;
    if (x_max <= x_min) {
        x_max = x_min + 1.0;
    }

    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - y / y_max * (height - top - bottom); };

    std::ostringstream svg;
    svg << std::fixed << std::setprecision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << title << "</text>\n";

    // axes
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    constexpr int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double xv = x_min + (x_max - x_min) * i / ticks;
        const double yv = y_max * i / ticks;
        svg << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << std::setprecision(3) << xv << std::setprecision(2) << "</text>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << yv
            << "</text>\n";
    }
    svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << (top + height - bottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 "
        << (top + height - bottom) / 2 << ")\">Density</text>\n";

    svg << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        svg << (i ? " " : "") << px(curve.points[i].x) << ',' << py(curve.points[i].y);
    }
    svg << "\"/>\n";

    for (std::size_t i = 0; i < references.size(); ++i) {
        const auto &ref = references[i];
        svg << "<line x1=\"" << px(ref.x) << "\" y1=\"" << top << "\" x2=\"" << px(ref.x)
            << "\" y2=\"" << height - bottom << "\" stroke=\"" << ref.color
            << "\" stroke-width=\"1.5\"/>\n";
        svg << "<text x=\"" << px(ref.x) + 4 << "\" y=\"" << top + 14 + 14.0 * static_cast<double>(i)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << ref.color << "\">"
            << ref.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace sgi
