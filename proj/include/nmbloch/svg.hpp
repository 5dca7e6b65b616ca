// svg.hpp — deterministic polyline plots: a fixed-layout grid of panels with
// optional top-right insets. No external renderer; coordinates are written with
// fixed precision so identical data produces identical bytes.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace nmbloch::svg {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct Panel {
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
    std::vector<Series> inset;  // optional magnified early window
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline const char* kPalette[6] = {"#000000", "#c0392b", "#2166ac",
                                  "#2e7d32", "#8e44ad", "#b26a00"};

struct Box {
    double x, y, w, h;
};

inline void data_range(const std::vector<Series>& ss, double& x0, double& x1, double& y0,
                       double& y1) {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -std::numeric_limits<double>::infinity();
    for (const auto& s : ss) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
}

inline void draw_axes(std::string& out, const Box& b, double x0, double x1, double y0, double y1,
                      const std::string& xlabel, const std::string& ylabel, double font) {
    out += "<rect x='" + fmt(b.x) + "' y='" + fmt(b.y) + "' width='" + fmt(b.w) +
           "' height='" + fmt(b.h) + "' fill='none' stroke='#333333' stroke-width='1'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = b.x + b.w * i / 4.0;
        const double vx = x0 + (x1 - x0) * i / 4.0;
        out += "<line x1='" + fmt(fx) + "' y1='" + fmt(b.y + b.h) + "' x2='" + fmt(fx) +
               "' y2='" + fmt(b.y + b.h + 4) + "' stroke='#333333' stroke-width='1'/>\n";
        out += "<text x='" + fmt(fx) + "' y='" + fmt(b.y + b.h + 14) +
               "' font-size='" + fmt(font) + "' text-anchor='middle'>" + fmt_tick(vx) +
               "</text>\n";
        const double fy = b.y + b.h - b.h * i / 4.0;
        const double vy = y0 + (y1 - y0) * i / 4.0;
        out += "<line x1='" + fmt(b.x - 4) + "' y1='" + fmt(fy) + "' x2='" + fmt(b.x) +
               "' y2='" + fmt(fy) + "' stroke='#333333' stroke-width='1'/>\n";
        out += "<text x='" + fmt(b.x - 6) + "' y='" + fmt(fy + 3) + "' font-size='" +
               fmt(font) + "' text-anchor='end'>" + fmt_tick(vy) + "</text>\n";
    }
    out += "<text x='" + fmt(b.x + b.w / 2) + "' y='" + fmt(b.y + b.h + 30) +
           "' font-size='" + fmt(font + 2) + "' text-anchor='middle'>" + xlabel + "</text>\n";
    out += "<text x='" + fmt(b.x - 46) + "' y='" + fmt(b.y + b.h / 2) + "' font-size='" +
           fmt(font + 2) + "' text-anchor='middle' transform='rotate(-90 " + fmt(b.x - 46) +
           " " + fmt(b.y + b.h / 2) + ")'>" + ylabel + "</text>\n";
}

inline void draw_series(std::string& out, const Box& b, double x0, double x1, double y0,
                        double y1, const std::vector<Series>& ss) {
    int color = 0;
    for (const auto& s : ss) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            const double px = b.x + b.w * (s.x[i] - x0) / (x1 - x0);
            const double py = b.y + b.h * (1.0 - (s.y[i] - y0) / (y1 - y0));
            pts += fmt(px) + "," + fmt(py) + " ";
        }
        out += "<polyline fill='none' stroke='" + std::string(kPalette[color % 6]) +
               "' stroke-width='1.2' points='" + pts + "'/>\n";
        ++color;
    }
}

inline void draw_panel(std::string& out, const Panel& p, const Box& outer) {
    const Box b{outer.x + 56, outer.y + 24, outer.w - 72, outer.h - 64};
    double x0, x1, y0, y1;
    data_range(p.series, x0, x1, y0, y1);
    out += "<text x='" + fmt(b.x + b.w / 2) + "' y='" + fmt(outer.y + 14) +
           "' font-size='12' text-anchor='middle'>" + p.title + "</text>\n";
    draw_axes(out, b, x0, x1, y0, y1, p.xlabel, p.ylabel, 9.0);
    draw_series(out, b, x0, x1, y0, y1, p.series);
    int color = 0;
    for (const auto& s : p.series) {
        out += "<text x='" + fmt(b.x + b.w - 4) + "' y='" +
               fmt(b.y + 12 + 11 * color) + "' font-size='9' text-anchor='end' fill='" +
               detail::kPalette[color % 6] + "'>" + s.label + "</text>\n";
        ++color;
    }
    if (!p.inset.empty()) {
        const Box ib{b.x + 0.52 * b.w, b.y + 0.08 * b.h, 0.42 * b.w, 0.38 * b.h};
        double ix0, ix1, iy0, iy1;
        data_range(p.inset, ix0, ix1, iy0, iy1);
        out += "<rect x='" + fmt(ib.x) + "' y='" + fmt(ib.y) + "' width='" + fmt(ib.w) +
               "' height='" + fmt(ib.h) + "' fill='#ffffff' stroke='#777777'/>\n";
        draw_series(out, ib, ix0, ix1, iy0, iy1, p.inset);
        out += "<text x='" + fmt(ib.x + 2) + "' y='" + fmt(ib.y + 10) +
               "' font-size='8'>T &#8804; " + fmt_tick(ix1) + "</text>\n";
    }
}

} // namespace detail

inline std::string render_grid(const std::vector<Panel>& panels, int cols,
                               int panel_width = 360, int panel_height = 260) {
    if (panels.empty() || cols < 1) return "<svg xmlns='http://www.w3.org/2000/svg'/>\n";
    const int rows = static_cast<int>((panels.size() + cols - 1) / cols);
    const int width = cols * panel_width;
    const int height = rows * panel_height;
    std::string out = "<svg xmlns='http://www.w3.org/2000/svg' width='" +
                      std::to_string(width) + "' height='" + std::to_string(height) +
                      "' font-family='sans-serif'>\n<rect width='100%' height='100%' "
                      "fill='#ffffff'/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const int r = static_cast<int>(i) / cols;
        const int c = static_cast<int>(i) % cols;
        detail::draw_panel(out, panels[i],
                           {static_cast<double>(c * panel_width),
                            static_cast<double>(r * panel_height),
                            static_cast<double>(panel_width),
                            static_cast<double>(panel_height)});
    }
    out += "</svg>\n";
    return out;
}

} // namespace nmbloch::svg
