#pragma once

// Minimal deterministic SVG charts: scatter with class colors, multi-series
// line charts, and annotated heatmaps. Output depends only on the inputs.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace framemap::svg {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {
        "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
        "#aa3377", "#bbbbbb", "#000000", "#e69f00", "#56b4e9"};
    return colors;
}

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

inline std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
    void update(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi <= lo) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double margin = 0.05 * (hi - lo);
            lo -= margin;
            hi += margin;
        }
    }
};

struct Frame {
    double width = 640, height = 480;
    double left = 60, right = 20, top = 40, bottom = 45;
    Range xr, yr;
    double sx(double x) const {
        return left + (x - xr.lo) / (xr.hi - xr.lo) * (width - left - right);
    }
    double sy(double y) const {
        return height - bottom - (y - yr.lo) / (yr.hi - yr.lo) * (height - top - bottom);
    }
};

inline void open_svg(std::ostringstream& os, const Frame& f, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width)
       << "\" height=\"" << num(f.height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-size=\"14\">" << esc(title) << "</text>\n";
}

inline void draw_axes(std::ostringstream& os, const Frame& f, const std::string& xlabel,
                      const std::string& ylabel) {
    os << "<line x1=\"" << num(f.left) << "\" y1=\"" << num(f.height - f.bottom) << "\" x2=\""
       << num(f.width - f.right) << "\" y2=\"" << num(f.height - f.bottom)
       << "\" stroke=\"#333\"/>\n";
    os << "<line x1=\"" << num(f.left) << "\" y1=\"" << num(f.top) << "\" x2=\"" << num(f.left)
       << "\" y2=\"" << num(f.height - f.bottom) << "\" stroke=\"#333\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = f.xr.lo + (f.xr.hi - f.xr.lo) * t / 4.0;
        const double fy = f.yr.lo + (f.yr.hi - f.yr.lo) * t / 4.0;
        os << "<text x=\"" << num(f.sx(fx)) << "\" y=\"" << num(f.height - f.bottom + 16)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << num(fx) << "</text>\n";
        os << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(f.sy(fy) + 3)
           << "\" text-anchor=\"end\" font-size=\"10\">" << num(fy) << "</text>\n";
    }
    os << "<text x=\"" << num((f.left + f.width - f.right) / 2) << "\" y=\""
       << num(f.height - 8) << "\" text-anchor=\"middle\" font-size=\"11\">" << esc(xlabel)
       << "</text>\n";
    os << "<text x=\"14\" y=\"" << num((f.top + f.height - f.bottom) / 2)
       << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 "
       << num((f.top + f.height - f.bottom) / 2) << ")\">" << esc(ylabel) << "</text>\n";
}

}  // namespace detail

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    int group = 0;
};

inline std::string scatter(const std::string& title, const std::string& xlabel,
                           const std::string& ylabel, const std::vector<ScatterPoint>& points,
                           const std::vector<std::string>& group_names = {}) {
    detail::Frame f;
    for (const auto& p : points) {
        f.xr.update(p.x);
        f.yr.update(p.y);
    }
    f.xr.pad();
    f.yr.pad();
    std::ostringstream os;
    detail::open_svg(os, f, title);
    detail::draw_axes(os, f, xlabel, ylabel);
    const auto& colors = palette();
    for (const auto& p : points) {
        os << "<circle cx=\"" << detail::num(f.sx(p.x)) << "\" cy=\"" << detail::num(f.sy(p.y))
           << "\" r=\"2.5\" fill=\""
           << colors[static_cast<std::size_t>(p.group) % colors.size()]
           << "\" fill-opacity=\"0.75\"/>\n";
    }
    for (std::size_t g = 0; g < group_names.size(); ++g) {
        const double y = f.top + 14.0 * static_cast<double>(g);
        os << "<circle cx=\"" << detail::num(f.width - f.right - 120) << "\" cy=\""
           << detail::num(y) << "\" r=\"4\" fill=\"" << colors[g % colors.size()] << "\"/>\n";
        os << "<text x=\"" << detail::num(f.width - f.right - 112) << "\" y=\""
           << detail::num(y + 3) << "\" font-size=\"10\">" << detail::esc(group_names[g])
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

struct LineSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // sorted by x by the caller
};

inline std::string line_chart(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel,
                              const std::vector<LineSeries>& series) {
    detail::Frame f;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            f.xr.update(x);
            f.yr.update(y);
        }
    }
    f.xr.pad();
    f.yr.pad();
    std::ostringstream os;
    detail::open_svg(os, f, title);
    detail::draw_axes(os, f, xlabel, ylabel);
    const auto& colors = palette();
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& color = colors[s % colors.size()];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[s].points) {
            os << detail::num(f.sx(x)) << "," << detail::num(f.sy(y)) << " ";
        }
        os << "\"/>\n";
        const double ly = f.top + 14.0 * static_cast<double>(s);
        os << "<line x1=\"" << detail::num(f.width - f.right - 130) << "\" y1=\""
           << detail::num(ly) << "\" x2=\"" << detail::num(f.width - f.right - 114) << "\" y2=\""
           << detail::num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << detail::num(f.width - f.right - 110) << "\" y=\""
           << detail::num(ly + 3) << "\" font-size=\"10\">" << detail::esc(series[s].name)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// Diverging blue-white-red map over [-1, 1]; NaN cells render gray with "NA".
inline std::string heatmap(const std::string& title, const std::vector<std::string>& labels,
                           const std::vector<std::vector<double>>& values) {
    const std::size_t n = labels.size();
    const double cell = 46.0, left = 150.0, top = 60.0;
    const double width = left + cell * static_cast<double>(n) + 20.0;
    const double height = top + cell * static_cast<double>(n) + 120.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(width)
       << "\" height=\"" << detail::num(height) << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << detail::num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-size=\"14\">" << detail::esc(title) << "</text>\n";
    for (std::size_t r = 0; r < n; ++r) {
        os << "<text x=\"" << detail::num(left - 6) << "\" y=\""
           << detail::num(top + cell * (static_cast<double>(r) + 0.6)) << "\" text-anchor=\"end\" "
           << "font-size=\"9\">" << detail::esc(labels[r]) << "</text>\n";
        const double cx = left + cell * (static_cast<double>(r) + 0.5);
        const double cy = top + cell * static_cast<double>(n) + 10.0;
        os << "<text x=\"" << detail::num(cx) << "\" y=\"" << detail::num(cy)
           << "\" text-anchor=\"end\" font-size=\"9\" transform=\"rotate(-45 " << detail::num(cx)
           << " " << detail::num(cy) << ")\">" << detail::esc(labels[r]) << "</text>\n";
        for (std::size_t c = 0; c < n; ++c) {
            const double v = values[r][c];
            std::string fill = "#cccccc";
            std::string label = "NA";
            if (!std::isnan(v)) {
                const double t = std::max(-1.0, std::min(1.0, v));
                int red, green, blue;
                if (t >= 0.0) {
                    red = 255;
                    green = blue = static_cast<int>(std::lround(255.0 * (1.0 - t)));
                } else {
                    blue = 255;
                    red = green = static_cast<int>(std::lround(255.0 * (1.0 + t)));
                }
                std::ostringstream hex;
                hex << "#" << std::hex << std::setfill('0') << std::setw(2) << red
                    << std::setw(2) << green << std::setw(2) << blue;
                fill = hex.str();
                label = detail::num(v);
            }
            const double x = left + cell * static_cast<double>(c);
            const double y = top + cell * static_cast<double>(r);
            os << "<rect x=\"" << detail::num(x) << "\" y=\"" << detail::num(y) << "\" width=\""
               << detail::num(cell) << "\" height=\"" << detail::num(cell) << "\" fill=\"" << fill
               << "\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";
            os << "<text x=\"" << detail::num(x + cell / 2) << "\" y=\""
               << detail::num(y + cell / 2 + 3) << "\" text-anchor=\"middle\" font-size=\"9\">"
               << label << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace framemap::svg
