// svg.hpp
// Standalone SVG stem and line plots, no external renderer.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "difflab/common.hpp"

namespace difflab {

namespace svgdetail {

inline constexpr double kW = 640, kH = 400, kMargin = 52;

struct Scale {
    double lo = 0, hi = 1;
    double map(double v, double out_lo, double out_hi) const {
        double t = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
        return out_lo + t * (out_hi - out_lo);
    }
};

inline Scale fit(const std::vector<double>& vs) {
    Scale s;
    if (vs.empty()) return Scale{0.0, 1.0};
    s.lo = *std::min_element(vs.begin(), vs.end());
    s.hi = *std::max_element(vs.begin(), vs.end());
    if (s.hi <= s.lo) {
        s.lo -= 0.5;
        s.hi += 0.5;
    }
    double pad = 0.05 * (s.hi - s.lo);
    s.lo -= pad;
    s.hi += pad;
    return s;
}

inline void open_svg(std::ofstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";
}

inline void axes(std::ofstream& out, const Scale& sx, const Scale& sy) {
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
        << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
        << kH - kMargin << "\" stroke=\"black\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", sx.lo);
    out << "<text x=\"" << kMargin << "\" y=\"" << kH - kMargin + 16
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", sx.hi);
    out << "<text x=\"" << kW - kMargin << "\" y=\"" << kH - kMargin + 16
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", sy.lo);
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kH - kMargin
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", sy.hi);
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << buf << "</text>\n";
}

}  // namespace svgdetail

// Vertical stems from the baseline, one per (x, y).
inline void write_stem_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::filesystem::path& path, const std::string& title = "") {
    using namespace svgdetail;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    open_svg(out, title);
    std::vector<double> ext_y = ys;
    ext_y.push_back(0.0);
    Scale sx = fit(xs), sy = fit(ext_y);
    axes(out, sx, sy);
    double y0 = sy.map(0.0, kH - kMargin, kMargin);
    for (size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        double px = sx.map(xs[i], kMargin, kW - kMargin);
        double py = sy.map(ys[i], kH - kMargin, kMargin);
        out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << py
            << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
        out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2.4\" fill=\"steelblue\"/>\n";
    }
    out << "</svg>\n";
}

// Connected polyline through (x, y) pairs.
inline void write_line_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::filesystem::path& path, const std::string& title = "") {
    using namespace svgdetail;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    open_svg(out, title);
    Scale sx = fit(xs), sy = fit(ys);
    axes(out, sx, sy);
    if (!xs.empty()) {
        out << "<polyline fill=\"none\" stroke=\"firebrick\" stroke-width=\"1.8\" points=\"";
        for (size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
            out << sx.map(xs[i], kMargin, kW - kMargin) << ","
                << sy.map(ys[i], kH - kMargin, kMargin) << " ";
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace difflab
