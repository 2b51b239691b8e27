#pragma once

// Deterministic SVG scatter of ensemble candidates (accuracy on x, gap on y).

#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fairlens/ensemble.hpp"
#include "fairlens/error.hpp"

namespace fairlens::svg {

struct Marker {
    std::string label;
    double accuracy = 0.0;
    double gap = 0.0;
};

struct ScatterOptions {
    double width = 640.0;
    double height = 480.0;
    double margin = 60.0;
    std::vector<double> hlines;  // constant gap
    std::vector<double> vlines;  // constant accuracy
    std::string x_label = "accuracy";
    std::string y_label = "gap";
    std::string title;
};

namespace detail {

inline std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

inline std::string escape(const std::string& s) {
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

struct Axis {
    double lo, hi;
    double pixel_lo, pixel_hi;
    double map(double v) const { return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo); }
};

inline Axis make_axis(double lo, double hi, double p0, double p1) {
    if (hi - lo < 1e-9) {
        lo -= 0.01;
        hi += 0.01;
    }
    double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad, p0, p1};
}

} // namespace detail

struct PlotFrame {
    detail::Axis x, y;
    double left, right, top, bottom;
};

// Data-to-pixel mapping used by render_scatter for these inputs.
inline PlotFrame plot_frame(const std::vector<ensemble::EnsembleCandidate>& candidates,
                            const std::vector<Marker>& individuals, const ScatterOptions& opt = {}) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto extend = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const auto& c : candidates)
        if (c.gap) extend(c.accuracy, *c.gap);
    for (const auto& m : individuals) extend(m.accuracy, m.gap);
    if (xmin > xmax) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    for (double h : opt.hlines) {
        ymin = std::min(ymin, h);
        ymax = std::max(ymax, h);
    }
    for (double v : opt.vlines) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    PlotFrame f;
    f.left = opt.margin;
    f.right = opt.width - opt.margin / 2.0;
    f.top = opt.margin / 2.0;
    f.bottom = opt.height - opt.margin;
    f.x = detail::make_axis(xmin, xmax, f.left, f.right);
    f.y = detail::make_axis(ymin, ymax, f.bottom, f.top);
    return f;
}

// Candidates are small circles (class "candidate"), frontier points larger circles
// (class "frontier"), individual models labeled crosses (class "individual").
// Candidates with an undefined gap are not drawn.
inline std::string render_scatter(const std::vector<ensemble::EnsembleCandidate>& candidates,
                                  const ensemble::ParetoFrontier& frontier, const std::vector<Marker>& individuals,
                                  const ScatterOptions& opt = {}) {
    if (candidates.empty()) throw ValidationError("cannot render a scatter of zero candidates");
    const auto frame = plot_frame(candidates, individuals, opt);
    const auto& ax = frame.x;
    const auto& ay = frame.y;
    const double left = frame.left, right = frame.right, top = frame.top, bottom = frame.bottom;
    using detail::fixed;

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(opt.width) + "\" height=\"" + fixed(opt.height) +
         "\" viewBox=\"0 0 " + fixed(opt.width) + " " + fixed(opt.height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + fixed(opt.width) + "\" height=\"" + fixed(opt.height) + "\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        s += "<text class=\"title\" x=\"" + fixed(opt.width / 2) + "\" y=\"" + fixed(top - 8) +
             "\" text-anchor=\"middle\" font-size=\"14\">" + detail::escape(opt.title) + "</text>\n";

    // axes with five ticks each
    s += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" + fixed(right) + "\" y2=\"" + fixed(bottom) + "\"/>\n";
    s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" + fixed(left) + "\" y2=\"" + fixed(top) + "\"/>\n";
    s += "</g>\n<g class=\"ticks\" font-size=\"10\" fill=\"black\">\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = ax.lo + (ax.hi - ax.lo) * i / 4.0;
        double yv = ay.lo + (ay.hi - ay.lo) * i / 4.0;
        s += "<text x=\"" + fixed(ax.map(xv)) + "\" y=\"" + fixed(bottom + 14) + "\" text-anchor=\"middle\">" + fixed(xv) + "</text>\n";
        s += "<text x=\"" + fixed(left - 4) + "\" y=\"" + fixed(ay.map(yv) + 3) + "\" text-anchor=\"end\">" + fixed(yv) + "</text>\n";
    }
    s += "</g>\n";
    s += "<text class=\"xlabel\" x=\"" + fixed((left + right) / 2) + "\" y=\"" + fixed(opt.height - 20) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + detail::escape(opt.x_label) + "</text>\n";
    s += "<text class=\"ylabel\" x=\"16\" y=\"" + fixed((top + bottom) / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
         fixed((top + bottom) / 2) + ")\">" + detail::escape(opt.y_label) + "</text>\n";

    for (double h : opt.hlines)
        s += "<line class=\"refline\" x1=\"" + fixed(left) + "\" y1=\"" + fixed(ay.map(h)) + "\" x2=\"" + fixed(right) + "\" y2=\"" +
             fixed(ay.map(h)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (double v : opt.vlines)
        s += "<line class=\"refline\" x1=\"" + fixed(ax.map(v)) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" + fixed(ax.map(v)) + "\" y2=\"" +
             fixed(top) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

    s += "<g class=\"candidate-points\" fill=\"#9ecae1\">\n";
    for (const auto& c : candidates)
        if (c.gap)
            s += "<circle class=\"candidate\" cx=\"" + fixed(ax.map(c.accuracy)) + "\" cy=\"" + fixed(ay.map(*c.gap)) + "\" r=\"2\"/>\n";
    s += "</g>\n<g class=\"frontier-points\" fill=\"#636363\">\n";
    for (const auto& c : frontier.points)
        s += "<circle class=\"frontier\" cx=\"" + fixed(ax.map(c.accuracy)) + "\" cy=\"" + fixed(ay.map(*c.gap)) + "\" r=\"4\"/>\n";
    s += "</g>\n<g class=\"individuals\" stroke=\"#d62728\" stroke-width=\"2\" font-size=\"10\">\n";
    for (const auto& m : individuals) {
        double cx = ax.map(m.accuracy), cy = ay.map(m.gap);
        s += "<path class=\"individual\" d=\"M" + fixed(cx - 5) + " " + fixed(cy - 5) + " L" + fixed(cx + 5) + " " + fixed(cy + 5) +
             " M" + fixed(cx - 5) + " " + fixed(cy + 5) + " L" + fixed(cx + 5) + " " + fixed(cy - 5) + "\"/>\n";
        s += "<text class=\"individual-label\" x=\"" + fixed(cx + 7) + "\" y=\"" + fixed(cy - 7) + "\" stroke=\"none\" fill=\"#d62728\">" +
             detail::escape(m.label) + "</text>\n";
    }
    s += "</g>\n</svg>\n";
    return s;
}

} // namespace fairlens::svg
