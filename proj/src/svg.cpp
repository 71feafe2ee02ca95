#include "fivebar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fivebar/errors.hpp"

namespace fivebar {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    double span() const { return hi - lo; }
};

// 1, 2 or 5 times a power of ten, giving roughly five intervals.
double tick_step(double span) {
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    if (norm < 1.5) return mag;
    if (norm < 3.5) return 2.0 * mag;
    if (norm < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    Range xr;
    Range yr;
    for (const PlotSeries& s : spec.series) {
        if (s.x.size() != s.y.size()) throw InputError("plot series '" + s.label + "' has mismatched x/y");
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    for (const Point& m : spec.markers) {
        xr.add(m.x);
        yr.add(m.y);
    }
    xr.finish();
    yr.finish();

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    if (spec.equal_aspect) {
        const double scale = std::max(xr.span() / plot_w, yr.span() / plot_h);
        const double cx = 0.5 * (xr.lo + xr.hi);
        const double cy = 0.5 * (yr.lo + yr.hi);
        xr.lo = cx - 0.5 * scale * plot_w;
        xr.hi = cx + 0.5 * scale * plot_w;
        yr.lo = cy - 0.5 * scale * plot_h;
        yr.hi = cy + 0.5 * scale * plot_h;
    }

    auto px = [&](double x) { return kLeft + (x - xr.lo) / xr.span() * plot_w; };
    auto py = [&](double y) { return kTop + (yr.hi - y) / yr.span() * plot_h; };

    std::ostringstream out;
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(spec.title) << "</text>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = tick_step(xr.span());
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi; t += xs) {
        const double x = px(t);
        out << "<line x1=\"" << x << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << x << "\" y2=\""
            << kTop + plot_h + 5 << "\" stroke=\"black\"/>";
        out << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
            << (std::abs(t) < 1e-9 * xs ? 0.0 : t) << "</text>\n";
    }
    const double ys = tick_step(yr.span());
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi; t += ys) {
        const double y = py(t);
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
            << "\" stroke=\"black\"/>";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
            << (std::abs(t) < 1e-9 * ys ? 0.0 : t) << "</text>\n";
    }
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
        << escape(spec.x_label) << "</text>\n";
    out << "<text transform=\"translate(16," << kTop + plot_h / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label) << "</text>\n";

    std::size_t colour = 0;
    for (const PlotSeries& s : spec.series) {
        const char* stroke = kPalette[colour++ % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "\"><title>" << escape(s.label) << "</title></polyline>\n";
    }
    for (const Point& m : spec.markers) {
        out << "<circle cx=\"" << px(m.x) << "\" cy=\"" << py(m.y) << "\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n";
    }

    double legend_y = kTop + 14;
    colour = 0;
    for (const PlotSeries& s : spec.series) {
        const char* stroke = kPalette[colour++ % std::size(kPalette)];
        out << "<line x1=\"" << kLeft + 10 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << kLeft + 30 << "\" y2=\""
            << legend_y - 4 << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>";
        out << "<text x=\"" << kLeft + 36 << "\" y=\"" << legend_y << "\">" << escape(s.label) << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace fivebar
