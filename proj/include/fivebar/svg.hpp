#pragma once

#include <string>
#include <vector>

#include "fivebar/geometry.hpp"

namespace fivebar {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Line chart with optional point markers drawn on top of the series.
struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::vector<Point> markers;
    // Same scale on both axes (for effector paths).
    bool equal_aspect = false;
};

// Standalone SVG document.
std::string render_svg(const PlotSpec& spec);

}  // namespace fivebar
