#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kerrsense::plot {

class EmptyPlot : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Scale { Linear, Log };

struct Axis {
    std::string label;
    Scale scale = Scale::Linear;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Figure {
    std::string title;
    Axis x;
    Axis y;
    std::vector<Series> series;
};

// Axis bounds in data units: the drawable data range widened by 5% of its
// span on each side (in log10 space for log axes). A degenerate range is
// first opened to ±0.5 (one decade for log axes).
struct Range {
    double lo = 0.0;
    double hi = 0.0;
};
Range axis_range(std::span<const double> values, Scale scale);

// Standalone SVG. Non-finite points, and non-positive ones on log axes, are
// skipped; throws EmptyPlot when nothing is left to draw.
std::string render_svg(const Figure& fig);
void render_plot(const Figure& fig, const std::filesystem::path& path);

// Column-oriented view of a CSV written by this tool.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;  // non-numeric cells read as NaN

    // Matches the full header ("eta[2pi*MHz]") or its name before the unit ("eta").
    const std::vector<double>& column(const std::string& name) const;
    std::string full_name(const std::string& name) const;
};
Table read_csv(const std::filesystem::path& path);

} // namespace kerrsense::plot
