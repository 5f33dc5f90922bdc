#include "kerrsense/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace kerrsense::plot {

namespace {

constexpr double width = 720.0;
constexpr double height = 480.0;
constexpr double left = 90.0;
constexpr double right = 160.0;
constexpr double top = 40.0;
constexpr double bottom = 60.0;

constexpr const char* palette[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#333333"};

bool drawable(double v, Scale s) { return std::isfinite(v) && (s == Scale::Linear || v > 0.0); }

double to_axis(double v, Scale s) { return s == Scale::Log ? std::log10(v) : v; }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
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

std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        ticks.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

// Tick positions in axis space (log10 for log axes).
std::vector<double> ticks_for(double lo, double hi, Scale s) {
    if (s == Scale::Linear) {
        return linear_ticks(lo, hi);
    }
    const int first = static_cast<int>(std::ceil(lo));
    const int last = static_cast<int>(std::floor(hi));
    const int stride = std::max(1, (last - first) / 8 + 1);
    std::vector<double> ticks;
    for (int e = first; e <= last; e += stride) {
        ticks.push_back(e);
    }
    if (ticks.empty()) {
        return linear_ticks(lo, hi);
    }
    return ticks;
}

} // namespace

Range axis_range(std::span<const double> values, Scale scale) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (drawable(v, scale)) {
            lo = std::min(lo, to_axis(v, scale));
            hi = std::max(hi, to_axis(v, scale));
        }
    }
    if (!(lo <= hi)) {
        throw EmptyPlot("no drawable data for the axis");
    }
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    if (scale == Scale::Log) {
        return {std::pow(10.0, lo), std::pow(10.0, hi)};
    }
    return {lo, hi};
}

std::string render_svg(const Figure& fig) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : fig.series) {
        if (s.x.size() != s.y.size()) {
            throw std::invalid_argument("series '" + s.label + "' has mismatched x and y lengths");
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (drawable(s.x[i], fig.x.scale) && drawable(s.y[i], fig.y.scale)) {
                xs.push_back(s.x[i]);
                ys.push_back(s.y[i]);
            }
        }
    }
    if (xs.empty()) {
        throw EmptyPlot("nothing to plot: no finite data points");
    }
    const Range rx = axis_range(xs, fig.x.scale);
    const Range ry = axis_range(ys, fig.y.scale);
    const double x0 = to_axis(rx.lo, fig.x.scale);
    const double x1 = to_axis(rx.hi, fig.x.scale);
    const double y0 = to_axis(ry.lo, fig.y.scale);
    const double y1 = to_axis(ry.hi, fig.y.scale);
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto px = [&](double v) { return left + (to_axis(v, fig.x.scale) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return top + ph - (to_axis(v, fig.y.scale) - y0) / (y1 - y0) * ph; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!fig.title.empty()) {
        svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
            << escape(fig.title) << "</text>\n";
    }
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : ticks_for(x0, x1, fig.x.scale)) {
        const double v = fig.x.scale == Scale::Log ? std::pow(10.0, t) : t;
        const double x = left + (t - x0) / (x1 - x0) * pw;
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x) << "\" y2=\""
            << num(top + ph + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
            << tick_label(v) << "</text>\n";
    }
    for (double t : ticks_for(y0, y1, fig.y.scale)) {
        const double v = fig.y.scale == Scale::Log ? std::pow(10.0, t) : t;
        const double y = top + ph - (t - y0) / (y1 - y0) * ph;
        svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\""
            << num(y) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(v)
            << "</text>\n";
    }
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 15) << "\" text-anchor=\"middle\">"
        << escape(fig.x.label) << "</text>\n"
        << "<text transform=\"translate(18 " << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(fig.y.label) << "</text>\n";

    std::size_t index = 0;
    for (const auto& s : fig.series) {
        const char* colour = palette[index % std::size(palette)];
        std::vector<std::vector<std::pair<double, double>>> runs(1);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (drawable(s.x[i], fig.x.scale) && drawable(s.y[i], fig.y.scale)) {
                runs.back().emplace_back(px(s.x[i]), py(s.y[i]));
            } else if (!runs.back().empty()) {
                runs.emplace_back();
            }
        }
        for (const auto& run : runs) {
            if (run.size() >= 2) {
                svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
                    << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
                for (const auto& [x, y] : run) {
                    svg << num(x) << ',' << num(y) << ' ';
                }
                svg << "\"/>\n";
            } else if (run.size() == 1) {
                svg << "<circle cx=\"" << num(run[0].first) << "\" cy=\"" << num(run[0].second)
                    << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
            }
        }
        const double ly = top + 16.0 + 18.0 * static_cast<double>(index);
        const double lx = left + pw + 12.0;
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 24) << "\" y2=\""
            << num(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
            << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label) << "</text>\n";
        ++index;
    }
    svg << "</svg>\n";
    return svg.str();
}

void render_plot(const Figure& fig, const std::filesystem::path& path) {
    const std::string svg = render_svg(fig);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write plot to '" + path.string() + "'");
    }
    out << svg;
}

std::string Table::full_name(const std::string& name) const {
    for (const auto& h : header) {
        if (h == name || h.substr(0, h.find('[')) == name) {
            return h;
        }
    }
    throw std::invalid_argument("no column '" + name + "' in table");
}

const std::vector<double>& Table::column(const std::string& name) const {
    const std::string full = full_name(name);
    const auto it = std::find(header.begin(), header.end(), full);
    return columns[static_cast<std::size_t>(it - header.begin())];
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        return cells;
    };
    Table t;
    std::string line;
    if (!std::getline(in, line)) {
        throw EmptyPlot("'" + path.string() + "' is empty");
    }
    t.header = split(line);
    t.columns.resize(t.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        for (std::size_t i = 0; i < t.header.size(); ++i) {
            double v = std::numeric_limits<double>::quiet_NaN();
            if (i < cells.size()) {
                const auto& c = cells[i];
                const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
                if (res.ec != std::errc{} || res.ptr != c.data() + c.size()) {
                    v = std::numeric_limits<double>::quiet_NaN();
                }
            }
            t.columns[i].push_back(v);
        }
    }
    return t;
}

} // namespace kerrsense::plot
