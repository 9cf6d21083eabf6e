#include "nclab/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nclab {

namespace {

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range pad(Range r) {
    if (r.lo == r.hi) {
        r.lo -= 0.5;
        r.hi += 0.5;
        return r;
    }
    const double margin = 0.04 * (r.hi - r.lo);
    return {r.lo - margin, r.hi + margin};
}

std::string fmt_tick(double v) {
    std::ostringstream out;
    const double av = std::fabs(v);
    if (v != 0.0 && (av >= 1e4 || av < 1e-3)) {
        out.precision(1);
        out << std::scientific << v;
    } else {
        out.precision(4);
        out << v;
    }
    return out.str();
}

}  // namespace

std::string render_svg(const ChartSpec& spec) {
    if (spec.series.empty()) throw std::invalid_argument("render_svg: no series");

    bool log_y = spec.log_y;
    Range xr{1e300, -1e300}, yr{1e300, -1e300};
    std::size_t n_points = 0;
    for (const auto& s : spec.series) {
        for (const auto& [x, y] : s.points) {
            ++n_points;
            xr.lo = std::min(xr.lo, x);
            xr.hi = std::max(xr.hi, x);
            yr.lo = std::min(yr.lo, y);
            yr.hi = std::max(yr.hi, y);
            if (y <= 0.0) log_y = false;
        }
    }
    if (n_points == 0) throw std::invalid_argument("render_svg: no points");
    if (spec.reference_y) {
        yr.lo = std::min(yr.lo, *spec.reference_y);
        yr.hi = std::max(yr.hi, *spec.reference_y);
        if (*spec.reference_y <= 0.0) log_y = false;
    }
    if (log_y) {
        yr.lo = std::log10(yr.lo);
        yr.hi = std::log10(yr.hi);
    }
    xr = pad(xr);
    yr = pad(yr);

    const double ml = 74, mr = 20, mt = 40, mb = 52;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto sx = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double y) {
        const double v = log_y ? std::log10(y) : y;
        return mt + (yr.hi - v) / (yr.hi - yr.lo) * ph;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
        << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width << " "
        << spec.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << spec.title << "</text>\n";

    // Frame and ticks.
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double px = sx(fx);
        svg << "<line x1=\"" << px << "\" y1=\"" << mt + ph << "\" x2=\"" << px
            << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << mt + ph + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(fx) << "</text>\n";
        const double fv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        const double py = mt + ph - ph * i / kTicks;
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml
            << "\" y2=\"" << py << "\" stroke=\"#444\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(log_y ? std::pow(10.0, fv) : fv) << "</text>\n";
    }
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << spec.x_label << "</text>\n";
    svg << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << spec.y_label
        << "</text>\n";

    if (spec.reference_y) {
        const double py = sy(*spec.reference_y);
        svg << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << ml + pw
            << "\" y2=\"" << py
            << "\" stroke=\"#b22222\" stroke-dasharray=\"6,4\"/>\n";
    }
    if (spec.reference_x && *spec.reference_x >= xr.lo && *spec.reference_x <= xr.hi) {
        const double px = sx(*spec.reference_x);
        svg << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px
            << "\" y2=\"" << mt + ph
            << "\" stroke=\"#888\" stroke-dasharray=\"3,3\"/>\n";
    }

    int legend_y = static_cast<int>(mt) + 14;
    for (const auto& s : spec.series) {
        svg << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points) svg << sx(x) << "," << sy(y) << " ";
        svg << "\"/>\n";
        if (!s.label.empty() && spec.series.size() > 1) {
            svg << "<text x=\"" << ml + pw - 8 << "\" y=\"" << legend_y
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
                << "fill=\"" << s.color << "\">" << s.label << "</text>\n";
            legend_y += 15;
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_svg(const ChartSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << render_svg(spec);
}

}  // namespace nclab
