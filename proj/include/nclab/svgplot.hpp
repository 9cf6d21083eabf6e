#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nclab {

/// Minimal static line charts: axes, ticks, polylines, an optional horizontal
/// reference line. Enough to render metric trajectories; no dependency.
struct PlotSeries {
    std::string label;
    std::string color = "#1f6fb2";
    std::vector<std::pair<double, double>> points;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::optional<double> reference_y;  // dashed horizontal line
    std::optional<double> reference_x;  // dashed vertical line (phase boundary)
    bool log_y = false;                 // applied when all y > 0
    int width = 760;
    int height = 460;
};

std::string render_svg(const ChartSpec& spec);
void write_svg(const ChartSpec& spec, const std::filesystem::path& path);

}  // namespace nclab
