#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "common/artifacts.hpp"
#include "common/value.hpp"

namespace geoagent::viz {

enum class VizKind { none, line, bar, points, heatmap };

std::string_view to_string(VizKind k);
VizKind viz_kind_from_string(std::string_view s);

struct VisualizationSpec {
    VizKind kind = VizKind::none;
    std::string x, y;    // plots
    std::string series;  // optional grouping column for plots
    std::string lat = "latitude", lon = "longitude";
    std::string title;
};

struct PlotStats {
    std::vector<std::size_t> series_lengths;
    std::size_t ticks = 0;
};

struct HeatBin {
    int row = 0, col = 0;  // row counts up from lat_min, col from lon_min
    std::size_t count = 0;
    double lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;
};

struct MapStats {
    std::size_t accepted = 0;
    std::size_t skipped = 0;
    std::vector<HeatBin> bins;  // heatmap only, non-empty bins in row-major order
};

inline constexpr int kHeatmapGrid = 64;
inline constexpr std::size_t kHeatmapThreshold = 200;

// Self-contained SVG. Line: one <polyline class="series"> per series; bar:
// one <rect> per input row and no other rect; one tick per distinct x.
std::string render_plot_svg(const VisualizationSpec& spec, const CsvTable& table, PlotStats* stats = nullptr);

// Self-contained HTML with an inline SVG canvas (no basemap). Points: one
// <circle class="marker"> per accepted row. Heatmap: grid x grid bins over
// the accepted rows' extent, one <rect class="bin"> per non-empty bin, bin
// counts also embedded as JSON.
std::string render_map_html(const VisualizationSpec& spec, const CsvTable& table, MapStats* stats = nullptr,
                            int grid = kHeatmapGrid);

// line for a temporal x, bar for a categorical x, heatmap/points for
// coordinates (heatmap above kHeatmapThreshold rows), none for a single cell.
VisualizationSpec choose_visualization(const CsvTable& table);

ArtifactRecord save_plot(ArtifactStore& store, std::string_view session, const VisualizationSpec& spec,
                         const CsvTable& table, std::string_view source, PlotStats* stats = nullptr);
ArtifactRecord save_map(ArtifactStore& store, std::string_view session, const VisualizationSpec& spec,
                        const CsvTable& table, std::string_view source, MapStats* stats = nullptr);

}  // namespace geoagent::viz
