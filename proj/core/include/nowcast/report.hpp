#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nowcast {

/// One line of a metrics report.
struct MetricRow {
  std::string model;
  std::string metric;
  int lead_time = 0;  // 1-based frame lead; hour aggregates use the hour index
  double value = 0.0;
};

/// "model,metric,lead_time,value", values with 6 decimals.
std::string format_metrics_csv(std::span<const MetricRow> rows);
void write_metrics_csv(std::span<const MetricRow> rows, const std::filesystem::path& path);

struct PlotSeries {
  std::string name;
  std::vector<double> values;  // y at x = 1, 2, ...
};

/// Binary PPM (P6) line chart of the series on shared axes; the colour of
/// series k is plot_colour(k).
std::vector<char> render_line_plot(std::span<const PlotSeries> series, int width = 640,
                                   int height = 400);
std::array<std::uint8_t, 3> plot_colour(std::size_t k);
void write_line_plot(std::span<const PlotSeries> series, const std::filesystem::path& path);

}  // namespace nowcast
