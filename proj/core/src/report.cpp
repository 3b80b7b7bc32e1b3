#include "nowcast/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "binary.hpp"
#include "nowcast/errors.hpp"

namespace nowcast {

std::string format_metrics_csv(std::span<const MetricRow> rows) {
  std::string out = "model,metric,lead_time,value\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%d,%.6f\n", r.lead_time, r.value);
    out += r.model + "," + r.metric + buf;
  }
  return out;
}

void write_metrics_csv(std::span<const MetricRow> rows, const std::filesystem::path& path) {
  detail::write_text_file(path, format_metrics_csv(rows));
}

std::array<std::uint8_t, 3> plot_colour(std::size_t k) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 6> kPalette = {{
      {31, 119, 180}, {214, 39, 40}, {44, 160, 44}, {255, 127, 14}, {148, 103, 189}, {23, 190, 207},
  }};
  return kPalette[k % kPalette.size()];
}

namespace {

struct Canvas {
  int w, h;
  std::vector<std::uint8_t> px;

  Canvas(int width, int height) : w(width), h(height), px(static_cast<std::size_t>(width) * height * 3, 255) {}

  void set(int x, int y, std::array<std::uint8_t, 3> c) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    const auto i = (static_cast<std::size_t>(y) * w + x) * 3;
    px[i] = c[0];
    px[i + 1] = c[1];
    px[i + 2] = c[2];
  }

  // Bresenham, 2 px thick.
  void line(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      set(x0, y0, c);
      set(x0, y0 + 1, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) { err += dy; x0 += sx; }
      if (e2 <= dx) { err += dx; y0 += sy; }
    }
  }
};

}  // namespace

std::vector<char> render_line_plot(std::span<const PlotSeries> series, int width, int height) {
  require(width >= 64 && height >= 64, ErrorKind::Config, "plot too small");
  Canvas cv(width, height);
  const int left = 40, right = width - 16, top = 16, bottom = height - 32;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n = 0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!(hi >= lo)) lo = 0.0, hi = 1.0;
  if (hi == lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const std::array<std::uint8_t, 3> axis{0, 0, 0}, grid{220, 220, 220};
  for (int k = 0; k <= 4; ++k) {
    const int y = bottom - (bottom - top) * k / 4;
    cv.line(left, y, right, y, grid);
  }
  cv.line(left, top, left, bottom, axis);
  cv.line(left, bottom, right, bottom, axis);

  auto xpos = [&](std::size_t i) {
    return n <= 1 ? left : left + static_cast<int>((right - left) * static_cast<double>(i) / static_cast<double>(n - 1));
  };
  auto ypos = [&](double v) { return bottom - static_cast<int>(std::lround((bottom - top) * (v - lo) / (hi - lo))); };
  for (std::size_t i = 0; i < n; ++i) cv.line(xpos(i), bottom, xpos(i), bottom + 4, axis);

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& v = series[k].values;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (std::isfinite(v[i]) && std::isfinite(v[i + 1])) {
        cv.line(xpos(i), ypos(v[i]), xpos(i + 1), ypos(v[i + 1]), plot_colour(k));
      }
    }
  }

  std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<char> out(header.begin(), header.end());
  out.insert(out.end(), cv.px.begin(), cv.px.end());
  return out;
}

void write_line_plot(std::span<const PlotSeries> series, const std::filesystem::path& path) {
  detail::write_file(path, render_line_plot(series));
}

}  // namespace nowcast
