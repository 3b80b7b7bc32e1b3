#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nowcast/grid.hpp"
#include "nowcast/rainfall.hpp"

namespace nowcast {

double rmse(const Field2D& pred, const Field2D& obs);
/// Mean error, pred - obs.
double bias(const Field2D& pred, const Field2D& obs);

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 300.0;  // L; 300 for kelvin fields
};

/// Mean SSIM over all window positions that fit entirely inside the field,
/// with Gaussian-weighted local moments.
double ssim(const Field2D& pred, const Field2D& obs, const SsimConfig& cfg = {});

struct ContingencyCounts {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
  std::size_t correct_negatives = 0;

  std::size_t total() const { return hits + misses + false_alarms + correct_negatives; }
  friend bool operator==(const ContingencyCounts&, const ContingencyCounts&) = default;
};

/// A cell is an event where value >= thr.
ContingencyCounts contingency(const Field2D& pred, const Field2D& obs, double thr);

/// Undefined ratios (zero denominators) are empty rather than NaN.
struct CategoricalScores {
  std::optional<double> pod;
  std::optional<double> far;
  std::optional<double> f1;
};

CategoricalScores pod_far_f1(const ContingencyCounts& c);

/// Integral over [0, upper] of (F(x) - 1{x >= y})^2, F the right-continuous
/// step CDF through the pairs (0 before the first threshold). Exact.
double crps_step(const ThresholdCDF& cdf, double y, double upper);
/// Upper bound max(final threshold, y) + 1 mm.
double crps_step(const ThresholdCDF& cdf, double y);

inline constexpr double kActiveRainMm = 5.0;
inline constexpr double kActiveFraction = 0.05;

/// Frames where strictly more than 5% of cells strictly exceed 5 mm.
std::vector<std::pair<std::size_t, Field2D>> active_scene_filter(std::span<const Field2D> frames);

}  // namespace nowcast
