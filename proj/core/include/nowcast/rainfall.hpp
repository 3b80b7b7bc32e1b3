#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nowcast/grid.hpp"

namespace nowcast {

/// R = alpha * max(0, 300 - T)^beta, R in mm/h and T in kelvin.
struct TransformCoeffs {
  double alpha = 0.0163;
  double beta = 1.56;

  void validate() const;
};

inline constexpr double kTransformReferenceK = 300.0;
inline constexpr int kRadarUpsample = 6;
inline constexpr std::size_t kSatelliteGrid = 252;
inline constexpr std::size_t kRadarGrid = kSatelliteGrid * kRadarUpsample;
inline constexpr double kHoursCovered = 4.0;

double bt_to_rain(double kelvin, const TransformCoeffs& c);
Field2D bt_to_rain(const Field2D& kelvin, const TransformCoeffs& c);

struct CalibrationSample {
  double kelvin = 0.0;
  double rain = 0.0;  // mm/h
};

/// Ordinary least squares of log R on log(300 - T) over samples with T < 300
/// and R > 0; alpha = exp(intercept), beta = slope.
TransformCoeffs calibrate_transform(std::span<const CalibrationSample> samples);

/// Bilinear upsampling by an integer factor with half-pixel centres:
/// source coordinate = (dst + 0.5) / factor - 0.5, clamped to the edges.
Field2D upsample_bilinear(const Field2D& f, int factor = kRadarUpsample);

/// The fixed 252 -> 1512 satellite-to-radar step. Rejects any other size.
Field2D upsample_to_radar_grid(const Field2D& f);

/// Accumulation over the 4 h horizon: mean of the 16 rates times 4 h.
Field2D cumulative_rain(std::span<const Field2D> rates);

/// Half-open pixel rectangle.
struct RegionOfInterest {
  std::string id;
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t row1 = 0;
  std::size_t col1 = 0;
};

double roi_average(const Field2D& f, const RegionOfInterest& roi);

/// Piecewise-constant CDF, P(accumulation <= threshold).
struct ThresholdCDF {
  std::vector<std::pair<double, double>> pairs;  // (threshold mm, cumulative probability)

  /// Strictly increasing thresholds, non-decreasing probabilities in [0, 1],
  /// final probability 1.
  bool valid() const;
  friend bool operator==(const ThresholdCDF&, const ThresholdCDF&) = default;
};

/// v < 2 mm: [(v, 1)]. Otherwise [(max(0, v - 1), 0.5), (v - 0.5, 0.75), (v + 2, 1)].
ThresholdCDF to_threshold_cdf(double v);

/// CSV "roi_id,threshold_mm,probability", values with 6 decimals.
std::string format_cdf_csv(std::span<const std::pair<std::string, ThresholdCDF>> rows);
void write_cdf_csv(std::span<const std::pair<std::string, ThresholdCDF>> rows,
                   const std::filesystem::path& path);

}  // namespace nowcast
