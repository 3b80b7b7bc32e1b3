#pragma once

#include <cstddef>

#include "nowcast/grid.hpp"

namespace nowcast {

struct PreprocessConfig {
  double norm_divisor = 300.0;
  std::size_t pad_to = 256;
  float mask_fill = 1.0f;

  void validate() const;
  friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;
};

inline constexpr int kOtsuBins = 256;

/// Kelvin -> normalized units (value / divisor). No clamping above 1.
Field2D normalize_bt(const Field2D& kelvin, const PreprocessConfig& cfg = {});
Field2D denormalize_bt(const Field2D& normalized, const PreprocessConfig& cfg = {});

/// Result of the histogram search, kept for callers that need the bin.
struct OtsuResult {
  double threshold = 0.0;  // upper edge of the winning bin
  int bin = 0;
};

/// Otsu on a 256-bin histogram spanning [min, max] of the field. Bin values
/// are bin centres; ties go to the lowest bin. Throws Degenerate on a constant
/// field.
OtsuResult otsu_search(const Field2D& f);
double otsu_threshold(const Field2D& f);

/// Warm cells (value >= thr) are clear sky and become cfg.mask_fill.
Field2D apply_cloud_mask(const Field2D& f, double thr, const PreprocessConfig& cfg = {});

/// Zero border, content at offset floor((pad_to - n) / 2) on each axis.
Field2D pad_center(const Field2D& f, std::size_t pad_to);
Field2D crop_center(const Field2D& f, std::size_t rows, std::size_t cols);
inline Field2D crop_center(const Field2D& f, std::size_t to) { return crop_center(f, to, to); }

/// normalize -> per-frame Otsu mask -> pad. A frame without contrast (Otsu
/// degenerate) is left unmasked.
Field2D preprocess_frame(const Field2D& kelvin, const PreprocessConfig& cfg);
FrameSequence preprocess_sequence(const FrameSequence& kelvin, const PreprocessConfig& cfg);

}  // namespace nowcast
