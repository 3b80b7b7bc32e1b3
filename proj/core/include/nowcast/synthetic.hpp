#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nowcast/grid.hpp"

namespace nowcast {

/// One cold cloud blob. Positions are in pixels on a periodic domain so blobs
/// leaving one edge re-enter at the other.
struct BlobSpec {
  double row = 0.0;
  double col = 0.0;
  double v_row = 0.0;  // px / frame
  double v_col = 0.0;
  double sigma = 2.0;  // px
  double min_bt = 230.0;  // K reached at peak amplitude
  double period = 24.0;   // frames for one grow/decay cycle
  double phase = 0.0;     // radians
};

struct SyntheticConfig {
  std::uint64_t seed = 0;
  std::size_t n_frames = 1;
  std::size_t rows = 252;
  std::size_t cols = 252;
  std::size_t n_blobs = 5;
  double speed_min = 0.5;
  double speed_max = 2.0;
  /// Mean heading in degrees (0 = +col, 90 = +row) and half-width of the spread.
  double heading_deg = 0.0;
  double heading_spread_deg = 180.0;
  /// Blob width as a fraction of min(rows, cols).
  double sigma_frac_min = 0.06;
  double sigma_frac_max = 0.12;
  double min_bt_lo = 200.0;
  double min_bt_hi = 260.0;
  double noise_k = 0.25;
  /// Overrides every blob's velocity when set (v_row, v_col).
  std::optional<std::pair<double, double>> fixed_velocity;
};

inline constexpr float kBackgroundBt = 290.0f;
inline constexpr float kSyntheticMinBt = 180.0f;
inline constexpr float kSyntheticMaxBt = 300.0f;

/// Blob parameters drawn from cfg.seed.
std::vector<BlobSpec> draw_blobs(const SyntheticConfig& cfg);

/// Renders the given blobs over a 290 K background with seeded pixel noise.
FrameSequence render_blobs(const SyntheticConfig& cfg, const std::vector<BlobSpec>& blobs);

/// Advecting cold-blob brightness temperatures in kelvin, values in [180, 300].
/// Deterministic in cfg.
FrameSequence gen_synthetic(const SyntheticConfig& cfg);

/// Shorthand with default regime parameters.
FrameSequence gen_synthetic(std::uint64_t seed, std::size_t n_frames, std::size_t rows,
                            std::size_t cols);

}  // namespace nowcast
