#include "nowcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nowcast/errors.hpp"
#include "nowcast/rng.hpp"

namespace nowcast {

namespace {

// Signed shortest displacement on a ring of length n.
double wrap(double d, double n) {
  d = std::fmod(d, n);
  if (d < -n / 2) d += n;
  if (d >= n / 2) d -= n;
  return d;
}

}  // namespace

std::vector<BlobSpec> draw_blobs(const SyntheticConfig& cfg) {
  require(cfg.speed_max <= 2.0 && cfg.speed_min >= 0.0 && cfg.speed_min <= cfg.speed_max,
          ErrorKind::Config, "blob speeds must satisfy 0 <= min <= max <= 2 px/frame");
  require(cfg.min_bt_lo >= 200.0 && cfg.min_bt_hi <= 260.0 && cfg.min_bt_lo <= cfg.min_bt_hi,
          ErrorKind::Config, "blob minimum BT range must lie in [200, 260] K");
  Rng rng(cfg.seed);
  const double extent = static_cast<double>(std::min(cfg.rows, cfg.cols));
  std::vector<BlobSpec> blobs(cfg.n_blobs);
  for (auto& b : blobs) {
    b.row = rng.uniform(0.0, static_cast<double>(cfg.rows));
    b.col = rng.uniform(0.0, static_cast<double>(cfg.cols));
    const double speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    const double heading =
        (cfg.heading_deg + rng.uniform(-cfg.heading_spread_deg, cfg.heading_spread_deg)) *
        std::numbers::pi / 180.0;
    b.v_row = speed * std::sin(heading);
    b.v_col = speed * std::cos(heading);
    if (cfg.fixed_velocity) {
      b.v_row = cfg.fixed_velocity->first;
      b.v_col = cfg.fixed_velocity->second;
    }
    b.sigma = extent * rng.uniform(cfg.sigma_frac_min, cfg.sigma_frac_max);
    b.min_bt = rng.uniform(cfg.min_bt_lo, cfg.min_bt_hi);
    b.period = rng.uniform(16.0, 48.0);
    b.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return blobs;
}

FrameSequence render_blobs(const SyntheticConfig& cfg, const std::vector<BlobSpec>& blobs) {
  require(cfg.n_frames >= 1, ErrorKind::Config, "gen_synthetic needs at least one frame");
  require(cfg.rows > 0 && cfg.cols > 0, ErrorKind::Config, "gen_synthetic needs a non-empty grid");
  // Noise uses its own stream so blob draws stay stable if noise changes.
  Rng noise(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  const double rows = static_cast<double>(cfg.rows);
  const double cols = static_cast<double>(cfg.cols);

  std::vector<Field2D> frames;
  frames.reserve(cfg.n_frames);
  std::vector<double> depth(cfg.rows * cfg.cols);
  for (std::size_t t = 0; t < cfg.n_frames; ++t) {
    std::ranges::fill(depth, 0.0);
    const double td = static_cast<double>(t);
    for (const BlobSpec& b : blobs) {
      // Envelope in [0.2, 1]: the blob deepens and fills in smoothly.
      const double env = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * td / b.period + b.phase);
      const double amp = (kBackgroundBt - b.min_bt) * env;
      const double cr = b.row + b.v_row * td;
      const double cc = b.col + b.v_col * td;
      const double inv = 1.0 / (2.0 * b.sigma * b.sigma);
      for (std::size_t r = 0; r < cfg.rows; ++r) {
        const double dr = wrap(static_cast<double>(r) - cr, rows);
        for (std::size_t c = 0; c < cfg.cols; ++c) {
          const double dc = wrap(static_cast<double>(c) - cc, cols);
          depth[r * cfg.cols + c] += amp * std::exp(-(dr * dr + dc * dc) * inv);
        }
      }
    }
    std::vector<float> data(depth.size());
    for (std::size_t i = 0; i < depth.size(); ++i) {
      const double bt = kBackgroundBt - depth[i] + noise.uniform(-cfg.noise_k, cfg.noise_k);
      data[i] = static_cast<float>(std::clamp(bt, double{kSyntheticMinBt}, double{kSyntheticMaxBt}));
    }
    frames.emplace_back(cfg.rows, cfg.cols, std::move(data), Unit::Kelvin);
  }
  return FrameSequence(std::move(frames));
}

FrameSequence gen_synthetic(const SyntheticConfig& cfg) { return render_blobs(cfg, draw_blobs(cfg)); }

FrameSequence gen_synthetic(std::uint64_t seed, std::size_t n_frames, std::size_t rows,
                            std::size_t cols) {
  SyntheticConfig cfg;
  cfg.seed = seed;
  cfg.n_frames = n_frames;
  cfg.rows = rows;
  cfg.cols = cols;
  return gen_synthetic(cfg);
}

}  // namespace nowcast
