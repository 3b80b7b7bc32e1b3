#include "nowcast/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "nowcast/errors.hpp"

namespace nowcast {

void PreprocessConfig::validate() const {
  require(norm_divisor > 0.0 && std::isfinite(norm_divisor), ErrorKind::Config,
          "norm_divisor must be positive");
  require(pad_to > 0, ErrorKind::Config, "pad_to must be positive");
  require(std::isfinite(mask_fill), ErrorKind::Config, "mask_fill must be finite");
}

Field2D normalize_bt(const Field2D& kelvin, const PreprocessConfig& cfg) {
  cfg.validate();
  require(kelvin.unit() == Unit::Kelvin, ErrorKind::Data, "normalize_bt expects a kelvin field");
  for (float v : kelvin.values()) {
    require(v >= 0.0f, ErrorKind::Data, "negative brightness temperature");
  }
  const double d = cfg.norm_divisor;
  return field_map(kelvin, [d](float v) { return static_cast<float>(v / d); }, Unit::Normalized);
}

Field2D denormalize_bt(const Field2D& normalized, const PreprocessConfig& cfg) {
  cfg.validate();
  require(normalized.unit() == Unit::Normalized, ErrorKind::Data,
          "denormalize_bt expects a normalized field");
  const double d = cfg.norm_divisor;
  return field_map(normalized, [d](float v) { return static_cast<float>(v * d); }, Unit::Kelvin);
}

OtsuResult otsu_search(const Field2D& f) {
  require(!f.empty(), ErrorKind::Shape, "otsu on an empty field");
  const auto [lo_it, hi_it] = std::ranges::minmax_element(f.values());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) fail(ErrorKind::Degenerate, "otsu needs at least two distinct values");

  const double width = (hi - lo) / kOtsuBins;
  std::array<double, kOtsuBins> hist{};
  for (float v : f.values()) {
    const int b = std::min(kOtsuBins - 1, static_cast<int>((v - lo) / width));
    hist[static_cast<std::size_t>(b)] += 1.0;
  }

  const double total = static_cast<double>(f.size());
  double sum_all = 0.0;
  for (int b = 0; b < kOtsuBins; ++b) sum_all += hist[b] * (lo + (b + 0.5) * width);

  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  int best_bin = 0;
  for (int b = 0; b < kOtsuBins; ++b) {
    w0 += hist[b];
    sum0 += hist[b] * (lo + (b + 0.5) * width);
    const double w1 = total - w0;
    double between = 0.0;
    if (w0 > 0.0 && w1 > 0.0) {
      const double mu0 = sum0 / w0;
      const double mu1 = (sum_all - sum0) / w1;
      between = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
    }
    if (between > best) {
      best = between;
      best_bin = b;
    }
  }
  return {lo + (best_bin + 1) * width, best_bin};
}

double otsu_threshold(const Field2D& f) { return otsu_search(f).threshold; }

Field2D apply_cloud_mask(const Field2D& f, double thr, const PreprocessConfig& cfg) {
  require(std::isfinite(thr), ErrorKind::Data, "mask threshold must be finite");
  const float fill = cfg.mask_fill;
  return field_map(f, [thr, fill](float v) { return v >= thr ? fill : v; });
}

Field2D pad_center(const Field2D& f, std::size_t pad_to) {
  require(f.rows() <= pad_to && f.cols() <= pad_to, ErrorKind::Shape,
          "pad_center: field " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
              " larger than " + std::to_string(pad_to));
  const std::size_t r0 = (pad_to - f.rows()) / 2;
  const std::size_t c0 = (pad_to - f.cols()) / 2;
  std::vector<float> out(pad_to * pad_to, 0.0f);
  for (std::size_t r = 0; r < f.rows(); ++r) {
    auto row = f.values().subspan(r * f.cols(), f.cols());
    std::ranges::copy(row, out.begin() + static_cast<long>((r + r0) * pad_to + c0));
  }
  return Field2D(pad_to, pad_to, std::move(out), f.unit());
}

Field2D crop_center(const Field2D& f, std::size_t rows, std::size_t cols) {
  require(rows <= f.rows() && cols <= f.cols(), ErrorKind::Shape,
          "crop_center: target larger than field");
  const std::size_t r0 = (f.rows() - rows) / 2;
  const std::size_t c0 = (f.cols() - cols) / 2;
  std::vector<float> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = f.values().subspan((r + r0) * f.cols() + c0, cols);
    out.insert(out.end(), row.begin(), row.end());
  }
  return Field2D(rows, cols, std::move(out), f.unit());
}

Field2D preprocess_frame(const Field2D& kelvin, const PreprocessConfig& cfg) {
  Field2D norm = normalize_bt(kelvin, cfg);
  try {
    norm = apply_cloud_mask(norm, otsu_threshold(norm), cfg);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Degenerate) throw;
  }
  return pad_center(norm, cfg.pad_to);
}

FrameSequence preprocess_sequence(const FrameSequence& kelvin, const PreprocessConfig& cfg) {
  std::vector<Field2D> out;
  out.reserve(kelvin.size());
  for (const Field2D& f : kelvin) out.push_back(preprocess_frame(f, cfg));
  return FrameSequence(std::move(out));
}

}  // namespace nowcast
