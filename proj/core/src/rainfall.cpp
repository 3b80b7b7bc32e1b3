#include "nowcast/rainfall.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "binary.hpp"
#include "nowcast/errors.hpp"

namespace nowcast {

void TransformCoeffs::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0 && std::isfinite(beta) && beta > 0.0,
          ErrorKind::Config, "transform coefficients must be finite and positive");
}

double bt_to_rain(double kelvin, const TransformCoeffs& c) {
  const double cooling = kTransformReferenceK - kelvin;
  return cooling > 0.0 ? c.alpha * std::pow(cooling, c.beta) : 0.0;
}

Field2D bt_to_rain(const Field2D& kelvin, const TransformCoeffs& c) {
  c.validate();
  require(kelvin.unit() == Unit::Kelvin, ErrorKind::Data, "bt_to_rain expects a kelvin field");
  return field_map(
      kelvin, [&c](float t) { return static_cast<float>(bt_to_rain(static_cast<double>(t), c)); },
      Unit::MmPerH);
}

TransformCoeffs calibrate_transform(std::span<const CalibrationSample> samples) {
  double n = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& s : samples) {
    if (s.kelvin < kTransformReferenceK && s.rain > 0.0) {
      n += 1.0;
      sx += std::log(kTransformReferenceK - s.kelvin);
      sy += std::log(s.rain);
    }
  }
  require(n >= 2.0, ErrorKind::Degenerate,
          "calibration needs at least two samples with T < 300 K and R > 0");
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    if (s.kelvin < kTransformReferenceK && s.rain > 0.0) {
      const double dx = std::log(kTransformReferenceK - s.kelvin) - mx;
      sxx += dx * dx;
      sxy += dx * (std::log(s.rain) - my);
    }
  }
  if (!(sxx > 0.0)) fail(ErrorKind::Degenerate, "calibration samples all share one temperature");
  const double beta = sxy / sxx;
  return TransformCoeffs{std::exp(my - beta * mx), beta};
}

Field2D upsample_bilinear(const Field2D& f, int factor) {
  require(factor >= 1, ErrorKind::Config, "upsampling factor must be positive");
  require(!f.empty(), ErrorKind::Shape, "cannot upsample an empty field");
  const std::size_t R = f.rows();
  const std::size_t C = f.cols();
  const std::size_t out_r = R * static_cast<std::size_t>(factor);
  const std::size_t out_c = C * static_cast<std::size_t>(factor);

  struct Tap {
    std::size_t i0, i1;
    double w;
  };
  auto taps = [factor](std::size_t n_out, std::size_t n_in) {
    std::vector<Tap> t(n_out);
    const double hi = static_cast<double>(n_in - 1);
    for (std::size_t d = 0; d < n_out; ++d) {
      const double s = std::clamp((static_cast<double>(d) + 0.5) / factor - 0.5, 0.0, hi);
      const auto i0 = static_cast<std::size_t>(s);
      t[d] = {i0, std::min(i0 + 1, n_in - 1), s - static_cast<double>(i0)};
    }
    return t;
  };
  const auto tr = taps(out_r, R);
  const auto tc = taps(out_c, C);

  auto src = f.values();
  std::vector<float> out(out_r * out_c);
  for (std::size_t r = 0; r < out_r; ++r) {
    const Tap& y = tr[r];
    for (std::size_t c = 0; c < out_c; ++c) {
      const Tap& x = tc[c];
      // a + w (b - a) keeps constants exact and stays inside [a, b].
      const double a0 = src[y.i0 * C + x.i0];
      const double b0 = src[y.i0 * C + x.i1];
      const double a1 = src[y.i1 * C + x.i0];
      const double b1 = src[y.i1 * C + x.i1];
      const double top = a0 + x.w * (b0 - a0);
      const double bot = a1 + x.w * (b1 - a1);
      out[r * out_c + c] = static_cast<float>(top + y.w * (bot - top));
    }
  }
  return Field2D(out_r, out_c, std::move(out), f.unit());
}

Field2D upsample_to_radar_grid(const Field2D& f) {
  require(f.rows() == kSatelliteGrid && f.cols() == kSatelliteGrid, ErrorKind::Shape,
          "radar upsampling expects a 252x252 field");
  return upsample_bilinear(f, kRadarUpsample);
}

Field2D cumulative_rain(std::span<const Field2D> rates) {
  require(rates.size() == 16, ErrorKind::Shape,
          "cumulative rainfall needs exactly 16 frames, got " + std::to_string(rates.size()));
  const Field2D& first = rates.front();
  std::vector<double> acc(first.size(), 0.0);
  for (const Field2D& f : rates) {
    require(f.same_shape(first), ErrorKind::Shape, "cumulative rainfall: frame shape mismatch");
    require(f.unit() == Unit::MmPerH, ErrorKind::Data, "cumulative rainfall expects mm/h frames");
    auto v = f.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  std::vector<float> out(acc.size());
  const double n = static_cast<double>(rates.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / n * kHoursCovered);
  return Field2D(first.rows(), first.cols(), std::move(out), Unit::Mm);
}

double roi_average(const Field2D& f, const RegionOfInterest& roi) {
  require(roi.row0 < roi.row1 && roi.row1 <= f.rows() && roi.col0 < roi.col1 && roi.col1 <= f.cols(),
          ErrorKind::Shape, "region of interest '" + roi.id + "' is empty or outside the field");
  double sum = 0.0;
  for (std::size_t r = roi.row0; r < roi.row1; ++r) {
    for (std::size_t c = roi.col0; c < roi.col1; ++c) sum += f.at(r, c);
  }
  return sum / static_cast<double>((roi.row1 - roi.row0) * (roi.col1 - roi.col0));
}

bool ThresholdCDF::valid() const {
  if (pairs.empty() || pairs.back().second != 1.0) return false;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [t, p] = pairs[i];
    if (!std::isfinite(t) || !(p >= 0.0 && p <= 1.0)) return false;
    if (i > 0 && !(t > pairs[i - 1].first && p >= pairs[i - 1].second)) return false;
  }
  return true;
}

ThresholdCDF to_threshold_cdf(double v) {
  require(std::isfinite(v) && v >= 0.0, ErrorKind::Data, "rainfall amount must be non-negative");
  ThresholdCDF cdf;
  if (v < 2.0) {
    cdf.pairs = {{v, 1.0}};
    return cdf;
  }
  const std::pair<double, double> knots[] = {
      {std::max(0.0, v - 1.0), 0.5}, {v - 0.5, 0.75}, {v + 2.0, 1.0}};
  for (const auto& k : knots) {
    if (!cdf.pairs.empty() && !(k.first > cdf.pairs.back().first)) {
      cdf.pairs.back().second = std::max(cdf.pairs.back().second, k.second);
      continue;
    }
    cdf.pairs.push_back(k);
  }
  return cdf;
}

std::string format_cdf_csv(std::span<const std::pair<std::string, ThresholdCDF>> rows) {
  std::string out = "roi_id,threshold_mm,probability\n";
  char buf[96];
  for (const auto& [id, cdf] : rows) {
    for (const auto& [t, p] : cdf.pairs) {
      std::snprintf(buf, sizeof buf, ",%.6f,%.6f\n", t, p);
      out += id;
      out += buf;
    }
  }
  return out;
}

void write_cdf_csv(std::span<const std::pair<std::string, ThresholdCDF>> rows,
                   const std::filesystem::path& path) {
  detail::write_text_file(path, format_cdf_csv(rows));
}

}  // namespace nowcast
