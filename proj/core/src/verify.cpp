#include "nowcast/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nowcast/errors.hpp"

namespace nowcast {

namespace {

void require_same_shape(const Field2D& a, const Field2D& b, const char* what) {
  require(a.same_shape(b) && !a.empty(), ErrorKind::Shape,
          std::string(what) + ": fields must be non-empty and share a shape");
}

std::vector<double> gaussian_window(int n, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(n) * n);
  const double half = (n - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double di = i - half;
      const double dj = j - half;
      const double v = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      w[static_cast<std::size_t>(i) * n + j] = v;
      sum += v;
    }
  }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double rmse(const Field2D& pred, const Field2D& obs) {
  require_same_shape(pred, obs, "rmse");
  double acc = 0.0;
  auto p = pred.values();
  auto o = obs.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - o[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(p.size()));
}

double bias(const Field2D& pred, const Field2D& obs) {
  require_same_shape(pred, obs, "bias");
  double acc = 0.0;
  auto p = pred.values();
  auto o = obs.values();
  for (std::size_t i = 0; i < p.size(); ++i) acc += static_cast<double>(p[i]) - o[i];
  return acc / static_cast<double>(p.size());
}

double ssim(const Field2D& pred, const Field2D& obs, const SsimConfig& cfg) {
  require_same_shape(pred, obs, "ssim");
  require(cfg.window > 0 && cfg.sigma > 0 && cfg.data_range > 0 && cfg.k1 > 0 && cfg.k2 > 0,
          ErrorKind::Config, "ssim constants must be positive");
  const auto n = static_cast<std::size_t>(cfg.window);
  require(pred.rows() >= n && pred.cols() >= n, ErrorKind::Shape,
          "ssim: field smaller than the " + std::to_string(n) + "x" + std::to_string(n) + " window");
  const auto w = gaussian_window(cfg.window, cfg.sigma);
  const double c1 = (cfg.k1 * cfg.data_range) * (cfg.k1 * cfg.data_range);
  const double c2 = (cfg.k2 * cfg.data_range) * (cfg.k2 * cfg.data_range);

  double total = 0.0;
  std::size_t positions = 0;
  for (std::size_t r0 = 0; r0 + n <= pred.rows(); ++r0) {
    for (std::size_t c0 = 0; c0 + n <= pred.cols(); ++c0) {
      double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double wt = w[i * n + j];
          const double x = pred.at(r0 + i, c0 + j);
          const double y = obs.at(r0 + i, c0 + j);
          mx += wt * x;
          my += wt * y;
          xx += wt * x * x;
          yy += wt * y * y;
          xy += wt * x * y;
        }
      }
      const double vx = xx - mx * mx;
      const double vy = yy - my * my;
      const double cov = xy - mx * my;
      total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
               ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++positions;
    }
  }
  return total / static_cast<double>(positions);
}

ContingencyCounts contingency(const Field2D& pred, const Field2D& obs, double thr) {
  require_same_shape(pred, obs, "contingency");
  ContingencyCounts c;
  auto p = pred.values();
  auto o = obs.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool fp = p[i] >= thr;
    const bool fo = o[i] >= thr;
    if (fp && fo) ++c.hits;
    else if (fo) ++c.misses;
    else if (fp) ++c.false_alarms;
    else ++c.correct_negatives;
  }
  return c;
}

CategoricalScores pod_far_f1(const ContingencyCounts& c) {
  const auto h = static_cast<double>(c.hits);
  const auto m = static_cast<double>(c.misses);
  const auto fa = static_cast<double>(c.false_alarms);
  CategoricalScores s;
  if (h + m > 0) s.pod = h / (h + m);
  if (h + fa > 0) s.far = fa / (h + fa);
  if (2 * h + fa + m > 0) s.f1 = 2 * h / (2 * h + fa + m);
  return s;
}

double crps_step(const ThresholdCDF& cdf, double y, double upper) {
  require(cdf.valid(), ErrorKind::Data, "crps: invalid threshold CDF");
  require(std::isfinite(y) && std::isfinite(upper), ErrorKind::Data, "crps: non-finite input");
  require(upper >= std::max(cdf.pairs.back().first, y), ErrorKind::Data,
          "crps: upper bound below the last threshold or the observation");

  // Breakpoints where either step function can change.
  std::vector<double> knots{0.0, y, upper};
  for (const auto& pr : cdf.pairs) knots.push_back(pr.first);
  std::sort(knots.begin(), knots.end());

  auto forecast_cdf = [&cdf](double x) {
    double f = 0.0;
    for (const auto& [t, p] : cdf.pairs) {
      if (x >= t) f = p; else break;
    }
    return f;
  };

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = std::max(knots[k], 0.0);
    const double b = std::min(knots[k + 1], upper);
    if (!(b > a)) continue;
    // Both functions are constant on [a, b); sample at the left end.
    const double d = forecast_cdf(a) - (a >= y ? 1.0 : 0.0);
    total += d * d * (b - a);
  }
  return total;
}

double crps_step(const ThresholdCDF& cdf, double y) {
  require(cdf.valid(), ErrorKind::Data, "crps: invalid threshold CDF");
  return crps_step(cdf, y, std::max(cdf.pairs.back().first, y) + 1.0);
}

std::vector<std::pair<std::size_t, Field2D>> active_scene_filter(std::span<const Field2D> frames) {
  std::vector<std::pair<std::size_t, Field2D>> out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Field2D& f = frames[i];
    if (f.empty()) continue;
    const auto wet = std::count_if(f.values().begin(), f.values().end(),
                                   [](float v) { return v > kActiveRainMm; });
    // Integer comparison avoids rounding exactly at the 5% boundary.
    if (static_cast<std::size_t>(wet) * 100 > f.size() * 5) out.emplace_back(i, f);
  }
  return out;
}

}  // namespace nowcast
