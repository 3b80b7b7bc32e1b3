#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nowcast/errors.hpp"
#include "nowcast/rainfall.hpp"

using namespace nowcast;

namespace {

Field2D smooth_field(std::size_t n, double phase) {
  std::vector<float> v(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      v[r * n + c] = static_cast<float>(5.0 + 2.0 * std::sin(0.21 * r + phase) * std::cos(0.17 * c - phase));
  return Field2D(n, n, std::move(v), Unit::MmPerH);
}

}  // namespace

TEST_CASE("bt_to_rain examples") {
  const TransformCoeffs c;
  CHECK(bt_to_rain(300.0, c) == 0.0);
  CHECK(bt_to_rain(310.0, c) == 0.0);
  CHECK(bt_to_rain(260.0, TransformCoeffs{0.01, 1.5}) == doctest::Approx(2.52982).epsilon(1e-5));
  CHECK(bt_to_rain(250.0, c) == doctest::Approx(0.0163 * std::pow(50.0, 1.56)));
}

TEST_CASE("bt_to_rain is monotone and maps fields") {
  const TransformCoeffs c{0.02, 1.3};
  double prev = bt_to_rain(180.0, c);
  for (double t = 181.0; t <= 320.0; t += 1.0) {
    const double r = bt_to_rain(t, c);
    CHECK(r <= prev);
    prev = r;
  }
  const Field2D k(1, 3, {250.0f, 300.0f, 305.0f}, Unit::Kelvin);
  const auto r = bt_to_rain(k, c);
  CHECK(r.unit() == Unit::MmPerH);
  CHECK(r.at(0, 0) == doctest::Approx(bt_to_rain(250.0, c)).epsilon(1e-6));
  CHECK(r.at(0, 1) == 0.0f);
  CHECK(r.at(0, 2) == 0.0f);
  CHECK_THROWS_AS(bt_to_rain(Field2D(1, 1, {0.5f}, Unit::Normalized), c), Error);
  CHECK_THROWS_AS((TransformCoeffs{-1.0, 1.0}.validate()), Error);
}

TEST_CASE("calibrate_transform recovers exact coefficients") {
  std::vector<CalibrationSample> s;
  for (double t = 200.0; t < 299.0; t += 3.5) s.push_back({t, 0.02 * std::pow(300.0 - t, 1.2)});
  s.push_back({305.0, 0.0});  // ignored: warm and dry
  const auto c = calibrate_transform(s);
  CHECK(c.alpha == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(c.beta == doctest::Approx(1.2).epsilon(1e-6));
}

TEST_CASE("calibrate_transform with log-normal noise") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> t(200.0, 299.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<CalibrationSample> s;
  for (int i = 0; i < 1000; ++i) {
    const double k = t(rng);
    s.push_back({k, 0.0163 * std::pow(300.0 - k, 1.56) * std::exp(noise(rng))});
  }
  CHECK(std::abs(calibrate_transform(s).beta - 1.56) < 0.05);
}

TEST_CASE("calibrate_transform degenerate inputs") {
  const std::vector<CalibrationSample> one{{250.0, 1.0}, {301.0, 2.0}, {260.0, 0.0}};
  CHECK_THROWS_AS(calibrate_transform(one), Error);
  const std::vector<CalibrationSample> same_t{{250.0, 1.0}, {250.0, 2.0}, {250.0, 3.0}};
  CHECK_THROWS_AS(calibrate_transform(same_t), Error);
}

TEST_CASE("upsample: constants, bounds and size checks") {
  const auto c = Field2D::filled(7, 5, 3.25f, Unit::MmPerH);
  const auto up = upsample_bilinear(c, 6);
  CHECK(up.rows() == 42);
  CHECK(up.cols() == 30);
  for (float v : up.values()) CHECK(v == 3.25f);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 10.0f);
  std::vector<float> vals(9 * 9);
  for (float& v : vals) v = u(rng);
  const Field2D f(9, 9, vals, Unit::MmPerH);
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  const auto up_f = upsample_bilinear(f, 6);
  for (float v : up_f.values()) {
    CHECK(v >= *lo);
    CHECK(v <= *hi);
  }
  CHECK_THROWS_AS(upsample_to_radar_grid(Field2D::filled(250, 252, 0.0f, Unit::MmPerH)), Error);
}

TEST_CASE("upsample: half-pixel sample positions") {
  // Output cell 0 of block 1 sits at source x = (6 + 0.5) / 6 - 0.5 = 0.5833.
  const Field2D f(1, 2, {0.0f, 12.0f}, Unit::MmPerH);
  const auto up = upsample_bilinear(f, 6);
  CHECK(up.at(0, 0) == 0.0f);   // clamped left edge
  CHECK(up.at(0, 11) == 12.0f);  // clamped right edge
  CHECK(up.at(0, 6) == doctest::Approx(12.0 * (6.5 / 6.0 - 0.5)));
}

TEST_CASE("upsample to the radar grid: block means and mass") {
  const auto f = smooth_field(kSatelliteGrid, 0.4);
  const auto up = upsample_to_radar_grid(f);
  REQUIRE(up.rows() == kRadarGrid);
  const auto [lo, hi] = std::ranges::minmax_element(f.values());
  const double range = *hi - *lo;
  double worst = 0;
  for (std::size_t r = 0; r < kSatelliteGrid; ++r)
    for (std::size_t c = 0; c < kSatelliteGrid; ++c) {
      double s = 0;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) s += up.at(6 * r + i, 6 * c + j);
      worst = std::max(worst, std::abs(s / 36.0 - f.at(r, c)));
    }
  CHECK(worst < 0.15 * range);

  std::vector<float> hot(kSatelliteGrid * kSatelliteGrid, 0.0f);
  hot[100 * kSatelliteGrid + 120] = 9.0f;
  const auto spread = upsample_to_radar_grid(Field2D(kSatelliteGrid, kSatelliteGrid, hot, Unit::MmPerH));
  double mass = 0;
  for (float v : spread.values()) mass += v;
  CHECK(mass / 36.0 == doctest::Approx(9.0).epsilon(0.01));
}

TEST_CASE("cumulative_rain") {
  std::vector<Field2D> ones(16, Field2D::filled(3, 3, 1.0f, Unit::MmPerH));
  const auto acc = cumulative_rain(ones);
  CHECK(acc.unit() == Unit::Mm);
  for (float v : acc.values()) CHECK(v == 4.0f);

  std::vector<Field2D> zeros(16, Field2D::filled(3, 3, 0.0f, Unit::MmPerH));
  const auto dry = cumulative_rain(zeros);
  for (float v : dry.values()) CHECK(v == 0.0f);

  std::vector<Field2D> ramp;
  for (int i = 1; i <= 16; ++i) {
    std::vector<float> v(9, 0.0f);
    v[4] = static_cast<float>(i);
    ramp.emplace_back(3, 3, v, Unit::MmPerH);
  }
  CHECK(cumulative_rain(ramp).at(1, 1) == doctest::Approx(34.0));

  std::vector<Field2D> scaled;
  for (const auto& f : ramp) scaled.push_back(field_map(f, [](float v) { return 2.5f * v; }));
  CHECK(cumulative_rain(scaled).at(1, 1) == doctest::Approx(2.5 * 34.0));

  CHECK_THROWS_AS(cumulative_rain(std::span(ones).first(15)), Error);
}

TEST_CASE("roi_average") {
  const Field2D f(2, 3, {1.0f, 2.0f, 9.0f, 3.0f, 4.0f, 9.0f}, Unit::Mm);
  CHECK(roi_average(f, {"a", 0, 0, 2, 2}) == 2.5);
  CHECK(roi_average(Field2D::filled(5, 5, 1.5f, Unit::Mm), {"b", 1, 2, 4, 5}) == 1.5);
  const double mean = field_reduce(f, Reduce::Mean);
  CHECK(roi_average(f, {"all", 0, 0, 2, 3}) == doctest::Approx(mean));
  CHECK_THROWS_AS(roi_average(f, {"out", 0, 0, 3, 3}), Error);
  CHECK_THROWS_AS(roi_average(f, {"empty", 1, 1, 1, 2}), Error);
}

TEST_CASE("threshold CDF rule") {
  CHECK(to_threshold_cdf(1.0).pairs == std::vector<std::pair<double, double>>{{1.0, 1.0}});
  CHECK(to_threshold_cdf(0.0).pairs == std::vector<std::pair<double, double>>{{0.0, 1.0}});
  CHECK(to_threshold_cdf(5.0).pairs ==
        std::vector<std::pair<double, double>>{{4.0, 0.5}, {4.5, 0.75}, {7.0, 1.0}});
  CHECK_THROWS_AS(to_threshold_cdf(-0.1), Error);
  for (double v = 0.0; v < 30.0; v += 0.05) CHECK(to_threshold_cdf(v).valid());

  CHECK_FALSE(ThresholdCDF{{{1.0, 0.5}}}.valid());
  CHECK_FALSE((ThresholdCDF{{{2.0, 0.5}, {1.0, 1.0}}}.valid()));
  CHECK_FALSE((ThresholdCDF{{{1.0, 0.7}, {2.0, 0.5}, {3.0, 1.0}}}.valid()));
}

TEST_CASE("threshold CDF CSV") {
  const std::vector<std::pair<std::string, ThresholdCDF>> rows{{"r1", to_threshold_cdf(1.0)},
                                                               {"r2", to_threshold_cdf(5.0)}};
  CHECK(format_cdf_csv(rows) ==
        "roi_id,threshold_mm,probability\n"
        "r1,1.000000,1.000000\n"
        "r2,4.000000,0.500000\n"
        "r2,4.500000,0.750000\n"
        "r2,7.000000,1.000000\n");
  CHECK(format_cdf_csv({}) == "roi_id,threshold_mm,probability\n");
}
