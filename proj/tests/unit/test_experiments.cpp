#include <doctest.h>

#include "nowcast/errors.hpp"
#include "nowcast/experiments.hpp"
#include "nowcast/synthetic.hpp"

using namespace nowcast;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig cfg;
  cfg.rows = 12;
  cfg.cols = 12;
  cfg.preprocess.pad_to = 16;
  cfg.arch = nn::Arch::mini();
  cfg.arch.skip = true;
  cfg.train.epochs = 1;
  cfg.train.batch_size = 5;
  cfg.train_windows = 10;
  cfg.test_cases = 3;
  cfg.test_stride = 2;
  cfg.finetune_epochs = 1;
  return cfg;
}

}  // namespace

TEST_CASE("the two transfer regimes differ in drift") {
  const ExperimentConfig cfg;
  const auto a = region_a(cfg, 1, 10);
  const auto b = region_b(cfg, 1, 10);
  CHECK(a.rows == cfg.rows);
  CHECK(a.n_frames == 10);
  CHECK(b.speed_min > a.speed_min);
  CHECK(b.speed_max > a.speed_max);
  CHECK(b.min_bt_hi < a.min_bt_hi);
}

TEST_CASE("eval cases are cropped kelvin truth after preprocessed inputs") {
  const auto cfg = tiny();
  const auto kelvin = gen_synthetic(region_a(cfg, 3, 40));
  const auto cases = make_eval_cases(kelvin, cfg.preprocess, 3, 2);
  REQUIRE(cases.size() == 3);
  for (const auto& c : cases) {
    CHECK(c.input.size() == 4);
    CHECK(c.input.unit() == Unit::Normalized);
    CHECK(c.input[0].rows() == 16);
    REQUIRE(c.truth.size() == kForecastFrames);
    CHECK(c.truth[0].unit() == Unit::Kelvin);
    CHECK(c.truth[0].rows() == 12);
  }
  CHECK_THROWS_AS(make_eval_cases(kelvin, cfg.preprocess, 20, 2), Error);
}

TEST_CASE("a perfect forecaster scores zero error and unit SSIM") {
  const auto cfg = tiny();
  const auto kelvin = gen_synthetic(region_a(cfg, 4, 40));
  const auto cases = make_eval_cases(kelvin, cfg.preprocess, 3, 2);
  const auto s = score_forecaster(
      "oracle", cases,
      [&](const EvalCase& c) {
        std::vector<Field2D> out;
        for (const auto& t : c.truth) out.push_back(normalize_bt(t, cfg.preprocess));
        return out;
      },
      cfg.preprocess);
  for (double r : s.rmse) CHECK(r == doctest::Approx(0.0).scale(1.0).epsilon(1e-3));
  for (double v : s.hour_ssim) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("comparison report layout") {
  auto cfg = tiny();
  cfg.include_convlstm = false;
  const auto report = run_comparison(cfg);
  REQUIRE(report.models.size() == 2);
  CHECK(report.find("convgru").model == "convgru");
  CHECK(report.find("persistence").model == "persistence");
  CHECK_THROWS_AS(report.find("optical_flow"), Error);
  CHECK(report.convgru_epoch_loss[3].size() == 1);
  CHECK(report.rows().size() == 2 * (2 * 16 + 2 * 4));
  CHECK(report.to_csv().rfind("model,metric,lead_time,value\n", 0) == 0);
  const auto& p = report.find("persistence");
  for (int h = 0; h < 4; ++h) CHECK(p.hour_rmse[h] > 0.0);
  CHECK(run_comparison(cfg).to_csv() == report.to_csv());
}

TEST_CASE("transfer with zero fine-tune epochs leaves both regions unchanged") {
  auto cfg = tiny();
  cfg.finetune_epochs = 0;
  const auto r = run_transfer(cfg);
  CHECK(r.rmse_a_after == r.rmse_a_before);
  CHECK(r.rmse_b_after == r.rmse_b_before);
  CHECK(r.finetune_epochs == 0);
  CHECK(r.to_csv().find("region_b,rmse_k_after,1,") != std::string::npos);
}
