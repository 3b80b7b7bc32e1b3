#include "nowcast/experiments.hpp"

#include <cmath>
#include <cstdio>

#include "nowcast/errors.hpp"
#include "nowcast/verify.hpp"

namespace nowcast {

SyntheticConfig region_a(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t n_frames) {
  SyntheticConfig s;
  s.seed = seed;
  s.n_frames = n_frames;
  s.rows = cfg.rows;
  s.cols = cfg.cols;
  s.n_blobs = 4;
  s.speed_min = 0.6;
  s.speed_max = 1.0;
  s.heading_deg = 0.0;
  s.heading_spread_deg = 10.0;
  s.sigma_frac_min = 0.12;
  s.sigma_frac_max = 0.20;
  return s;
}

SyntheticConfig region_b(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t n_frames) {
  SyntheticConfig s = region_a(cfg, seed, n_frames);
  s.speed_min = 0.7;
  s.speed_max = 1.1;
  s.min_bt_lo = 200.0;
  s.min_bt_hi = 230.0;
  return s;
}

std::vector<EvalCase> make_eval_cases(const FrameSequence& kelvin, const PreprocessConfig& pre,
                                      std::size_t n_cases, std::size_t stride) {
  const std::size_t span = kInputFrames + kForecastFrames;
  require(n_cases > 0 && stride > 0 && kelvin.size() >= (n_cases - 1) * stride + span,
          ErrorKind::Data, "sequence too short for the requested evaluation cases");
  const FrameSequence prepped = preprocess_sequence(kelvin, pre);
  std::vector<EvalCase> cases;
  for (std::size_t k = 0; k < n_cases; ++k) {
    const std::size_t s = k * stride;
    EvalCase c{prepped.slice(s, kInputFrames), {}};
    for (std::size_t j = 0; j < kForecastFrames; ++j) {
      const Field2D cropped = crop_center(prepped[s + kInputFrames + j], kelvin.rows(), kelvin.cols());
      c.truth.push_back(denormalize_bt(cropped, pre));
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

ModelScores score_forecaster(const std::string& name, const std::vector<EvalCase>& cases,
                             const Forecaster& forecast, const PreprocessConfig& pre) {
  require(!cases.empty(), ErrorKind::Data, "no evaluation cases");
  ModelScores s;
  s.model = name;
  std::array<double, kForecastFrames> mse{};
  std::array<double, kForecastFrames> ssim_sum{};
  SsimConfig sc;
  sc.data_range = pre.norm_divisor;
  for (const auto& c : cases) {
    const auto pred = forecast(c);
    require(pred.size() == kForecastFrames, ErrorKind::Shape, "forecaster must return 16 frames");
    for (std::size_t j = 0; j < kForecastFrames; ++j) {
      const Field2D k = denormalize_bt(pred[j], pre);
      const double r = rmse(k, c.truth[j]);
      mse[j] += r * r;
      ssim_sum[j] += ssim(k, c.truth[j], sc);
    }
  }
  const double n = static_cast<double>(cases.size());
  for (std::size_t j = 0; j < kForecastFrames; ++j) {
    s.rmse[j] = std::sqrt(mse[j] / n);
    s.ssim[j] = ssim_sum[j] / n;
  }
  for (std::size_t h = 0; h < 4; ++h) {
    double m = 0.0, q = 0.0;
    for (std::size_t j = 4 * h; j < 4 * h + 4; ++j) {
      m += mse[j] / n;
      q += s.ssim[j];
    }
    s.hour_rmse[h] = std::sqrt(m / 4.0);
    s.hour_ssim[h] = q / 4.0;
  }
  return s;
}

const ModelScores& ComparisonReport::find(const std::string& model) const {
  for (const auto& m : models) {
    if (m.model == model) return m;
  }
  fail(ErrorKind::Data, "no scores for model '" + model + "'");
}

std::vector<MetricRow> ComparisonReport::rows() const {
  std::vector<MetricRow> out;
  for (const auto& m : models) {
    for (std::size_t j = 0; j < kForecastFrames; ++j) {
      out.push_back({m.model, "rmse_k", static_cast<int>(j + 1), m.rmse[j]});
      out.push_back({m.model, "ssim", static_cast<int>(j + 1), m.ssim[j]});
    }
    for (std::size_t h = 0; h < 4; ++h) {
      out.push_back({m.model, "hour_rmse_k", static_cast<int>(h + 1), m.hour_rmse[h]});
      out.push_back({m.model, "hour_ssim", static_cast<int>(h + 1), m.hour_ssim[h]});
    }
  }
  return out;
}

std::string ComparisonReport::to_csv() const { return format_metrics_csv(rows()); }

namespace {

std::vector<Field2D> cascade_forecaster(const CascadeModel& c, const EvalCase& ec,
                                        std::size_t rows, std::size_t cols, int jobs) {
  return cascade_predict(c, ec.input, rows, cols, jobs).frames();
}

}  // namespace

ComparisonReport run_comparison(const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log) {
  const std::size_t train_len = cfg.train_windows + kInputFrames + kForecastFrames - 1;
  const FrameSequence train_k = gen_synthetic(region_a(cfg, cfg.seed, train_len));
  const std::size_t test_len = (cfg.test_cases - 1) * cfg.test_stride + kInputFrames + kForecastFrames;
  const FrameSequence test_k = gen_synthetic(region_a(cfg, cfg.seed + 1, test_len));
  const std::vector<FrameSequence> train{preprocess_sequence(train_k, cfg.preprocess)};
  const auto cases = make_eval_cases(test_k, cfg.preprocess, cfg.test_cases, cfg.test_stride);

  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  ComparisonReport report;
  std::vector<nn::CellKind> kinds{nn::CellKind::ConvGru};
  if (cfg.include_convlstm) kinds.push_back(nn::CellKind::ConvLstm);
  for (auto kind : kinds) {
    nn::Arch arch = cfg.arch;
    arch.cell = kind;
    const std::string name(nn::to_string(kind));
    auto trained = train_cascade(train, tc, arch, cfg.train_windows, cfg.model_jobs,
                                 [&](int offset, int epoch, double loss) {
                                   if (!log) return;
                                   char buf[128];
                                   std::snprintf(buf, sizeof buf, "%s h%d epoch %d loss %.6f",
                                                 name.c_str(), offset, epoch, loss);
                                   log(buf);
                                 });
    if (kind == nn::CellKind::ConvGru) report.convgru_epoch_loss = trained.epoch_loss;
    const CascadeModel model = std::move(trained.cascade);
    report.models.push_back(score_forecaster(
        name, cases,
        [&](const EvalCase& ec) { return cascade_forecaster(model, ec, cfg.rows, cfg.cols, cfg.model_jobs); },
        cfg.preprocess));
  }
  report.models.push_back(score_forecaster(
      "persistence", cases,
      [&](const EvalCase& ec) {
        const Field2D last = crop_center(ec.input.back(), cfg.rows, cfg.cols);
        return std::vector<Field2D>(kForecastFrames, last);
      },
      cfg.preprocess));
  return report;
}

std::string TransferReport::to_csv() const {
  const MetricRow rows[] = {
      {"region_a", "rmse_k_before", 1, rmse_a_before},
      {"region_a", "rmse_k_after", 1, rmse_a_after},
      {"region_b", "rmse_k_before", 1, rmse_b_before},
      {"region_b", "rmse_k_after", 1, rmse_b_after},
  };
  return format_metrics_csv(rows);
}

double hour1_rmse(const nn::NetParams<float>& model, const std::vector<EvalCase>& cases,
                  const PreprocessConfig& pre) {
  require(!cases.empty(), ErrorKind::Data, "no evaluation cases");
  double mse = 0.0;
  std::size_t n = 0;
  for (const auto& c : cases) {
    std::vector<nn::Tensor<float>> x;
    for (const Field2D& f : c.input) x.push_back(to_tensor(f));
    const auto out = nn::model_forward<float>(x, model);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const Field2D pred = denormalize_bt(
          crop_center(from_tensor(out[j], Unit::Normalized), c.truth[j].rows(), c.truth[j].cols()), pre);
      const double r = rmse(pred, c.truth[j]);
      mse += r * r;
      ++n;
    }
  }
  return std::sqrt(mse / static_cast<double>(n));
}

TransferReport run_transfer(const ExperimentConfig& cfg,
                            const std::function<void(const std::string&)>& log) {
  const std::size_t train_len = cfg.train_windows + kInputFrames + kFramesPerHour - 1;
  const std::size_t test_len = (cfg.test_cases - 1) * cfg.test_stride + kInputFrames + kForecastFrames;
  const FrameSequence a_train = preprocess_sequence(gen_synthetic(region_a(cfg, cfg.seed, train_len)), cfg.preprocess);
  const FrameSequence b_train = preprocess_sequence(gen_synthetic(region_b(cfg, cfg.seed + 2, train_len)), cfg.preprocess);
  const auto a_cases = make_eval_cases(gen_synthetic(region_a(cfg, cfg.seed + 1, test_len)), cfg.preprocess,
                                       cfg.test_cases, cfg.test_stride);
  const auto b_cases = make_eval_cases(gen_synthetic(region_b(cfg, cfg.seed + 3, test_len)), cfg.preprocess,
                                       cfg.test_cases, cfg.test_stride);

  auto report_epoch = [&log](const char* tag) {
    return [&log, tag](int epoch, double loss) {
      if (!log) return;
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s epoch %d loss %.6f", tag, epoch, loss);
      log(buf);
    };
  };

  TrainConfig tc = cfg.train;
  tc.seed = model_seed(cfg.seed, 1);
  auto a_windows = make_windows(a_train, 1);
  a_windows.resize(std::min(a_windows.size(), cfg.train_windows));
  const auto source = train_model(a_windows, tc, cfg.arch, report_epoch("region A"));

  auto b_windows = make_windows(b_train, 1);
  b_windows.resize(std::min(b_windows.size(), cfg.train_windows));
  TrainConfig ft = tc;
  ft.epochs = cfg.finetune_epochs;
  const auto tuned = fine_tune(source.params, b_windows, ft, report_epoch("fine-tune B"));

  TransferReport r;
  r.finetune_epochs = cfg.finetune_epochs;
  r.rmse_a_before = hour1_rmse(source.params, a_cases, cfg.preprocess);
  r.rmse_b_before = hour1_rmse(source.params, b_cases, cfg.preprocess);
  r.rmse_a_after = hour1_rmse(tuned.params, a_cases, cfg.preprocess);
  r.rmse_b_after = hour1_rmse(tuned.params, b_cases, cfg.preprocess);
  return r;
}

}  // namespace nowcast
