#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nowcast/cascade.hpp"
#include "nowcast/report.hpp"
#include "nowcast/synthetic.hpp"

namespace nowcast {

/// Desk-scale comparative setup on synthetic advecting clouds.
struct ExperimentConfig {
  std::uint64_t seed = 7;
  std::size_t rows = 28;
  std::size_t cols = 28;
  PreprocessConfig preprocess{300.0, 32, 1.0f};
  nn::Arch arch = nn::Arch::desk();
  TrainConfig train{};
  std::size_t train_windows = 200;  // per offset
  std::size_t test_cases = 48;
  std::size_t test_stride = 4;
  bool include_convlstm = true;
  int model_jobs = 1;
  int finetune_epochs = 10;
};

/// Synthetic regime used for the comparison and as transfer region A.
SyntheticConfig region_a(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t n_frames);
/// Transfer region B: same heading as region A, faster drift and colder cloud tops.
SyntheticConfig region_b(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t n_frames);

/// One held-out forecast case: 4 preprocessed inputs and 16 truth frames in
/// kelvin, already masked and cropped to the unpadded grid.
struct EvalCase {
  FrameSequence input;
  std::vector<Field2D> truth;
};

std::vector<EvalCase> make_eval_cases(const FrameSequence& kelvin, const PreprocessConfig& pre,
                                      std::size_t n_cases, std::size_t stride);

struct ModelScores {
  std::string model;
  std::array<double, kForecastFrames> rmse{};  // kelvin, pooled over cases
  std::array<double, kForecastFrames> ssim{};  // mean over cases
  std::array<double, 4> hour_rmse{};
  std::array<double, 4> hour_ssim{};
};

/// Returns 16 normalized, cropped frames for one case.
using Forecaster = std::function<std::vector<Field2D>(const EvalCase&)>;

ModelScores score_forecaster(const std::string& name, const std::vector<EvalCase>& cases,
                             const Forecaster& forecast, const PreprocessConfig& pre);

struct ComparisonReport {
  std::vector<ModelScores> models;
  std::array<std::vector<double>, kCascadeModels> convgru_epoch_loss;

  const ModelScores& find(const std::string& model) const;
  std::vector<MetricRow> rows() const;
  std::string to_csv() const;
};

/// Trains ConvGRU (and optionally ConvLSTM) cascades on region A and scores
/// them with persistence on a held-out sequence.
ComparisonReport run_comparison(const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log = {});

struct TransferReport {
  double rmse_a_before = 0.0;
  double rmse_a_after = 0.0;
  double rmse_b_before = 0.0;
  double rmse_b_after = 0.0;
  int finetune_epochs = 0;

  std::string to_csv() const;
};

/// Pooled kelvin RMSE of an hour-1 model over the cases' first four leads.
double hour1_rmse(const nn::NetParams<float>& model, const std::vector<EvalCase>& cases,
                  const PreprocessConfig& pre);

/// Trains the hour-1 model on region A, fine-tunes on region B, and scores
/// both regions before and after.
TransferReport run_transfer(const ExperimentConfig& cfg,
                            const std::function<void(const std::string&)>& log = {});

}  // namespace nowcast
