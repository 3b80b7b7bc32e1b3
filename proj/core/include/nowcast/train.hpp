#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nowcast/model.hpp"
#include "nowcast/windows.hpp"

namespace nowcast {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 25;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  /// Worker threads for per-sample gradients inside a batch. The reduction
  /// order is fixed, so results do not depend on this value.
  int jobs = 1;

  void validate() const;
};

/// One window converted to model tensors (1 x H x W per frame).
struct Sample {
  std::vector<nn::Tensor<float>> input;
  std::vector<nn::Tensor<float>> target;
};

nn::Tensor<float> to_tensor(const Field2D& f);
Field2D from_tensor(const nn::Tensor<float>& t, Unit unit);

/// Windows must already be preprocessed and share one offset.
std::vector<Sample> to_samples(std::span<const TrainingWindow> windows);

struct TrainResult {
  nn::NetParams<float> params;
  std::vector<double> epoch_loss;  // mean per-sample training loss of each epoch
};

using EpochCallback = std::function<void(int epoch, double loss)>;

/// Seeded init, then `epochs` passes of shuffled minibatch Adam on MSE.
/// Batch gradient is the mean of per-sample gradients.
TrainResult train_model(std::span<const TrainingWindow> windows, const TrainConfig& cfg,
                        const nn::Arch& arch, const EpochCallback& on_epoch = {});

/// As train_model but starting from `params` with fresh Adam moments.
TrainResult fine_tune(const nn::NetParams<float>& params, std::span<const TrainingWindow> windows,
                      const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Mean per-sample MSE of `params` over the windows.
double evaluate_loss(const nn::NetParams<float>& params, std::span<const TrainingWindow> windows);

}  // namespace nowcast
