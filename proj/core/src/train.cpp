#include "nowcast/train.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <thread>

#include "nowcast/adam.hpp"
#include "nowcast/errors.hpp"
#include "nowcast/rng.hpp"

namespace nowcast {

void TrainConfig::validate() const {
  require(epochs >= 0, ErrorKind::Config, "epochs must be non-negative");
  require(batch_size > 0, ErrorKind::Config, "batch_size must be positive");
  require(lr > 0.0, ErrorKind::Config, "learning rate must be positive");
  require(jobs > 0, ErrorKind::Config, "jobs must be positive");
}

nn::Tensor<float> to_tensor(const Field2D& f) {
  nn::Tensor<float> t(1, static_cast<int>(f.rows()), static_cast<int>(f.cols()));
  std::ranges::copy(f.values(), t.data.begin());
  return t;
}

Field2D from_tensor(const nn::Tensor<float>& t, Unit unit) {
  require(t.c == 1, ErrorKind::Shape, "from_tensor expects a single-channel tensor");
  return Field2D(static_cast<std::size_t>(t.h), static_cast<std::size_t>(t.w), t.data, unit);
}

std::vector<Sample> to_samples(std::span<const TrainingWindow> windows) {
  std::vector<Sample> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    Sample s;
    for (const Field2D& f : w.input) s.input.push_back(to_tensor(f));
    for (const Field2D& f : w.target) s.target.push_back(to_tensor(f));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

void check_windows(std::span<const TrainingWindow> windows) {
  require(!windows.empty(), ErrorKind::Data, "training needs at least one window");
  const int offset = windows.front().offset_hours;
  for (const auto& w : windows) {
    require(w.offset_hours == offset, ErrorKind::Data, "training windows mix temporal offsets");
    require(w.input.unit() == Unit::Normalized && w.target.unit() == Unit::Normalized,
            ErrorKind::Data, "training windows must be preprocessed (normalized units)");
  }
}

void accumulate(nn::GradStore<float>& acc, const nn::GradStore<float>& g) {
  std::vector<nn::ConvParams<float>*> a;
  std::vector<const nn::ConvParams<float>*> b;
  acc.for_each_conv([&a](const std::string&, nn::ConvParams<float>& c) { a.push_back(&c); });
  g.for_each_conv([&b](const std::string&, const nn::ConvParams<float>& c) { b.push_back(&c); });
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t n = 0; n < a[k]->kernels.size(); ++n) a[k]->kernels[n] += b[k]->kernels[n];
    for (std::size_t n = 0; n < a[k]->bias.size(); ++n) a[k]->bias[n] += b[k]->bias[n];
  }
}

void scale(nn::GradStore<float>& g, float s) {
  g.for_each_conv([s](const std::string&, nn::ConvParams<float>& c) {
    for (float& v : c.kernels) v *= s;
    for (float& v : c.bias) v *= s;
  });
}

// Per-sample gradients for one batch, computed by `jobs` workers into fixed
// slots so the reduction below always runs in batch order.
std::vector<nn::LossAndGrads<float>> batch_gradients(const nn::NetParams<float>& p,
                                                     const std::vector<Sample>& samples,
                                                     std::span<const std::size_t> batch, int jobs) {
  std::vector<nn::LossAndGrads<float>> out(batch.size());
  auto work = [&](std::size_t first) {
    for (std::size_t k = first; k < batch.size(); k += static_cast<std::size_t>(jobs)) {
      const Sample& s = samples[batch[k]];
      out[k] = nn::model_backward<float>(s.input, s.target, p);
    }
  };
  if (jobs <= 1 || batch.size() <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> workers;
    for (int j = 0; j < jobs; ++j) workers.emplace_back(work, static_cast<std::size_t>(j));
  }
  return out;
}

TrainResult run_training(nn::NetParams<float> params, std::span<const TrainingWindow> windows,
                         const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  check_windows(windows);
  const auto samples = to_samples(windows);
  AdamState<float> adam(params.arch, cfg.lr);
  Rng order_rng(cfg.seed ^ 0xD1B54A32D192ED03ULL);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult res{std::move(params), {}};
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t first = 0; first < order.size(); first += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t n = std::min(static_cast<std::size_t>(cfg.batch_size), order.size() - first);
      auto batch = std::span<const std::size_t>(order).subspan(first, n);
      auto per_sample = batch_gradients(res.params, samples, batch, cfg.jobs);
      nn::GradStore<float> g(res.params.arch);
      for (const auto& lg : per_sample) {
        loss_sum += lg.loss;
        accumulate(g, lg.grads);
      }
      scale(g, 1.0f / static_cast<float>(n));
      adam_step(res.params, g, adam);
    }
    const double mean = loss_sum / static_cast<double>(samples.size());
    res.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  return res;
}

}  // namespace

TrainResult train_model(std::span<const TrainingWindow> windows, const TrainConfig& cfg,
                        const nn::Arch& arch, const EpochCallback& on_epoch) {
  return run_training(nn::init_params<float>(arch, cfg.seed), windows, cfg, on_epoch);
}

TrainResult fine_tune(const nn::NetParams<float>& params, std::span<const TrainingWindow> windows,
                      const TrainConfig& cfg, const EpochCallback& on_epoch) {
  return run_training(params, windows, cfg, on_epoch);
}

double evaluate_loss(const nn::NetParams<float>& params, std::span<const TrainingWindow> windows) {
  check_windows(windows);
  double sum = 0.0;
  for (const auto& s : to_samples(windows)) sum += nn::model_loss<float>(s.input, s.target, params);
  return sum / static_cast<double>(windows.size());
}

}  // namespace nowcast
