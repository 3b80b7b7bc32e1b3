#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nowcast/cells.hpp"
#include "nowcast/layers.hpp"

namespace nowcast::nn {

inline constexpr int kModelInputSteps = 4;
inline constexpr int kModelOutputSteps = 4;
/// Normalized value of cloud-free cells after masking.
inline constexpr double kClearSkyLevel = 1.0;

/// Channel chain 1 -> enc1 -> enc2 -> [hidden1, hidden2] -> dec1 -> dec2 -> 1.
struct Arch {
  CellKind cell = CellKind::ConvGru;
  int enc1 = 16;
  int enc2 = 32;
  int hidden1 = 64;
  int hidden2 = 64;
  int dec1 = 32;
  int dec2 = 16;
  /// Persistence skip: the encoder sees anomalies from the clear-sky level
  /// (x - kClearSkyLevel) and every decoded output is added to the last input
  /// frame, so the network learns a correction to persistence.
  bool skip = false;

  /// 1->16->32->[64,64]->32->16->1.
  static Arch full(CellKind cell = CellKind::ConvGru) { return Arch{.cell = cell}; }
  /// Narrow chain for single-core CPU experiments.
  static Arch desk(CellKind cell = CellKind::ConvGru) {
    return Arch{.cell = cell, .enc1 = 4, .enc2 = 8, .hidden1 = 8, .hidden2 = 8, .dec1 = 8, .dec2 = 4,
                .skip = true};
  }
  /// 1->2->3->[4,4]->3->2->1, used for gradient checks.
  static Arch mini(CellKind cell = CellKind::ConvGru) {
    return Arch{.cell = cell, .enc1 = 2, .enc2 = 3, .hidden1 = 4, .hidden2 = 4, .dec1 = 3, .dec2 = 2};
  }

  std::array<int, 6> widths() const { return {enc1, enc2, hidden1, hidden2, dec1, dec2}; }
  void validate() const;
  friend bool operator==(const Arch&, const Arch&) = default;
};

/// All learnable tensors of one encoder / recurrent stack / decoder model.
/// Also used as the gradient store: a GradStore is a NetParams of identical
/// shape holding dL/dparam.
template <typename T>
struct NetParams {
  Arch arch;
  ConvParams<T> enc1, enc2;
  RecurrentCellParams<T> rnn1, rnn2;
  ConvParams<T> dec1, dec2, dec3;

  NetParams() = default;
  explicit NetParams(const Arch& a);  // all zeros

  /// Visits every convolution in a fixed order with a stable name.
  void for_each_conv(const std::function<void(const std::string&, ConvParams<T>&)>& fn);
  void for_each_conv(const std::function<void(const std::string&, const ConvParams<T>&)>& fn) const;

  std::size_t parameter_count() const;

  friend bool operator==(const NetParams&, const NetParams&) = default;
};

template <typename T>
using GradStore = NetParams<T>;

/// Uniform in +-sqrt(1 / (fan_in * 9)) per kernel, zero biases.
template <typename T>
NetParams<T> init_params(const Arch& arch, std::uint64_t seed);

template <typename T>
bool congruent(const NetParams<T>& a, const NetParams<T>& b);

template <typename To, typename From>
NetParams<To> convert_params(const NetParams<From>& p);

/// Encoder per input frame, recurrent stack over the 4 inputs, 4 more steps
/// with zero input, decoder on each of those hidden states.
/// Inputs and outputs are 1 x H x W.
template <typename T>
std::vector<Tensor<T>> model_forward(std::span<const Tensor<T>> inputs, const NetParams<T>& p);

template <typename T>
struct LossAndGrads {
  double loss = 0.0;
  GradStore<T> grads;
};

/// Mean squared error over all output elements and its exact gradient through
/// the unrolled 8-step graph.
template <typename T>
LossAndGrads<T> model_backward(std::span<const Tensor<T>> inputs, std::span<const Tensor<T>> targets,
                               const NetParams<T>& p);

template <typename T>
double model_loss(std::span<const Tensor<T>> inputs, std::span<const Tensor<T>> targets,
                  const NetParams<T>& p);

}  // namespace nowcast::nn
