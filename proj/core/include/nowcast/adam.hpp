#pragma once

#include <cstdint>

#include "nowcast/model.hpp"

namespace nowcast {

/// Adam moments, congruent with the parameters they update.
template <typename T>
struct AdamState {
  nn::GradStore<T> m;
  nn::GradStore<T> v;
  std::int64_t step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  explicit AdamState(const nn::Arch& arch, double learning_rate = 1e-3)
      : m(arch), v(arch), lr(learning_rate) {}
};

/// m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
/// p <- p - lr * mhat / (sqrt(vhat) + eps), with bias-corrected mhat, vhat.
template <typename T>
void adam_step(nn::NetParams<T>& params, const nn::GradStore<T>& grads, AdamState<T>& state);

}  // namespace nowcast
