#pragma once

#include <string>
#include <vector>

#include "nowcast/tensor.hpp"

namespace nowcast::nn {

inline constexpr int kKernel = 3;
inline constexpr int kTaps = kKernel * kKernel;

/// One 3x3 same-padding convolution: kernels (out x in x 3 x 3) plus bias.
template <typename T>
struct ConvParams {
  int out_ch = 0;
  int in_ch = 0;
  std::vector<T> kernels;
  std::vector<T> bias;

  ConvParams() = default;
  ConvParams(int out, int in)
      : out_ch(out), in_ch(in),
        kernels(static_cast<std::size_t>(out) * in * kTaps, T(0)),
        bias(static_cast<std::size_t>(out), T(0)) {}

  T& k(int o, int i, int ky, int kx) { return kernels[((o * in_ch + i) * kKernel + ky) * kKernel + kx]; }
  T k(int o, int i, int ky, int kx) const {
    return kernels[((o * in_ch + i) * kKernel + ky) * kKernel + kx];
  }

  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

/// out[o] = bias[o] + sum_i x[i] (*) k[o, i], zero border.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const ConvParams<T>& p);

/// Accumulates the input gradient into *grad_x (if non-null) and the parameter
/// gradients into grad_p. Both must already be shaped.
template <typename T>
void conv2d_backward_accumulate(const Tensor<T>& x, const ConvParams<T>& p,
                                const Tensor<T>& upstream, Tensor<T>* grad_x,
                                ConvParams<T>& grad_p);

template <typename T>
struct ConvGrads {
  Tensor<T> grad_x;
  ConvParams<T> grad_p;
};

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const ConvParams<T>& p, const Tensor<T>& upstream);

template <typename T>
void relu_inplace(Tensor<T>& t);
template <typename T>
void sigmoid_inplace(Tensor<T>& t);
template <typename T>
void tanh_inplace(Tensor<T>& t);

/// grad *= (activation > 0), given the ReLU output.
template <typename T>
void relu_backward_inplace(const Tensor<T>& activated, Tensor<T>& grad);

}  // namespace nowcast::nn
