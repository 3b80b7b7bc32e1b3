#include "nowcast/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nowcast/errors.hpp"

namespace nowcast::nn {

namespace {

// Valid output range for a tap displaced by d along an axis of length n:
// out index i reads input i + d, so i must lie in [max(0, -d), min(n, n - d)).
struct Span1 {
  int begin;
  int end;
};
constexpr Span1 tap_range(int d, int n) { return {std::max(0, -d), std::min(n, n - d)}; }

}  // namespace

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const ConvParams<T>& p) {
  require(x.c == p.in_ch, ErrorKind::Shape,
          "conv2d: input has " + std::to_string(x.c) + " channels, kernel expects " +
              std::to_string(p.in_ch));
  const int H = x.h;
  const int W = x.w;
  Tensor<T> out(p.out_ch, H, W);
  for (int o = 0; o < p.out_ch; ++o) {
    T* y = out.plane(o);
    std::fill(y, y + out.plane_size(), p.bias[o]);
    for (int i = 0; i < p.in_ch; ++i) {
      const T* xi = x.plane(i);
      for (int ky = 0; ky < kKernel; ++ky) {
        const int dy = ky - 1;
        const auto rows = tap_range(dy, H);
        for (int kx = 0; kx < kKernel; ++kx) {
          const int dx = kx - 1;
          const auto cols = tap_range(dx, W);
          const T wv = p.k(o, i, ky, kx);
          for (int r = rows.begin; r < rows.end; ++r) {
            T* yr = y + r * W;
            const T* xr = xi + (r + dy) * W + dx;
            for (int c = cols.begin; c < cols.end; ++c) yr[c] += wv * xr[c];
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
void conv2d_backward_accumulate(const Tensor<T>& x, const ConvParams<T>& p,
                                const Tensor<T>& upstream, Tensor<T>* grad_x,
                                ConvParams<T>& grad_p) {
  require(x.c == p.in_ch, ErrorKind::Shape, "conv2d_backward: input channel mismatch");
  require(upstream.c == p.out_ch && upstream.h == x.h && upstream.w == x.w, ErrorKind::Shape,
          "conv2d_backward: upstream gradient does not match the forward output shape");
  require(grad_p.out_ch == p.out_ch && grad_p.in_ch == p.in_ch, ErrorKind::Shape,
          "conv2d_backward: gradient store shape mismatch");
  if (grad_x) {
    require(grad_x->same_shape(x), ErrorKind::Shape, "conv2d_backward: grad_x shape mismatch");
  }
  const int H = x.h;
  const int W = x.w;
  for (int o = 0; o < p.out_ch; ++o) {
    const T* g = upstream.plane(o);
    T gb = 0;
    for (std::size_t n = 0; n < upstream.plane_size(); ++n) gb += g[n];
    grad_p.bias[o] += gb;
    for (int i = 0; i < p.in_ch; ++i) {
      const T* xi = x.plane(i);
      T* gxi = grad_x ? grad_x->plane(i) : nullptr;
      for (int ky = 0; ky < kKernel; ++ky) {
        const int dy = ky - 1;
        const auto rows = tap_range(dy, H);
        for (int kx = 0; kx < kKernel; ++kx) {
          const int dx = kx - 1;
          const auto cols = tap_range(dx, W);
          const T wv = p.k(o, i, ky, kx);
          T gw = 0;
          for (int r = rows.begin; r < rows.end; ++r) {
            const T* gr = g + r * W;
            const T* xr = xi + (r + dy) * W + dx;
            for (int c = cols.begin; c < cols.end; ++c) gw += gr[c] * xr[c];
            if (gxi) {
              T* gxr = gxi + (r + dy) * W + dx;
              for (int c = cols.begin; c < cols.end; ++c) gxr[c] += wv * gr[c];
            }
          }
          grad_p.k(o, i, ky, kx) += gw;
        }
      }
    }
  }
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const ConvParams<T>& p, const Tensor<T>& upstream) {
  ConvGrads<T> g{zeros_like(x), ConvParams<T>(p.out_ch, p.in_ch)};
  conv2d_backward_accumulate(x, p, upstream, &g.grad_x, g.grad_p);
  return g;
}

template <typename T>
void relu_inplace(Tensor<T>& t) {
  for (T& v : t.data) v = v > T(0) ? v : T(0);
}

template <typename T>
void sigmoid_inplace(Tensor<T>& t) {
  for (T& v : t.data) v = T(1) / (T(1) + std::exp(-v));
}

template <typename T>
void tanh_inplace(Tensor<T>& t) {
  for (T& v : t.data) v = std::tanh(v);
}

template <typename T>
void relu_backward_inplace(const Tensor<T>& activated, Tensor<T>& grad) {
  require(activated.same_shape(grad), ErrorKind::Shape, "relu_backward: shape mismatch");
  for (std::size_t n = 0; n < grad.size(); ++n) {
    if (!(activated.data[n] > T(0))) grad.data[n] = T(0);
  }
}

#define NOWCAST_INSTANTIATE_LAYERS(T)                                                        \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const ConvParams<T>&);                 \
  template void conv2d_backward_accumulate(const Tensor<T>&, const ConvParams<T>&,           \
                                           const Tensor<T>&, Tensor<T>*, ConvParams<T>&);    \
  template ConvGrads<T> conv2d_backward(const Tensor<T>&, const ConvParams<T>&,              \
                                        const Tensor<T>&);                                   \
  template void relu_inplace(Tensor<T>&);                                                    \
  template void sigmoid_inplace(Tensor<T>&);                                                 \
  template void tanh_inplace(Tensor<T>&);                                                    \
  template void relu_backward_inplace(const Tensor<T>&, Tensor<T>&);

NOWCAST_INSTANTIATE_LAYERS(float)
NOWCAST_INSTANTIATE_LAYERS(double)

#undef NOWCAST_INSTANTIATE_LAYERS

}  // namespace nowcast::nn
