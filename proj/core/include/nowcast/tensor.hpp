#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace nowcast::nn {

/// Dense channels x height x width activation, channel-major then row-major.
template <typename T>
struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int channels, int height, int width, T fill = T(0))
      : c(channels), h(height), w(width),
        data(static_cast<std::size_t>(channels) * height * width, fill) {}

  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(h) * w; }
  std::size_t size() const noexcept { return data.size(); }

  T* plane(int ch) noexcept { return data.data() + ch * plane_size(); }
  const T* plane(int ch) const noexcept { return data.data() + ch * plane_size(); }

  T& operator()(int ch, int i, int j) noexcept { return data[(ch * plane_size()) + i * w + j]; }
  T operator()(int ch, int i, int j) const noexcept { return data[(ch * plane_size()) + i * w + j]; }

  bool same_shape(const Tensor& o) const noexcept { return c == o.c && h == o.h && w == o.w; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

template <typename T>
Tensor<T> zeros_like(const Tensor<T>& t) {
  return Tensor<T>(t.c, t.h, t.w);
}

/// Channel concatenation [a; b].
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out(a.c + b.c, a.h, a.w);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<long>(a.size()));
  return out;
}

}  // namespace nowcast::nn
