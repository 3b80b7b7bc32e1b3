#include "nowcast/model.hpp"

#include <cmath>
#include <string>

#include "nowcast/errors.hpp"
#include "nowcast/rng.hpp"

namespace nowcast::nn {

void Arch::validate() const {
  for (int w : widths()) {
    require(w > 0, ErrorKind::Config, "architecture channel widths must be positive");
  }
}

template <typename T>
NetParams<T>::NetParams(const Arch& a)
    : arch(a),
      enc1(a.enc1, 1),
      enc2(a.enc2, a.enc1),
      rnn1(a.cell, a.enc2, a.hidden1),
      rnn2(a.cell, a.hidden1, a.hidden2),
      dec1(a.dec1, a.hidden2),
      dec2(a.dec2, a.dec1),
      dec3(1, a.dec2) {
  a.validate();
}

namespace {

constexpr const char* kGruGates[] = {"z", "r", "c"};
constexpr const char* kLstmGates[] = {"i", "f", "o", "g"};

const char* gate_name(CellKind k, std::size_t g) {
  return k == CellKind::ConvGru ? kGruGates[g] : kLstmGates[g];
}

}  // namespace

template <typename T>
void NetParams<T>::for_each_conv(
    const std::function<void(const std::string&, ConvParams<T>&)>& fn) {
  fn("enc1", enc1);
  fn("enc2", enc2);
  for (std::size_t g = 0; g < rnn1.gates.size(); ++g) {
    fn(std::string("rnn1.") + gate_name(rnn1.kind, g), rnn1.gates[g]);
  }
  for (std::size_t g = 0; g < rnn2.gates.size(); ++g) {
    fn(std::string("rnn2.") + gate_name(rnn2.kind, g), rnn2.gates[g]);
  }
  fn("dec1", dec1);
  fn("dec2", dec2);
  fn("dec3", dec3);
}

template <typename T>
void NetParams<T>::for_each_conv(
    const std::function<void(const std::string&, const ConvParams<T>&)>& fn) const {
  const_cast<NetParams<T>*>(this)->for_each_conv(
      [&fn](const std::string& name, ConvParams<T>& c) { fn(name, c); });
}

template <typename T>
std::size_t NetParams<T>::parameter_count() const {
  std::size_t n = 0;
  for_each_conv([&n](const std::string&, const ConvParams<T>& c) {
    n += c.kernels.size() + c.bias.size();
  });
  return n;
}

template <typename T>
NetParams<T> init_params(const Arch& arch, std::uint64_t seed) {
  NetParams<T> p(arch);
  Rng rng(seed);
  p.for_each_conv([&rng](const std::string&, ConvParams<T>& c) {
    const double bound = std::sqrt(1.0 / (static_cast<double>(c.in_ch) * kTaps));
    for (T& w : c.kernels) w = static_cast<T>(rng.uniform(-bound, bound));
  });
  return p;
}

template <typename T>
bool congruent(const NetParams<T>& a, const NetParams<T>& b) {
  if (a.arch != b.arch) return false;
  std::vector<std::pair<int, int>> sa;
  std::vector<std::pair<int, int>> sb;
  a.for_each_conv([&sa](const std::string&, const ConvParams<T>& c) {
    sa.emplace_back(c.out_ch, c.in_ch);
  });
  b.for_each_conv([&sb](const std::string&, const ConvParams<T>& c) {
    sb.emplace_back(c.out_ch, c.in_ch);
  });
  return sa == sb;
}

template <typename To, typename From>
NetParams<To> convert_params(const NetParams<From>& p) {
  NetParams<To> out(p.arch);
  std::vector<const ConvParams<From>*> src;
  p.for_each_conv([&src](const std::string&, const ConvParams<From>& c) { src.push_back(&c); });
  std::size_t k = 0;
  out.for_each_conv([&src, &k](const std::string&, ConvParams<To>& c) {
    const ConvParams<From>& s = *src[k++];
    for (std::size_t n = 0; n < c.kernels.size(); ++n) c.kernels[n] = static_cast<To>(s.kernels[n]);
    for (std::size_t n = 0; n < c.bias.size(); ++n) c.bias[n] = static_cast<To>(s.bias[n]);
  });
  return out;
}

namespace {

template <typename T>
struct StepTrace {
  Tensor<T> e1, e2;   // encoder activations (input steps)
  CellCache<T> c1, c2;
  Tensor<T> h2;       // stack output (forecast steps)
  Tensor<T> d1, d2;   // decoder activations (forecast steps)
};

template <typename T>
void check_inputs(std::span<const Tensor<T>> inputs) {
  require(inputs.size() == kModelInputSteps, ErrorKind::Shape,
          "model expects exactly 4 input frames, got " + std::to_string(inputs.size()));
  for (const auto& x : inputs) {
    require(x.c == 1 && x.h == inputs[0].h && x.w == inputs[0].w && x.h > 0 && x.w > 0,
            ErrorKind::Shape, "model inputs must be 1 x H x W with a common shape");
  }
}

template <typename T>
Tensor<T> encoder_input(const Tensor<T>& x, const Arch& arch) {
  if (!arch.skip) return x;
  Tensor<T> out = x;
  for (T& v : out.data) v -= static_cast<T>(kClearSkyLevel);
  return out;
}

template <typename T>
std::vector<Tensor<T>> run_forward(std::span<const Tensor<T>> inputs, const NetParams<T>& p,
                                   std::vector<StepTrace<T>>* trace) {
  check_inputs(inputs);
  const int H = inputs[0].h;
  const int W = inputs[0].w;
  CellState<T> s1 = zero_state(p.rnn1, H, W);
  CellState<T> s2 = zero_state(p.rnn2, H, W);
  const Tensor<T> zero_feed(p.arch.enc2, H, W);
  constexpr int kSteps = kModelInputSteps + kModelOutputSteps;
  if (trace) trace->assign(kSteps, {});

  std::vector<Tensor<T>> outputs;
  outputs.reserve(kModelOutputSteps);
  for (int t = 0; t < kSteps; ++t) {
    StepTrace<T>* st = trace ? &(*trace)[t] : nullptr;
    Tensor<T> feed;
    if (t < kModelInputSteps) {
      Tensor<T> e1 = conv2d_forward(encoder_input(inputs[t], p.arch), p.enc1);
      relu_inplace(e1);
      Tensor<T> e2 = conv2d_forward(e1, p.enc2);
      relu_inplace(e2);
      feed = e2;
      if (st) {
        st->e1 = std::move(e1);
        st->e2 = std::move(e2);
      }
    }
    const Tensor<T>& x1 = t < kModelInputSteps ? feed : zero_feed;
    s1 = cell_step(x1, s1, p.rnn1, st ? &st->c1 : nullptr);
    s2 = cell_step(s1.h, s2, p.rnn2, st ? &st->c2 : nullptr);

    if (t >= kModelInputSteps) {
      Tensor<T> d1 = conv2d_forward(s2.h, p.dec1);
      relu_inplace(d1);
      Tensor<T> d2 = conv2d_forward(d1, p.dec2);
      relu_inplace(d2);
      Tensor<T> y = conv2d_forward(d2, p.dec3);
      if (p.arch.skip) {
        const Tensor<T>& last = inputs[kModelInputSteps - 1];
        for (std::size_t n = 0; n < y.size(); ++n) y.data[n] += last.data[n];
      }
      outputs.push_back(std::move(y));
      if (st) {
        st->h2 = s2.h;
        st->d1 = std::move(d1);
        st->d2 = std::move(d2);
      }
    }
  }
  return outputs;
}

template <typename T>
void check_targets(std::span<const Tensor<T>> targets, const Tensor<T>& like) {
  require(targets.size() == kModelOutputSteps, ErrorKind::Shape,
          "model expects exactly 4 target frames");
  for (const auto& t : targets) {
    require(t.same_shape(like), ErrorKind::Shape, "target frame shape does not match model output");
  }
}

}  // namespace

template <typename T>
std::vector<Tensor<T>> model_forward(std::span<const Tensor<T>> inputs, const NetParams<T>& p) {
  return run_forward<T>(inputs, p, nullptr);
}

template <typename T>
double model_loss(std::span<const Tensor<T>> inputs, std::span<const Tensor<T>> targets,
                  const NetParams<T>& p) {
  const auto out = run_forward<T>(inputs, p, nullptr);
  check_targets(targets, out[0]);
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t i = 0; i < out[k].size(); ++i) {
      const double d = static_cast<double>(out[k].data[i]) - static_cast<double>(targets[k].data[i]);
      sse += d * d;
    }
    n += out[k].size();
  }
  return sse / static_cast<double>(n);
}

template <typename T>
LossAndGrads<T> model_backward(std::span<const Tensor<T>> inputs, std::span<const Tensor<T>> targets,
                               const NetParams<T>& p) {
  std::vector<StepTrace<T>> trace;
  const auto out = run_forward<T>(inputs, p, &trace);
  check_targets(targets, out[0]);

  const std::size_t total = out.size() * out[0].size();
  LossAndGrads<T> res{0.0, NetParams<T>(p.arch)};
  GradStore<T>& g = res.grads;
  std::vector<Tensor<T>> gy(out.size());
  double sse = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    gy[k] = zeros_like(out[k]);
    for (std::size_t i = 0; i < out[k].size(); ++i) {
      const T d = out[k].data[i] - targets[k].data[i];
      sse += static_cast<double>(d) * static_cast<double>(d);
      gy[k].data[i] = T(2) * d / static_cast<T>(total);
    }
  }
  res.loss = sse / static_cast<double>(total);

  const int H = inputs[0].h;
  const int W = inputs[0].w;
  CellState<T> up1 = zero_state(p.rnn1, H, W);
  CellState<T> up2 = zero_state(p.rnn2, H, W);
  for (int t = kModelInputSteps + kModelOutputSteps - 1; t >= 0; --t) {
    StepTrace<T>& st = trace[t];
    if (t >= kModelInputSteps) {
      const auto& gout = gy[t - kModelInputSteps];
      Tensor<T> g_d2 = zeros_like(st.d2);
      conv2d_backward_accumulate(st.d2, p.dec3, gout, &g_d2, g.dec3);
      relu_backward_inplace(st.d2, g_d2);
      Tensor<T> g_d1 = zeros_like(st.d1);
      conv2d_backward_accumulate(st.d1, p.dec2, g_d2, &g_d1, g.dec2);
      relu_backward_inplace(st.d1, g_d1);
      conv2d_backward_accumulate(st.h2, p.dec1, g_d1, &up2.h, g.dec1);
    }

    Tensor<T> g_h1_in(p.rnn2.input_ch, H, W);
    CellState<T> prev2 = zero_state(p.rnn2, H, W);
    cell_backward(st.c2, p.rnn2, up2, g_h1_in, prev2, g.rnn2);
    up2 = std::move(prev2);
    for (std::size_t n = 0; n < g_h1_in.size(); ++n) up1.h.data[n] += g_h1_in.data[n];

    Tensor<T> g_e2(p.rnn1.input_ch, H, W);
    CellState<T> prev1 = zero_state(p.rnn1, H, W);
    cell_backward(st.c1, p.rnn1, up1, g_e2, prev1, g.rnn1);
    up1 = std::move(prev1);

    if (t < kModelInputSteps) {
      relu_backward_inplace(st.e2, g_e2);
      Tensor<T> g_e1 = zeros_like(st.e1);
      conv2d_backward_accumulate(st.e1, p.enc2, g_e2, &g_e1, g.enc2);
      relu_backward_inplace(st.e1, g_e1);
      conv2d_backward_accumulate<T>(encoder_input(inputs[t], p.arch), p.enc1, g_e1, nullptr, g.enc1);
    }
  }
  return res;
}

#define NOWCAST_INSTANTIATE_MODEL(T)                                                          \
  template struct NetParams<T>;                                                               \
  template NetParams<T> init_params<T>(const Arch&, std::uint64_t);                           \
  template bool congruent(const NetParams<T>&, const NetParams<T>&);                          \
  template std::vector<Tensor<T>> model_forward(std::span<const Tensor<T>>, const NetParams<T>&); \
  template LossAndGrads<T> model_backward(std::span<const Tensor<T>>,                         \
                                          std::span<const Tensor<T>>, const NetParams<T>&);   \
  template double model_loss(std::span<const Tensor<T>>, std::span<const Tensor<T>>,          \
                             const NetParams<T>&);

NOWCAST_INSTANTIATE_MODEL(float)
NOWCAST_INSTANTIATE_MODEL(double)

template NetParams<double> convert_params<double, float>(const NetParams<float>&);
template NetParams<float> convert_params<float, double>(const NetParams<double>&);
template NetParams<float> convert_params<float, float>(const NetParams<float>&);
template NetParams<double> convert_params<double, double>(const NetParams<double>&);

#undef NOWCAST_INSTANTIATE_MODEL

}  // namespace nowcast::nn
