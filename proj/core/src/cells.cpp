#include "nowcast/cells.hpp"

#include <cmath>
#include <string>

#include "nowcast/errors.hpp"

namespace nowcast::nn {

std::string_view to_string(CellKind kind) {
  return kind == CellKind::ConvGru ? "convgru" : "convlstm";
}

CellKind parse_cell_kind(std::string_view name) {
  if (name == "convgru") return CellKind::ConvGru;
  if (name == "convlstm") return CellKind::ConvLstm;
  fail(ErrorKind::Config, "unknown cell kind '" + std::string(name) + "' (convgru | convlstm)");
}

template <typename T>
RecurrentCellParams<T>::RecurrentCellParams(CellKind k, int in, int hidden)
    : kind(k), input_ch(in), hidden_ch(hidden) {
  for (int g = 0; g < gate_count(k); ++g) gates.emplace_back(hidden, in + hidden);
}

template <typename T>
CellState<T> zero_state(const RecurrentCellParams<T>& p, int height, int width) {
  CellState<T> s{Tensor<T>(p.hidden_ch, height, width), {}};
  if (p.kind == CellKind::ConvLstm) s.c = Tensor<T>(p.hidden_ch, height, width);
  return s;
}

namespace {

template <typename T>
void check_step_shapes(const Tensor<T>& x, const CellState<T>& s, const RecurrentCellParams<T>& p) {
  require(x.c == p.input_ch, ErrorKind::Shape,
          "recurrent cell: input has " + std::to_string(x.c) + " channels, expected " +
              std::to_string(p.input_ch));
  require(s.h.c == p.hidden_ch && s.h.h == x.h && s.h.w == x.w, ErrorKind::Shape,
          "recurrent cell: hidden state shape mismatch");
  require(static_cast<int>(p.gates.size()) == gate_count(p.kind), ErrorKind::Shape,
          "recurrent cell: wrong gate count");
  if (p.kind == CellKind::ConvLstm) {
    require(s.c.same_shape(s.h), ErrorKind::Shape, "ConvLSTM: cell state shape mismatch");
  }
}

// Adds the first `cx` channels of `g` into gx and the rest into gh.
template <typename T>
void split_add(const Tensor<T>& g, int cx, Tensor<T>& gx, Tensor<T>& gh) {
  const std::size_t nx = static_cast<std::size_t>(cx) * g.plane_size();
  for (std::size_t n = 0; n < nx; ++n) gx.data[n] += g.data[n];
  for (std::size_t n = nx; n < g.size(); ++n) gh.data[n - nx] += g.data[n];
}

template <typename T>
CellState<T> gru_step(const Tensor<T>& x, const CellState<T>& s, const RecurrentCellParams<T>& p,
                      CellCache<T>* cache) {
  const Tensor<T>& h = s.h;
  Tensor<T> xh = concat_channels(x, h);
  Tensor<T> z = conv2d_forward(xh, p.gates[0]);
  sigmoid_inplace(z);
  Tensor<T> r = conv2d_forward(xh, p.gates[1]);
  sigmoid_inplace(r);
  Tensor<T> rh = zeros_like(h);
  for (std::size_t n = 0; n < rh.size(); ++n) rh.data[n] = r.data[n] * h.data[n];
  Tensor<T> xrh = concat_channels(x, rh);
  Tensor<T> cand = conv2d_forward(xrh, p.gates[2]);
  tanh_inplace(cand);

  CellState<T> next{zeros_like(h), {}};
  for (std::size_t n = 0; n < h.size(); ++n) {
    next.h.data[n] = (T(1) - z.data[n]) * h.data[n] + z.data[n] * cand.data[n];
  }
  if (cache) {
    cache->xh = std::move(xh);
    cache->xrh = std::move(xrh);
    cache->gate.clear();
    cache->gate.push_back(std::move(z));
    cache->gate.push_back(std::move(r));
    cache->gate.push_back(std::move(cand));
  }
  return next;
}

template <typename T>
CellState<T> lstm_step(const Tensor<T>& x, const CellState<T>& s, const RecurrentCellParams<T>& p,
                       CellCache<T>* cache) {
  Tensor<T> xh = concat_channels(x, s.h);
  Tensor<T> i = conv2d_forward(xh, p.gates[0]);
  Tensor<T> f = conv2d_forward(xh, p.gates[1]);
  Tensor<T> o = conv2d_forward(xh, p.gates[2]);
  Tensor<T> g = conv2d_forward(xh, p.gates[3]);
  sigmoid_inplace(i);
  sigmoid_inplace(f);
  sigmoid_inplace(o);
  tanh_inplace(g);

  CellState<T> next{zeros_like(s.h), zeros_like(s.c)};
  Tensor<T> tc = zeros_like(s.c);
  for (std::size_t n = 0; n < s.c.size(); ++n) {
    next.c.data[n] = f.data[n] * s.c.data[n] + i.data[n] * g.data[n];
    tc.data[n] = std::tanh(next.c.data[n]);
    next.h.data[n] = o.data[n] * tc.data[n];
  }
  if (cache) {
    cache->xh = std::move(xh);
    cache->gate.clear();
    cache->gate.push_back(std::move(i));
    cache->gate.push_back(std::move(f));
    cache->gate.push_back(std::move(o));
    cache->gate.push_back(std::move(g));
    cache->c_prev = s.c;
    cache->tanh_c = std::move(tc);
  }
  return next;
}

template <typename T>
void gru_backward(const CellCache<T>& cache, const RecurrentCellParams<T>& p,
                  const CellState<T>& up, Tensor<T>& gx, CellState<T>& gprev,
                  RecurrentCellParams<T>& grads) {
  const int cx = p.input_ch;
  const Tensor<T>& z = cache.gate[0];
  const Tensor<T>& r = cache.gate[1];
  const Tensor<T>& cand = cache.gate[2];
  const std::size_t nh = z.size();
  const std::size_t hoff = static_cast<std::size_t>(cx) * z.plane_size();
  const T* h = cache.xh.data.data() + hoff;

  Tensor<T> g_az = zeros_like(z);
  Tensor<T> g_acand = zeros_like(z);
  for (std::size_t n = 0; n < nh; ++n) {
    const T g = up.h.data[n];
    const T zn = z.data[n];
    gprev.h.data[n] += g * (T(1) - zn);
    g_az.data[n] = g * (cand.data[n] - h[n]) * zn * (T(1) - zn);
    g_acand.data[n] = g * zn * (T(1) - cand.data[n] * cand.data[n]);
  }

  Tensor<T> g_xrh = zeros_like(cache.xrh);
  conv2d_backward_accumulate(cache.xrh, p.gates[2], g_acand, &g_xrh, grads.gates[2]);
  Tensor<T> g_ar = zeros_like(r);
  for (std::size_t n = 0; n < hoff; ++n) gx.data[n] += g_xrh.data[n];
  for (std::size_t n = 0; n < nh; ++n) {
    const T g_rh = g_xrh.data[hoff + n];
    const T rn = r.data[n];
    gprev.h.data[n] += g_rh * rn;
    g_ar.data[n] = g_rh * h[n] * rn * (T(1) - rn);
  }

  Tensor<T> g_xh = zeros_like(cache.xh);
  conv2d_backward_accumulate(cache.xh, p.gates[0], g_az, &g_xh, grads.gates[0]);
  conv2d_backward_accumulate(cache.xh, p.gates[1], g_ar, &g_xh, grads.gates[1]);
  split_add(g_xh, cx, gx, gprev.h);
}

template <typename T>
void lstm_backward(const CellCache<T>& cache, const RecurrentCellParams<T>& p,
                   const CellState<T>& up, Tensor<T>& gx, CellState<T>& gprev,
                   RecurrentCellParams<T>& grads) {
  const Tensor<T>& i = cache.gate[0];
  const Tensor<T>& f = cache.gate[1];
  const Tensor<T>& o = cache.gate[2];
  const Tensor<T>& g = cache.gate[3];
  const Tensor<T>& tc = cache.tanh_c;
  std::vector<Tensor<T>> pre(4, zeros_like(i));
  for (std::size_t n = 0; n < i.size(); ++n) {
    const T gh = up.h.data[n];
    const T gc = (up.c.size() ? up.c.data[n] : T(0)) + gh * o.data[n] * (T(1) - tc.data[n] * tc.data[n]);
    const T go = gh * tc.data[n];
    const T gf = gc * cache.c_prev.data[n];
    const T gi = gc * g.data[n];
    const T gg = gc * i.data[n];
    gprev.c.data[n] += gc * f.data[n];
    pre[0].data[n] = gi * i.data[n] * (T(1) - i.data[n]);
    pre[1].data[n] = gf * f.data[n] * (T(1) - f.data[n]);
    pre[2].data[n] = go * o.data[n] * (T(1) - o.data[n]);
    pre[3].data[n] = gg * (T(1) - g.data[n] * g.data[n]);
  }
  Tensor<T> g_xh = zeros_like(cache.xh);
  for (int k = 0; k < 4; ++k) {
    conv2d_backward_accumulate(cache.xh, p.gates[k], pre[k], &g_xh, grads.gates[k]);
  }
  split_add(g_xh, p.input_ch, gx, gprev.h);
}

}  // namespace

template <typename T>
CellState<T> cell_step(const Tensor<T>& x, const CellState<T>& state,
                       const RecurrentCellParams<T>& p, CellCache<T>* cache) {
  check_step_shapes(x, state, p);
  return p.kind == CellKind::ConvGru ? gru_step(x, state, p, cache) : lstm_step(x, state, p, cache);
}

template <typename T>
void cell_backward(const CellCache<T>& cache, const RecurrentCellParams<T>& p,
                   const CellState<T>& upstream, Tensor<T>& grad_x, CellState<T>& grad_prev,
                   RecurrentCellParams<T>& grads) {
  require(grad_x.c == p.input_ch, ErrorKind::Shape, "cell_backward: grad_x channel mismatch");
  require(grad_prev.h.c == p.hidden_ch && upstream.h.c == p.hidden_ch, ErrorKind::Shape,
          "cell_backward: hidden gradient channel mismatch");
  if (p.kind == CellKind::ConvGru) {
    gru_backward(cache, p, upstream, grad_x, grad_prev, grads);
  } else {
    lstm_backward(cache, p, upstream, grad_x, grad_prev, grads);
  }
}

template <typename T>
Tensor<T> convgru_step(const Tensor<T>& x, const Tensor<T>& h, const RecurrentCellParams<T>& p) {
  require(p.kind == CellKind::ConvGru, ErrorKind::Shape, "convgru_step needs ConvGRU parameters");
  return cell_step(x, CellState<T>{h, {}}, p).h;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> convlstm_step(const Tensor<T>& x, const Tensor<T>& h,
                                              const Tensor<T>& c,
                                              const RecurrentCellParams<T>& p) {
  require(p.kind == CellKind::ConvLstm, ErrorKind::Shape, "convlstm_step needs ConvLSTM parameters");
  auto next = cell_step(x, CellState<T>{h, c}, p);
  return {std::move(next.h), std::move(next.c)};
}

#define NOWCAST_INSTANTIATE_CELLS(T)                                                          \
  template struct RecurrentCellParams<T>;                                                     \
  template CellState<T> zero_state(const RecurrentCellParams<T>&, int, int);                  \
  template CellState<T> cell_step(const Tensor<T>&, const CellState<T>&,                      \
                                  const RecurrentCellParams<T>&, CellCache<T>*);              \
  template void cell_backward(const CellCache<T>&, const RecurrentCellParams<T>&,             \
                              const CellState<T>&, Tensor<T>&, CellState<T>&,                 \
                              RecurrentCellParams<T>&);                                       \
  template Tensor<T> convgru_step(const Tensor<T>&, const Tensor<T>&,                         \
                                  const RecurrentCellParams<T>&);                             \
  template std::pair<Tensor<T>, Tensor<T>> convlstm_step(const Tensor<T>&, const Tensor<T>&,  \
                                                         const Tensor<T>&,                    \
                                                         const RecurrentCellParams<T>&);

NOWCAST_INSTANTIATE_CELLS(float)
NOWCAST_INSTANTIATE_CELLS(double)

#undef NOWCAST_INSTANTIATE_CELLS

}  // namespace nowcast::nn
