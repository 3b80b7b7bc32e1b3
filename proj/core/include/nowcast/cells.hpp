#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "nowcast/layers.hpp"

namespace nowcast::nn {

enum class CellKind : unsigned char { ConvGru = 0, ConvLstm = 1 };

std::string_view to_string(CellKind kind);
CellKind parse_cell_kind(std::string_view name);

/// Gate convolutions of one recurrent cell, each over the channel
/// concatenation of input and hidden state.
///   ConvGRU:  gates = {z, r, candidate}
///   ConvLSTM: gates = {i, f, o, g}
template <typename T>
struct RecurrentCellParams {
  CellKind kind = CellKind::ConvGru;
  int input_ch = 0;
  int hidden_ch = 0;
  std::vector<ConvParams<T>> gates;

  RecurrentCellParams() = default;
  RecurrentCellParams(CellKind k, int in, int hidden);

  friend bool operator==(const RecurrentCellParams&, const RecurrentCellParams&) = default;
};

inline constexpr int gate_count(CellKind k) { return k == CellKind::ConvGru ? 3 : 4; }

/// Hidden state; `c` is only populated for ConvLSTM.
template <typename T>
struct CellState {
  Tensor<T> h;
  Tensor<T> c;
};

template <typename T>
CellState<T> zero_state(const RecurrentCellParams<T>& p, int height, int width);

/// Everything a step's backward pass needs.
template <typename T>
struct CellCache {
  Tensor<T> xh;              // [x; h_prev]
  Tensor<T> xrh;             // GRU: [x; r * h_prev]
  std::vector<Tensor<T>> gate;  // activated gate values, in gate order
  Tensor<T> c_prev;          // LSTM
  Tensor<T> tanh_c;          // LSTM: tanh(c_next)
};

/// One recurrent update. If `cache` is non-null it is filled for backward.
template <typename T>
CellState<T> cell_step(const Tensor<T>& x, const CellState<T>& state,
                       const RecurrentCellParams<T>& p, CellCache<T>* cache = nullptr);

/// Backward through one step. `upstream` holds dL/dh_next (and dL/dc_next for
/// LSTM). Writes dL/dx and dL/d(previous state); accumulates into grads.
template <typename T>
void cell_backward(const CellCache<T>& cache, const RecurrentCellParams<T>& p,
                   const CellState<T>& upstream, Tensor<T>& grad_x, CellState<T>& grad_prev,
                   RecurrentCellParams<T>& grads);

/// z = s(conv_z[x;h]), r = s(conv_r[x;h]), c = tanh(conv_c[x; r*h]),
/// h' = (1 - z) h + z c.
template <typename T>
Tensor<T> convgru_step(const Tensor<T>& x, const Tensor<T>& h, const RecurrentCellParams<T>& p);

/// i,f,o = s(conv[x;h]), g = tanh(conv[x;h]), c' = f c + i g, h' = o tanh(c').
template <typename T>
std::pair<Tensor<T>, Tensor<T>> convlstm_step(const Tensor<T>& x, const Tensor<T>& h,
                                              const Tensor<T>& c,
                                              const RecurrentCellParams<T>& p);

}  // namespace nowcast::nn
