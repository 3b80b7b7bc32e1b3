#include <benchmark/benchmark.h>

#include <random>

#include "nowcast/events.hpp"
#include "nowcast/layers.hpp"
#include "nowcast/model.hpp"
#include "nowcast/rainfall.hpp"

using namespace nowcast;

namespace {

void BM_Conv2dForward(benchmark::State& state) {
  const int ch = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  nn::Tensor<float> x(ch, n, n);
  for (float& v : x.data) v = u(rng);
  nn::ConvParams<float> p(ch, ch);
  for (float& k : p.kernels) k = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_forward(x, p));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ch) * ch * n * n * 9);
}
BENCHMARK(BM_Conv2dForward)->Args({4, 32})->Args({16, 64})->Args({64, 64});

void BM_ModelBackwardDesk(benchmark::State& state) {
  const auto p = nn::init_params<float>(nn::Arch::desk(), 3);
  std::vector<nn::Tensor<float>> x(4, nn::Tensor<float>(1, 32, 32, 0.8f)), y = x;
  for (auto _ : state) benchmark::DoNotOptimize(nn::model_backward<float>(x, y, p));
}
BENCHMARK(BM_ModelBackwardDesk)->Unit(benchmark::kMillisecond);

void BM_Label18(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(2);
  std::bernoulli_distribution on(0.2);
  MaskVolume m{16, n, n, std::vector<std::uint8_t>(16 * n * n)};
  for (auto& c : m.cells) c = on(rng);
  for (auto _ : state) benchmark::DoNotOptimize(label_components_18(m));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m.cells.size()));
}
BENCHMARK(BM_Label18)->Arg(64)->Arg(256);

void BM_UpsampleToRadar(benchmark::State& state) {
  std::vector<float> v(kSatelliteGrid * kSatelliteGrid);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i % 97) * 0.1f;
  const Field2D f(kSatelliteGrid, kSatelliteGrid, v, Unit::MmPerH);
  for (auto _ : state) benchmark::DoNotOptimize(upsample_to_radar_grid(f));
}
BENCHMARK(BM_UpsampleToRadar)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
