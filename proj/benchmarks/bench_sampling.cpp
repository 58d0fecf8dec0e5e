#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sparsescan/random.hpp"
#include "sparsescan/wdpp.hpp"

namespace {

using namespace sparsescan;

ErrorMap blob(int side) {
  std::vector<double> v(static_cast<std::size_t>(side) * side);
  const double c = side / 2.0;
  for (int r = 0; r < side; ++r) {
    for (int col = 0; col < side; ++col) {
      const double d2 = (r - c) * (r - c) + (col - c) * (col - c);
      v[static_cast<std::size_t>(r) * side + col] = 0.02 + std::exp(-d2 / (side * side / 8.0));
    }
  }
  return ErrorMap(side, side, std::move(v));
}

EigenBasis basis_of(int side) {
  const auto map = blob(side);
  std::vector<PixelCoord> coords;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) coords.push_back({static_cast<double>(c), static_cast<double>(r)});
  return eigendecompose(build_kernel(map.values(), coords, 1.0, 1.5));
}

void BM_DppSample(benchmark::State& state) {
  const auto b = basis_of(static_cast<int>(state.range(0)));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(dpp_sample(b, rng));
}
BENCHMARK(BM_DppSample)->Arg(8)->Arg(16);

void BM_KdppSample(benchmark::State& state) {
  const auto b = basis_of(16);
  const auto k = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(kdpp_sample(b, k, rng));
}
BENCHMARK(BM_KdppSample)->Arg(4)->Arg(16)->Arg(32);

// Sampling only; the per-tile decompositions happen once, outside the loop.
void BM_TiledSample(benchmark::State& state) {
  const auto map = blob(static_cast<int>(state.range(0)));
  const TiledWdppSampler sampler(map, kDefaultTile, WdppParams{1.0, 1.5}, 1);
  const std::size_t k = map.size() / 10;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(k, seed++, 1));
}
BENCHMARK(BM_TiledSample)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RandomBitmap(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(random_bitmap(side, side, side * side / 10, seed++));
}
BENCHMARK(BM_RandomBitmap)->Arg(128)->Arg(512);

}  // namespace
