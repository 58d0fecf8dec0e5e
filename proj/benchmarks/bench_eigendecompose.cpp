#include <benchmark/benchmark.h>

#include <vector>

#include "sparsescan/random.hpp"
#include "sparsescan/wdpp.hpp"

namespace {

using namespace sparsescan;

KernelMatrix tile_kernel(int side) {
  Rng rng(7);
  std::vector<PixelCoord> coords;
  std::vector<double> u;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      coords.push_back({static_cast<double>(c), static_cast<double>(r)});
      u.push_back(uniform01(rng) + kSaliencyFloor);
    }
  }
  return build_kernel(u, coords, 2.0, 2.0);
}

void BM_BuildKernel(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tile_kernel(side));
}
BENCHMARK(BM_BuildKernel)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Eigendecompose(benchmark::State& state) {
  const auto k = tile_kernel(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(k));
  state.SetComplexityN(static_cast<long>(k.entries().rows()));
}
BENCHMARK(BM_Eigendecompose)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

}  // namespace
