#include <benchmark/benchmark.h>

#include <vector>

#include "sparsescan/metrics.hpp"
#include "sparsescan/random.hpp"
#include "sparsescan/saliency.hpp"

namespace {

using namespace sparsescan;

Image noise(int side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(side) * side);
  for (auto& x : v) x = uniform01(rng);
  return Image(side, side, std::move(v));
}

void BM_Psnr(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto a = noise(side, 1);
  const auto b = noise(side, 2);
  for (auto _ : state) benchmark::DoNotOptimize(psnr(a.view(), b.view()));
}
BENCHMARK(BM_Psnr)->Arg(256)->Arg(1024);

void BM_Ssim(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto a = noise(side, 1);
  const auto b = noise(side, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a.view(), b.view()));
}
BENCHMARK(BM_Ssim)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_GradientSaliency(benchmark::State& state) {
  const auto a = noise(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(gradient_saliency(a));
}
BENCHMARK(BM_GradientSaliency)->Arg(256)->Arg(1024);

void BM_SparsificationCurve(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto truth = residual_error(noise(side, 1), noise(side, 2));
  const auto estimate = gradient_saliency(noise(side, 1));
  const auto fractions = default_fractions();
  for (auto _ : state) benchmark::DoNotOptimize(sparsification_curve(estimate, truth, fractions));
}
BENCHMARK(BM_SparsificationCurve)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
