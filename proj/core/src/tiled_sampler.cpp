#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsescan/parallel.hpp"
#include "sparsescan/wdpp.hpp"

namespace sparsescan {

std::vector<std::size_t> apportion_budget(std::span<const double> mass,
                                          std::span<const std::size_t> capacity, std::size_t k) {
  const std::size_t bins = mass.size();
  if (capacity.size() != bins) throw ValidationError("apportion_budget: mass and capacity sizes differ");
  const std::size_t total_capacity = std::accumulate(capacity.begin(), capacity.end(), std::size_t{0});
  if (k > total_capacity) {
    throw ValidationError("apportion_budget: budget " + std::to_string(k) + " exceeds capacity " +
                          std::to_string(total_capacity));
  }

  std::vector<std::size_t> budget(bins, 0);
  std::vector<std::size_t> open;
  for (std::size_t b = 0; b < bins; ++b) {
    if (capacity[b] > 0) open.push_back(b);
  }
  std::size_t remaining = k;
  while (remaining > 0 && !open.empty()) {
    long double open_mass = 0.0L;
    for (auto b : open) open_mass += std::max(mass[b], 0.0);
    std::vector<long double> weight(open.size());
    for (std::size_t i = 0; i < open.size(); ++i) {
      weight[i] = open_mass > 0.0L ? static_cast<long double>(std::max(mass[open[i]], 0.0))
                                   : static_cast<long double>(capacity[open[i]]);
    }
    const long double total = std::accumulate(weight.begin(), weight.end(), 0.0L);

    std::vector<std::size_t> alloc(open.size());
    std::vector<long double> frac(open.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < open.size(); ++i) {
      const long double quota = static_cast<long double>(remaining) * weight[i] / total;
      const long double whole = std::floor(quota);
      alloc[i] = static_cast<std::size_t>(whole);
      frac[i] = weight[i] > 0.0L ? quota - whole : -1.0L;
      assigned += alloc[i];
    }
    std::vector<std::size_t> order(open.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    // Rounding can leave the floors off by one in either direction.
    while (assigned > remaining) {
      for (auto it = order.rbegin(); it != order.rend() && assigned > remaining; ++it) {
        if (alloc[*it] > 0) {
          --alloc[*it];
          --assigned;
        }
      }
    }
    for (std::size_t i = 0; assigned < remaining; i = (i + 1) % order.size()) {
      if (weight[order[i]] > 0.0L) {
        ++alloc[order[i]];
        ++assigned;
      }
    }

    std::vector<std::size_t> still_open;
    bool saturated = false;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (alloc[i] > capacity[open[i]]) saturated = true;
    }
    if (!saturated) {
      for (std::size_t i = 0; i < open.size(); ++i) budget[open[i]] = alloc[i];
      break;
    }
    for (std::size_t i = 0; i < open.size(); ++i) {
      const std::size_t b = open[i];
      if (alloc[i] > capacity[b]) {
        budget[b] = capacity[b];
        remaining -= capacity[b];
      } else {
        still_open.push_back(b);
      }
    }
    open = std::move(still_open);
  }
  return budget;
}

TiledWdppSampler::TiledWdppSampler(const ErrorMap& saliency, int tile, WdppParams params, int threads)
    : TiledWdppSampler(saliency, tile, params, Bitmap(saliency.width(), saliency.height()), threads) {}

TiledWdppSampler::TiledWdppSampler(const ErrorMap& saliency, int tile, WdppParams params,
                                   const Bitmap& excluded, int threads)
    : width_(saliency.width()), height_(saliency.height()) {
  if (tile < 1) throw ValidationError("tile size must be >= 1, got " + std::to_string(tile));
  if (excluded.width() != width_ || excluded.height() != height_) {
    throw ValidationError("TiledWdppSampler: exclusion mask dimension mismatch");
  }
  if (!(params.sigma_s > 0.0)) throw ValidationError("sigma_s must be positive");
  if (!(params.gamma >= 0.0)) throw ValidationError("gamma must be non-negative");

  const int tile_rows = (height_ + tile - 1) / tile;
  const int tile_cols = (width_ + tile - 1) / tile;
  tiles_.resize(static_cast<std::size_t>(tile_rows) * tile_cols);
  for (int tr = 0; tr < tile_rows; ++tr) {
    for (int tc = 0; tc < tile_cols; ++tc) {
      Tile& t = tiles_[static_cast<std::size_t>(tr) * tile_cols + tc];
      t.tile_row = tr;
      t.tile_col = tc;
      for (int r = tr * tile; r < std::min(height_, (tr + 1) * tile); ++r) {
        for (int c = tc * tile; c < std::min(width_, (tc + 1) * tile); ++c) {
          const std::size_t idx = static_cast<std::size_t>(r) * width_ + c;
          if (excluded[idx]) continue;
          t.pixels.push_back(idx);
          t.mass += saliency[idx];
        }
      }
      candidates_ += t.pixels.size();
    }
  }

  parallel_for(tiles_.size(), threads, [&](std::size_t i) {
    Tile& t = tiles_[i];
    if (t.pixels.empty()) return;
    std::vector<double> u(t.pixels.size());
    std::vector<PixelCoord> coords(t.pixels.size());
    for (std::size_t p = 0; p < t.pixels.size(); ++p) {
      const std::size_t idx = t.pixels[p];
      u[p] = saliency[idx] + kSaliencyFloor;
      coords[p] = {static_cast<double>(idx % width_), static_cast<double>(idx / width_)};
    }
    t.basis = eigendecompose(build_kernel(u, coords, params.gamma, params.sigma_s));
  });
}

std::vector<std::size_t> TiledWdppSampler::tile_budgets(std::size_t k) const {
  if (k > candidates_) {
    throw ValidationError("sample budget " + std::to_string(k) + " exceeds the " +
                          std::to_string(candidates_) + " candidate pixels");
  }
  std::vector<double> mass(tiles_.size());
  std::vector<std::size_t> capacity(tiles_.size());
  for (std::size_t i = 0; i < tiles_.size(); ++i) {
    mass[i] = tiles_[i].mass;
    capacity[i] = tiles_[i].pixels.size();
  }
  return apportion_budget(mass, capacity, k);
}

Bitmap TiledWdppSampler::sample(std::size_t k, std::uint64_t seed, int threads) const {
  const auto budgets = tile_budgets(k);
  std::vector<std::vector<std::size_t>> chosen(tiles_.size());
  parallel_for(tiles_.size(), threads, [&](std::size_t i) {
    const Tile& t = tiles_[i];
    const std::size_t want = budgets[i];
    if (want == 0) return;
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t.tile_row), static_cast<std::uint64_t>(t.tile_col)}));
    const std::size_t from_dpp = std::min(want, t.basis.rank());
    IndexSet local = kdpp_sample(t.basis, from_dpp, rng);

    // Budget beyond the numerical rank is filled uniformly from the rest of the tile.
    if (from_dpp < want) {
      std::vector<std::uint8_t> taken(t.pixels.size(), 0);
      for (auto p : local) taken[p] = 1;
      std::vector<std::size_t> pool;
      for (std::size_t p = 0; p < t.pixels.size(); ++p) {
        if (!taken[p]) pool.push_back(p);
      }
      for (std::size_t j = 0; j < want - from_dpp; ++j) {
        const auto pick = j + uniform_below(rng, pool.size() - j);
        std::swap(pool[j], pool[pick]);
        local.push_back(pool[j]);
      }
    }
    chosen[i].reserve(local.size());
    for (auto p : local) chosen[i].push_back(t.pixels[p]);
  });

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width_) * height_, 0);
  for (const auto& tile_items : chosen) {
    for (auto idx : tile_items) bits[idx] = 1;
  }
  return Bitmap(width_, height_, std::move(bits));
}

Bitmap tiled_wdpp_bitmap(const ErrorMap& saliency, const SampleBudget& budget, double gamma,
                         double sigma_s, int threads) {
  if (budget.k > saliency.size()) {
    throw ValidationError("sample budget " + std::to_string(budget.k) + " exceeds pixel count " +
                          std::to_string(saliency.size()));
  }
  if (budget.k == 0) return Bitmap(saliency.width(), saliency.height());
  const TiledWdppSampler sampler(saliency, budget.tile, WdppParams{gamma, sigma_s}, threads);
  return sampler.sample(budget.k, budget.seed, threads);
}

namespace {

std::vector<std::size_t> candidates_of(const Bitmap& excluded) {
  std::vector<std::size_t> out;
  out.reserve(excluded.size() - excluded.popcount());
  for (std::size_t i = 0; i < excluded.size(); ++i) {
    if (!excluded[i]) out.push_back(i);
  }
  return out;
}

void check_budget(std::size_t k, std::size_t available) {
  if (k > available) {
    throw ValidationError("sample budget " + std::to_string(k) + " exceeds the " +
                          std::to_string(available) + " candidate pixels");
  }
}

}  // namespace

Bitmap topk_bitmap(const ErrorMap& saliency, std::size_t k) {
  return topk_bitmap(saliency, k, Bitmap(saliency.width(), saliency.height()));
}

Bitmap topk_bitmap(const ErrorMap& saliency, std::size_t k, const Bitmap& excluded) {
  if (excluded.width() != saliency.width() || excluded.height() != saliency.height()) {
    throw ValidationError("topk_bitmap: exclusion mask dimension mismatch");
  }
  auto order = candidates_of(excluded);
  check_budget(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return saliency[a] > saliency[b] || (saliency[a] == saliency[b] && a < b);
                    });
  std::vector<std::uint8_t> bits(saliency.size(), 0);
  for (std::size_t i = 0; i < k; ++i) bits[order[i]] = 1;
  return Bitmap(saliency.width(), saliency.height(), std::move(bits));
}

Bitmap random_bitmap(int width, int height, std::size_t k, std::uint64_t seed) {
  return random_bitmap(Bitmap(width, height), k, seed);
}

Bitmap random_bitmap(const Bitmap& excluded, std::size_t k, std::uint64_t seed) {
  auto pool = candidates_of(excluded);
  check_budget(k, pool.size());
  Rng rng(seed);
  std::vector<std::uint8_t> bits(excluded.size(), 0);
  for (std::size_t j = 0; j < k; ++j) {
    const auto pick = j + uniform_below(rng, pool.size() - j);
    std::swap(pool[j], pool[pick]);
    bits[pool[j]] = 1;
  }
  return Bitmap(excluded.width(), excluded.height(), std::move(bits));
}

}  // namespace sparsescan
