#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparsescan/random.hpp"
#include "sparsescan/raster.hpp"

namespace sparsescan {

// Weighted determinantal point process over pixels.
//
// The kernel couples per-pixel saliency u with a Gaussian location similarity:
//
//   L_ij = u_i^gamma * exp(-((x_i-x_j)^2 + (y_i-y_j)^2) / sigma_s^2) * u_j^gamma
//
// gamma = 0 gives a pure diversity DPP; larger gamma favours salient pixels.
// Exact sampling goes through the spectral decomposition of L. Full images are
// split into independent tiles so each kernel stays small enough to decompose.

inline constexpr double kDefaultGamma = 2.0;
inline constexpr double kDefaultSigma = 2.0;
inline constexpr int kDefaultTile = 32;
// Added to every saliency value before exponentiation in the tiled sampler.
inline constexpr double kSaliencyFloor = 1e-6;
// Eigenvalues below this are treated as exactly zero.
inline constexpr double kEigenvalueFloor = 1e-10;

struct PixelCoord {
  double x = 0.0;  // column
  double y = 0.0;  // row
};

struct WdppParams {
  double gamma = kDefaultGamma;
  double sigma_s = kDefaultSigma;
};

class KernelMatrix {
 public:
  KernelMatrix(Eigen::MatrixXd entries, std::vector<PixelCoord> coords, WdppParams params);

  std::size_t size() const noexcept { return coords_.size(); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  const std::vector<PixelCoord>& coords() const noexcept { return coords_; }
  const WdppParams& params() const noexcept { return params_; }

 private:
  Eigen::MatrixXd entries_;
  std::vector<PixelCoord> coords_;
  WdppParams params_;
};

KernelMatrix build_kernel(std::span<const double> saliency, std::span<const PixelCoord> coords,
                          double gamma, double sigma_s);

// Eigenpairs of a symmetric kernel. Eigenvalues ascend; columns of
// `eigenvectors` are orthonormal.
struct EigenBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  // Number of strictly positive (post-clamp) eigenvalues.
  std::size_t rank() const noexcept;
};

EigenBasis eigendecompose(const Eigen::MatrixXd& symmetric);
EigenBasis eigendecompose(const KernelMatrix& kernel);

using IndexSet = std::vector<std::size_t>;

// One exact draw from the DPP with kernel V diag(lambda) V^T. Eigenvector n
// is kept with probability lambda_n / (lambda_n + 1); items are then drawn
// one at a time from the span of the kept vectors. Sorted ascending.
IndexSet dpp_sample(const EigenBasis& basis, Rng& rng);

// Fixed-size variant: the kept eigenvector set has exactly k members, chosen
// with probability proportional to the product of their eigenvalues.
// Requires k <= basis.rank().
IndexSet kdpp_sample(const EigenBasis& basis, std::size_t k, Rng& rng);

// Items drawn from the span of the given orthonormal columns, one per column.
IndexSet sample_projection(Eigen::MatrixXd basis, Rng& rng);

struct SampleBudget {
  std::size_t k = 0;
  int tile = kDefaultTile;
  std::uint64_t seed = 0;
};

// Splits k across bins proportionally to `mass` by largest remainder (ties to
// the lower index). Bins are clamped at `capacity` and the overflow is
// re-apportioned among the open bins. When the open bins carry no mass the
// split is proportional to remaining capacity. Requires k <= sum(capacity).
std::vector<std::size_t> apportion_budget(std::span<const double> mass,
                                          std::span<const std::size_t> capacity, std::size_t k);

// Tiled WDPP sampler. Construction builds and decomposes one kernel per tile,
// which dominates the cost; sample() can then be called for any budget and
// seed. Pixels set in `excluded` are never candidates.
class TiledWdppSampler {
 public:
  TiledWdppSampler(const ErrorMap& saliency, int tile, WdppParams params, int threads = 0);
  TiledWdppSampler(const ErrorMap& saliency, int tile, WdppParams params, const Bitmap& excluded,
                   int threads = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t tile_count() const noexcept { return tiles_.size(); }
  std::size_t candidate_count() const noexcept { return candidates_; }

  // Per-tile sample counts for a total budget k, in tile row-major order.
  std::vector<std::size_t> tile_budgets(std::size_t k) const;

  // Output is a pure function of (saliency, tile, params, k, seed); each
  // tile draws from its own stream seeded by (seed, tile row, tile column).
  Bitmap sample(std::size_t k, std::uint64_t seed, int threads = 0) const;

 private:
  struct Tile {
    int tile_row = 0;
    int tile_col = 0;
    std::vector<std::size_t> pixels;  // global row-major indices of candidates
    double mass = 0.0;
    EigenBasis basis;
  };

  int width_ = 0;
  int height_ = 0;
  std::size_t candidates_ = 0;
  std::vector<Tile> tiles_;
};

Bitmap tiled_wdpp_bitmap(const ErrorMap& saliency, const SampleBudget& budget, double gamma,
                         double sigma_s, int threads = 0);

// The k largest values; ties go to the smaller row-major index.
Bitmap topk_bitmap(const ErrorMap& saliency, std::size_t k);
Bitmap topk_bitmap(const ErrorMap& saliency, std::size_t k, const Bitmap& excluded);

// Uniformly random k-subset by partial Fisher-Yates; deterministic per seed.
Bitmap random_bitmap(int width, int height, std::size_t k, std::uint64_t seed);
Bitmap random_bitmap(const Bitmap& excluded, std::size_t k, std::uint64_t seed);

}  // namespace sparsescan
