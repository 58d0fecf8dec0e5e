#pragma once

#include <vector>

#include "sparsescan/raster.hpp"

namespace sparsescan {

// Mean absolute difference.
double l1_loss(const RasterView& a, const RasterView& b);

// 10 log10(1 / MSE) in dB for range [0,1]; +infinity when MSE is zero.
double psnr(const RasterView& a, const RasterView& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

// Mean SSIM over every fully contained 11x11 Gaussian window (sigma 1.5).
double ssim(const RasterView& a, const RasterView& b);

// Sample Pearson correlation; throws ValidationError if either input is constant.
double pearson(const RasterView& a, const RasterView& b);

struct SparsificationCurve {
  std::vector<double> fractions;
  std::vector<double> residuals;
};

// 0, 0.01, ..., 0.10, 0.15, 0.20, ..., 1.0
std::vector<double> default_fractions();

// Number of pixels removed at fraction f of n pixels: floor(f n), tolerant to
// the representation error of decimal fractions.
std::size_t removed_count(double fraction, std::size_t n);

// For each fraction f, zero the truth at the floor(f N) pixels ranked highest
// by `estimated` (ties to the lower row-major index) and record the mean of
// what remains.
SparsificationCurve sparsification_curve(const ErrorMap& estimated, const ErrorMap& truth,
                                         const std::vector<double>& fractions);

}  // namespace sparsescan
