#pragma once

#include <filesystem>

#include "sparsescan/raster.hpp"

namespace sparsescan {

// Binarization threshold for error maps; finite and non-negative.
class Threshold {
 public:
  explicit Threshold(double epsilon);
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

// Ground-truth error |a - b|, either on images (task without ROI) or on
// ROI probability maps (task with ROI).
ErrorMap residual_error(const Image& a, const Image& b);
ErrorMap residual_error(const ProbabilityMap& a, const ProbabilityMap& b);

// Sobel gradient magnitude sqrt(Gx^2 + Gy^2), clamp-to-edge borders.
ErrorMap gradient_saliency(const Image& image);

// Binary entropy in bits; 0 log 0 := 0, so the maximum is 1 at p = 0.5.
ErrorMap entropy_saliency(const ProbabilityMap& p);

// The mean of the error distribution.
Threshold mean_threshold(const ErrorMap& errors);

// Set iff value > epsilon.
Bitmap binarize(const ErrorMap& errors, const Threshold& threshold);

// Reads an externally estimated error map; values must lie in [0,1].
ErrorMap load_estimated_error(const std::filesystem::path& path);

// ROI maps and probabilities: EMAP (values in [0,1]) or 8-bit PGM/PNG.
ProbabilityMap load_probability_map(const std::filesystem::path& path);

}  // namespace sparsescan
