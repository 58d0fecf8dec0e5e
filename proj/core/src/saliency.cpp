#include "sparsescan/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace sparsescan {

Threshold::Threshold(double epsilon) : epsilon_(epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ValidationError("threshold must be finite and non-negative, got " + std::to_string(epsilon));
  }
}

namespace {

ErrorMap abs_difference(const RasterView& a, const RasterView& b) {
  require_same_shape(a, b, "residual_error");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(a.values[i] - b.values[i]);
  return ErrorMap(a.width, a.height, std::move(out));
}

double entropy_bits(double p) {
  const auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return term(p) + term(1.0 - p);
}

}  // namespace

ErrorMap residual_error(const Image& a, const Image& b) { return abs_difference(a, b); }

ErrorMap residual_error(const ProbabilityMap& a, const ProbabilityMap& b) {
  return abs_difference(a, b);
}

ErrorMap gradient_saliency(const Image& image) {
  const int w = image.width();
  const int h = image.height();
  if (w < 3 || h < 3) {
    throw ValidationError("gradient_saliency: image " + std::to_string(w) + "x" + std::to_string(h) +
                          " is smaller than the 3x3 kernel");
  }
  const auto px = [&](int r, int c) { return image(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1)); };
  std::vector<double> out(image.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double gx = (px(r - 1, c + 1) + 2.0 * px(r, c + 1) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2.0 * px(r, c - 1) + px(r + 1, c - 1));
      const double gy = (px(r + 1, c - 1) + 2.0 * px(r + 1, c) + px(r + 1, c + 1)) -
                        (px(r - 1, c - 1) + 2.0 * px(r - 1, c) + px(r - 1, c + 1));
      out[static_cast<std::size_t>(r) * w + c] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return ErrorMap(w, h, std::move(out));
}

ErrorMap entropy_saliency(const ProbabilityMap& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = entropy_bits(p[i]);
  return ErrorMap(p.width(), p.height(), std::move(out));
}

Threshold mean_threshold(const ErrorMap& errors) {
  if (errors.empty()) throw ValidationError("mean_threshold: empty error map");
  // Neumaier summation.
  double sum = 0.0;
  double carry = 0.0;
  for (double v : errors.values()) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  // Rounding can push the mean of a constant map past its value.
  const auto [lo, hi] = std::minmax_element(errors.values().begin(), errors.values().end());
  return Threshold(std::clamp((sum + carry) / static_cast<double>(errors.size()), *lo, *hi));
}

Bitmap binarize(const ErrorMap& errors, const Threshold& threshold) {
  std::vector<std::uint8_t> bits(errors.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = errors[i] > threshold.epsilon();
  return Bitmap(errors.width(), errors.height(), std::move(bits));
}

ErrorMap load_estimated_error(const std::filesystem::path& path) {
  ErrorMap map = read_emap(path);
  const auto values = map.values();
  const auto bad = std::find_if(values.begin(), values.end(), [](double v) { return v > 1.0; });
  if (bad != values.end()) {
    throw ValidationError("estimated error '" + path.string() + "' has value " + std::to_string(*bad) +
                          " outside [0,1] at index " + std::to_string(bad - values.begin()));
  }
  return map;
}

ProbabilityMap load_probability_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  if (in && in.read(magic, 4) && std::string(magic, 4) == "EMAP") {
    return raster_cast<ProbabilityMap>(load_estimated_error(path));
  }
  return raster_cast<ProbabilityMap>(load_image(path));
}

}  // namespace sparsescan
