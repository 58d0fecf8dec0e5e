#include "sparsescan/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>

namespace sparsescan {
namespace {

void require_nonempty(const RasterView& a, const char* what) {
  if (a.size() == 0) throw ValidationError(std::string(what) + ": empty raster");
}

std::array<double, kSsimWindow> gaussian_window() {
  std::array<double, kSsimWindow> w{};
  const int half = kSsimWindow / 2;
  double total = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - half;
    w[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

// Valid-mode separable filtering of f(a_i, b_i).
template <class F>
std::vector<double> filter_valid(const RasterView& a, const RasterView& b, F f) {
  static const auto window = gaussian_window();
  const int w = a.width;
  const int h = a.height;
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += window[k] * f(a(r, c + k), b(r, c + k));
      rows[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) acc += window[k] * rows[static_cast<std::size_t>(r + k) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace

double l1_loss(const RasterView& a, const RasterView& b) {
  require_same_shape(a, b, "l1_loss");
  require_nonempty(a, "l1_loss");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a.values[i] - b.values[i]);
  return sum / static_cast<double>(a.size());
}

double psnr(const RasterView& a, const RasterView& b) {
  require_same_shape(a, b, "psnr");
  require_nonempty(a, "psnr");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const RasterView& a, const RasterView& b) {
  require_same_shape(a, b, "ssim");
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw ValidationError("ssim: image " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                          " is smaller than the 11x11 window");
  }
  const auto mu_a = filter_valid(a, b, [](double x, double) { return x; });
  const auto mu_b = filter_valid(a, b, [](double, double y) { return y; });
  const auto e_aa = filter_valid(a, b, [](double x, double) { return x * x; });
  const auto e_bb = filter_valid(a, b, [](double, double y) { return y * y; });
  const auto e_ab = filter_valid(a, b, [](double x, double y) { return x * y; });
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    const double num = (2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2);
    const double den = (ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

double pearson(const RasterView& a, const RasterView& b) {
  require_same_shape(a, b, "pearson");
  require_nonempty(a, "pearson");
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(a.values) || constant(b.values)) {
    throw ValidationError("pearson: correlation undefined, an input has zero variance");
  }
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.values.begin(), a.values.end(), 0.0) / n;
  const double mb = std::accumulate(b.values.begin(), b.values.end(), 0.0) / n;
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.values[i] - ma;
    const double db = b.values[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw ValidationError("pearson: correlation undefined, an input has zero variance");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<double> default_fractions() {
  std::vector<double> f;
  for (int i = 0; i <= 10; ++i) f.push_back(i / 100.0);
  for (int i = 15; i <= 100; i += 5) f.push_back(i / 100.0);
  return f;
}

std::size_t removed_count(double fraction, std::size_t n) {
  const double scaled = fraction * static_cast<double>(n);
  const auto m = static_cast<std::size_t>(std::floor(scaled + 1e-9 * std::max(1.0, scaled)));
  return std::min(m, n);
}

SparsificationCurve sparsification_curve(const ErrorMap& estimated, const ErrorMap& truth,
                                         const std::vector<double>& fractions) {
  require_same_shape(estimated, truth, "sparsification_curve");
  require_nonempty(truth, "sparsification_curve");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] >= 0.0 && fractions[i] <= 1.0)) {
      throw ValidationError("sparsification_curve: fraction " + std::to_string(fractions[i]) + " outside [0,1]");
    }
    if (i > 0 && !(fractions[i] > fractions[i - 1])) {
      throw ValidationError("sparsification_curve: fractions must be strictly ascending");
    }
  }
  const std::size_t n = truth.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return estimated[a] > estimated[b] || (estimated[a] == estimated[b] && a < b);
  });
  // tail[m] = sum of truth over ranks m..n-1, accumulated from the bottom so tail[n] = 0 exactly.
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t m = n; m-- > 0;) tail[m] = tail[m + 1] + truth[order[m]];

  SparsificationCurve curve;
  curve.fractions = fractions;
  curve.residuals.reserve(fractions.size());
  for (double f : fractions) curve.residuals.push_back(tail[removed_count(f, n)] / static_cast<double>(n));
  return curve;
}

}  // namespace sparsescan
