#include "support/synthetic_em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sparsescan/random.hpp"

namespace sparsescan::testing {
namespace {

std::vector<double> blur3(const std::vector<double>& v, int w, int h) {
  static constexpr double k[3] = {0.25, 0.5, 0.25};
  std::vector<double> tmp(v.size());
  std::vector<double> out(v.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int d = -1; d <= 1; ++d) acc += k[d + 1] * v[r * w + std::clamp(c + d, 0, w - 1)];
      tmp[r * w + c] = acc;
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int d = -1; d <= 1; ++d) acc += k[d + 1] * tmp[std::clamp(r + d, 0, h - 1) * w + c];
      out[r * w + c] = acc;
    }
  }
  return out;
}

double gaussian(Rng& rng) {
  // Box-Muller; avoids implementation-defined std::normal_distribution.
  const double u1 = std::max(uniform01(rng), 1e-300);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

}  // namespace

Image synthetic_em(int width, int height, std::uint64_t seed) {
  Rng rng(seed);
  struct Cell {
    double x, y, shade;
  };
  const int cells = std::max(4, width * height / 360);
  std::vector<Cell> sites(cells);
  for (auto& s : sites) s = {uniform01(rng) * width, uniform01(rng) * height, 0.58 + 0.2 * uniform01(rng)};

  // Coarse texture grid, bilinearly interpolated.
  const int step = 8;
  const int gw = width / step + 2;
  const int gh = height / step + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (auto& g : grid) g = uniform01(rng) - 0.5;

  std::vector<double> v(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double d1 = std::numeric_limits<double>::max();
      double d2 = d1;
      int nearest = 0;
      for (int s = 0; s < cells; ++s) {
        const double dx = c - sites[s].x;
        const double dy = r - sites[s].y;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d < d1) {
          d2 = d1;
          d1 = d;
          nearest = s;
        } else if (d < d2) {
          d2 = d;
        }
      }
      const double gap = 0.5 * (d2 - d1);
      const double membrane = std::exp(-(gap * gap) / (2.0 * 1.1 * 1.1));
      const double gx = static_cast<double>(c) / step;
      const double gy = static_cast<double>(r) / step;
      const int ix = static_cast<int>(gx);
      const int iy = static_cast<int>(gy);
      const double fx = gx - ix;
      const double fy = gy - iy;
      const auto g = [&](int x, int y) { return grid[static_cast<std::size_t>(y) * gw + x]; };
      const double texture = (1 - fy) * ((1 - fx) * g(ix, iy) + fx * g(ix + 1, iy)) +
                             fy * ((1 - fx) * g(ix, iy + 1) + fx * g(ix + 1, iy + 1));
      v[static_cast<std::size_t>(r) * width + c] =
          sites[nearest].shade + 0.12 * texture - 0.5 * membrane;
    }
  }

  // Vesicles: small dark disks inside cells.
  const int vesicles = std::max(2, width * height / 500);
  for (int i = 0; i < vesicles; ++i) {
    const double cx = uniform01(rng) * width;
    const double cy = uniform01(rng) * height;
    const double radius = 1.0 + 2.0 * uniform01(rng);
    for (int r = std::max(0, static_cast<int>(cy - radius - 1)); r < std::min(height, static_cast<int>(cy + radius + 2)); ++r) {
      for (int c = std::max(0, static_cast<int>(cx - radius - 1)); c < std::min(width, static_cast<int>(cx + radius + 2)); ++c) {
        const double d = std::hypot(c - cx, r - cy);
        if (d <= radius) v[static_cast<std::size_t>(r) * width + c] -= 0.25;
      }
    }
  }

  for (auto& x : v) x += 0.03 * gaussian(rng);
  v = blur3(v, width, height);
  for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
  return Image(width, height, std::move(v));
}

ProbabilityMap membrane_probability(const Image& image) {
  std::vector<double> v(image.values().begin(), image.values().end());
  v = blur3(v, image.width(), image.height());
  for (auto& x : v) x = 1.0 / (1.0 + std::exp((x - 0.42) / 0.04));
  return ProbabilityMap(image.width(), image.height(), std::move(v));
}

ErrorMap saliency_blob(int width, int height, double cx, double cy, double radius, double peak, double floor) {
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double d2 = (c - cx) * (c - cx) + (r - cy) * (r - cy);
      v[static_cast<std::size_t>(r) * width + c] = floor + (peak - floor) * std::exp(-d2 / (2.0 * radius * radius));
    }
  }
  return ErrorMap(width, height, std::move(v));
}

}  // namespace sparsescan::testing
