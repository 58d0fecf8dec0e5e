#include "sparsescan/reconstruct.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sparsescan {

Interpolation parse_interpolation(std::string_view name) {
  if (name == "nearest") return Interpolation::nearest;
  if (name == "bilinear") return Interpolation::bilinear;
  if (name == "bicubic") return Interpolation::bicubic;
  throw ValidationError("unknown interpolation method '" + std::string(name) + "'");
}

std::string to_string(Interpolation method) {
  switch (method) {
    case Interpolation::nearest: return "nearest";
    case Interpolation::bilinear: return "bilinear";
    case Interpolation::bicubic: return "bicubic";
  }
  return "unknown";
}

namespace {

// Catmull-Rom weights for taps at offsets -1, 0, 1, 2 from floor(x).
std::array<double, 4> catmull_rom(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
          0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
}

struct Taps {
  std::array<int, 4> index{};
  std::array<double, 4> weight{};
  int count = 0;
};

// Precomputed 1-D taps for every output coordinate along one axis.
std::vector<Taps> axis_taps(int in_extent, int rate, Interpolation method) {
  const int out_extent = in_extent * rate;
  std::vector<Taps> taps(out_extent);
  const auto clamp_index = [in_extent](int i) { return std::clamp(i, 0, in_extent - 1); };
  for (int o = 0; o < out_extent; ++o) {
    const int base = o / rate;
    const double t = static_cast<double>(o % rate) / rate;
    Taps& tp = taps[o];
    switch (method) {
      case Interpolation::nearest:
        tp.count = 1;
        tp.index[0] = base;
        tp.weight[0] = 1.0;
        break;
      case Interpolation::bilinear:
        tp.count = 2;
        tp.index = {base, clamp_index(base + 1), 0, 0};
        tp.weight = {1.0 - t, t, 0.0, 0.0};
        break;
      case Interpolation::bicubic:
        tp.count = 4;
        tp.weight = catmull_rom(t);
        for (int k = 0; k < 4; ++k) tp.index[k] = clamp_index(base - 1 + k);
        break;
    }
  }
  return taps;
}

}  // namespace

Image upsample(const Image& image, int rate, Interpolation method) {
  if (rate < 1) throw ValidationError("up-sampling rate must be >= 1, got " + std::to_string(rate));
  const int w = image.width();
  const int h = image.height();
  const int ow = w * rate;
  const int oh = h * rate;
  const auto col_taps = axis_taps(w, rate, method);
  const auto row_taps = axis_taps(h, rate, method);

  // Separable: horizontal pass into an h x ow buffer, then vertical.
  std::vector<double> horizontal(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      const Taps& tp = col_taps[c];
      double acc = 0.0;
      for (int k = 0; k < tp.count; ++k) acc += tp.weight[k] * image(r, tp.index[k]);
      horizontal[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    const Taps& tp = row_taps[r];
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int k = 0; k < tp.count; ++k) acc += tp.weight[k] * horizontal[static_cast<std::size_t>(tp.index[k]) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = std::clamp(acc, 0.0, 1.0);
    }
  }
  return Image(ow, oh, std::move(out));
}

Image fit_to(const Image& image, int width, int height) {
  if (image.width() == width && image.height() == height) return image;
  if (image.width() < width || image.height() < height) {
    throw ValidationError("reconstruction is " + std::to_string(image.width()) + "x" +
                          std::to_string(image.height()) + ", smaller than target " +
                          std::to_string(width) + "x" + std::to_string(height));
  }
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) out[static_cast<std::size_t>(r) * width + c] = image(r, c);
  }
  return Image(width, height, std::move(out));
}

Image composite(const Image& sr, const Image& hr, const Bitmap& scanned) {
  require_same_shape(sr, hr, "composite");
  if (scanned.width() != hr.width() || scanned.height() != hr.height()) {
    throw ValidationError("composite: bitmap dimension mismatch");
  }
  std::vector<double> out(sr.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scanned[i] ? hr[i] : sr[i];
  return Image(sr.width(), sr.height(), std::move(out));
}

}  // namespace sparsescan
