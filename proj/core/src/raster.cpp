#include "sparsescan/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace sparsescan {

bool same_shape(const RasterView& a, const RasterView& b) noexcept {
  return a.width == b.width && a.height == b.height;
}

void require_same_shape(const RasterView& a, const RasterView& b, std::string_view what) {
  if (same_shape(a, b)) return;
  std::ostringstream os;
  os << what << ": dimension mismatch (" << a.width << "x" << a.height << " vs " << b.width
     << "x" << b.height << ")";
  throw ValidationError(os.str());
}

namespace detail {

bool NonNegativeFinitePolicy::accepts(double v) noexcept { return std::isfinite(v) && v >= 0.0; }

void check_dims(int width, int height, std::size_t count, const char* name) {
  if (width < 0 || height < 0) {
    throw ValidationError(std::string(name) + ": negative dimensions");
  }
  if (count != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    std::ostringstream os;
    os << name << ": " << count << " values for " << width << "x" << height << " raster";
    throw ValidationError(os.str());
  }
}

void reject_value(const char* name, std::size_t index, double value) {
  std::ostringstream os;
  os << name << ": value " << value << " at index " << index << " violates range invariant";
  throw ValidationError(os.str());
}

}  // namespace detail

Bitmap::Bitmap(int width, int height)
    : Bitmap(width, height,
             std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                       static_cast<std::size_t>(std::max(height, 0)))) {}

Bitmap::Bitmap(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  detail::check_dims(width_, height_, bits_.size(), "bitmap");
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t Bitmap::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Bitmap bitmap_union(const Bitmap& a, const Bitmap& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ValidationError("bitmap_union: dimension mismatch");
  }
  std::vector<std::uint8_t> bits(a.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = a[i] || b[i];
  return Bitmap(a.width(), a.height(), std::move(bits));
}

std::uint8_t quantize_byte(double value) noexcept {
  const double scaled = std::floor(value * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

namespace {

int decimated_extent(int extent, int rate) { return (extent + rate - 1) / rate; }

void check_rate(int rate) {
  if (rate < 1) throw ValidationError("down-sampling rate must be >= 1, got " + std::to_string(rate));
}

}  // namespace

Image downsample_nearest(const Image& image, int rate) {
  check_rate(rate);
  const int w = image.width();
  const int h = image.height();
  const int ow = decimated_extent(w, rate);
  const int oh = decimated_extent(h, rate);
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int i = 0; i < oh; ++i) {
    const int r = std::min(i * rate, h - 1);
    for (int j = 0; j < ow; ++j) {
      out[static_cast<std::size_t>(i) * ow + j] = image(r, std::min(j * rate, w - 1));
    }
  }
  return Image(ow, oh, std::move(out));
}

Bitmap decimation_lattice(int width, int height, int rate) {
  check_rate(rate);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height, 0);
  const int ow = decimated_extent(width, rate);
  const int oh = decimated_extent(height, rate);
  for (int i = 0; i < oh; ++i) {
    const int r = std::min(i * rate, height - 1);
    for (int j = 0; j < ow; ++j) {
      bits[static_cast<std::size_t>(r) * width + std::min(j * rate, width - 1)] = 1;
    }
  }
  return Bitmap(width, height, std::move(bits));
}

}  // namespace sparsescan
