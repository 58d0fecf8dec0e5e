#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsescan/error.hpp"

namespace sparsescan {

// Non-owning, read-only view over a row-major scalar grid.
struct RasterView {
  int width = 0;
  int height = 0;
  std::span<const double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator()(int row, int col) const noexcept {
    return values[static_cast<std::size_t>(row) * width + col];
  }
};

bool same_shape(const RasterView& a, const RasterView& b) noexcept;
void require_same_shape(const RasterView& a, const RasterView& b, std::string_view what);

namespace detail {

struct UnitIntervalPolicy {
  static bool accepts(double v) noexcept { return v >= 0.0 && v <= 1.0; }
};

struct NonNegativeFinitePolicy {
  static bool accepts(double v) noexcept;
};

struct ImageTag : UnitIntervalPolicy {
  static constexpr const char* name = "image";
};
struct ProbabilityTag : UnitIntervalPolicy {
  static constexpr const char* name = "probability map";
};
struct ErrorTag : NonNegativeFinitePolicy {
  static constexpr const char* name = "error map";
};

void check_dims(int width, int height, std::size_t count, const char* name);
[[noreturn]] void reject_value(const char* name, std::size_t index, double value);

}  // namespace detail

// Immutable scalar raster whose values are checked against Tag's policy on
// construction. Distinct tags give distinct types with identical layouts.
template <class Tag>
class ScalarRaster {
 public:
  ScalarRaster() = default;

  ScalarRaster(int width, int height, std::vector<double> values)
      : width_(width), height_(height), values_(std::move(values)) {
    detail::check_dims(width_, height_, values_.size(), Tag::name);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!Tag::accepts(values_[i])) detail::reject_value(Tag::name, i, values_[i]);
    }
  }

  static ScalarRaster filled(int width, int height, double value) {
    const auto n = static_cast<std::size_t>(width < 0 ? 0 : width) * (height < 0 ? 0 : height);
    return ScalarRaster(width, height, std::vector<double>(n, value));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(int row, int col) const noexcept {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  double operator[](std::size_t index) const noexcept { return values_[index]; }

  std::span<const double> values() const noexcept { return values_; }
  RasterView view() const noexcept { return {width_, height_, values_}; }
  operator RasterView() const noexcept { return view(); }

  bool operator==(const ScalarRaster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Grayscale intensities in [0,1]: the HR, LR, SR and OUT images.
using Image = ScalarRaster<detail::ImageTag>;
// Per-pixel probabilities in [0,1]: ROI detector and error-estimator outputs.
using ProbabilityMap = ScalarRaster<detail::ProbabilityTag>;
// Finite, non-negative per-pixel error or saliency.
using ErrorMap = ScalarRaster<detail::ErrorTag>;

// Re-validates the values of one raster kind as another.
template <class To, class From>
To raster_cast(const From& from) {
  const auto v = from.values();
  return To(from.width(), from.height(), std::vector<double>(v.begin(), v.end()));
}

// Boolean per-pixel mask; set bits mark scanned or rescanned locations.
class Bitmap {
 public:
  Bitmap() = default;
  Bitmap(int width, int height);
  // Any non-zero byte counts as a set bit.
  Bitmap(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool test(int row, int col) const noexcept {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  bool operator[](std::size_t index) const noexcept { return bits_[index] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t popcount() const noexcept;

  bool operator==(const Bitmap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

Bitmap bitmap_union(const Bitmap& a, const Bitmap& b);

// ---- codecs ---------------------------------------------------------------

// Reads an 8-bit grayscale PGM (P5, maxval 255) or PNG; byte p becomes p/255.
Image load_image(const std::filesystem::path& path);
// Writes round-half-up(v*255) bytes; PNG when the extension is .png, P5 otherwise.
void save_image(const Image& image, const std::filesystem::path& path);

// EMAP: "EMAP <w> <h>\n" followed by w*h little-endian float32 values.
ErrorMap read_emap(const std::filesystem::path& path);
void write_emap(const ErrorMap& map, const std::filesystem::path& path);
void write_emap(const RasterView& map, const std::filesystem::path& path);

// PBM P4, one bit per pixel, MSB first, rows padded to whole bytes.
void bitmap_to_pbm(const Bitmap& bitmap, const std::filesystem::path& path);
Bitmap pbm_to_bitmap(const std::filesystem::path& path);

std::uint8_t quantize_byte(double value) noexcept;

// ---- decimation -----------------------------------------------------------

// Output (i,j) = input(min(i*rate, h-1), min(j*rate, w-1)); dims are ceil(dim/rate).
Image downsample_nearest(const Image& image, int rate);

// Full-resolution mask of the pixels read by downsample_nearest.
Bitmap decimation_lattice(int width, int height, int rate);

}  // namespace sparsescan
