#pragma once

#include <string>
#include <string_view>

#include "sparsescan/raster.hpp"

namespace sparsescan {

enum class Interpolation { nearest, bilinear, bicubic };

Interpolation parse_interpolation(std::string_view name);
std::string to_string(Interpolation method);

// Reconstruction R: enlarges `image` by `rate`. Output pixel (i,j) interpolates
// the input at (i/rate, j/rate), the inverse of the decimation anchor, so
// lattice pixels reproduce their source exactly. Bicubic is Catmull-Rom
// (a = -0.5); all methods clamp to the edge and the result to [0,1].
Image upsample(const Image& image, int rate, Interpolation method);

// Crops or validates a reconstruction against the target full-resolution size.
Image fit_to(const Image& image, int width, int height);

// Final output: hr where the bitmap is set, sr elsewhere.
Image composite(const Image& sr, const Image& hr, const Bitmap& scanned);

}  // namespace sparsescan
