#pragma once

#include <cstdint>

#include "sparsescan/raster.hpp"

namespace sparsescan::testing {

// Procedural stand-in for an EM section: Voronoi "cells" with dark membrane
// boundaries, a few vesicles, low-frequency texture, pixel noise and a mild
// blur. Deterministic per seed.
Image synthetic_em(int width, int height, std::uint64_t seed);

// Surrogate ROI detector: soft membrane probability from local darkness.
ProbabilityMap membrane_probability(const Image& image);

// Smooth Gaussian blob of height `peak` over a low `floor`, centred at (cx, cy).
ErrorMap saliency_blob(int width, int height, double cx, double cy, double radius, double peak, double floor);

}  // namespace sparsescan::testing
