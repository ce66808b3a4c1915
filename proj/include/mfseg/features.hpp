#pragma once

#include <span>

#include "mfseg/grid.hpp"
#include "mfseg/image.hpp"

namespace mfseg {

/// The per-pixel feature maps driving the local pressure terms, plus the
/// local range map used for the adaptive weight. All maps share the source
/// image's shape and are non-negative.
struct FeatureStack {
    Grid entropy;  // bits
    Grid stddev;   // intensity units
    Grid gradient; // intensity units per pixel step
    Grid range;    // intensity units
};

/// Shannon entropy (bits) of the given intensity sample, computed over a
/// 256-bin uniform histogram on [0, 1]. Empty bins contribute nothing.
double window_entropy(std::span<const double> values);

/// Per-pixel Shannon entropy of the replicate-padded n x n window.
/// n must be odd and within [3, min(width, height)].
Grid entropy_map(const GrayImage& image, int window);

/// Per-pixel population standard deviation (1/n^2 normalizer) of the
/// replicate-padded n x n window.
Grid std_map(const GrayImage& image, int window);

/// Forward-difference gradient magnitude
///   sqrt((I(x+1,y) - I(x,y))^2 + (I(x,y+1) - I(x,y))^2),
/// with the out-of-range forward difference taken as 0 at the last
/// column/row.
Grid gradient_map(const GrayImage& image);

/// Per-pixel max - min over the replicate-padded m x m window.
Grid range_map(const GrayImage& image, int window);

/// All four maps in one pass; feature_window drives entropy/std and
/// range_window drives the range map.
FeatureStack compute_features(const GrayImage& image, int feature_window,
                              int range_window);

} // namespace mfseg
