#pragma once

#include <array>

#include "mfseg/fitting.hpp"
#include "mfseg/grid.hpp"
#include "mfseg/image.hpp"
#include "mfseg/level_set.hpp"

namespace mfseg {

/// Signed pressure field. When `normalized` is set every value lies in
/// [-1, 1] and max |value| = 1 unless the field is identically zero, in
/// which case `converged_candidate` marks the degenerate normalization.
struct SpfField {
    Grid values;
    bool normalized = false;
    bool converged_candidate = false;
};

/// Per-pixel blend factor between the global and local terms; values in
/// (0, 1], equal to 1 exactly where the local range is 0.
struct WeightMap {
    Grid values;
};

/// Global pressure term: I - (c1 * H(phi) + c2 * (1 - H(phi))) with c1, c2
/// the Heaviside-weighted region means. Unnormalized. When `means_out` is
/// non-null the computed means (and their degeneracy flags) are stored there.
SpfField global_spf(const GrayImage& image, const LevelSet& phi, double epsilon,
                    GlobalMeans* means_out = nullptr);

/// Local pressure term: sum over the three features of
///   feature - (fit_inside * H(phi) + fit_outside * (1 - H(phi))),
/// each term multiplied by its scale hook (all 1 by default). Unnormalized.
SpfField local_spf(const FeatureStack& features, const FeatureFits& fits,
                   const LevelSet& phi, double epsilon,
                   const std::array<double, 3>& feature_scales = {1.0, 1.0, 1.0});

/// omega = 1 / (1 + lambda * range), pointwise.
/// Throws std::invalid_argument for negative lambda or a negative range map.
WeightMap adaptive_weight(const Grid& range, double lambda);

/// Divides a raw pressure field by its maximum absolute value. Fields whose
/// maximum falls below 1e-12 come back identically zero with
/// converged_candidate set.
SpfField normalize_spf(Grid values);

/// omega * global + (1 - omega) * local, then normalized to [-1, 1].
/// Inputs must be unnormalized.
SpfField total_spf(const SpfField& global, const SpfField& local,
                   const WeightMap& weights);

} // namespace mfseg
