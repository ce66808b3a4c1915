#pragma once

#include <vector>

#include "mfseg/features.hpp"
#include "mfseg/grid.hpp"
#include "mfseg/image.hpp"
#include "mfseg/level_set.hpp"

namespace mfseg {

/// Guard added to fitted-map denominators so a vanishing region mass cannot
/// divide by zero.
inline constexpr double kDivisionGuard = 1e-10;

/// Region mass below this is treated as a degenerate (empty) region.
inline constexpr double kRegionMassGuard = 1e-6;

/// Regularized Heaviside 0.5 * (1 + (2/pi) * atan(phi / epsilon)).
/// Strictly increasing in phi; throws std::invalid_argument if epsilon <= 0.
double heaviside(double phi_value, double epsilon);

/// heaviside applied pointwise to a field.
Grid heaviside_field(const Grid& phi, double epsilon);

/// Discrete 2D Gaussian, truncated at radius ceil(2*sigma) and renormalized
/// to unit sum. Separable: weights(i, j) = factor[i] * factor[j].
class GaussianKernel {
public:
    explicit GaussianKernel(double sigma);

    double sigma() const { return sigma_; }
    int radius() const { return radius_; }
    int size() const { return 2 * radius_ + 1; }
    const Grid& weights() const { return weights_; }
    const std::vector<double>& factor() const { return factor_; }

private:
    double sigma_ = 0.0;
    int radius_ = 0;
    std::vector<double> factor_; // normalized 1D profile, length 2r+1
    Grid weights_;               // outer product of factor with itself
};

inline GaussianKernel build_kernel(double sigma) { return GaussianKernel(sigma); }

/// Replicate-padded 2D convolution. Evaluated as two separable passes,
/// which for a Gaussian kernel and replicate padding is algebraically equal
/// to the full 2D sum. Throws std::invalid_argument if the kernel does not
/// fit inside the field.
Grid convolve(const Grid& field, const GaussianKernel& kernel);

/// Average intensities inside ({phi > 0} side) and outside the contour,
/// weighted by the regularized Heaviside. A side whose mass falls below
/// kRegionMassGuard is replaced by the whole-image mean and flagged.
struct GlobalMeans {
    double inside = 0.0;
    double outside = 0.0;
    bool degenerate_inside = false;
    bool degenerate_outside = false;

    bool degenerate() const { return degenerate_inside || degenerate_outside; }
};

GlobalMeans global_means(const GrayImage& image, const LevelSet& phi,
                         double epsilon);

/// Kernel-weighted fitted maps of a field on the two sides of the contour:
///   inside  = K * (H(phi) . field)       / (K * H(phi)       + guard)
///   outside = K * ((1 - H(phi)) . field) / (K * (1 - H(phi)) + guard)
struct FitPair {
    Grid inside;
    Grid outside;
};

FitPair fit_pair(const Grid& field, const LevelSet& phi,
                 const GaussianKernel& kernel, double epsilon);

/// fit_pair applied to the entropy, standard-deviation and gradient maps.
/// Shares the membership convolutions across the three features; results are
/// bit-identical to three independent fit_pair calls.
struct FeatureFits {
    FitPair entropy;
    FitPair stddev;
    FitPair gradient;
};

FeatureFits feature_fit_pairs(const FeatureStack& features, const LevelSet& phi,
                              const GaussianKernel& kernel, double epsilon);

} // namespace mfseg
