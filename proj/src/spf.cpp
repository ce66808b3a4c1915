#include "mfseg/spf.hpp"

#include <cmath>
#include <stdexcept>

namespace mfseg {

SpfField global_spf(const GrayImage& image, const LevelSet& phi, double epsilon,
                    GlobalMeans* means_out) {
    const GlobalMeans means = global_means(image, phi, epsilon);
    if (means_out) *means_out = means;
    Grid out(image.width(), image.height());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double h = heaviside(phi.values.data()[i], epsilon);
        out.data()[i] = image.pixels().data()[i] -
                        (means.inside * h + means.outside * (1.0 - h));
    }
    return SpfField{std::move(out), false, false};
}

SpfField local_spf(const FeatureStack& features, const FeatureFits& fits,
                   const LevelSet& phi, double epsilon,
                   const std::array<double, 3>& feature_scales) {
    if (!features.entropy.same_shape(phi.values))
        throw std::invalid_argument("local_spf: shape mismatch");
    const Grid* maps[3] = {&features.entropy, &features.stddev,
                           &features.gradient};
    const FitPair* pairs[3] = {&fits.entropy, &fits.stddev, &fits.gradient};
    Grid out(phi.values.width(), phi.values.height(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double h = heaviside(phi.values.data()[i], epsilon);
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double blended = pairs[k]->inside.data()[i] * h +
                                   pairs[k]->outside.data()[i] * (1.0 - h);
            sum += feature_scales[k] * (maps[k]->data()[i] - blended);
        }
        out.data()[i] = sum;
    }
    return SpfField{std::move(out), false, false};
}

WeightMap adaptive_weight(const Grid& range, double lambda) {
    if (lambda < 0.0)
        throw std::invalid_argument("adaptive_weight: lambda must be >= 0");
    Grid out(range.width(), range.height());
    for (std::size_t i = 0; i < range.size(); ++i) {
        const double r = range.data()[i];
        if (r < 0.0)
            throw std::invalid_argument("adaptive_weight: negative range value");
        out.data()[i] = 1.0 / (1.0 + lambda * r);
    }
    return WeightMap{std::move(out)};
}

SpfField normalize_spf(Grid values) {
    const double peak = max_abs(values);
    if (peak < 1e-12) {
        for (double& v : values.data()) v = 0.0;
        return SpfField{std::move(values), true, true};
    }
    for (double& v : values.data()) v /= peak;
    return SpfField{std::move(values), true, false};
}

SpfField total_spf(const SpfField& global, const SpfField& local,
                   const WeightMap& weights) {
    if (global.normalized || local.normalized)
        throw std::invalid_argument("total_spf: inputs must be unnormalized");
    if (!global.values.same_shape(local.values) ||
        !global.values.same_shape(weights.values))
        throw std::invalid_argument("total_spf: shape mismatch");
    Grid mixed(global.values.width(), global.values.height());
    for (std::size_t i = 0; i < mixed.size(); ++i) {
        const double w = weights.values.data()[i];
        mixed.data()[i] =
            w * global.values.data()[i] + (1.0 - w) * local.values.data()[i];
    }
    return normalize_spf(std::move(mixed));
}

} // namespace mfseg
