#include "mfseg/fitting.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfseg {

double heaviside(double phi_value, double epsilon) {
    if (epsilon <= 0.0)
        throw std::invalid_argument("heaviside: epsilon must be positive");
    return 0.5 * (1.0 + (2.0 / std::numbers::pi) * std::atan(phi_value / epsilon));
}

Grid heaviside_field(const Grid& phi, double epsilon) {
    Grid out(phi.width(), phi.height());
    for (std::size_t i = 0; i < phi.size(); ++i)
        out.data()[i] = heaviside(phi.data()[i], epsilon);
    return out;
}

GaussianKernel::GaussianKernel(double sigma) : sigma_(sigma) {
    if (sigma <= 0.0)
        throw std::invalid_argument("GaussianKernel: sigma must be positive");
    radius_ = static_cast<int>(std::ceil(2.0 * sigma));
    factor_.resize(2 * radius_ + 1);
    double sum = 0.0;
    for (int i = -radius_; i <= radius_; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        factor_[i + radius_] = v;
        sum += v;
    }
    for (double& v : factor_) v /= sum;
    weights_ = Grid(size(), size());
    for (int j = 0; j < size(); ++j)
        for (int i = 0; i < size(); ++i)
            weights_(i, j) = factor_[i] * factor_[j];
}

Grid convolve(const Grid& field, const GaussianKernel& kernel) {
    if (kernel.size() > std::min(field.width(), field.height()))
        throw std::invalid_argument("convolve: kernel larger than field");
    const int r = kernel.radius();
    const auto& f = kernel.factor();

    Grid rows(field.width(), field.height());
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d)
                acc += f[d + r] * field.at_clamped(x + d, y);
            rows(x, y) = acc;
        }

    Grid out(field.width(), field.height());
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d)
                acc += f[d + r] * rows.at_clamped(x, y + d);
            out(x, y) = acc;
        }
    return out;
}

GlobalMeans global_means(const GrayImage& image, const LevelSet& phi,
                         double epsilon) {
    if (!image.pixels().same_shape(phi.values))
        throw std::invalid_argument("global_means: shape mismatch");
    double mass_in = 0.0, mass_out = 0.0;
    double sum_in = 0.0, sum_out = 0.0, sum_all = 0.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        const double h = heaviside(phi.values.data()[i], epsilon);
        const double v = image.pixels().data()[i];
        mass_in += h;
        mass_out += 1.0 - h;
        sum_in += h * v;
        sum_out += (1.0 - h) * v;
        sum_all += v;
    }
    const double whole = sum_all / static_cast<double>(phi.values.size());
    GlobalMeans means;
    means.degenerate_inside = mass_in < kRegionMassGuard;
    means.degenerate_outside = mass_out < kRegionMassGuard;
    means.inside = means.degenerate_inside ? whole : sum_in / mass_in;
    means.outside = means.degenerate_outside ? whole : sum_out / mass_out;
    return means;
}

namespace {

struct Membership {
    Grid smooth_in;  // K * H(phi)
    Grid smooth_out; // K * (1 - H(phi))
    Grid h;          // H(phi)
};

Membership smooth_membership(const LevelSet& phi, const GaussianKernel& kernel,
                             double epsilon) {
    Membership m{Grid(), Grid(), heaviside_field(phi.values, epsilon)};
    Grid complement(m.h.width(), m.h.height());
    for (std::size_t i = 0; i < m.h.size(); ++i)
        complement.data()[i] = 1.0 - m.h.data()[i];
    m.smooth_in = convolve(m.h, kernel);
    m.smooth_out = convolve(complement, kernel);
    return m;
}

FitPair fit_with(const Grid& field, const Membership& m,
                 const GaussianKernel& kernel) {
    Grid weighted_in(field.width(), field.height());
    Grid weighted_out(field.width(), field.height());
    for (std::size_t i = 0; i < field.size(); ++i) {
        weighted_in.data()[i] = m.h.data()[i] * field.data()[i];
        weighted_out.data()[i] = (1.0 - m.h.data()[i]) * field.data()[i];
    }
    FitPair fit{convolve(weighted_in, kernel), convolve(weighted_out, kernel)};
    for (std::size_t i = 0; i < field.size(); ++i) {
        fit.inside.data()[i] /= m.smooth_in.data()[i] + kDivisionGuard;
        fit.outside.data()[i] /= m.smooth_out.data()[i] + kDivisionGuard;
    }
    return fit;
}

} // namespace

FitPair fit_pair(const Grid& field, const LevelSet& phi,
                 const GaussianKernel& kernel, double epsilon) {
    if (!field.same_shape(phi.values))
        throw std::invalid_argument("fit_pair: shape mismatch");
    return fit_with(field, smooth_membership(phi, kernel, epsilon), kernel);
}

FeatureFits feature_fit_pairs(const FeatureStack& features, const LevelSet& phi,
                              const GaussianKernel& kernel, double epsilon) {
    if (!features.entropy.same_shape(phi.values))
        throw std::invalid_argument("feature_fit_pairs: shape mismatch");
    const Membership m = smooth_membership(phi, kernel, epsilon);
    return FeatureFits{
        fit_with(features.entropy, m, kernel),
        fit_with(features.stddev, m, kernel),
        fit_with(features.gradient, m, kernel),
    };
}

} // namespace mfseg
