#include "mfseg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mfseg/errors.hpp"

namespace mfseg {

void ModelConfig::validate() const {
    if (!(c0 > 0.0)) throw ConfigError("c0 must be > 0");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
    if (feature_window < 3 || feature_window % 2 == 0)
        throw ConfigError("feature window (n) must be odd and >= 3");
    if (range_window < 3 || range_window % 2 == 0)
        throw ConfigError("range window (m) must be odd and >= 3");
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw ConfigError("lambda must be finite and >= 0");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(sigma_phi > 0.0)) throw ConfigError("sigma_phi must be > 0");
    if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    for (double s : feature_scales)
        if (!std::isfinite(s)) throw ConfigError("feature scales must be finite");
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "proposed") return ModelKind::Proposed;
    if (name == "slgs") return ModelKind::Slgs;
    throw ConfigError("unknown model '" + std::string(name) +
                      "' (expected proposed or slgs)");
}

std::string_view model_kind_name(ModelKind kind) {
    return kind == ModelKind::Proposed ? "proposed" : "slgs";
}

LevelSet init_level_set(int width, int height, const RectRegion& region,
                        double c0) {
    if (!region.fits(width, height))
        throw std::invalid_argument("init_level_set: region out of bounds");
    Grid values(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            values(x, y) = region.contains(x, y) ? c0 : -c0;
    return LevelSet{std::move(values)};
}

Grid grad_magnitude(const LevelSet& phi) {
    const Grid& f = phi.values;
    const int w = f.width();
    const int h = f.height();
    Grid out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double gx, gy;
            if (x == 0)
                gx = w > 1 ? f(1, y) - f(0, y) : 0.0;
            else if (x == w - 1)
                gx = f(w - 1, y) - f(w - 2, y);
            else
                gx = 0.5 * (f(x + 1, y) - f(x - 1, y));
            if (y == 0)
                gy = h > 1 ? f(x, 1) - f(x, 0) : 0.0;
            else if (y == h - 1)
                gy = f(x, h - 1) - f(x, h - 2);
            else
                gy = 0.5 * (f(x, y + 1) - f(x, y - 1));
            out(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    return out;
}

LevelSet evolve_step(const LevelSet& phi, const SpfField& spf, double alpha,
                     double dt) {
    if (!spf.normalized)
        throw std::invalid_argument("evolve_step: pressure field not normalized");
    if (!phi.values.same_shape(spf.values))
        throw std::invalid_argument("evolve_step: shape mismatch");
    const Grid grad = grad_magnitude(phi);
    Grid next(phi.values.width(), phi.values.height());
    for (std::size_t i = 0; i < next.size(); ++i)
        next.data()[i] = phi.values.data()[i] +
                         dt * alpha * spf.values.data()[i] * grad.data()[i];
    return LevelSet{std::move(next)};
}

LevelSet regularize(const LevelSet& phi, double sigma_phi) {
    const GaussianKernel kernel(sigma_phi);
    return LevelSet{convolve(phi.values, kernel)};
}

bool check_convergence(const LevelSet& phi_now, const LevelSet& phi_prev,
                       double delta) {
    return mean_abs_diff(phi_now.values, phi_prev.values) < delta;
}

SpfField slgs_spf(const GrayImage& image, const LevelSet& phi, double epsilon,
                  GlobalMeans* means_out) {
    const GlobalMeans means = global_means(image, phi, epsilon);
    if (means_out) *means_out = means;
    const double midpoint = 0.5 * (means.inside + means.outside);
    Grid raw(image.width(), image.height());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw.data()[i] = image.pixels().data()[i] - midpoint;
    return normalize_spf(std::move(raw));
}

namespace {

void check_kernel_fit(int size, int width, int height, const char* what) {
    if (size > std::min(width, height))
        throw ConfigError(std::string(what) + " kernel (" + std::to_string(size) +
                          "x" + std::to_string(size) + ") exceeds the " +
                          std::to_string(width) + "x" + std::to_string(height) +
                          " image");
}

} // namespace

ContourEvolution::ContourEvolution(const GrayImage& image,
                                   const ModelConfig& config,
                                   const RectRegion& region, ModelKind kind)
    : image_(image), config_(config), kind_(kind) {
    config_.validate();
    if (!region.fits(image_.width(), image_.height()))
        throw ConfigError("initialization region does not fit inside the image");
    const int side = std::min(image_.width(), image_.height());
    check_kernel_fit(2 * static_cast<int>(std::ceil(2.0 * config_.sigma_phi)) + 1,
                     image_.width(), image_.height(), "regularization");
    if (kind_ == ModelKind::Proposed) {
        if (config_.feature_window > side || config_.range_window > side)
            throw ConfigError("feature windows exceed the image size");
        check_kernel_fit(2 * static_cast<int>(std::ceil(2.0 * config_.sigma)) + 1,
                         image_.width(), image_.height(), "fitting");
        features_ = compute_features(image_, config_.feature_window,
                                     config_.range_window);
        fit_kernel_.emplace(config_.sigma);
        weights_ = adaptive_weight(features_->range, config_.lambda);
    }
    phi_ = init_level_set(image_.width(), image_.height(), region, config_.c0);
    check_prev_ = phi_.values;
}

SpfField ContourEvolution::build_spf(GlobalMeans& means_out) {
    if (kind_ == ModelKind::Slgs)
        return slgs_spf(image_, phi_, config_.epsilon, &means_out);
    SpfField global = global_spf(image_, phi_, config_.epsilon, &means_out);
    const FeatureFits fits =
        feature_fit_pairs(*features_, phi_, *fit_kernel_, config_.epsilon);
    SpfField local = local_spf(*features_, fits, phi_, config_.epsilon,
                               config_.feature_scales);
    return total_spf(global, local, *weights_);
}

bool ContourEvolution::step() {
    std::size_t crisp = 0;
    for (double v : phi_.values.data()) crisp += v > 0.0 ? 1 : 0;
    GlobalMeans means;
    const SpfField spf = build_spf(means);
    if (means.degenerate() || crisp == 0 || crisp == phi_.values.size())
        ++degenerate_events_;

    phi_ = evolve_step(phi_, spf, config_.alpha, config_.dt);
    phi_ = regularize(phi_, config_.sigma_phi);
    for (double& v : phi_.values.data())
        v = std::clamp(v, -config_.c0, config_.c0);
    last_delta_ = mean_abs_diff(phi_.values, check_prev_);
    converged_ = last_delta_ < config_.delta;
    check_prev_ = phi_.values;
    if (config_.selective) {
        for (double& v : phi_.values.data())
            v = v > 0.0 ? config_.c0 : -config_.c0;
    }
    ++iterations_;
    return converged_;
}

BinaryMask ContourEvolution::mask() const {
    BinaryMask out(phi_.values.width(), phi_.values.height());
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            out.set(x, y, phi_.values(x, y) > 0.0);
    return out;
}

namespace {

SegmentationReport run_model(const GrayImage& image, const ModelConfig& config,
                             const RectRegion& region, ModelKind kind,
                             const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    ContourEvolution evolution(image, config, region, kind);
    SegmentationReport report;
    if (options.keep_snapshots) report.snapshots.push_back(evolution.phi());
    while (evolution.iterations() < config.max_iters) {
        const bool done = evolution.step();
        if (options.keep_snapshots) report.snapshots.push_back(evolution.phi());
        if (done) break;
    }
    report.mask = evolution.mask();
    report.iterations = evolution.iterations();
    report.converged = evolution.converged();
    report.degenerate_events = evolution.degenerate_events();
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
}

} // namespace

SegmentationReport run_proposed(const GrayImage& image, const ModelConfig& config,
                                const RectRegion& region,
                                const RunOptions& options) {
    return run_model(image, config, region, ModelKind::Proposed, options);
}

SegmentationReport run_slgs(const GrayImage& image, const ModelConfig& config,
                            const RectRegion& region,
                            const RunOptions& options) {
    return run_model(image, config, region, ModelKind::Slgs, options);
}

} // namespace mfseg
