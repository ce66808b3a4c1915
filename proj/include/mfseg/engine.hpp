#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "mfseg/features.hpp"
#include "mfseg/fitting.hpp"
#include "mfseg/grid.hpp"
#include "mfseg/image.hpp"
#include "mfseg/level_set.hpp"
#include "mfseg/spf.hpp"

namespace mfseg {

/// All tunables of the evolution. Defaults follow the reference settings;
/// epsilon, dt, max_iters, selective and the feature scales are
/// implementation knobs.
struct ModelConfig {
    double c0 = 1.0;          // level-set initialization constant
    double sigma = 3.0;       // fitting-kernel standard deviation, pixels
    int feature_window = 9;   // n: window width for entropy/std maps
    int range_window = 5;     // m: window width for the range map
    double lambda = 0.5;      // weight constant of the adaptive blend
    double alpha = 400.0;     // balloon force
    double sigma_phi = 1.0;   // regularization-kernel standard deviation
    double delta = 1e-5;      // convergence threshold on mean |dphi|
    double epsilon = 1.0;     // Heaviside scale
    double dt = 1e-3;         // evolution time step
    int max_iters = 500;
    bool selective = false;   // re-binarize phi to +-c0 after each iteration
    std::array<double, 3> feature_scales{1.0, 1.0, 1.0}; // entropy, std, grad

    /// Throws ConfigError on out-of-range values (non-odd windows, dt <= 0, ...).
    void validate() const;
};

enum class ModelKind { Proposed, Slgs };

ModelKind parse_model_kind(std::string_view name);
std::string_view model_kind_name(ModelKind kind);

/// Outcome of one segmentation run.
struct SegmentationReport {
    BinaryMask mask;
    int iterations = 0;
    bool converged = false;
    double elapsed_seconds = 0.0;
    int degenerate_events = 0;
    std::vector<LevelSet> snapshots; // filled only when requested
};

/// phi = +c0 for pixels of the rectangle (boundary included), -c0 elsewhere.
/// Throws std::invalid_argument if the region leaves the image bounds.
LevelSet init_level_set(int width, int height, const RectRegion& region,
                        double c0);

/// |grad phi| by central differences on the interior and one-sided
/// differences at the borders.
Grid grad_magnitude(const LevelSet& phi);

/// One explicit evolution update: phi + dt * alpha * spf * |grad phi|.
/// The pressure field must be normalized.
LevelSet evolve_step(const LevelSet& phi, const SpfField& spf, double alpha,
                     double dt);

/// Gaussian smoothing of phi (unit-sum truncated kernel, replicate padding);
/// stands in for re-initialization.
LevelSet regularize(const LevelSet& phi, double sigma_phi);

/// True iff the mean absolute pointwise change is strictly below delta.
bool check_convergence(const LevelSet& phi_now, const LevelSet& phi_prev,
                       double delta);

/// Pressure field of the selective local-or-global baseline:
/// (I - (c1 + c2)/2), normalized by its maximum absolute value.
SpfField slgs_spf(const GrayImage& image, const LevelSet& phi, double epsilon,
                  GlobalMeans* means_out = nullptr);

/// One segmentation run driven step by step. run_proposed / run_slgs wrap
/// this; it is public so callers can inspect the field between iterations.
///
/// Each step() builds the model's pressure field from the current phi,
/// evolves, regularizes, clamps the smooth field back into the [-c0, c0]
/// band (the balloon force otherwise grows phi without bound and the
/// Gaussian tails of that growth drag the zero crossing outward), tests
/// convergence against the previous pre-binarization field, and only then
/// applies the optional selective re-binarization. The clamp never changes
/// a pixel's sign, so the selective step sees the same crisp regions either
/// way. Convergence therefore always compares smooth in-band fields.
class ContourEvolution {
public:
    ContourEvolution(const GrayImage& image, const ModelConfig& config,
                     const RectRegion& region, ModelKind kind);

    /// Runs one iteration; returns true once converged. Callable past
    /// convergence (used to re-check a converged state).
    bool step();

    int iterations() const { return iterations_; }
    bool converged() const { return converged_; }
    double last_delta() const { return last_delta_; }
    int degenerate_events() const { return degenerate_events_; }
    const LevelSet& phi() const { return phi_; }
    const ModelConfig& config() const { return config_; }
    BinaryMask mask() const; // {phi > 0}

private:
    SpfField build_spf(GlobalMeans& means_out);

    GrayImage image_;
    ModelConfig config_;
    ModelKind kind_;
    std::optional<FeatureStack> features_; // proposed model only
    std::optional<GaussianKernel> fit_kernel_;
    std::optional<WeightMap> weights_;     // phi-independent, precomputed
    LevelSet phi_;
    Grid check_prev_; // pre-binarization field of the previous iteration
    int iterations_ = 0;
    bool converged_ = false;
    double last_delta_ = 0.0;
    int degenerate_events_ = 0;
};

struct RunOptions {
    bool keep_snapshots = false;
};

/// Full multi-feature run: features once up front, then the iteration loop
/// until convergence or max_iters. Non-convergence is reported, not thrown.
SegmentationReport run_proposed(const GrayImage& image, const ModelConfig& config,
                                const RectRegion& region,
                                const RunOptions& options = {});

/// Baseline run: same loop, regularization and stopping rule with the
/// baseline pressure field.
SegmentationReport run_slgs(const GrayImage& image, const ModelConfig& config,
                            const RectRegion& region,
                            const RunOptions& options = {});

} // namespace mfseg
