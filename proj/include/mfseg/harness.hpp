#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfseg/engine.hpp"
#include "mfseg/image.hpp"
#include "mfseg/metrics.hpp"

namespace mfseg::harness {

/// Applies a flat key/value JSON object onto a config. Keys mirror the
/// config fields: c0, sigma, n, m, lambda, alpha, sigma_phi, delta, epsilon,
/// dt, max_iters, selective, feature_scales. Unknown keys raise ConfigError.
ModelConfig apply_json_overrides(ModelConfig base, const nlohmann::json& overrides);

/// Loads a JSON config file and applies it over the defaults.
ModelConfig load_config_file(const std::filesystem::path& path, ModelConfig base = {});

struct ManifestEntry {
    std::string image_id;               // image path as written in the manifest
    std::filesystem::path image;        // resolved
    std::filesystem::path truth;        // resolved
    nlohmann::json overrides;           // empty object when absent
};

/// Parses a run manifest: CSV rows image,truth[,overrides-json]. Relative
/// paths resolve against the manifest's directory; missing files and
/// duplicate image ids raise errors at load time.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Parses "--values": either an explicit comma list "0,0.5,1" or an
/// inclusive range "start:stop:step". Values must be finite and non-empty.
std::vector<double> parse_values(const std::string& text);

struct SweepSpec {
    std::string param; // "lambda" or "alpha"
    std::vector<double> values;
    ModelConfig base;
    ModelKind model = ModelKind::Proposed;

    /// Checks the parameter name and value ranges (lambda >= 0, alpha > 0).
    void validate() const;
};

struct SweepRow {
    double value = 0.0;
    double f_value = 0.0;
    int iterations = 0;
    double elapsed_seconds = 0.0;
    std::string error; // empty on success
};

/// One segmentation per value, rows ordered by value. A failed run is
/// recorded in its row and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const GrayImage& image,
                                const BinaryMask& truth, const RectRegion& region);

struct BenchRow {
    std::string image_id;
    std::string model;
    MetricsRecord metrics;
    int iterations = 0;
    bool converged = false;
    std::string error; // empty on success
};

/// Runs every manifest entry under every requested model. Per-image failures
/// are recorded in-row and the bench continues.
std::vector<BenchRow> run_bench(const std::vector<ManifestEntry>& entries,
                                const std::vector<ModelKind>& models,
                                const ModelConfig& base);

/// Copy of the image with the mask's inner boundary (mask pixels adjacent to
/// a non-mask 4-neighbor) painted at full intensity.
GrayImage render_overlay(const GrayImage& image, const BinaryMask& mask);

/// '#'-prefixed key=value lines echoing the effective config; written at the
/// top of every CSV.
void write_config_comments(std::ostream& out, const ModelConfig& config);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double value);

/// Header + rows in the fixed metrics schema:
/// image,model,precision,recall,f,tp,pred_area,truth_area,iterations,converged,elapsed_s
void write_metrics_csv(std::ostream& out, const ModelConfig& config,
                       const std::vector<BenchRow>& rows, bool append_averages);

void write_sweep_csv(std::ostream& out, const ModelConfig& config,
                     const std::string& param, const std::vector<SweepRow>& rows);

/// Dumps per-iteration level sets as raw little-endian float64 files
/// (phi_<iter>.f64, row-major) plus a metadata.json sidecar.
void dump_snapshots(const std::filesystem::path& directory,
                    const SegmentationReport& report, const ModelConfig& config);

} // namespace mfseg::harness
