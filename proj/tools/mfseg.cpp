#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfseg/engine.hpp"
#include "mfseg/errors.hpp"
#include "mfseg/harness.hpp"
#include "mfseg/image.hpp"
#include "mfseg/metrics.hpp"

namespace {

using namespace mfseg;

struct ConfigArgs {
    std::string config_file;
    std::optional<double> c0, sigma, lambda, alpha, sigma_phi, delta, epsilon, dt;
    std::optional<int> n, m, max_iters;
    bool selective = false;
    std::string feature_scales;
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.config_file, "JSON config file");
    cmd->add_option("--c0", args.c0, "level-set init constant");
    cmd->add_option("--sigma", args.sigma, "fitting kernel std, pixels");
    cmd->add_option("--n", args.n, "entropy/std window width (odd)");
    cmd->add_option("--m", args.m, "range window width (odd)");
    cmd->add_option("--lambda", args.lambda, "adaptive weight constant");
    cmd->add_option("--alpha", args.alpha, "balloon force");
    cmd->add_option("--sigma-phi", args.sigma_phi, "regularizer kernel std");
    cmd->add_option("--delta", args.delta, "convergence threshold");
    cmd->add_option("--epsilon", args.epsilon, "Heaviside scale");
    cmd->add_option("--dt", args.dt, "evolution time step");
    cmd->add_option("--max-iters", args.max_iters, "iteration cap");
    cmd->add_flag("--selective", args.selective,
                  "re-binarize the level set each iteration");
    cmd->add_option("--feature-scales", args.feature_scales,
                    "entropy,std,gradient term scales (3 numbers)");
}

// CLI flag > config file > built-in default.
ModelConfig effective_config(const ConfigArgs& args) {
    ModelConfig config;
    if (!args.config_file.empty())
        config = harness::load_config_file(args.config_file);
    if (args.c0) config.c0 = *args.c0;
    if (args.sigma) config.sigma = *args.sigma;
    if (args.n) config.feature_window = *args.n;
    if (args.m) config.range_window = *args.m;
    if (args.lambda) config.lambda = *args.lambda;
    if (args.alpha) config.alpha = *args.alpha;
    if (args.sigma_phi) config.sigma_phi = *args.sigma_phi;
    if (args.delta) config.delta = *args.delta;
    if (args.epsilon) config.epsilon = *args.epsilon;
    if (args.dt) config.dt = *args.dt;
    if (args.max_iters) config.max_iters = *args.max_iters;
    if (args.selective) config.selective = true;
    if (!args.feature_scales.empty()) {
        const auto scales = harness::parse_values(args.feature_scales);
        if (scales.size() != 3)
            throw ConfigError("--feature-scales needs exactly 3 values");
        for (int i = 0; i < 3; ++i) config.feature_scales[i] = scales[i];
    }
    config.validate();
    return config;
}

RectRegion pick_region(const std::string& init_rect, const GrayImage& image) {
    if (init_rect.empty())
        return RectRegion::centered(image.width(), image.height());
    const auto values = harness::parse_values(init_rect);
    if (values.size() != 4)
        throw ConfigError("--init-rect needs cx,cy,w,h");
    for (double v : values)
        if (v != static_cast<int>(v))
            throw ConfigError("--init-rect values must be integers");
    return RectRegion{static_cast<int>(values[0]), static_cast<int>(values[1]),
                      static_cast<int>(values[2]), static_cast<int>(values[3])};
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void print_metrics(const MetricsRecord& m) {
    std::cout << "precision=" << harness::format_double(m.precision)
              << " recall=" << harness::format_double(m.recall)
              << " f=" << harness::format_double(m.f_value)
              << " tp=" << m.true_positive << " pred_area=" << m.predicted_area
              << " truth_area=" << m.truth_area
              << (m.degenerate ? " degenerate=1" : "") << "\n";
}

struct SegmentArgs {
    std::string input, truth, model = "proposed", out_mask, out_overlay,
                snapshots, init_rect, out_csv;
    ConfigArgs config;
};

void run_segment(const SegmentArgs& args) {
    const ModelConfig config = effective_config(args.config);
    const ModelKind kind = parse_model_kind(args.model);
    const GrayImage image = load_image(args.input);
    const RectRegion region = pick_region(args.init_rect, image);
    RunOptions options;
    options.keep_snapshots = !args.snapshots.empty();
    const SegmentationReport report =
        kind == ModelKind::Proposed ? run_proposed(image, config, region, options)
                                    : run_slgs(image, config, region, options);
    std::cout << "model=" << model_kind_name(kind)
              << " iterations=" << report.iterations
              << " converged=" << (report.converged ? 1 : 0)
              << " mask_area=" << report.mask.area()
              << " degenerate_events=" << report.degenerate_events
              << " elapsed_s=" << harness::format_double(report.elapsed_seconds)
              << "\n";
    if (!args.out_mask.empty()) save_mask(report.mask, args.out_mask);
    if (!args.out_overlay.empty())
        save_image(harness::render_overlay(image, report.mask), args.out_overlay);
    if (!args.snapshots.empty())
        harness::dump_snapshots(args.snapshots, report, config);
    if (args.truth.empty()) {
        if (!args.out_csv.empty())
            throw ConfigError("--out-csv for segment needs --truth");
        return;
    }
    const BinaryMask truth = threshold(load_image(args.truth), 0.5);
    harness::BenchRow row;
    row.image_id = args.input;
    row.model = std::string(model_kind_name(kind));
    row.metrics = compare_masks(report.mask, truth);
    row.metrics.elapsed_seconds = report.elapsed_seconds;
    row.iterations = report.iterations;
    row.converged = report.converged;
    print_metrics(row.metrics);
    if (!args.out_csv.empty()) {
        auto out = open_output(args.out_csv);
        harness::write_metrics_csv(out, config, {row}, false);
    }
}

struct EvaluateArgs {
    std::string pred, truth, out_csv;
};

void run_evaluate(const EvaluateArgs& args) {
    const BinaryMask pred = threshold(load_image(args.pred), 0.5);
    const BinaryMask truth = threshold(load_image(args.truth), 0.5);
    const MetricsRecord metrics = compare_masks(pred, truth);
    print_metrics(metrics);
    if (!args.out_csv.empty()) {
        harness::BenchRow row;
        row.image_id = args.pred;
        row.model = "external";
        row.metrics = metrics;
        auto out = open_output(args.out_csv);
        harness::write_metrics_csv(out, ModelConfig{}, {row}, false);
    }
}

struct SweepArgs {
    std::string input, truth, param, values, model = "proposed", init_rect,
                out_csv;
    ConfigArgs config;
};

void run_sweep_cmd(const SweepArgs& args) {
    harness::SweepSpec spec;
    spec.param = args.param;
    spec.values = harness::parse_values(args.values);
    spec.base = effective_config(args.config);
    spec.model = parse_model_kind(args.model);
    spec.validate();
    const GrayImage image = load_image(args.input);
    const BinaryMask truth = threshold(load_image(args.truth), 0.5);
    const RectRegion region = pick_region(args.init_rect, image);
    const auto rows = harness::run_sweep(spec, image, truth, region);
    if (args.out_csv.empty()) {
        harness::write_sweep_csv(std::cout, spec.base, spec.param, rows);
    } else {
        auto out = open_output(args.out_csv);
        harness::write_sweep_csv(out, spec.base, spec.param, rows);
        for (const auto& row : rows)
            std::cout << spec.param << "=" << harness::format_double(row.value)
                      << (row.error.empty()
                              ? " f=" + harness::format_double(row.f_value)
                              : " error=" + row.error)
                      << "\n";
    }
}

struct BenchArgs {
    std::string manifest, models = "proposed,slgs", out_csv;
    ConfigArgs config;
};

void run_bench_cmd(const BenchArgs& args) {
    std::vector<ModelKind> models;
    std::size_t pos = 0;
    while (pos <= args.models.size()) {
        const std::size_t next = args.models.find(',', pos);
        const std::string name = args.models.substr(pos, next - pos);
        if (!name.empty()) models.push_back(parse_model_kind(name));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    const ModelConfig base = effective_config(args.config);
    const auto entries = harness::load_manifest(args.manifest);
    const auto rows = harness::run_bench(entries, models, base);
    std::vector<TaggedRecord> tagged;
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            std::cerr << "error: " << row.image_id << " (" << row.model
                      << "): " << row.error << "\n";
            continue;
        }
        tagged.push_back(TaggedRecord{row.image_id, row.model, row.metrics});
    }
    if (args.out_csv.empty()) {
        harness::write_metrics_csv(std::cout, base, rows, true);
    } else {
        auto out = open_output(args.out_csv);
        harness::write_metrics_csv(out, base, rows, true);
    }
    if (!tagged.empty()) {
        for (const ModelSummary& s : timing_summary(tagged))
            std::cout << "model=" << s.model << " runs=" << s.runs
                      << " mean_f=" << harness::format_double(s.mean_f)
                      << " mean_elapsed_s="
                      << harness::format_double(s.mean_elapsed_seconds) << "\n";
    }
}

struct SynthArgs {
    std::string kind = "disk-ramp", out_image, out_truth;
    int size = 128, width = 0, height = 0;
    double noise = 0.0;
    std::uint64_t seed = 1;
};

void run_synth(const SynthArgs& args) {
    const int width = args.width > 0 ? args.width : args.size;
    const int height = args.height > 0 ? args.height : args.size;
    SyntheticPair pair;
    try {
        pair = make_synthetic(parse_synthetic_kind(args.kind), width, height,
                              args.noise, args.seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    save_image(pair.image, args.out_image);
    save_mask(pair.truth, args.out_truth);
    std::cout << "kind=" << args.kind << " width=" << width
              << " height=" << height
              << " noise=" << harness::format_double(args.noise)
              << " seed=" << args.seed << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Region-based level-set segmentation toolkit"};
    app.require_subcommand(1);

    SegmentArgs segment;
    auto* cmd_segment =
        app.add_subcommand("segment", "segment one image and write the mask");
    cmd_segment->add_option("--input", segment.input, "input image (.pgm/.png)")
        ->required();
    cmd_segment->add_option("--truth", segment.truth,
                            "ground-truth mask for metrics");
    cmd_segment->add_option("--model", segment.model, "proposed | slgs");
    cmd_segment->add_option("--out-mask", segment.out_mask, "mask output path");
    cmd_segment->add_option("--out-overlay", segment.out_overlay,
                            "contour overlay output path");
    cmd_segment->add_option("--snapshots", segment.snapshots,
                            "directory for per-iteration level-set dumps");
    cmd_segment->add_option("--init-rect", segment.init_rect,
                            "initial region cx,cy,w,h (default centered 40x40)");
    cmd_segment->add_option("--out-csv", segment.out_csv,
                            "single-row metrics CSV (needs --truth)");
    add_config_flags(cmd_segment, segment.config);
    cmd_segment->callback([&] { run_segment(segment); });

    EvaluateArgs evaluate;
    auto* cmd_evaluate = app.add_subcommand(
        "evaluate", "compare a predicted mask against ground truth");
    cmd_evaluate->add_option("--pred", evaluate.pred, "predicted mask file")
        ->required();
    cmd_evaluate->add_option("--truth", evaluate.truth, "ground-truth mask file")
        ->required();
    cmd_evaluate->add_option("--out-csv", evaluate.out_csv, "metrics CSV path");
    cmd_evaluate->callback([&] { run_evaluate(evaluate); });

    SweepArgs sweep;
    auto* cmd_sweep = app.add_subcommand(
        "sweep", "segment once per parameter value and tabulate F");
    cmd_sweep->add_option("--input", sweep.input, "input image")->required();
    cmd_sweep->add_option("--truth", sweep.truth, "ground-truth mask")
        ->required();
    cmd_sweep->add_option("--param", sweep.param, "lambda | alpha")->required();
    cmd_sweep
        ->add_option("--values", sweep.values,
                     "comma list '0,0.5,1' or inclusive range 'start:stop:step'")
        ->required();
    cmd_sweep->add_option("--model", sweep.model, "proposed | slgs");
    cmd_sweep->add_option("--init-rect", sweep.init_rect,
                          "initial region cx,cy,w,h");
    cmd_sweep->add_option("--out-csv", sweep.out_csv,
                          "CSV output path (stdout when omitted)");
    add_config_flags(cmd_sweep, sweep.config);
    cmd_sweep->callback([&] { run_sweep_cmd(sweep); });

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand(
        "bench", "run every manifest image under the requested models");
    cmd_bench
        ->add_option("--manifest", bench.manifest,
                     "CSV manifest: image,truth[,overrides-json]")
        ->required();
    cmd_bench->add_option("--models", bench.models,
                          "comma list from {proposed, slgs}");
    cmd_bench->add_option("--out-csv", bench.out_csv,
                          "CSV output path (stdout when omitted)");
    add_config_flags(cmd_bench, bench.config);
    cmd_bench->callback([&] { run_bench_cmd(bench); });

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand(
        "synth", "generate a synthetic image and its ground-truth mask");
    cmd_synth->add_option("--kind", synth.kind,
                          "disk-ramp | homogeneous | two-object");
    cmd_synth->add_option("--size", synth.size, "square size (default 128)");
    cmd_synth->add_option("--width", synth.width, "width (overrides --size)");
    cmd_synth->add_option("--height", synth.height, "height (overrides --size)");
    cmd_synth->add_option("--noise", synth.noise, "Gaussian noise sigma");
    cmd_synth->add_option("--seed", synth.seed, "RNG seed");
    cmd_synth->add_option("--out-image", synth.out_image, "image output path")
        ->required();
    cmd_synth->add_option("--out-truth", synth.out_truth, "truth output path")
        ->required();
    cmd_synth->callback([&] { run_synth(synth); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const mfseg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const mfseg::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
