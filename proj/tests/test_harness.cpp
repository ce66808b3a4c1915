#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mfseg/engine.hpp"
#include "mfseg/errors.hpp"
#include "mfseg/harness.hpp"
#include "mfseg/image.hpp"
#include "mfseg/metrics.hpp"

using namespace mfseg;
using namespace mfseg::harness;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("mfseg_harness_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("apply_json_overrides: every key lands on its field") {
    const nlohmann::json all = {
        {"c0", 2.0},        {"sigma", 2.5},     {"n", 7},
        {"m", 3},           {"lambda", 1.25},   {"alpha", 250.0},
        {"sigma_phi", 0.9}, {"delta", 1e-4},    {"epsilon", 0.5},
        {"dt", 2e-3},       {"max_iters", 123}, {"selective", true},
        {"feature_scales", {0.5, 1.5, 2.0}},
    };
    const ModelConfig config = apply_json_overrides(ModelConfig{}, all);
    CHECK(config.c0 == 2.0);
    CHECK(config.sigma == 2.5);
    CHECK(config.feature_window == 7);
    CHECK(config.range_window == 3);
    CHECK(config.lambda == 1.25);
    CHECK(config.alpha == 250.0);
    CHECK(config.sigma_phi == 0.9);
    CHECK(config.delta == 1e-4);
    CHECK(config.epsilon == 0.5);
    CHECK(config.dt == 2e-3);
    CHECK(config.max_iters == 123);
    CHECK(config.selective);
    CHECK(config.feature_scales[0] == 0.5);
    CHECK(config.feature_scales[1] == 1.5);
    CHECK(config.feature_scales[2] == 2.0);

    // Untouched keys keep their defaults.
    const ModelConfig partial =
        apply_json_overrides(ModelConfig{}, nlohmann::json{{"alpha", 100.0}});
    CHECK(partial.alpha == 100.0);
    CHECK(partial.lambda == 0.5);
    CHECK(partial.max_iters == 500);
}

TEST_CASE("apply_json_overrides: unknown keys and type mismatches") {
    CHECK_THROWS_AS(
        apply_json_overrides(ModelConfig{}, nlohmann::json{{"omega", 1.0}}),
        ConfigError);
    CHECK_THROWS_AS(
        apply_json_overrides(ModelConfig{}, nlohmann::json{{"alpha", "fast"}}),
        ConfigError);
    CHECK_THROWS_AS(
        apply_json_overrides(ModelConfig{}, nlohmann::json{{"max_iters", 1.5}}),
        ConfigError);
    CHECK_THROWS_AS(
        apply_json_overrides(ModelConfig{}, nlohmann::json{{"selective", 1}}),
        ConfigError);
    CHECK_THROWS_AS(
        apply_json_overrides(ModelConfig{},
                             nlohmann::json{{"feature_scales", {1.0, 2.0}}}),
        ConfigError);
    CHECK_THROWS_AS(
        apply_json_overrides(ModelConfig{}, nlohmann::json::array({1, 2})),
        ConfigError);
}

TEST_CASE("load_config_file: applies, reports missing and malformed files") {
    const fs::path dir = fresh_dir("config");
    const fs::path good = dir / "good.json";
    std::ofstream(good) << R"({"alpha": 150, "selective": true})";
    const ModelConfig config = load_config_file(good);
    CHECK(config.alpha == 150.0);
    CHECK(config.selective);

    CHECK_THROWS_AS(load_config_file(dir / "absent.json"), IoError);

    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{alpha: nope";
    CHECK_THROWS_AS(load_config_file(bad), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("parse_values: lists, inclusive ranges and rejects") {
    CHECK(parse_values("0,0.5,1") == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(parse_values("3.5") == std::vector<double>{3.5});
    CHECK(parse_values("0:3:0.5") ==
          std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0});

    const std::vector<double> alphas = parse_values("100:800:100");
    REQUIRE(alphas.size() == 8);
    CHECK(alphas.front() == 100.0);
    CHECK(alphas.back() == 800.0);

    // Descending ranges need a negative step.
    CHECK(parse_values("3:1:-1") == std::vector<double>{3.0, 2.0, 1.0});

    CHECK_THROWS_AS(parse_values("1:5:0"), ConfigError);
    CHECK_THROWS_AS(parse_values("5:1:0.5"), ConfigError);
    CHECK_THROWS_AS(parse_values("1:5"), ConfigError);
    CHECK_THROWS_AS(parse_values("a,b"), ConfigError);
    CHECK_THROWS_AS(parse_values("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_values(""), ConfigError);
}

TEST_CASE("SweepSpec::validate enforces parameter names and ranges") {
    SweepSpec spec;
    spec.param = "lambda";
    spec.values = {0.0, 1.0};
    CHECK_NOTHROW(spec.validate());

    spec.param = "sigma";
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec.param = "lambda";
    spec.values = {-0.5};
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec.param = "alpha";
    spec.values = {0.0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    spec.values = {};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("run_sweep: rows come back value-ordered and match direct runs") {
    const SyntheticPair scene =
        make_synthetic(SyntheticKind::Homogeneous, 64, 64, 0.01, 4);
    const RectRegion region = RectRegion::centered(64, 64);

    SweepSpec spec;
    spec.param = "lambda";
    spec.values = {2.0, 0.0, 1.0}; // deliberately unsorted
    spec.base.max_iters = 8;

    const std::vector<SweepRow> rows =
        run_sweep(spec, scene.image, scene.truth, region);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == 0.0);
    CHECK(rows[1].value == 1.0);
    CHECK(rows[2].value == 2.0);

    for (const SweepRow& row : rows) {
        CHECK(row.error.empty());
        ModelConfig config = spec.base;
        config.lambda = row.value;
        const SegmentationReport direct =
            run_proposed(scene.image, config, region);
        const MetricsRecord rec = compare_masks(direct.mask, scene.truth);
        CHECK(row.f_value == rec.f_value);
        CHECK(row.iterations == direct.iterations);
    }
}

TEST_CASE("run_sweep: a failing configuration is reported per row") {
    const SyntheticPair scene =
        make_synthetic(SyntheticKind::Homogeneous, 64, 64, 0.0, 4);
    const RectRegion region = RectRegion::centered(64, 64);

    SweepSpec spec;
    spec.param = "alpha";
    spec.values = {100.0, 200.0};
    spec.base.sigma_phi = 20.0; // regularization kernel larger than the image

    const std::vector<SweepRow> rows =
        run_sweep(spec, scene.image, scene.truth, region);
    REQUIRE(rows.size() == 2);
    for (const SweepRow& row : rows) {
        CHECK_FALSE(row.error.empty());
        CHECK(row.f_value == 0.0);
    }
}

TEST_CASE("load_manifest: resolution, comments, overrides and failures") {
    const fs::path dir = fresh_dir("manifest");
    const SyntheticPair scene =
        make_synthetic(SyntheticKind::Homogeneous, 64, 64, 0.0, 2);
    save_image(scene.image, dir / "img_a.pgm");
    save_mask(scene.truth, dir / "truth_a.pgm");
    save_image(scene.image, dir / "img_b.pgm");
    save_mask(scene.truth, dir / "truth_b.pgm");

    const fs::path manifest = dir / "runs.csv";
    std::ofstream(manifest)
        << "# comment line\n"
        << "\n"
        << "img_a.pgm,truth_a.pgm\n"
        << "img_b.pgm,truth_b.pgm,{\"alpha\": 200, \"max_iters\": 7}\n";

    const std::vector<ManifestEntry> entries = load_manifest(manifest);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].image_id == "img_a.pgm");
    CHECK(entries[0].image == dir / "img_a.pgm");
    CHECK(entries[0].truth == dir / "truth_a.pgm");
    CHECK(entries[0].overrides.empty());
    // The overrides JSON may itself contain commas.
    CHECK(entries[1].overrides["alpha"] == 200);
    CHECK(entries[1].overrides["max_iters"] == 7);

    const fs::path dup = dir / "dup.csv";
    std::ofstream(dup) << "img_a.pgm,truth_a.pgm\n"
                       << "img_a.pgm,truth_b.pgm\n";
    CHECK_THROWS_WITH_AS(load_manifest(dup),
                         doctest::Contains("line 2"), ConfigError);

    const fs::path missing = dir / "missing.csv";
    std::ofstream(missing) << "ghost.pgm,truth_a.pgm\n";
    CHECK_THROWS_WITH_AS(load_manifest(missing), doctest::Contains("ghost.pgm"),
                         IoError);

    const fs::path malformed = dir / "short.csv";
    std::ofstream(malformed) << "only_one_field\n";
    CHECK_THROWS_AS(load_manifest(malformed), ConfigError);

    CHECK_THROWS_AS(load_manifest(dir / "nope.csv"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("run_bench: full grid of rows, manifest overrides honored") {
    const fs::path dir = fresh_dir("bench");
    const SyntheticPair a =
        make_synthetic(SyntheticKind::Homogeneous, 64, 64, 0.0, 2);
    const SyntheticPair b = make_synthetic(SyntheticKind::DiskRamp, 64, 64, 0.01, 3);
    save_image(a.image, dir / "a.pgm");
    save_mask(a.truth, dir / "a_truth.pgm");
    save_image(b.image, dir / "b.pgm");
    save_mask(b.truth, dir / "b_truth.pgm");

    const fs::path manifest = dir / "bench.csv";
    std::ofstream(manifest) << "a.pgm,a_truth.pgm\n"
                            << "b.pgm,b_truth.pgm,{\"max_iters\": 1}\n";
    const std::vector<ManifestEntry> entries = load_manifest(manifest);

    ModelConfig base;
    base.max_iters = 6;
    const std::vector<ModelKind> models{ModelKind::Proposed, ModelKind::Slgs};
    const std::vector<BenchRow> rows = run_bench(entries, models, base);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].image_id == "a.pgm");
    CHECK(rows[0].model == "proposed");
    CHECK(rows[1].model == "slgs");
    CHECK(rows[2].image_id == "b.pgm");
    for (const BenchRow& row : rows) CHECK(row.error.empty());

    // The per-entry override caps the second image at one iteration.
    CHECK(rows[0].iterations == 6);
    CHECK(rows[2].iterations == 1);
    CHECK(rows[3].iterations == 1);

    CHECK_THROWS_AS(run_bench(entries, {}, base), ConfigError);
    CHECK_THROWS_AS(run_bench({}, models, base), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("render_overlay marks only the inner boundary") {
    Grid g(12, 12, 0.3);
    const GrayImage image(std::move(g));
    BinaryMask mask(12, 12);
    for (int y = 4; y < 9; ++y)
        for (int x = 3; x < 8; ++x) mask.set(x, y, true);

    const GrayImage overlay = render_overlay(image, mask);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) {
            const bool inner = mask.at(x, y) &&
                               (x == 3 || x == 7 || y == 4 || y == 8);
            if (inner)
                CHECK(overlay.at(x, y) == 1.0);
            else
                CHECK(overlay.at(x, y) == 0.3);
        }

    CHECK_THROWS_AS(render_overlay(image, BinaryMask(5, 5)),
                    std::invalid_argument);
}

TEST_CASE("format_double: integral, fractional and round-trip forms") {
    CHECK(format_double(400.0) == "400");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-3.0) == "-3");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.5) == "2.5");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(1e-5) == "1e-05");
    CHECK(format_double(123456789012345.0) == "123456789012345");

    for (double v : {1.0 / 3.0, 0.1 + 0.2, 1e-7, 3.14159265358979,
                     6.02214076e23}) {
        const std::string text = format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
}

TEST_CASE("write_config_comments echoes every knob as a comment") {
    ModelConfig config;
    config.alpha = 250.0;
    config.delta = 1e-5;
    std::ostringstream out;
    write_config_comments(out, config);
    const std::vector<std::string> lines = lines_of(out.str());
    REQUIRE(lines.size() == 13);
    for (const std::string& line : lines) {
        REQUIRE(line.size() >= 2);
        CHECK(line.substr(0, 2) == "# ");
    }
    CHECK(lines[5] == "# alpha=250");
    CHECK(lines[7] == "# delta=1e-05");
    CHECK(lines[11] == "# selective=false");
    CHECK(lines[12] == "# feature_scales=1,1,1");
}

TEST_CASE("write_metrics_csv: schema, error comments and averages") {
    BenchRow good;
    good.image_id = "a.pgm";
    good.model = "proposed";
    good.metrics.precision = 0.5;
    good.metrics.recall = 1.0;
    good.metrics.f_value = 2.0 / 3.0;
    good.metrics.true_positive = 10;
    good.metrics.predicted_area = 20;
    good.metrics.truth_area = 10;
    good.metrics.elapsed_seconds = 0.25;
    good.iterations = 17;
    good.converged = true;

    BenchRow second = good;
    second.image_id = "b.pgm";
    second.metrics.f_value = 1.0;
    second.metrics.elapsed_seconds = 0.75;

    BenchRow broken;
    broken.image_id = "c.pgm";
    broken.model = "slgs";
    broken.error = "cannot open image";

    std::ostringstream out;
    write_metrics_csv(out, ModelConfig{}, {good, second, broken}, true);
    const std::vector<std::string> lines = lines_of(out.str());

    REQUIRE(lines.size() > 14);
    CHECK(lines[13] ==
          "image,model,precision,recall,f,tp,pred_area,truth_area,iterations,"
          "converged,elapsed_s");
    CHECK(lines[14] == "a.pgm,proposed,0.5,1,"
                       "0.6666666666666666,10,20,10,17,1,0.25");
    CHECK(lines[16].substr(0, 7) == "# error");
    CHECK(lines[16].find("c.pgm") != std::string::npos);

    // One model in play, so one averages row: mean F of the two good rows.
    const std::string last = lines.back();
    CHECK(last.substr(0, 14) == "Ave.,proposed,");
    CHECK(last.find(format_double((2.0 / 3.0 + 1.0) / 2.0)) != std::string::npos);
    CHECK(last.find(format_double(0.5)) != std::string::npos);
}

TEST_CASE("write_sweep_csv: param comment plus value rows") {
    SweepRow row;
    row.value = 0.5;
    row.f_value = 0.75;
    row.iterations = 21;
    row.elapsed_seconds = 0.125;

    SweepRow failed;
    failed.value = 3.0;
    failed.error = "blew up";

    std::ostringstream out;
    write_sweep_csv(out, ModelConfig{}, "lambda", {row, failed});
    const std::vector<std::string> lines = lines_of(out.str());
    REQUIRE(lines.size() == 17);
    CHECK(lines[13] == "# param=lambda");
    CHECK(lines[14] == "value,f,iterations,elapsed_s");
    CHECK(lines[15] == "0.5,0.75,21,0.125");
    CHECK(lines[16] == "# error value=3: blew up");
}

TEST_CASE("dump_snapshots: raw fields plus metadata sidecar") {
    const SyntheticPair scene =
        make_synthetic(SyntheticKind::Homogeneous, 64, 64, 0.0, 6);
    ModelConfig config;
    config.max_iters = 2;
    const RectRegion region = RectRegion::centered(64, 64);
    RunOptions options;
    options.keep_snapshots = true;
    const SegmentationReport report =
        run_slgs(scene.image, config, region, options);
    REQUIRE(report.snapshots.size() == 3);

    const fs::path dir = fresh_dir("snapshots") / "dump";
    dump_snapshots(dir, report, config);

    for (int i = 0; i < 3; ++i)
        CHECK(fs::exists(dir / ("phi_" + std::to_string(i) + ".f64")));
    CHECK_FALSE(fs::exists(dir / "phi_3.f64"));

    const std::string raw = slurp(dir / "phi_0.f64");
    REQUIRE(raw.size() == std::size_t(64) * 64 * sizeof(double));
    const LevelSet init = init_level_set(64, 64, region, config.c0);
    std::vector<double> decoded(64 * 64);
    std::memcpy(decoded.data(), raw.data(), raw.size());
    CHECK(decoded == init.values.data());

    const nlohmann::json meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
    CHECK(meta["width"] == 64);
    CHECK(meta["height"] == 64);
    CHECK(meta["snapshots"] == 3);
    CHECK(meta["iterations"] == 2);
    CHECK(meta["config"]["alpha"] == 400.0);
    CHECK(meta["config"]["max_iters"] == 2);
    fs::remove_all(dir.parent_path());
}
