#include "mfseg/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "mfseg/errors.hpp"

namespace mfseg::harness {

namespace {

double number_value(const nlohmann::json& value, const std::string& key) {
    if (!value.is_number())
        throw ConfigError("config key '" + key + "' must be a number");
    return value.get<double>();
}

int int_value(const nlohmann::json& value, const std::string& key) {
    if (!value.is_number_integer())
        throw ConfigError("config key '" + key + "' must be an integer");
    return value.get<int>();
}

bool bool_value(const nlohmann::json& value, const std::string& key) {
    if (!value.is_boolean())
        throw ConfigError("config key '" + key + "' must be a boolean");
    return value.get<bool>();
}

} // namespace

ModelConfig apply_json_overrides(ModelConfig base,
                                 const nlohmann::json& overrides) {
    if (!overrides.is_object())
        throw ConfigError("config overrides must be a JSON object");
    for (const auto& [key, value] : overrides.items()) {
        if (key == "c0") base.c0 = number_value(value, key);
        else if (key == "sigma") base.sigma = number_value(value, key);
        else if (key == "n") base.feature_window = int_value(value, key);
        else if (key == "m") base.range_window = int_value(value, key);
        else if (key == "lambda") base.lambda = number_value(value, key);
        else if (key == "alpha") base.alpha = number_value(value, key);
        else if (key == "sigma_phi") base.sigma_phi = number_value(value, key);
        else if (key == "delta") base.delta = number_value(value, key);
        else if (key == "epsilon") base.epsilon = number_value(value, key);
        else if (key == "dt") base.dt = number_value(value, key);
        else if (key == "max_iters") base.max_iters = int_value(value, key);
        else if (key == "selective") base.selective = bool_value(value, key);
        else if (key == "feature_scales") {
            if (!value.is_array() || value.size() != 3)
                throw ConfigError("config key 'feature_scales' must be an array "
                                  "of 3 numbers");
            for (int i = 0; i < 3; ++i)
                base.feature_scales[i] = number_value(value[i], key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return base;
}

ModelConfig load_config_file(const std::filesystem::path& path,
                             ModelConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
    return apply_json_overrides(base, parsed);
}

namespace {

std::string trim(std::string text) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!text.empty() && is_space(text.back())) text.pop_back();
    std::size_t start = 0;
    while (start < text.size() && is_space(text[start])) ++start;
    return text.substr(start);
}

std::filesystem::path resolve_against(const std::filesystem::path& base_dir,
                                      const std::string& raw) {
    const std::filesystem::path p(raw);
    return p.is_absolute() ? p : base_dir / p;
}

} // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    const std::filesystem::path base_dir = path.parent_path();
    std::vector<ManifestEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty() || row[0] == '#') continue;
        const auto where = "manifest '" + path.string() + "' line " +
                           std::to_string(line_no);
        const std::size_t first = row.find(',');
        if (first == std::string::npos)
            throw ConfigError(where + ": expected image,truth[,overrides-json]");
        const std::size_t second = row.find(',', first + 1);
        ManifestEntry entry;
        entry.image_id = trim(row.substr(0, first));
        const std::string truth_raw =
            trim(second == std::string::npos
                     ? row.substr(first + 1)
                     : row.substr(first + 1, second - first - 1));
        if (entry.image_id.empty() || truth_raw.empty())
            throw ConfigError(where + ": empty path");
        entry.image = resolve_against(base_dir, entry.image_id);
        entry.truth = resolve_against(base_dir, truth_raw);
        entry.overrides = nlohmann::json::object();
        if (second != std::string::npos) {
            const std::string overrides_raw = trim(row.substr(second + 1));
            if (!overrides_raw.empty()) {
                try {
                    entry.overrides = nlohmann::json::parse(overrides_raw);
                } catch (const nlohmann::json::parse_error& e) {
                    throw ConfigError(where + ": bad overrides JSON: " + e.what());
                }
            }
        }
        for (const ManifestEntry& existing : entries)
            if (existing.image_id == entry.image_id)
                throw ConfigError(where + ": duplicate image id '" +
                                  entry.image_id + "'");
        if (!std::filesystem::exists(entry.image))
            throw IoError(where + ": missing image file '" +
                          entry.image.string() + "'");
        if (!std::filesystem::exists(entry.truth))
            throw IoError(where + ": missing truth file '" +
                          entry.truth.string() + "'");
        entries.push_back(std::move(entry));
    }
    return entries;
}

namespace {

double parse_number(const std::string& text) {
    const std::string item = trim(text);
    if (item.empty()) throw ConfigError("empty value in value list");
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(item, &consumed);
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + item + "' in value list");
    }
    if (consumed != item.size() || !std::isfinite(value))
        throw ConfigError("bad number '" + item + "' in value list");
    return value;
}

} // namespace

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = text.find(':', pos);
            parts.push_back(text.substr(pos, next - pos));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (parts.size() != 3)
            throw ConfigError("range must be start:stop:step, got '" + text + "'");
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (step == 0.0) throw ConfigError("range step must be nonzero");
        const double span = (stop - start) / step;
        if (span < -1e-9)
            throw ConfigError("empty range '" + text + "'");
        const long count = static_cast<long>(std::floor(span + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) values.push_back(start + i * step);
    } else {
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = text.find(',', pos);
            values.push_back(parse_number(text.substr(pos, next - pos)));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
    }
    if (values.empty()) throw ConfigError("no values given");
    return values;
}

void SweepSpec::validate() const {
    if (param != "lambda" && param != "alpha")
        throw ConfigError("sweep parameter must be lambda or alpha, got '" +
                          param + "'");
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    for (double v : values) {
        if (!std::isfinite(v))
            throw ConfigError("sweep values must be finite");
        if (param == "lambda" && v < 0.0)
            throw ConfigError("lambda values must be >= 0");
        if (param == "alpha" && v <= 0.0)
            throw ConfigError("alpha values must be > 0");
    }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const GrayImage& image,
                                const BinaryMask& truth,
                                const RectRegion& region) {
    spec.validate();
    std::vector<double> ordered = spec.values;
    std::sort(ordered.begin(), ordered.end());
    std::vector<SweepRow> rows;
    for (double value : ordered) {
        SweepRow row;
        row.value = value;
        try {
            ModelConfig config = spec.base;
            if (spec.param == "lambda")
                config.lambda = value;
            else
                config.alpha = value;
            const SegmentationReport report =
                spec.model == ModelKind::Proposed
                    ? run_proposed(image, config, region)
                    : run_slgs(image, config, region);
            const MetricsRecord rec = compare_masks(report.mask, truth);
            row.f_value = rec.f_value;
            row.iterations = report.iterations;
            row.elapsed_seconds = report.elapsed_seconds;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<BenchRow> run_bench(const std::vector<ManifestEntry>& entries,
                                const std::vector<ModelKind>& models,
                                const ModelConfig& base) {
    if (models.empty()) throw ConfigError("bench needs at least one model");
    if (entries.empty()) throw ConfigError("bench manifest has no entries");
    std::vector<BenchRow> rows;
    for (const ManifestEntry& entry : entries) {
        for (ModelKind model : models) {
            BenchRow row;
            row.image_id = entry.image_id;
            row.model = std::string(model_kind_name(model));
            try {
                const GrayImage image = load_image(entry.image);
                const BinaryMask truth = threshold(load_image(entry.truth), 0.5);
                const ModelConfig config =
                    apply_json_overrides(base, entry.overrides);
                const RectRegion region =
                    RectRegion::centered(image.width(), image.height());
                const SegmentationReport report =
                    model == ModelKind::Proposed
                        ? run_proposed(image, config, region)
                        : run_slgs(image, config, region);
                row.metrics = compare_masks(report.mask, truth);
                row.metrics.elapsed_seconds = report.elapsed_seconds;
                row.iterations = report.iterations;
                row.converged = report.converged;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

GrayImage render_overlay(const GrayImage& image, const BinaryMask& mask) {
    if (image.width() != mask.width() || image.height() != mask.height())
        throw std::invalid_argument("render_overlay: shape mismatch");
    Grid out = image.pixels();
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            const bool boundary =
                (x > 0 && !mask.at(x - 1, y)) ||
                (x + 1 < mask.width() && !mask.at(x + 1, y)) ||
                (y > 0 && !mask.at(x, y - 1)) ||
                (y + 1 < mask.height() && !mask.at(x, y + 1));
            if (boundary) out(x, y) = 1.0;
        }
    return GrayImage(std::move(out));
}

std::string format_double(double value) {
    char buf[64];
    if (value == std::floor(value) && std::fabs(value) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", value);
        return buf;
    }
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

void write_config_comments(std::ostream& out, const ModelConfig& config) {
    out << "# c0=" << format_double(config.c0) << "\n";
    out << "# sigma=" << format_double(config.sigma) << "\n";
    out << "# n=" << config.feature_window << "\n";
    out << "# m=" << config.range_window << "\n";
    out << "# lambda=" << format_double(config.lambda) << "\n";
    out << "# alpha=" << format_double(config.alpha) << "\n";
    out << "# sigma_phi=" << format_double(config.sigma_phi) << "\n";
    out << "# delta=" << format_double(config.delta) << "\n";
    out << "# epsilon=" << format_double(config.epsilon) << "\n";
    out << "# dt=" << format_double(config.dt) << "\n";
    out << "# max_iters=" << config.max_iters << "\n";
    out << "# selective=" << (config.selective ? "true" : "false") << "\n";
    out << "# feature_scales=" << format_double(config.feature_scales[0]) << ","
        << format_double(config.feature_scales[1]) << ","
        << format_double(config.feature_scales[2]) << "\n";
}

void write_metrics_csv(std::ostream& out, const ModelConfig& config,
                       const std::vector<BenchRow>& rows,
                       bool append_averages) {
    write_config_comments(out, config);
    out << "image,model,precision,recall,f,tp,pred_area,truth_area,iterations,"
           "converged,elapsed_s\n";
    std::vector<TaggedRecord> tagged;
    for (const BenchRow& row : rows) {
        if (!row.error.empty()) {
            out << "# error image=" << row.image_id << " model=" << row.model
                << ": " << row.error << "\n";
            continue;
        }
        const MetricsRecord& m = row.metrics;
        out << row.image_id << "," << row.model << ","
            << format_double(m.precision) << "," << format_double(m.recall)
            << "," << format_double(m.f_value) << "," << m.true_positive << ","
            << m.predicted_area << "," << m.truth_area << "," << row.iterations
            << "," << (row.converged ? 1 : 0) << ","
            << format_double(m.elapsed_seconds) << "\n";
        tagged.push_back(TaggedRecord{row.image_id, row.model, m});
    }
    if (!append_averages || tagged.empty()) return;
    for (const ModelSummary& s : timing_summary(tagged)) {
        out << "Ave.," << s.model << ",,," << format_double(s.mean_f)
            << ",,,,,," << format_double(s.mean_elapsed_seconds) << "\n";
    }
}

void write_sweep_csv(std::ostream& out, const ModelConfig& config,
                     const std::string& param,
                     const std::vector<SweepRow>& rows) {
    write_config_comments(out, config);
    out << "# param=" << param << "\n";
    out << "value,f,iterations,elapsed_s\n";
    for (const SweepRow& row : rows) {
        if (!row.error.empty()) {
            out << "# error value=" << format_double(row.value) << ": "
                << row.error << "\n";
            continue;
        }
        out << format_double(row.value) << "," << format_double(row.f_value)
            << "," << row.iterations << "," << format_double(row.elapsed_seconds)
            << "\n";
    }
}

namespace {

nlohmann::json config_json(const ModelConfig& c) {
    return nlohmann::json{
        {"c0", c.c0},
        {"sigma", c.sigma},
        {"n", c.feature_window},
        {"m", c.range_window},
        {"lambda", c.lambda},
        {"alpha", c.alpha},
        {"sigma_phi", c.sigma_phi},
        {"delta", c.delta},
        {"epsilon", c.epsilon},
        {"dt", c.dt},
        {"max_iters", c.max_iters},
        {"selective", c.selective},
        {"feature_scales", c.feature_scales},
    };
}

} // namespace

void dump_snapshots(const std::filesystem::path& directory,
                    const SegmentationReport& report,
                    const ModelConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec)
        throw IoError("cannot create snapshot directory '" + directory.string() +
                      "': " + ec.message());
    int width = 0;
    int height = 0;
    for (std::size_t i = 0; i < report.snapshots.size(); ++i) {
        const Grid& values = report.snapshots[i].values;
        width = values.width();
        height = values.height();
        const auto file = directory / ("phi_" + std::to_string(i) + ".f64");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
        out.write(reinterpret_cast<const char*>(values.data().data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (!out) throw IoError("write failed on '" + file.string() + "'");
    }
    nlohmann::json meta{
        {"width", width},
        {"height", height},
        {"snapshots", report.snapshots.size()},
        {"iterations", report.iterations},
        {"converged", report.converged},
        {"degenerate_events", report.degenerate_events},
        {"format", "float64 little-endian row-major; phi_0 is the initial field"},
        {"config", config_json(config)},
    };
    const auto meta_file = directory / "metadata.json";
    std::ofstream out(meta_file);
    if (!out)
        throw IoError("cannot open '" + meta_file.string() + "' for writing");
    out << meta.dump(2) << "\n";
}

} // namespace mfseg::harness
