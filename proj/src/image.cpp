#include "mfseg/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <csetjmp>
#include <png.h>

#include "mfseg/errors.hpp"

namespace mfseg {

namespace {

std::string quoted(const std::filesystem::path& path) {
    return "'" + path.string() + "'";
}

} // namespace

GrayImage::GrayImage(Grid pixels) : pixels_(std::move(pixels)) {
    if (pixels_.width() < 1 || pixels_.height() < 1)
        throw std::invalid_argument("GrayImage: empty image");
    for (double v : pixels_.data()) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("GrayImage: intensity outside [0, 1]");
    }
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
            fill ? 1 : 0) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("BinaryMask: empty mask");
}

std::size_t BinaryMask::area() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

RectRegion RectRegion::centered(int image_width, int image_height, int width,
                                int height) {
    return RectRegion{image_width / 2, image_height / 2, width, height};
}

bool RectRegion::contains(int x, int y) const {
    const int x0 = center_x - width / 2;
    const int y0 = center_y - height / 2;
    return x >= x0 && x < x0 + width && y >= y0 && y < y0 + height;
}

bool RectRegion::fits(int image_width, int image_height) const {
    if (width < 1 || height < 1) return false;
    const int x0 = center_x - width / 2;
    const int y0 = center_y - height / 2;
    return x0 >= 0 && y0 >= 0 && x0 + width <= image_width &&
           y0 + height <= image_height;
}

// ---------------------------------------------------------------------------
// PGM (binary P5, maxval 255)
// ---------------------------------------------------------------------------

namespace {

// Next header token, skipping whitespace and '#' comments.
int next_header_int(std::istream& in, const std::filesystem::path& path,
                    const char* what) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c))
        throw IoError("PGM " + quoted(path) + ": malformed header (" + what + ")");
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1 << 30)
            throw IoError("PGM " + quoted(path) + ": header value overflow");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(value);
}

GrayImage load_pgm(std::ifstream& in, const std::filesystem::path& path) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5')
        throw IoError("PGM " + quoted(path) + ": expected binary P5 magic");
    const int width = next_header_int(in, path, "width");
    const int height = next_header_int(in, path, "height");
    const int maxval = next_header_int(in, path, "maxval");
    if (maxval != 255)
        throw IoError("PGM " + quoted(path) + ": unsupported maxval " +
                      std::to_string(maxval) + " (only 8-bit, maxval 255)");
    in.get(); // single whitespace separating header and raster
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw IoError("PGM " + quoted(path) + ": truncated pixel data");
    Grid pixels(width, height);
    for (std::size_t i = 0; i < raw.size(); ++i)
        pixels.data()[i] = raw[i] / 255.0;
    return GrayImage(std::move(pixels));
}

void save_pgm(const std::vector<unsigned char>& bytes, int width, int height,
              const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + quoted(path) + " for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on " + quoted(path));
}

// ---------------------------------------------------------------------------
// PNG (8-bit grayscale) via libpng
// ---------------------------------------------------------------------------

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* file = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* file = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (file) std::fclose(file);
    }
};

const char* png_color_name(int color_type) {
    switch (color_type) {
        case PNG_COLOR_TYPE_GRAY: return "grayscale";
        case PNG_COLOR_TYPE_GRAY_ALPHA: return "grayscale+alpha";
        case PNG_COLOR_TYPE_PALETTE: return "palette";
        case PNG_COLOR_TYPE_RGB: return "RGB";
        case PNG_COLOR_TYPE_RGB_ALPHA: return "RGBA";
        default: return "unknown";
    }
}

GrayImage load_png(const std::filesystem::path& path) {
    PngReadGuard g;
    g.file = std::fopen(path.string().c_str(), "rb");
    if (!g.file) throw IoError("cannot open " + quoted(path));
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("PNG " + quoted(path) + ": reader setup failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("PNG " + quoted(path) + ": reader setup failed");
    if (setjmp(png_jmpbuf(g.png)))
        throw IoError("PNG " + quoted(path) + ": corrupt or unreadable stream");

    png_init_io(g.png, g.file);
    png_read_info(g.png, g.info);
    const int width = static_cast<int>(png_get_image_width(g.png, g.info));
    const int height = static_cast<int>(png_get_image_height(g.png, g.info));
    const int color_type = png_get_color_type(g.png, g.info);
    const int bit_depth = png_get_bit_depth(g.png, g.info);
    if (color_type != PNG_COLOR_TYPE_GRAY)
        throw IoError("PNG " + quoted(path) + ": unsupported color format " +
                      png_color_name(color_type) + " (only 8-bit grayscale)");
    if (bit_depth != 8)
        throw IoError("PNG " + quoted(path) + ": unsupported bit depth " +
                      std::to_string(bit_depth) + " (only 8-bit grayscale)");

    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[y] = raw.data() + static_cast<std::size_t>(y) * width;
    png_read_image(g.png, rows.data());
    png_read_end(g.png, nullptr);

    Grid pixels(width, height);
    for (std::size_t i = 0; i < raw.size(); ++i)
        pixels.data()[i] = raw[i] / 255.0;
    return GrayImage(std::move(pixels));
}

void save_png(const std::vector<unsigned char>& bytes, int width, int height,
              const std::filesystem::path& path) {
    PngWriteGuard g;
    g.file = std::fopen(path.string().c_str(), "wb");
    if (!g.file) throw IoError("cannot open " + quoted(path) + " for writing");
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("PNG " + quoted(path) + ": writer setup failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("PNG " + quoted(path) + ": writer setup failed");
    if (setjmp(png_jmpbuf(g.png)))
        throw IoError("PNG " + quoted(path) + ": write failed");

    png_init_io(g.png, g.file);
    png_set_IHDR(g.png, g.info, width, height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    for (int y = 0; y < height; ++y)
        png_write_row(g.png, const_cast<png_bytep>(
                                 bytes.data() + static_cast<std::size_t>(y) * width));
    png_write_end(g.png, nullptr);
}

std::vector<unsigned char> quantize(const Grid& pixels) {
    std::vector<unsigned char> bytes(pixels.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        long v = std::lround(pixels.data()[i] * 255.0);
        bytes[i] = static_cast<unsigned char>(std::clamp(v, 0L, 255L));
    }
    return bytes;
}

enum class FileFormat { Pgm, Png };

FileFormat format_from_extension(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") return FileFormat::Pgm;
    if (ext == ".png") return FileFormat::Png;
    throw IoError("unsupported output extension '" + ext + "' for " +
                  quoted(path) + " (use .pgm or .png)");
}

} // namespace

GrayImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + quoted(path));
    const int c0 = in.get();
    const int c1 = in.get();
    in.seekg(0);
    if (c0 == 'P' && c1 == '5') return load_pgm(in, path);
    if (c0 == 0x89 && c1 == 'P') {
        in.close();
        return load_png(path);
    }
    throw IoError(quoted(path) + ": unrecognized format (expected PGM P5 or PNG)");
}

void save_image(const GrayImage& image, const std::filesystem::path& path) {
    const auto bytes = quantize(image.pixels());
    switch (format_from_extension(path)) {
        case FileFormat::Pgm:
            save_pgm(bytes, image.width(), image.height(), path);
            break;
        case FileFormat::Png:
            save_png(bytes, image.width(), image.height(), path);
            break;
    }
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes(static_cast<std::size_t>(mask.width()) *
                                     mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            bytes[static_cast<std::size_t>(y) * mask.width() + x] =
                mask.at(x, y) ? 255 : 0;
    switch (format_from_extension(path)) {
        case FileFormat::Pgm:
            save_pgm(bytes, mask.width(), mask.height(), path);
            break;
        case FileFormat::Png:
            save_png(bytes, mask.width(), mask.height(), path);
            break;
    }
}

BinaryMask threshold(const GrayImage& image, double level) {
    BinaryMask mask(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            mask.set(x, y, image.at(x, y) > level);
    return mask;
}

// ---------------------------------------------------------------------------
// Synthetic scenes
// ---------------------------------------------------------------------------

SyntheticKind parse_synthetic_kind(std::string_view name) {
    if (name == "disk-ramp") return SyntheticKind::DiskRamp;
    if (name == "homogeneous") return SyntheticKind::Homogeneous;
    if (name == "two-object") return SyntheticKind::TwoObject;
    throw ConfigError("unknown synthetic kind '" + std::string(name) +
                      "' (expected disk-ramp, homogeneous or two-object)");
}

std::string_view synthetic_kind_name(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::DiskRamp: return "disk-ramp";
        case SyntheticKind::Homogeneous: return "homogeneous";
        case SyntheticKind::TwoObject: return "two-object";
    }
    return "?";
}

namespace {

// One standard normal draw per call: Box-Muller (cosine branch) on two
// 53-bit uniforms, so the byte stream depends only on the seed.
class GaussianNoise {
public:
    explicit GaussianNoise(std::uint64_t seed) : rng_(seed) {}
    double next() {
        const double u1 = unit(rng_());
        const double u2 = unit(rng_());
        return std::sqrt(-2.0 * std::log(1.0 - u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static double unit(std::uint64_t x) { // [0, 1)
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
};

struct Disk {
    double cx, cy, radius;
    bool contains(int x, int y) const {
        const double dx = x - cx;
        const double dy = y - cy;
        return dx * dx + dy * dy <= radius * radius;
    }
    // 0 at the left rim, 1 at the right rim.
    double ramp_position(int x) const { return (x - (cx - radius)) / (2.0 * radius); }
};

double ramp_intensity(double t) { return 0.55 + 0.40 * t; }

} // namespace

SyntheticPair make_synthetic(SyntheticKind kind, int width, int height,
                             double noise_sigma, std::uint64_t seed) {
    if (width < 64 || height < 64)
        throw std::invalid_argument("make_synthetic: image too small (" +
                                    std::to_string(width) + "x" +
                                    std::to_string(height) + ", minimum 64x64)");
    if (noise_sigma < 0.0)
        throw std::invalid_argument("make_synthetic: negative noise sigma");

    Grid pixels(width, height);
    BinaryMask truth(width, height);
    const double shade_step = 0.15 / (width - 1);

    std::vector<Disk> disks;
    switch (kind) {
        case SyntheticKind::Homogeneous:
        case SyntheticKind::DiskRamp:
            disks.push_back({width / 2.0, height / 2.0, std::min(width, height) / 4.0});
            break;
        case SyntheticKind::TwoObject:
            disks.push_back({width / 4.0, height / 2.0, std::min(width, height) / 8.0});
            disks.push_back({3.0 * width / 4.0, height / 2.0, std::min(width, height) / 8.0});
            break;
    }

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Disk* hit = nullptr;
            for (const Disk& d : disks)
                if (d.contains(x, y)) { hit = &d; break; }
            double v;
            if (kind == SyntheticKind::Homogeneous) {
                v = hit ? 0.8 : 0.2;
            } else {
                v = hit ? ramp_intensity(hit->ramp_position(x))
                        : 0.15 + shade_step * x;
            }
            pixels(x, y) = v;
            truth.set(x, y, hit != nullptr);
        }
    }

    if (noise_sigma > 0.0) {
        GaussianNoise noise(seed);
        for (double& v : pixels.data())
            v = std::clamp(v + noise_sigma * noise.next(), 0.0, 1.0);
    }

    return SyntheticPair{GrayImage(std::move(pixels)), std::move(truth)};
}

} // namespace mfseg
