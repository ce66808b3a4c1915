#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "mfseg/grid.hpp"

namespace mfseg {

/// Grayscale image with intensities normalized to [0, 1].
class GrayImage {
public:
    GrayImage() = default;
    /// Takes ownership of the pixel grid; throws std::invalid_argument if
    /// the grid is empty or any intensity falls outside [0, 1].
    explicit GrayImage(Grid pixels);

    int width() const { return pixels_.width(); }
    int height() const { return pixels_.height(); }
    double at(int x, int y) const { return pixels_(x, y); }
    const Grid& pixels() const { return pixels_; }

private:
    Grid pixels_;
};

/// Per-pixel boolean mask, true = object.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool at(int x, int y) const { return data_[index(x, y)] != 0; }
    void set(int x, int y, bool value) { data_[index(x, y)] = value ? 1 : 0; }
    std::size_t area() const; // number of true pixels
    bool same_shape(const BinaryMask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const BinaryMask& other) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Axis-aligned rectangle given by center and size, in pixel coordinates.
/// A pixel (x, y) belongs to the rectangle iff
///   center_x - width/2 <= x < center_x - width/2 + width   (same for y).
struct RectRegion {
    int center_x = 0;
    int center_y = 0;
    int width = 0;
    int height = 0;

    static RectRegion centered(int image_width, int image_height,
                               int width = 40, int height = 40);
    bool contains(int x, int y) const;
    bool fits(int image_width, int image_height) const;
};

/// Reads an 8-bit grayscale PGM (binary P5, maxval 255) or PNG file and
/// normalizes intensities by 255. Throws IoError on unreadable files and
/// unsupported formats, naming the offending property.
GrayImage load_image(const std::filesystem::path& path);

/// Writes an image as 8-bit grayscale, intensities quantized by round(v*255).
/// Format chosen by extension: .pgm / .png.
void save_image(const GrayImage& image, const std::filesystem::path& path);

/// Writes a mask as an 8-bit grayscale file, true -> 255, false -> 0.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Thresholds an image at the given level; pixels > level become true.
BinaryMask threshold(const GrayImage& image, double level);

enum class SyntheticKind { DiskRamp, Homogeneous, TwoObject };

SyntheticKind parse_synthetic_kind(std::string_view name);
std::string_view synthetic_kind_name(SyntheticKind kind);

struct SyntheticPair {
    GrayImage image;
    BinaryMask truth;
};

/// Deterministic synthetic test image plus its analytic ground-truth mask.
///
/// Kinds:
///   homogeneous - centered disk (radius min(w,h)/4) at constant 0.8 over a
///                 constant 0.2 background.
///   disk-ramp   - centered disk whose intensity ramps linearly 0.55 -> 0.95
///                 left to right across the disk diameter; background shaded
///                 linearly 0.15 -> 0.30 across the image width.
///   two-object  - two disjoint ramped disks (radius min(w,h)/8) at
///                 (w/4, h/2) and (3w/4, h/2) over the same shaded background.
///
/// Additive zero-mean Gaussian noise with the given sigma is applied after
/// composing the scene, then intensities are clamped to [0, 1]. Noise draws
/// come from std::mt19937_64 seeded with `seed`, one Box-Muller transform per
/// pixel in row-major order (two engine draws per pixel; the cosine branch
/// only); sigma = 0 skips the generator entirely.
///
/// Throws std::invalid_argument if width or height < 64.
SyntheticPair make_synthetic(SyntheticKind kind, int width, int height,
                             double noise_sigma, std::uint64_t seed);

} // namespace mfseg
