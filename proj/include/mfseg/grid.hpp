#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace mfseg {

/// Dense row-major 2D field of doubles. The shared storage type for
/// images, level sets, feature maps and SPF fields.
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, double value = 0.0)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(int x, int y) {
        assert(in_bounds(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    double operator()(int x, int y) const {
        assert(in_bounds(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    /// Replicate-padded access: out-of-range coordinates are clamped to
    /// the nearest edge pixel.
    double at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width_) x = width_ - 1;
        if (y < 0) y = 0;
        if (y >= height_) y = height_ - 1;
        return (*this)(x, y);
    }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    bool same_shape(const Grid& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Grid& other) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

double min_value(const Grid& g);
double max_value(const Grid& g);
double max_abs(const Grid& g);

/// Mean over all pixels of |a - b|. Shapes must match.
double mean_abs_diff(const Grid& a, const Grid& b);

} // namespace mfseg
