#include "mfseg/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mfseg {

namespace {

void check_window(const GrayImage& image, int window, const char* what) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument(std::string(what) +
                                    ": window must be odd and >= 3");
    if (window > std::min(image.width(), image.height()))
        throw std::invalid_argument(std::string(what) +
                                    ": window larger than image");
}

int bin_of(double v) {
    return std::min(255, static_cast<int>(v * 256.0));
}

} // namespace

double window_entropy(std::span<const double> values) {
    std::array<int, 256> counts{};
    for (double v : values) ++counts[bin_of(v)];
    const double n = static_cast<double>(values.size());
    double h = 0.0;
    for (int c : counts) {
        if (c == 0) continue;
        const double p = c / n;
        h -= p * std::log2(p);
    }
    return h;
}

Grid entropy_map(const GrayImage& image, int window) {
    check_window(image, window, "entropy_map");
    const int r = window / 2;
    Grid out(image.width(), image.height());
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(window) * window);
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            samples.clear();
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    samples.push_back(image.pixels().at_clamped(x + dx, y + dy));
            out(x, y) = window_entropy(samples);
        }
    }
    return out;
}

Grid std_map(const GrayImage& image, int window) {
    check_window(image, window, "std_map");
    const int r = window / 2;
    const double n = static_cast<double>(window) * window;
    Grid out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            double sum = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    sum += image.pixels().at_clamped(x + dx, y + dy);
            const double mean = sum / n;
            double sq = 0.0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const double d =
                        image.pixels().at_clamped(x + dx, y + dy) - mean;
                    sq += d * d;
                }
            out(x, y) = std::sqrt(sq / n);
        }
    }
    return out;
}

Grid gradient_map(const GrayImage& image) {
    Grid out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const double v = image.at(x, y);
            const double gx = x + 1 < image.width() ? image.at(x + 1, y) - v : 0.0;
            const double gy = y + 1 < image.height() ? image.at(x, y + 1) - v : 0.0;
            out(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

Grid range_map(const GrayImage& image, int window) {
    check_window(image, window, "range_map");
    const int r = window / 2;
    Grid out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            double lo = image.pixels().at_clamped(x - r, y - r);
            double hi = lo;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const double v = image.pixels().at_clamped(x + dx, y + dy);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            out(x, y) = hi - lo;
        }
    }
    return out;
}

FeatureStack compute_features(const GrayImage& image, int feature_window,
                              int range_window) {
    return FeatureStack{
        entropy_map(image, feature_window),
        std_map(image, feature_window),
        gradient_map(image),
        range_map(image, range_window),
    };
}

} // namespace mfseg
