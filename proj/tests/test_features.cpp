#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mfseg/features.hpp"
#include "mfseg/image.hpp"

#include "oracles.hpp"

using namespace mfseg;

namespace {

GrayImage constant_image(int w, int h, double v) {
    return GrayImage(Grid(w, h, v));
}

GrayImage checkerboard(int w, int h) {
    Grid g(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) g(x, y) = (x + y) % 2 ? 1.0 : 0.0;
    return GrayImage(std::move(g));
}

} // namespace

TEST_CASE("window_entropy: degenerate and even-split samples") {
    const std::vector<double> constant(81, 0.4);
    CHECK(window_entropy(constant) == 0.0);

    // An odd n*n window can never hold an exact even split, so the 1-bit
    // case is exercised on the histogram helper directly.
    const std::vector<double> split{0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(window_entropy(split) == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<double> quarters{0.0, 0.3, 0.6, 0.9};
    CHECK(window_entropy(quarters) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("entropy_map: constants vanish, bound holds") {
    const Grid map = entropy_map(constant_image(16, 16, 0.7), 9);
    for (double v : map.data()) CHECK(v == 0.0);

    const GrayImage noisy = oracle::random_image(32, 32, 11);
    const Grid h = entropy_map(noisy, 5);
    const double bound = std::log2(std::min(256.0, 25.0));
    for (double v : h.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= bound + 1e-12);
    }
}

TEST_CASE("std_map: constants vanish, two-value windows match p(1-p)") {
    // The window mean of a constant carries an ulp of accumulation error, so
    // the deviations are tiny rather than exactly zero.
    const Grid map = std_map(constant_image(16, 16, 0.3), 5);
    for (double v : map.data()) CHECK(v <= 1e-12);

    // Half-plane image: a boundary window holds 3 zeros and 6 ones,
    // population std sqrt(2/9).
    Grid g(8, 8, 1.0);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 4; ++x) g(x, y) = 0.0;
    const Grid s = std_map(GrayImage(std::move(g)), 3);
    CHECK(s(4, 4) == doctest::Approx(std::sqrt(2.0 / 9.0)).epsilon(1e-12));
}

TEST_CASE("gradient_map: ramp and step examples") {
    const Grid zero = gradient_map(constant_image(10, 10, 0.55));
    for (double v : zero.data()) CHECK(v == 0.0);

    const int w = 17;
    Grid ramp(w, 9);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < w; ++x) ramp(x, y) = x / double(w - 1);
    const Grid gr = gradient_map(GrayImage(std::move(ramp)));
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < w - 1; ++x)
            CHECK(gr(x, y) == doctest::Approx(1.0 / (w - 1)).epsilon(1e-12));
    for (int y = 0; y < 9; ++y) CHECK(gr(w - 1, y) == 0.0); // forward diff is 0 past the edge

    // Vertical step between rows 3 and 4: magnitude 1 on row 3 only.
    Grid step(6, 8, 0.0);
    for (int y = 4; y < 8; ++y)
        for (int x = 0; x < 6; ++x) step(x, y) = 1.0;
    const Grid gs = gradient_map(GrayImage(std::move(step)));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 6; ++x)
            CHECK(gs(x, y) == (y == 3 ? 1.0 : 0.0));
}

TEST_CASE("range_map: checkerboard saturates, constants vanish") {
    const Grid flat = range_map(constant_image(12, 12, 0.9), 3);
    for (double v : flat.data()) CHECK(v == 0.0);

    const Grid board = range_map(checkerboard(12, 12), 3);
    for (double v : board.data()) CHECK(v == 1.0);
}

TEST_CASE("all four maps match brute-force oracles on random images") {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        const GrayImage img = oracle::random_image(64, 64, seed);
        CHECK(oracle::max_abs_diff(entropy_map(img, 9), oracle::entropy_map(img, 9)) <
              1e-12);
        CHECK(oracle::max_abs_diff(std_map(img, 9), oracle::std_map(img, 9)) < 1e-12);
        CHECK(range_map(img, 5) == oracle::range_map(img, 5)); // exact
        CHECK(oracle::max_abs_diff(gradient_map(img), oracle::gradient_map(img)) <
              1e-12);
    }
}

TEST_CASE("compute_features bundles the four maps consistently") {
    const GrayImage img = oracle::random_image(48, 48, 31);
    const FeatureStack stack = compute_features(img, 9, 5);
    CHECK(stack.entropy == entropy_map(img, 9));
    CHECK(stack.stddev == std_map(img, 9));
    CHECK(stack.gradient == gradient_map(img));
    CHECK(stack.range == range_map(img, 5));
}

TEST_CASE("interior translation equivariance") {
    const GrayImage img = oracle::random_image(40, 40, 41);
    Grid shifted(40, 40);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x)
            shifted(x, y) = img.pixels().at_clamped(x - 3, y - 2);
    const GrayImage moved(std::move(shifted));

    const Grid a = std_map(img, 5);
    const Grid b = std_map(moved, 5);
    // Compare away from every border by window radius + shift.
    for (int y = 8; y < 32; ++y)
        for (int x = 8; x < 32; ++x)
            CHECK(b(x, y) == doctest::Approx(a(x - 3, y - 2)).epsilon(1e-12));
}

TEST_CASE("range dominates std; both are shift invariant in intensity") {
    const GrayImage img = oracle::random_image(32, 32, 51);
    const Grid s = std_map(img, 5);
    const Grid r = range_map(img, 5);
    for (std::size_t i = 0; i < s.data().size(); ++i)
        CHECK(r.data()[i] >= s.data()[i] - 1e-12);

    Grid low(32, 32);
    Grid high(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            low(x, y) = img.at(x, y) * 0.5;
            high(x, y) = img.at(x, y) * 0.5 + 0.25;
        }
    const GrayImage img_low(std::move(low));
    const GrayImage img_high(std::move(high));
    const Grid s_low = std_map(img_low, 5);
    const Grid s_high = std_map(img_high, 5);
    const Grid r_low = range_map(img_low, 5);
    const Grid r_high = range_map(img_high, 5);
    for (std::size_t i = 0; i < s.data().size(); ++i) {
        CHECK(s_high.data()[i] == doctest::Approx(s_low.data()[i]).epsilon(1e-12));
        CHECK(r_high.data()[i] == doctest::Approx(r_low.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("window validation rejects even and oversized widths") {
    const GrayImage img = constant_image(16, 16, 0.5);
    CHECK_THROWS_AS(entropy_map(img, 4), std::invalid_argument);
    CHECK_THROWS_AS(entropy_map(img, 1), std::invalid_argument);
    CHECK_THROWS_AS(std_map(img, 17), std::invalid_argument);
    CHECK_THROWS_AS(range_map(img, 2), std::invalid_argument);
    CHECK_NOTHROW(range_map(img, 15));
}
