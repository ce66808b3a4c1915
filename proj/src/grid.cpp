#include "mfseg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfseg {

double min_value(const Grid& g) {
    if (g.empty()) throw std::invalid_argument("min_value: empty grid");
    return *std::min_element(g.data().begin(), g.data().end());
}

double max_value(const Grid& g) {
    if (g.empty()) throw std::invalid_argument("max_value: empty grid");
    return *std::max_element(g.data().begin(), g.data().end());
}

double max_abs(const Grid& g) {
    if (g.empty()) throw std::invalid_argument("max_abs: empty grid");
    double m = 0.0;
    for (double v : g.data()) m = std::max(m, std::abs(v));
    return m;
}

double mean_abs_diff(const Grid& a, const Grid& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mean_abs_diff: shape mismatch");
    if (a.empty()) throw std::invalid_argument("mean_abs_diff: empty grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += std::abs(a.data()[i] - b.data()[i]);
    return sum / static_cast<double>(a.size());
}

} // namespace mfseg
