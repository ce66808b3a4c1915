#pragma once

#include "mfseg/grid.hpp"

namespace mfseg {

/// Level set function phi; the zero crossing is the implicit contour and
/// {phi > 0} is the current interior.
struct LevelSet {
    Grid values;

    int width() const { return values.width(); }
    int height() const { return values.height(); }
};

} // namespace mfseg
