#pragma once

#include <stdexcept>
#include <string>

namespace mfseg {

/// File access or format failure (unreadable path, bad magic, wrong bit depth).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (bad key, bad value, bad flag combination).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mfseg
