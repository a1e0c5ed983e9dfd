#pragma once

#include <stdexcept>

namespace microsum {

// Bad user-supplied input: unreadable/malformed files, invalid configuration.
// The CLI maps this to exit code 2; internal failures stay exit code 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace microsum
