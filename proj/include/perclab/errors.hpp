#pragma once

#include <stdexcept>

namespace perclab {

// Enumeration/memory budget exceeded.
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver failed to reach its tolerance within the iteration cap.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace perclab
