#pragma once

#include <stdexcept>
#include <string>

namespace revlab {

// Bad user input: malformed config, out-of-range parameters, invalid curves.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Grid too coarse for the requested scale, or a window that cannot be
// resolved on it.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Critical-set analysis could not produce a consistent answer (too many
// elements, non-monotone shoulders, point not critical).
class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace revlab
