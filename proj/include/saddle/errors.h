#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

/// Invalid user configuration (bad grid size, unsupported k or m, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the range where a quantity is defined.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Fields living on different grids, or on a grid of the wrong kind.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A non-finite value appeared during time stepping.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace saddle
