#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bohm {

// Base class for every failure raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// |psi|^2 fell below the node floor at a point where a finite log-amplitude
// or velocity was required. `index` is the offending grid index when the
// evaluation came from a grid, -1 otherwise.
class NodeEvaluationError : public Error {
 public:
  explicit NodeEvaluationError(const std::string& what, std::ptrdiff_t index = -1)
      : Error(what), index(index) {}
  std::ptrdiff_t index;
};

// The grid cannot host the requested boundary stencil.
class GridTooSmallError : public Error {
 public:
  using Error::Error;
};

// Duplicate abscissae (or a collapsed stencil) make the fit meaningless.
class DegenerateStencilError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise malformed inputs.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// The fit system is singular beyond tolerance. Carries the 1-norm condition
// estimate of the scaled system so a near-crossing pair of grid points is
// diagnosable from the error itself.
class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate(condition_estimate) {}
  double condition_estimate;
};

// An updated quantity left the representable range during a time step.
class NumericalBlowupError : public Error {
 public:
  NumericalBlowupError(const std::string& what, long step = -1, std::ptrdiff_t index = -1)
      : Error(what), step(step), index(index) {}
  long step;
  std::ptrdiff_t index;
};

// Grid construction walked into a node of the density.
class NodeEncounteredError : public Error {
 public:
  explicit NodeEncounteredError(const std::string& what, double position = 0.0)
      : Error(what), position(position) {}
  double position;
};

// Grid construction failed to converge or to satisfy the spacing rule.
class InitFailureError : public Error {
 public:
  using Error::Error;
};

// Config file rejected. `line` is 1-based, 0 when the problem is not tied to
// a specific line; `field` names the offending key when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error(what), line(line), field(std::move(field)) {}
  int line;
  std::string field;
};

}  // namespace bohm
