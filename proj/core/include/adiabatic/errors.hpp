#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adiabatic {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched grids, value kinds or dimensions.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared while evaluating a density or a state.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::ptrdiff_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// Tangent basis or reduced operator is (numerically) singular.
class ChartDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Newton Jacobian of the moduli equation became singular.
class DegenerateProjectionError : public Error {
 public:
  using Error::Error;
};

/// The state left the tubular neighbourhood of the soliton manifold.
class TubeExitError : public Error {
 public:
  using Error::Error;
};

/// A moduli coordinate left the admissible box of its chart.
class ChartBoundaryError : public Error {
 public:
  using Error::Error;
};

/// A soliton was placed too close to the domain boundary.
class PlacementError : public Error {
 public:
  using Error::Error;
};

/// An implicit time step or linear solve failed to converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// The full flow produced NaN/Inf.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class AuditError : public Error {
 public:
  using Error::Error;
};

/// Operation called on a model of the wrong kind.
class KindError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration; `line` is 0 when not tied to a config file line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace adiabatic
