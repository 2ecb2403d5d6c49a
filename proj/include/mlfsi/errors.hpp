#pragma once

#include <stdexcept>
#include <string>

namespace mlfsi {

/// Invalid user-supplied configuration (counts, ranges, compatibility of initial data).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent mesh data, e.g. non-matching interface coordinates.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solver failure: singular matrix, failed factorization or residual above tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The mapped fluid domain has degenerated: the Jacobian 1 + eta/R is non-positive
/// (or below the configured guard) somewhere.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, double z, double value)
      : std::runtime_error(what), z_(z), value_(value) {}

  /// Axial position of the offending point.
  double z() const noexcept { return z_; }
  /// Offending Jacobian (or radius) value.
  double value() const noexcept { return value_; }

 private:
  double z_;
  double value_;
};

}  // namespace mlfsi
