#pragma once

// Executable checks of analytical facts behind the scheme: Korn's equality on transformed
// channels, the v / v* gap rate, interpolant inequalities and temporal self-convergence.
// Korn quadrature is independent of the finite element assembly.

#include <cstddef>
#include <string>
#include <vector>

#include "mlfsi/driver.hpp"

namespace mlfsi::verify {

// ---------------------------------------------------------------------------------------------
// Korn equality

/// Wall shape eta(z) on (0, L), zero at both ends.
struct BoundaryShape {
  enum class Kind { kFlat, kBump, kSawtooth };
  Kind kind = Kind::kFlat;
  double amplitude = 0.0;
  int modes = 8;  // sawtooth: number of Fourier terms

  static BoundaryShape flat() { return {}; }
  /// amplitude * z (L - z) / L^2
  static BoundaryShape bump(double a) { return {Kind::kBump, a, 0}; }
  /// Tapered truncated Fourier series of a sawtooth (rough but smooth proxy).
  static BoundaryShape sawtooth(double a, int modes) { return {Kind::kSawtooth, a, modes}; }
  /// "flat", "bump:a" or "sawtooth:a:K"; throws ConfigError otherwise.
  static BoundaryShape parse(const std::string& spec);
  std::string name() const;

  double value(double z, double length) const;
};

/// Velocity u = (d phi/dr, -d phi/dz) from the stream function
/// phi = g(z/L) h(r / (R + eta(z))). Divergence free by construction; u = 0 on the whole
/// boundary for the built-in families. `violate_interface` replaces h by s^2, so both u_z and
/// u_r are nonzero on the wall (negative control). A field that only slips tangentially along
/// a flat wall would still satisfy the equality.
struct ManufacturedField {
  int family = 0;  // 0, 1 or 2
  bool violate_interface = false;

  std::string name() const;
};

struct KornResult {
  double gradient_norm = 0.0;  // int J |grad^eta u|^2
  double strain_norm = 0.0;    // 2 int J |D^eta u|^2
  double mismatch = 0.0;       // |strain - gradient| / gradient
};

struct KornGrid {
  int cells_z = 64;
  int cells_r = 16;
  int gauss = 8;
};

/// Both sides of Korn's equality by tensor Gauss quadrature on the reference channel.
KornResult korn_mismatch(const BoundaryShape& shape, const ManufacturedField& field,
                         double length, double radius, const KornGrid& grid = {});

/// Same as korn_mismatch after checking the field's boundary conditions and divergence;
/// throws std::invalid_argument if the field is not admissible.
KornResult korn_check(const BoundaryShape& shape, const ManufacturedField& field, double length,
                      double radius, const KornGrid& grid = {});

/// Largest |div u| (physical divergence) over `samples` pseudo-random points of the
/// deformed channel.
double max_divergence(const BoundaryShape& shape, const ManufacturedField& field, double length,
                      double radius, std::size_t samples, unsigned seed = 7);
/// Largest boundary-condition violation: |u_z| on the wall, |u_r| on axis and ends.
double max_boundary_violation(const BoundaryShape& shape, const ManufacturedField& field,
                              double length, double radius, std::size_t samples = 257);

// ---------------------------------------------------------------------------------------------
// v / v* gap

/// sqrt(sum dt |v^{n+1} - v*^{n+1}|^2) with the wall L^2 mass.
double vstar_gap_norm(const RunSeries& s, const CsrMatrix& wall_l2_mass, double dt);
/// sqrt(sum dt |v^{n+1}|^2), the size of the wall motion.
double wall_velocity_norm(const RunSeries& s, const CsrMatrix& wall_l2_mass, double dt);

struct GapReport {
  std::vector<double> dt, gap;
  double slope = 0.0;    // least-squares slope of log gap versus log dt
  bool exact = false;    // every gap is exactly zero for a zero run
  bool suspicious = false;  // gaps vanish although the wall moves (v reused as v*)
  bool pass = false;        // slope >= 0.4, or exact
};

/// Needs at least three levels; `wall_motion` is the size of v on each level (used to tell an
/// exact zero run from a v* channel that is a copy of v).
GapReport v_vstar_gap(const std::vector<double>& dt, const std::vector<double>& gap,
                      const std::vector<double>& wall_motion);

// ---------------------------------------------------------------------------------------------
// Temporal self-convergence

struct ChannelOrder {
  std::string channel;
  std::vector<double> differences;  // |X_N - X_2N|, |X_2N - X_4N|, ...
  std::vector<double> orders;       // log2 of consecutive ratios
  double order = 0.0;               // last observed order
  bool exact = false;               // all differences zero
};

struct ConvergenceReport {
  std::vector<std::size_t> levels;
  std::vector<ChannelOrder> channels;  // eta, v, u, d
  double eta_drift = 0.0;              // sup_n |eta^n - eta_0|_inf on the finest level
  bool pass = false;                   // eta and v orders in [0.8, 1.3] (or exact)
  std::string summary() const;
};

/// Final-time differences between consecutive levels with mass-matrix L^2 norms.
ConvergenceReport self_convergence(const CoupledProblem& pb, const std::vector<RunResult>& runs,
                                   const std::vector<std::size_t>& levels);

/// Runs cfg at N, 2N, ..., 2^{k-1} N. Throws std::invalid_argument for k < 3 or if a run
/// halts early.
ConvergenceReport temporal_self_convergence(const RunConfig& cfg, std::size_t levels);

// ---------------------------------------------------------------------------------------------
// Interpolant inequalities

struct InterpolantCheck {
  std::string channel;
  double lhs = 0.0;  // |f_N - f~_N|^2 in L^2(0,T; L^2), by Gauss quadrature in time
  double rhs = 0.0;  // dt/3 sum |f^{n+1} - f^n|^2
  bool holds = false;
};

/// Piecewise-constant versus piecewise-linear distance for one channel. An empty mass
/// matrix means the Euclidean norm.
InterpolantCheck interpolant_inequality(const std::string& channel,
                                        const std::vector<Vector>& values, double dt,
                                        const CsrMatrix* mass);

/// The u, v, eta and V channels of a run.
std::vector<InterpolantCheck> interpolant_inequality_check(const RunSeries& s,
                                                           const CoupledProblem& pb, double dt);

// ---------------------------------------------------------------------------------------------
// Time shifts

/// Uniform-in-time snapshots f(t_0), f(t_1), ...
class ShiftSeries {
 public:
  ShiftSeries(std::vector<Vector> values, double dt);

  std::size_t size() const { return values_.size(); }
  double dt() const { return dt_; }
  const Vector& operator[](std::size_t n) const { return values_[n]; }

  /// tau_h f with h = k dt; times before h take the first value.
  ShiftSeries shifted(std::size_t k) const;
  /// dt sum_{n >= k} |f^n - f^{n-k}|^2 in the given norm.
  double translation_norm_squared(std::size_t k, const CsrMatrix* mass) const;

 private:
  std::vector<Vector> values_;
  double dt_;
};

}  // namespace mlfsi::verify
