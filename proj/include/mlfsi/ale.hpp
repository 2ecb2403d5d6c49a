#pragma once

// Explicit radial-stretch ALE map of the reference channel (0,L)x(0,R) onto the deformed
// channel {0 < r < R + eta(z)}:
//
//   (z, r~) -> (z, (1 + eta(z)/R) r~),   J = 1 + eta/R,
//   d/dz -> d/dz~ - s eta'/J d/dr~,     d/dr -> (1/J) d/dr~,     s = r~/R,
//   w = v s e_r  (domain velocity).
//
// With R = 1 these are exactly the classical formulas with J = 1 + eta.

#include <cstddef>
#include <vector>

#include "mlfsi/mesh.hpp"
#include "mlfsi/sparse.hpp"

namespace mlfsi::ale {

using fem::Vector;

/// Geometric and kinematic data at one quadrature point of the fluid reference mesh.
struct AlePoint {
  double z = 0.0, r = 0.0;  // reference coordinates of the point
  double weight = 0.0;      // quadrature weight times reference element area factor
  double jac = 1.0;         // J = 1 + eta/R
  double deta_dz = 0.0;     // eta'
  double s = 0.0;           // normalized radial coordinate r~/R
  double zr = 0.0;          // coefficient of d/dr~ in the transformed z-derivative: -s eta'/J
  double rr = 1.0;          // coefficient of d/dr~ in the transformed r-derivative: 1/J
  double v = 0.0;           // interface velocity sample at this z
  double w_r = 0.0;         // ALE domain velocity (radial component): v s
};

/// Per-quadrature-point ALE data for every fluid element; index element*9 + q with
/// q = qa + 3*qb over the 3x3 Gauss rule.
struct AleOperators {
  double radius = 1.0;
  std::vector<AlePoint> points;

  const AlePoint& at(std::size_t element, std::size_t q) const { return points[element * 9 + q]; }
  /// Smallest Jacobian over all quadrature points.
  double min_jacobian() const;
};

/// Samples the ALE map defined by interface displacement `eta` (one value per thin-wall node)
/// and the domain velocity built from `v_for_w`. Throws DegeneracyError if J <= 0 at any
/// quadrature point. End-point values of eta are not checked here.
AleOperators evaluate_ale(const Vector& eta, const Vector& v_for_w, const FemMesh& fluid);

/// Identity map (eta = 0, v = 0).
AleOperators reference_ale(const FemMesh& fluid);

/// Thresholds on the channel radius R + eta.
struct ValidityMonitor {
  double r_min = 1e-3;
  double r_max = 10.0;

  static ValidityMonitor for_radius(double radius) { return {1e-3 * radius, 10.0 * radius}; }
};

/// Nodal extrema of the radius R + eta.
struct RadiusBounds {
  double min_radius = 0.0;
  double max_radius = 0.0;
  std::size_t argmin = 0;  // wall node of the minimum
  bool degenerate = false;  // min_radius <= r_min
  bool above_max = false;   // max_radius >= r_max
};

RadiusBounds check_validity(const Vector& eta, double radius, const ValidityMonitor& mon);

}  // namespace mlfsi::ale
