#pragma once

// Finite element forms of the coupled problem. Every matrix is assembled on the "full" DOF
// set of its mesh (no boundary conditions applied); boundary conditions and interface
// identifications are applied later through DofMap reductions.
//
// All integrals use the 3x3 Gauss rule (3 points in 1D). Energy diagnostics are quadratic
// forms in these same matrices, so the discrete energy balances hold to rounding.

#include <span>
#include <vector>

#include "mlfsi/ale.hpp"
#include "mlfsi/mesh.hpp"
#include "mlfsi/sparse.hpp"

namespace mlfsi {

/// Physical coefficients. Defaults are all one (nondimensional setting).
///
/// The thin wall obeys rho_s1h eta_tt + C0 eta - c2 eta_zz + D0 eta_t - D1 eta_tzz = f;
/// c2 plays the role of the Koiter coefficient C1. The fourth-order coefficients C2, D2 are
/// present only so that a configuration asking for them can be rejected.
struct FormWeights {
  double rho_f = 1.0;    // fluid density
  double mu = 1.0;       // fluid viscosity
  double rho_s1h = 1.0;  // thin-wall areal mass
  double c2 = 1.0;       // thin-wall wave speed squared
  double koiter_c0 = 0.0;
  double koiter_d0 = 0.0;
  double koiter_d1 = 0.0;
  double koiter_c2 = 0.0;
  double koiter_d2 = 0.0;
  double lambda = 1.0;  // Lame
  double mu_s = 1.0;    // Lame (shear)
  double rho_s2 = 1.0;  // thick-wall density

  /// Throws ConfigError listing all violations.
  void validate() const;
};

namespace fem {

/// Per-quadrature-point scalar weights on a mesh, index element*9 + q.
using QuadField = std::vector<double>;

/// Jacobian weights J of an ALE state.
QuadField jacobian_weights(const ale::AleOperators& ale);

/// M[i][j] = int w phi_i phi_j with `components` interleaved copies (block diagonal).
CsrMatrix assemble_weighted_mass(const FemMesh& mesh, std::span<const double> weight,
                                 int components);

/// Constant-coefficient mass matrix c int phi_i phi_j.
CsrMatrix assemble_mass(const FemMesh& mesh, double coefficient, int components);

/// 2 mu int J D^eta(u) : D^eta(q) on vector velocity DOFs.
CsrMatrix assemble_transformed_stiffness(const FemMesh& mesh, const ale::AleOperators& ale,
                                         double mu);

/// Pieces of the linearized advection operator used by the fluid step.
struct AdvectionOperator {
  CsrMatrix skew;      // rho_f/2 int J [((b.grad^eta) u).q - ((b.grad^eta) q).u], b = u_n - w
  CsrMatrix ale_mass;  // rho_f/2 int (v/R) u.q
  CsrMatrix fused() const { return CsrMatrix::add(1.0, skew, 1.0, ale_mass); }
};

/// `transport` is the full velocity vector of the previous step; the ALE operators carry
/// J, grad^eta from eta^n and the domain velocity from the structure velocity.
AdvectionOperator assemble_advection(const FemMesh& mesh, const ale::AleOperators& ale,
                                     const Vector& transport, double rho_f);

/// (B u)_k = int J psi_k div^eta u, psi_k bilinear pressure functions.
CsrMatrix assemble_transformed_divergence(const FemMesh& mesh, const ale::AleOperators& ale);

/// a_S(d, psi) = int 2 mu_s D(d):D(psi) + lambda div d div psi on the solid mesh.
CsrMatrix assemble_thick_elasticity(const FemMesh& solid, const FormWeights& w);

/// 1D quadratic thin-wall matrices on all wall nodes (end points included).
struct ThinWallMatrices {
  CsrMatrix l2_mass;    // int eta psi
  CsrMatrix mass;       // rho_s1h int eta psi
  CsrMatrix stiffness;  // c2 int eta' psi' + C0 int eta psi
  CsrMatrix damping;    // D0 int eta psi + D1 int eta' psi'
  CsrMatrix gradient;   // int eta' psi'
};

/// Throws ConfigError if C2 or D2 is nonzero.
ThinWallMatrices assemble_thin_wall(std::span<const double> wall_z, const FormWeights& w);

/// g[2*node] = int_{edge} phi_node dr over the fluid edge carrying `tag` (kInlet or kOutlet).
Vector assemble_boundary_flux(const FemMesh& fluid, BoundaryTag tag);

/// Lower-left corner and extents of element e.
struct ElementGeometry {
  double z0, r0, hz, hr;
};
ElementGeometry element_geometry(const FemMesh& mesh, std::size_t e);

}  // namespace fem
}  // namespace mlfsi
