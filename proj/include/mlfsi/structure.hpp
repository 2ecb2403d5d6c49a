#pragma once

// Implicit elastodynamics step of the coupled thin + thick wall. The thin-wall unknown eta
// and the radial trace of the thick displacement on r = R are one unknown.

#include <cstddef>
#include <optional>

#include "mlfsi/forms.hpp"
#include "mlfsi/mesh.hpp"
#include "mlfsi/sparse.hpp"

namespace mlfsi {

using fem::CsrMatrix;
using fem::Vector;

/// Wall state: thin-wall displacement/velocity on wall nodes, thick displacement/velocity on
/// solid vector DOFs. Values on constrained DOFs are zero; the bottom radial trace of d equals
/// eta (and V equals v) on admissible states.
struct StructureState {
  Vector eta, v, d, V;
};

class StructureSystem {
 public:
  StructureSystem(const FemMesh& solid, const InterfaceMaps& maps, const FormWeights& w);

  std::size_t wall_size() const { return nw_; }
  std::size_t solid_size() const { return ns_; }
  /// Number of coupled unknowns after identification and elimination.
  std::size_t unknown_count() const { return map_.reduced_size(); }
  const fem::DofMap& dof_map() const { return map_; }

  /// Full block matrices on [eta; d] (mass carries the densities).
  const CsrMatrix& mass() const { return mass_; }
  const CsrMatrix& stiffness() const { return stiffness_; }
  const CsrMatrix& damping() const { return damping_; }
  const fem::ThinWallMatrices& thin_wall() const { return wall_; }
  const CsrMatrix& solid_mass() const { return solid_mass_; }  // rho_s2 int d.psi
  const CsrMatrix& solid_stiffness() const { return solid_stiffness_; }

  /// Reduced M + dt^2 K + dt D, factorized once per distinct dt.
  const fem::Factorization& factorization(double dt);
  std::size_t factorization_count() const { return factorizations_; }

  /// Stacks [a; b] and splits back.
  Vector stack(const Vector& wall, const Vector& solid) const;
  /// Builds an admissible state from a reduced vector (identification and zeros applied).
  Vector admissible(const Vector& reduced) const { return map_.prolong(reduced); }

  /// Structure part of the kinetic energy 1/2 (rho_s1h |v|^2 + rho_s2 |V|^2).
  double kinetic_energy(const StructureState& s) const;
  /// 1/2 (eta^T K_w eta + a_S(d, d)).
  double elastic_energy(const StructureState& s) const;

 private:
  std::size_t nw_ = 0, ns_ = 0;
  fem::ThinWallMatrices wall_;
  CsrMatrix solid_mass_, solid_stiffness_;
  CsrMatrix mass_, stiffness_, damping_;
  fem::DofMap map_;
  std::optional<fem::Factorization> factor_;
  double factor_dt_ = 0.0;
  std::size_t factorizations_ = 0;
};

/// One backward-Euler structure step. The fluid velocity is not touched.
StructureState structure_advance(const StructureState& s, double dt, StructureSystem& sys);

/// Terms of the structure-step energy balance.
struct StructureAudit {
  double energy_before = 0.0;  // kinetic + elastic at the start of the step
  double energy_after = 0.0;   // kinetic at n+1/2 + elastic at n+1
  double kinetic_jump = 0.0;   // 1/2 |y^{n+1/2} - y^n|^2_M (both layers)
  double elastic_jump = 0.0;   // 1/2 |x^{n+1/2} - x^n|^2_K (both layers)
  double wall_damping = 0.0;   // dt v^T D_w v
  double residual = 0.0;  // after + jumps + wall_damping - before
};

StructureAudit structure_energy_audit(const StructureState& before, const StructureState& after,
                                      double dt, const StructureSystem& sys);

}  // namespace mlfsi
