#pragma once

// Discrete energies, dissipation and the per-half-step audit ledger. Every number is a
// quadratic form in the same assembled matrices the steps use.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mlfsi/fluid.hpp"
#include "mlfsi/structure.hpp"

namespace mlfsi {

/// 1/2 (rho_f int J |u|^2 + rho_s1h |v|^2 + rho_s2 |V|^2), J = 1 + eta_weight/R.
double kinetic_energy(const FluidSystem& fluid, const StructureSystem& structure, const Vector& u,
                      const Vector& v, const Vector& V, const Vector& eta_weight);

/// 1/2 (eta^T K_w eta + a_S(d, d)).
double elastic_energy(const StructureSystem& structure, const Vector& eta, const Vector& d);

/// dt int J^n |D^{eta^n} u|^2.
double dissipation_increment(const FluidSystem& fluid, const Vector& u, const Vector& eta_n,
                             double dt);

/// One ledger row. Columns match the CSV layout.
struct LedgerRow {
  long step = 0;
  int stage = 0;  // 0 initial, 1 after the structure step, 2 after the fluid step
  double time = 0.0;
  double E_kin = 0.0;
  double E_el = 0.0;
  double D = 0.0;
  double structure_residual = 0.0;
  double fluid_slack = 0.0;
  double boundary_work = 0.0;
  double min_radius = 0.0;
  double max_radius = 0.0;
  double v_vstar_gap = 0.0;

  double total() const { return E_kin + E_el; }
  bool operator==(const LedgerRow&) const = default;
};

class EnergyLedger {
 public:
  /// Throws std::logic_error unless (step, stage) strictly increases.
  void append(const LedgerRow& row);
  const std::vector<LedgerRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const LedgerRow& back() const { return rows_.back(); }
  bool operator==(const EnergyLedger&) const = default;

 private:
  std::vector<LedgerRow> rows_;
};

/// Audits of one full step.
struct StepAudit {
  StructureAudit structure;
  std::optional<FluidAudit> fluid;  // empty if the run halted after the structure step
  FluidLoads loads;
};

/// The uniform estimates checked on a finished run.
struct BoundReport {
  double E0 = 0.0;
  double E_final = 0.0;
  double max_energy = 0.0;
  double trace_constant = 0.0;  // largest per-step constant of the run
  double pressure_l2 = 0.0;     // |P_in|^2 + |P_out|^2 in L^2(0, T)
  double discrete_pressure = 0.0;  // dt sum (P_in^n)^2 + (P_out^n)^2
  double bound = 0.0;              // E0 + C (discrete pressure)
  double sum_dissipation = 0.0;    // sum D (without viscosity)
  double sum_fluid_jumps = 0.0;    // fluid-step kinetic differences (fluid and wall)
  double sum_structure_jumps = 0.0;  // structure-step kinetic differences
  double sum_elastic_jumps = 0.0;    // elastic differences plus wall damping
  double sum_boundary_work = 0.0;
  double telescoping_residual = 0.0;  // balance of all sums against E0 - E_final + work
  std::size_t steps = 0;
  bool energy_bounded = false;
  bool dissipation_bounded = false;
  bool sums_bounded = false;
  bool telescoping_ok = false;

  bool pass() const { return energy_bounded && dissipation_bounded && sums_bounded && telescoping_ok; }
  std::string summary() const;
};

/// `tolerance` is the per-step absolute tolerance scaled by (1 + E0).
BoundReport uniform_bound_report(const EnergyLedger& ledger, const std::vector<StepAudit>& audits,
                                 const FormWeights& w, double dt, double pressure_l2,
                                 double tolerance = 1e-9);

}  // namespace mlfsi
