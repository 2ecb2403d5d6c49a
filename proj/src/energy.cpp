#include "mlfsi/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mlfsi {

double kinetic_energy(const FluidSystem& fluid, const StructureSystem& structure, const Vector& u,
                      const Vector& v, const Vector& V, const Vector& eta_weight) {
  return fluid.kinetic_energy(u, eta_weight) +
         0.5 * (structure.thin_wall().mass.quadratic(v) + structure.solid_mass().quadratic(V));
}

double elastic_energy(const StructureSystem& structure, const Vector& eta, const Vector& d) {
  return 0.5 * (structure.thin_wall().stiffness.quadratic(eta) +
                structure.solid_stiffness().quadratic(d));
}

double dissipation_increment(const FluidSystem& fluid, const Vector& u, const Vector& eta_n,
                             double dt) {
  return dt * fluid.strain_norm_squared(u, eta_n);
}

void EnergyLedger::append(const LedgerRow& row) {
  if (!rows_.empty()) {
    const auto& b = rows_.back();
    if (row.step < b.step || (row.step == b.step && row.stage <= b.stage))
      throw std::logic_error("ledger rows must be appended in increasing (step, stage) order");
  }
  rows_.push_back(row);
}

std::string BoundReport::summary() const {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "steps %zu  E0 %.6e  E_final %.6e  max E %.6e  bound %.6e (C %.6e)\n"
                "  sum D %.6e  fluid jumps %.6e  structure jumps %.6e  elastic jumps %.6e\n"
                "  boundary work %.6e  telescoping residual %.3e\n"
                "  energy bounded: %s  dissipation bounded: %s  sums bounded: %s  "
                "telescoping: %s\n",
                steps, E0, E_final, max_energy, bound, trace_constant, sum_dissipation,
                sum_fluid_jumps, sum_structure_jumps, sum_elastic_jumps, sum_boundary_work,
                telescoping_residual, energy_bounded ? "yes" : "no",
                dissipation_bounded ? "yes" : "no", sums_bounded ? "yes" : "no",
                telescoping_ok ? "yes" : "no");
  return buf;
}

BoundReport uniform_bound_report(const EnergyLedger& ledger, const std::vector<StepAudit>& audits,
                                 const FormWeights& w, double dt, double pressure_l2,
                                 double tolerance) {
  BoundReport r;
  if (ledger.empty()) return r;
  r.E0 = ledger.rows().front().total();
  r.E_final = ledger.back().total();
  r.pressure_l2 = pressure_l2;
  for (const auto& row : ledger.rows()) r.max_energy = std::max(r.max_energy, row.total());
  double residuals = 0.0;
  for (const auto& a : audits) {
    ++r.steps;
    r.sum_structure_jumps += a.structure.kinetic_jump;
    r.sum_elastic_jumps += a.structure.elastic_jump + a.structure.wall_damping;
    residuals += a.structure.residual;
    r.discrete_pressure +=
        dt * (a.loads.p_in * a.loads.p_in + a.loads.p_out * a.loads.p_out);
    if (!a.fluid) continue;
    const auto& f = *a.fluid;
    r.trace_constant = std::max(r.trace_constant, f.trace_constant);
    r.sum_dissipation += f.dissipation;
    r.sum_fluid_jumps += f.velocity_jump + f.wall_jump;
    r.sum_boundary_work += f.boundary_work;
    residuals += f.identity_residual;
  }
  const double tol = tolerance * static_cast<double>(std::max<std::size_t>(r.steps, 1)) *
                     (1.0 + r.E0);
  r.bound = r.E0 + r.trace_constant * r.discrete_pressure;
  r.energy_bounded = r.max_energy <= r.bound + tol;
  r.dissipation_bounded = w.mu * r.sum_dissipation <= r.bound + tol;
  r.sums_bounded = r.sum_fluid_jumps <= r.bound + tol && r.sum_structure_jumps <= r.bound + tol &&
                   r.sum_elastic_jumps <= r.bound + tol;
  // E_final + all sums = E0 + work, up to the accumulated per-step residuals.
  r.telescoping_residual = r.E_final + 2.0 * w.mu * r.sum_dissipation + r.sum_fluid_jumps +
                           r.sum_structure_jumps + r.sum_elastic_jumps - r.E0 -
                           r.sum_boundary_work;
  r.telescoping_ok = std::isfinite(residuals) && std::abs(r.telescoping_residual) <= tol;
  return r;
}

}  // namespace mlfsi
