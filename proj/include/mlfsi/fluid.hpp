#pragma once

// Linearized fluid step on the reference channel with the interface inertia entering as a
// Robin-type condition. The radial velocity DOFs on r = R are the new thin-wall velocity.

#include <cstddef>
#include <utility>
#include <vector>

#include "mlfsi/ale.hpp"
#include "mlfsi/forms.hpp"
#include "mlfsi/mesh.hpp"
#include "mlfsi/sparse.hpp"

namespace mlfsi {

using fem::CsrMatrix;
using fem::Vector;

/// Scalar time signal for the dynamic pressure at one channel end.
struct PressureSignal {
  enum class Kind { kConstant, kCosinePulse, kTable };
  Kind kind = Kind::kConstant;
  double value = 0.0;      // constant
  double amplitude = 0.0;  // pulse: amplitude/2 (1 - cos(2 pi t / duration)) on [0, duration]
  double duration = 1.0;
  std::vector<double> times, values;  // table, linear in between, end values held outside

  static PressureSignal constant(double c);
  static PressureSignal cosine_pulse(double amplitude, double duration);
  static PressureSignal table(std::vector<double> times, std::vector<double> values);

  double at(double t) const;
  /// Exact mean over [t0, t1].
  double average(double t0, double t1) const;
  /// Exact int_0^T P(t)^2 dt.
  double l2_squared(double T) const;
  /// Throws ConfigError on invalid parameters.
  void validate() const;
};

struct PressureData {
  PressureSignal inlet, outlet;
};

/// (P_in^n, P_out^n): averages over [n dt, (n+1) dt].
std::pair<double, double> pressure_average(const PressureData& data, std::size_t n, double dt);

struct FluidLoads {
  double p_in = 0.0, p_out = 0.0;
};

/// Inputs of one fluid step.
struct FluidStepInput {
  Vector u;        // u^n (full velocity vector)
  Vector v_half;   // v^{n+1/2}
  Vector eta_n;    // eta^n
  Vector eta_half; // eta^{n+1/2}
};

struct FluidStepResult {
  Vector u;  // u^{n+1}
  Vector p;  // p^{n+1}
  Vector v;  // v^{n+1}, the radial trace of u^{n+1} on the wall
};

class FluidSystem {
 public:
  /// `freeze_interface` eliminates the interface radial velocity (rigid wall); used for
  /// channel-flow checks only.
  FluidSystem(const FemMesh& fluid, const InterfaceMaps& maps, const FormWeights& w,
              ale::ValidityMonitor monitor, bool freeze_interface = false);

  const FemMesh& mesh() const { return mesh_; }
  const InterfaceMaps& maps() const { return maps_; }
  const FormWeights& weights() const { return w_; }
  const ale::ValidityMonitor& monitor() const { return monitor_; }
  const fem::DofMap& velocity_map() const { return vmap_; }
  const CsrMatrix& wall_mass() const { return wall_mass_; }  // rho_s1h int v psi on wall nodes
  const Vector& inlet_flux() const { return g_in_; }
  const Vector& outlet_flux() const { return g_out_; }

  /// Wall-node vector -> full fluid velocity vector (radial interface DOFs).
  Vector embed_wall(const Vector& wall) const;
  /// Radial interface trace of a full velocity vector.
  Vector wall_trace(const Vector& u) const;
  /// F(u) = P_in int_{z=0} u_z - P_out int_{z=L} u_z.
  double boundary_work(const Vector& u, const FluidLoads& loads) const;
  /// 1/2 rho_f int J |u|^2 with J from eta.
  double kinetic_energy(const Vector& u, const Vector& eta) const;
  /// int J |D^eta u|^2 (no viscosity, no dt).
  double strain_norm_squared(const Vector& u, const Vector& eta) const;

 private:
  FemMesh mesh_;
  InterfaceMaps maps_;
  FormWeights w_;
  ale::ValidityMonitor monitor_;
  fem::DofMap vmap_;
  CsrMatrix wall_mass_;
  Vector g_in_, g_out_;
};

/// Solves the fluid step. Throws DegeneracyError if eta^n or eta^{n+1/2} is below the guard.
FluidStepResult fluid_advance(const FluidStepInput& in, double dt, const FluidLoads& loads,
                              const FluidSystem& sys);

/// Terms of the fluid-step energy balance.
struct FluidAudit {
  double energy_before = 0.0;  // E_kin^{n+1/2} (fluid with J^n + wall v^{n+1/2})
  double energy_after = 0.0;   // E_kin^{n+1} (fluid with J^{n+1} + wall v^{n+1})
  double velocity_jump = 0.0;  // 1/2 rho_f int J^n |u^{n+1} - u^n|^2
  double wall_jump = 0.0;      // 1/2 rho_s1h |v^{n+1} - v^{n+1/2}|^2
  double dissipation = 0.0;    // D = dt int J^n |D^eta u^{n+1}|^2
  double boundary_work = 0.0;  // dt F(u^{n+1})
  double trace_constant = 0.0; // C used in the inequality
  double identity_residual = 0.0;
  double slack = 0.0;          // >= 0 when the inequality holds
};

/// `with_bound` computes the trace constant (one extra SPD solve pair); when false the
/// constant is taken as zero, which is exact for zero pressure data.
FluidAudit fluid_energy_audit(const FluidStepInput& before, const FluidStepResult& after, double dt,
                              const FluidLoads& loads, const FluidSystem& sys,
                              bool with_bound = true);

/// Squared dual norms a^2 = g^T K^{-1} g of the inlet and outlet flux functionals with
/// respect to int J |D^eta u|^2 on the admissible velocity space.
std::pair<double, double> trace_norms_squared(const FluidSystem& sys, const Vector& eta);

}  // namespace mlfsi
