#pragma once

// Lie splitting time loop: structure step, then fluid step, with per-half-step audits.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlfsi/ale.hpp"
#include "mlfsi/energy.hpp"
#include "mlfsi/fluid.hpp"
#include "mlfsi/mesh.hpp"
#include "mlfsi/structure.hpp"

namespace mlfsi {

/// Meshes, interface maps and the two step systems of one configuration.
struct CoupledProblem {
  GeometryConfig geometry;
  FormWeights weights;
  FemMesh fluid_mesh, solid_mesh;
  InterfaceMaps maps;
  StructureSystem structure;
  FluidSystem fluid;

  CoupledProblem(const GeometryConfig& g, const FormWeights& w, ale::ValidityMonitor monitor,
                 bool freeze_interface = false);
  static CoupledProblem with_defaults(const GeometryConfig& g, const FormWeights& w = {});
};

enum class Stage { kInitial = 0, kStructure = 1, kFluid = 2 };

struct CoupledState {
  Vector u, p;     // fluid velocity (full) and pressure
  Vector v, eta;   // thin wall
  Vector d, V;     // thick wall
  double t = 0.0;
  std::size_t n = 0;
  Stage stage = Stage::kInitial;

  StructureState structure() const { return {eta, v, d, V}; }
  static CoupledState zero(const CoupledProblem& pb);
};

/// Initial data. eta0 / v0 specs: "zero", "sine:a:k" (a sin(k pi z / L)), "bump:a"
/// (4 a z (L - z) / L^2), "const:c". The thick layer starts with d_r = eta0, V_r = v0
/// (constant in r, zero on the lateral ends). A positive random amplitude adds an
/// admissible random perturbation of that size to every field.
struct InitialData {
  std::string eta0 = "zero";
  std::string v0 = "zero";
  double random_amplitude = 0.0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  double T = 0.1;
  std::size_t N = 10;
  GeometryConfig geometry;
  FormWeights weights;
  PressureData pressure;
  InitialData initial;
  double r_min_factor = 1e-3;  // guard: radius <= r_min_factor * R halts the run
  double r_max_factor = 10.0;
  std::size_t snapshot_every = 0;  // 0: no field snapshots on disk
  std::string snapshot_format = "csv";  // csv, vtk or both
  std::string output_dir;

  double dt() const { return T / static_cast<double>(N); }
  ale::ValidityMonitor monitor() const {
    return {r_min_factor * geometry.radius, r_max_factor * geometry.radius};
  }
  /// Throws ConfigError listing every problem (ranges and pressure data).
  void validate() const;
};

/// Builds the initial state; throws ConfigError if the compatibility conditions fail.
CoupledState initial_state(const RunConfig& cfg, const CoupledProblem& pb);
/// Checks eta endpoints, trace identities and the radius guard; throws ConfigError.
void validate_compatibility(const CoupledState& s, const CoupledProblem& pb,
                            const ale::ValidityMonitor& mon);

/// Piecewise-constant sequences: index 0 is the initial state, index n+1 the end of step n.
/// v_star[n+1] is the structure velocity after the structure step of step n.
struct RunSeries {
  std::vector<double> t;
  std::vector<Vector> u, p, v, v_star, eta, d, V;
};

struct RunResult {
  CoupledState final_state;
  EnergyLedger ledger;
  std::vector<StepAudit> audits;
  RunSeries series;
  bool degenerate = false;
  double touching_time = 0.0;
  double touching_z = 0.0;
  std::string halt_message;
  bool solver_failed = false;
  std::string solver_message;
  double max_trace_constant = 0.0;
  bool above_max_radius = false;
};

struct StepOptions {
  bool trace_bound = true;  // compute the trace constant when pressure data are nonzero
};

/// One Lie step. Appends ledger rows for both half steps and returns the post-fluid state.
/// Degeneracy after the structure step throws DegeneracyError after the structure row has
/// been appended.
CoupledState advance_one_step(const CoupledState& s, double dt, const FluidLoads& loads,
                              CoupledProblem& pb, EnergyLedger& ledger, StepAudit& audit,
                              const StepOptions& opt = {}, Vector* v_star = nullptr);

/// Full run. Degeneracy and solver failure stop the loop and are reported in the result
/// (not thrown), so the rows before the halt stay available.
RunResult run(const RunConfig& cfg, const StepOptions& opt = {});
RunResult run(const RunConfig& cfg, CoupledProblem& pb, const CoupledState& start,
              const StepOptions& opt = {});

/// Ledger row of a state.
LedgerRow ledger_row(const CoupledState& s, const Vector& eta_weight, const CoupledProblem& pb,
                     const ale::ValidityMonitor& mon);

}  // namespace mlfsi
