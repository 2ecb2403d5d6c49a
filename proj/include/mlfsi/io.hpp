#pragma once

// Configuration files, ledger CSV, field snapshots and the snapshot manifest.
//
// Config format: INI-like sections with key = value lines, '#' comments.
//
//   [geometry] L R H nz nr_fluid nr_solid
//   [physics]  rho_f mu rho_s1h c2 (alias C1) C0 D0 D1 C2 D2 lambda mu_s rho_s2
//   [time]     T, and N or dt                      (required)
//   [pressure] inlet outlet: constant:c | pulse:amplitude:duration | table:t0,p0,t1,p1,...
//   [initial]  eta0 v0 (zero | sine:a:k | bump:a | const:c) random_amplitude seed
//   [output]   dir snapshot_every format (csv | vtk | both)
//   [guards]   r_min r_max (absolute radii)

#include <cstdint>
#include <string>
#include <vector>

#include "mlfsi/driver.hpp"

namespace mlfsi::io {

/// Parses and validates a configuration, including the compatibility of the initial data.
/// Throws ConfigError whose message lists every problem found, one per line.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text of a configuration (every field, 17 significant digits).
std::string canonical_config(const RunConfig& cfg);
/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t h);
std::string config_hash(const RunConfig& cfg);

/// Fixed-point-free decimal text with 17 significant digits.
std::string format_number(double x);

inline constexpr const char* kLedgerHeader =
    "step,stage,time,E_kin,E_el,D,structure_residual,fluid_slack,boundary_work,min_radius,"
    "max_radius,v_vstar_gap";

std::string ledger_to_csv(const EnergyLedger& ledger);
EnergyLedger ledger_from_csv(const std::string& text);
void write_ledger_csv(const EnergyLedger& ledger, const std::string& path);
EnergyLedger read_ledger_csv(const std::string& path);

enum class SnapshotFormat { kCsv, kVtk, kBoth };
SnapshotFormat parse_snapshot_format(const std::string& s);

/// Writes the fluid (reference and physical coordinates), solid and interface files of one
/// state as `<dir>/<stem>_*.csv|vtk` and returns the file names written (relative to dir).
std::vector<std::string> write_field_snapshot(const CoupledState& state, const Vector& v_star,
                                              const CoupledProblem& pb, const std::string& dir,
                                              const std::string& stem, SnapshotFormat format);

/// Text contents of the snapshot files, keyed like the files written above.
std::string fluid_csv(const CoupledState& s, const CoupledProblem& pb, bool physical);
std::string solid_csv(const CoupledState& s, const CoupledProblem& pb);
std::string interface_csv(const CoupledState& s, const Vector& v_star, const CoupledProblem& pb);
std::string fluid_vtk(const CoupledState& s, const CoupledProblem& pb);
std::string solid_vtk(const CoupledState& s, const CoupledProblem& pb);

struct ManifestEntry {
  std::size_t index = 0;
  long step = 0;
  int stage = 0;
  double time = 0.0;
  std::vector<std::string> files;
};

struct Manifest {
  std::string config_hash;
  std::string ledger_hash;
  std::string status;  // completed, degenerate, solver-failure
  std::vector<ManifestEntry> snapshots;
};

void write_manifest(const Manifest& m, const std::string& path);
Manifest read_manifest(const std::string& path);

/// Writes ledger.csv, snapshots at the configured cadence and manifest.json into cfg's output
/// directory (created if missing).
Manifest write_run_outputs(const RunConfig& cfg, const CoupledProblem& pb, const RunResult& res);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace mlfsi::io
