#include "doctest.h"

#include <filesystem>
#include <sstream>
#include <string>

#include "mlfsi/errors.hpp"
#include "mlfsi/io.hpp"
#include "test_util.hpp"

using namespace mlfsi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mlfsi_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string config_error(const std::string& text) {
  try {
    io::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const auto cfg = io::parse_config("[time]\nT = 0.1\nN = 10\n");
  CHECK(cfg.T == 0.1);
  CHECK(cfg.N == 10);
  CHECK(cfg.geometry.nz == 8);
  CHECK(cfg.geometry.nr_fluid == 8);
  CHECK(cfg.geometry.nr_solid == 1);
  CHECK(cfg.geometry.radius == 1.0);
  CHECK(cfg.weights.rho_f == 1.0);
  CHECK(cfg.weights.mu == 1.0);
  CHECK(cfg.weights.c2 == 1.0);
  CHECK(cfg.weights.koiter_c0 == 0.0);
  CHECK(cfg.initial.eta0 == "zero");
  CHECK(cfg.pressure.inlet.at(0.3) == 0.0);
  CHECK(cfg.pressure.outlet.at(0.3) == 0.0);
}

TEST_CASE("full config") {
  const auto cfg = io::parse_config(R"(# channel
[geometry]
L = 2
R = 0.5
H = 0.25
nz = 6
nr_fluid = 3
nr_solid = 2
[physics]
rho_f = 1.1
mu = 0.03
C1 = 4
C0 = 0.5
D0 = 0.1
D1 = 0.01
lambda = 3
mu_s = 2
rho_s2 = 1.5
[time]
T = 0.2
dt = 0.01
[pressure]
inlet = pulse:2:0.1
outlet = table:0,0,0.1,1
[initial]
eta0 = sine:0.01:1
v0 = zero
random_amplitude = 0.001
seed = 9
[output]
dir = out
snapshot_every = 5
format = both
[guards]
r_min = 0.05
r_max = 2
)");
  CHECK(cfg.geometry.length == 2.0);
  CHECK(cfg.geometry.nr_solid == 2);
  CHECK(cfg.weights.c2 == 4.0);
  CHECK(cfg.weights.koiter_d1 == 0.01);
  CHECK(cfg.N == 20);
  CHECK(cfg.pressure.inlet.kind == PressureSignal::Kind::kCosinePulse);
  CHECK(cfg.pressure.outlet.at(0.05) == doctest::Approx(0.5));
  CHECK(cfg.initial.seed == 9);
  CHECK(cfg.snapshot_every == 5);
  CHECK(cfg.snapshot_format == "both");
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.monitor().r_min == doctest::Approx(0.05));
  CHECK(cfg.monitor().r_max == doctest::Approx(2.0));

  // The canonical text parses back to the same configuration.
  const auto again = io::parse_config(io::canonical_config(cfg));
  CHECK(io::config_hash(again) == io::config_hash(cfg));
  CHECK(io::config_hash(cfg).size() == 16);
}

TEST_CASE("config errors are all reported") {
  const auto m = config_error(
      "[time]\nT = 0.1\nN = 10\n[guards]\nr_min = -1\n[geometry]\nnz = 1\ncolour = red\n"
      "[physics]\nmu = abc\nC2 = 1\n[extra]\n");
  CHECK(m.find("r_min must be > 0") != std::string::npos);
  CHECK(m.find("nz") != std::string::npos);
  CHECK(m.find("unknown key 'colour'") != std::string::npos);
  CHECK(m.find("mu: expected a number") != std::string::npos);
  CHECK(m.find("C2") != std::string::npos);
  CHECK(m.find("unknown section [extra]") != std::string::npos);
}

TEST_CASE("required and conflicting keys") {
  CHECK(config_error("").find("T is required") != std::string::npos);
  CHECK(config_error("[time]\nT = 1\n").find("N or dt is required") != std::string::npos);
  CHECK(config_error("[time]\nT = 1\nN = 2\ndt = 0.5\n").find("not both") != std::string::npos);
  CHECK(config_error("[time]\nT = 1\ndt = 0.3\n").find("positive integer") != std::string::npos);
  CHECK(config_error("[time]\nT = 1\nN = 2\nN = 3\n").find("duplicate") != std::string::npos);
  CHECK(config_error("[time]\nT = 1\nN = 2\n[physics]\nc2 = 1\nC1 = 1\n").find("same coefficient") !=
        std::string::npos);
  CHECK(config_error("[time]\nT = 1\nN = 2\n[pressure]\ninlet = ramp:1\n")
            .find("unknown pressure signal") != std::string::npos);
  CHECK(config_error("[time]\nT = 1\nN = 2\n[output]\nformat = hdf5\n")
            .find("snapshot format") != std::string::npos);
}

TEST_CASE("incompatible initial data is a config error") {
  const auto m = config_error("[time]\nT = 1\nN = 2\n[initial]\neta0 = const:0.1\n");
  CHECK(m.find("compatibility condition") != std::string::npos);
}

TEST_CASE("ledger csv") {
  CHECK(io::ledger_to_csv(EnergyLedger{}) == std::string(io::kLedgerHeader) + "\n");
  EnergyLedger one;
  one.append({});
  CHECK(io::ledger_to_csv(one) ==
        std::string(io::kLedgerHeader) + "\n0,0,0,0,0,0,0,0,0,0,0,0\n");

  RunConfig cfg;
  cfg.geometry = testutil::geometry(4, 4, 1);
  cfg.N = 5;
  cfg.initial.random_amplitude = 0.05;
  cfg.pressure.inlet = PressureSignal::constant(0.3);
  const auto res = run(cfg);
  const auto dir = scratch("ledger");
  io::write_ledger_csv(res.ledger, (dir / "l.csv").string());
  const auto back = io::read_ledger_csv((dir / "l.csv").string());
  CHECK(back == res.ledger);
  const auto text = io::read_file((dir / "l.csv").string());
  CHECK(text.find('\r') == std::string::npos);
  CHECK(io::format_number(0.1) == "0.10000000000000001");
  CHECK_THROWS(io::ledger_from_csv("step,stage\n"));
}

TEST_CASE("field snapshots") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(4, 2, 1));
  const auto zero = CoupledState::zero(pb);
  const Vector vz = Vector::Zero(9);

  std::string header;
  auto rows = csv_rows(io::fluid_csv(zero, pb, false), &header);
  CHECK(header == "z,r,u_z,u_r,p");
  REQUIRE(rows.size() == pb.fluid_mesh.node_count());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k][0] == pb.fluid_mesh.node_z[k]);
    CHECK(rows[k][1] == pb.fluid_mesh.node_r[k]);
    CHECK(rows[k][2] == 0.0);
    CHECK(rows[k][3] == 0.0);
    CHECK(rows[k][4] == 0.0);
  }
  CHECK(io::fluid_csv(zero, pb, true) == io::fluid_csv(zero, pb, false));
  rows = csv_rows(io::solid_csv(zero, pb), &header);
  CHECK(header == "z,r,d_z,d_r,V_z,V_r");
  CHECK(rows.size() == pb.solid_mesh.node_count());
  rows = csv_rows(io::interface_csv(zero, vz, pb), &header);
  CHECK(header == "z,eta,v,v_star");
  CHECK(rows.size() == 9);

  RunConfig cfg;
  cfg.geometry = pb.geometry;
  cfg.initial.eta0 = "sine:0.2:1";
  cfg.initial.random_amplitude = 0.01;
  const auto s = initial_state(cfg, pb);
  const auto ref = csv_rows(io::fluid_csv(s, pb, false));
  const auto phys = csv_rows(io::fluid_csv(s, pb, true));
  const std::size_t nzq = pb.fluid_mesh.nodes_z();
  for (std::size_t k = 0; k < phys.size(); ++k) {
    const double eta = s.eta[static_cast<Eigen::Index>(k % nzq)];
    CHECK(phys[k][1] == doctest::Approx((1.0 + eta) * ref[k][1]).epsilon(1e-15));
    CHECK(phys[k][2] == ref[k][2]);
  }
  CHECK(io::fluid_vtk(s, pb) == io::fluid_vtk(s, pb));
  CHECK(io::fluid_vtk(s, pb).rfind("# vtk DataFile Version 3.0", 0) == 0);
  CHECK(io::solid_vtk(s, pb).find("DIMENSIONS 9 3 1") != std::string::npos);

  const auto dir = scratch("snap");
  const auto files = io::write_field_snapshot(s, s.v, pb, dir.string(), "x", io::SnapshotFormat::kBoth);
  CHECK(files.size() == 6);
  for (const auto& f : files) CHECK(fs::exists(dir / f));
  CHECK(io::write_field_snapshot(s, s.v, pb, dir.string(), "y", io::SnapshotFormat::kVtk).size() == 2);
}

TEST_CASE("pressure is interpolated to velocity nodes") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(2, 2, 1));
  auto s = CoupledState::zero(pb);
  for (std::size_t k = 0; k < pb.fluid_mesh.pressure_node_count(); ++k)
    s.p[static_cast<Eigen::Index>(k)] = 2.0 * pb.fluid_mesh.pnode_z[k] - pb.fluid_mesh.pnode_r[k];
  const auto rows = csv_rows(io::fluid_csv(s, pb, false));
  for (const auto& r : rows) CHECK(r[4] == doctest::Approx(2.0 * r[0] - r[1]).epsilon(1e-15));
}

TEST_CASE("run outputs and manifest") {
  auto cfg = io::parse_config(
      "[geometry]\nnz = 4\nnr_fluid = 2\n[time]\nT = 0.1\nN = 4\n[pressure]\ninlet = constant:1\n"
      "[output]\nsnapshot_every = 2\n");
  const auto dir = scratch("run");
  cfg.output_dir = dir.string();
  CoupledProblem pb(cfg.geometry, cfg.weights, cfg.monitor());
  const auto res = run(cfg, pb, initial_state(cfg, pb));
  const auto m = io::write_run_outputs(cfg, pb, res);
  CHECK(m.status == "completed");
  CHECK(m.config_hash == io::config_hash(cfg));
  REQUIRE(m.snapshots.size() == 3);
  CHECK(m.snapshots[2].step == 4);
  CHECK(m.snapshots[2].time == doctest::Approx(0.1));
  const auto back = io::read_manifest((dir / "manifest.json").string());
  CHECK(back.ledger_hash == m.ledger_hash);
  CHECK(back.snapshots.size() == 3);
  CHECK(back.snapshots[1].files == m.snapshots[1].files);
  CHECK(io::read_ledger_csv((dir / "ledger.csv").string()) == res.ledger);

  // Same configuration, same ledger hash.
  const auto dir2 = scratch("run2");
  cfg.output_dir = dir2.string();
  CoupledProblem pb2(cfg.geometry, cfg.weights, cfg.monitor());
  const auto m2 = io::write_run_outputs(cfg, pb2, run(cfg, pb2, initial_state(cfg, pb2)));
  CHECK(m2.ledger_hash == m.ledger_hash);
  CHECK(m2.config_hash == m.config_hash);
}

TEST_CASE("fnv1a reference values") {
  CHECK(io::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::hex64(0xabcULL) == "0000000000000abc");
}
