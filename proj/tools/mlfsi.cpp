// mlfsi: command-line front end (run, convergence-study, energy-audit, korn-check).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlfsi/driver.hpp"
#include "mlfsi/errors.hpp"
#include "mlfsi/io.hpp"
#include "mlfsi/verification.hpp"

#ifndef MLFSI_VERSION
#define MLFSI_VERSION "0.0.0"
#endif

namespace {

enum Exit { kOk = 0, kConfig = 2, kDegenerate = 3, kAudit = 4, kSolver = 5 };

constexpr const char* kOutputEnv = "MLFSI_OUTPUT_DIR";

// --out beats the environment, which beats [output] dir.
mlfsi::RunConfig load(const std::string& path, const std::string& out) {
  mlfsi::RunConfig cfg = mlfsi::io::load_config(path);
  if (!out.empty()) {
    cfg.output_dir = out;
  } else if (const char* env = std::getenv(kOutputEnv); env && *env) {
    cfg.output_dir = env;
  }
  if (cfg.output_dir.empty()) cfg.output_dir = "mlfsi_out";
  return cfg;
}

int halt_code(const mlfsi::RunResult& res) {
  if (res.degenerate) {
    std::printf("halted: degeneracy at t = %.17g, z = %.17g (%s)\n", res.touching_time,
                res.touching_z, res.halt_message.c_str());
    return kDegenerate;
  }
  if (res.solver_failed) {
    std::printf("halted: solver failure (%s)\n", res.solver_message.c_str());
    return kSolver;
  }
  return kOk;
}

int cmd_run(const std::string& config, const std::string& out) {
  const auto cfg = load(config, out);
  mlfsi::CoupledProblem pb(cfg.geometry, cfg.weights, cfg.monitor());
  const auto start = mlfsi::initial_state(cfg, pb);
  const auto res = mlfsi::run(cfg, pb, start);
  const auto manifest = mlfsi::io::write_run_outputs(cfg, pb, res);
  const auto& last = res.ledger.back();
  std::printf("steps %zu  t %.17g  E %.17g  ledger rows %zu  snapshots %zu\n",
              res.final_state.n, last.time, last.total(), res.ledger.size(),
              manifest.snapshots.size());
  std::printf("output %s  config %s  ledger %s\n", cfg.output_dir.c_str(),
              manifest.config_hash.c_str(), manifest.ledger_hash.c_str());
  return halt_code(res);
}

int cmd_convergence(const std::string& config, std::size_t levels) {
  const auto cfg = load(config, "");
  const auto report = mlfsi::verify::temporal_self_convergence(cfg, levels);
  std::fputs(report.summary().c_str(), stdout);
  std::printf("%s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? kOk : kAudit;
}

int cmd_energy_audit(const std::string& config) {
  const auto cfg = load(config, "");
  mlfsi::CoupledProblem pb(cfg.geometry, cfg.weights, cfg.monitor());
  const auto res = mlfsi::run(cfg, pb, mlfsi::initial_state(cfg, pb));

  constexpr double tol = 1e-9;
  std::size_t structure_bad = 0, identity_bad = 0, slack_bad = 0;
  double worst_structure = 0.0, worst_identity = 0.0, worst_slack = INFINITY;
  for (const auto& a : res.audits) {
    const double scale = 1.0 + std::abs(a.structure.energy_before);
    worst_structure = std::max(worst_structure, std::abs(a.structure.residual));
    if (std::abs(a.structure.residual) > tol * scale) ++structure_bad;
    if (!a.fluid) continue;
    const double fscale = 1.0 + std::abs(a.fluid->energy_before);
    worst_identity = std::max(worst_identity, std::abs(a.fluid->identity_residual));
    worst_slack = std::min(worst_slack, a.fluid->slack);
    if (std::abs(a.fluid->identity_residual) > tol * fscale) ++identity_bad;
    if (a.fluid->slack < -tol * fscale) ++slack_bad;
  }
  std::printf("%s structure energy identity: %zu steps, worst residual %.3e\n",
              structure_bad ? "FAIL" : "PASS", res.audits.size(), worst_structure);
  std::printf("%s fluid energy identity: worst residual %.3e\n", identity_bad ? "FAIL" : "PASS",
              worst_identity);
  std::printf("%s fluid energy inequality: smallest slack %.3e\n", slack_bad ? "FAIL" : "PASS",
              std::isinf(worst_slack) ? 0.0 : worst_slack);
  bool ok = structure_bad == 0 && identity_bad == 0 && slack_bad == 0;
  if (!res.degenerate && !res.solver_failed) {
    const double p2 =
        cfg.pressure.inlet.l2_squared(cfg.T) + cfg.pressure.outlet.l2_squared(cfg.T);
    const auto bound = mlfsi::uniform_bound_report(res.ledger, res.audits, cfg.weights, cfg.dt(), p2);
    std::printf("%s uniform energy bound\n  %s", bound.pass() ? "PASS" : "FAIL",
                bound.summary().c_str());
    ok = ok && bound.pass();
  }
  const int halt = halt_code(res);
  if (!ok) return kAudit;
  return halt;
}

int cmd_korn(const std::vector<std::string>& shapes, double length, double radius) {
  std::vector<std::string> specs = shapes;
  if (specs.empty()) specs = {"flat", "bump:0.1", "sawtooth:0.1:8"};
  bool ok = true;
  for (const auto& spec : specs) {
    const auto shape = mlfsi::verify::BoundaryShape::parse(spec);
    for (int family = 0; family < 3; ++family) {
      const mlfsi::verify::ManufacturedField field{family, false};
      const auto r = mlfsi::verify::korn_check(shape, field, length, radius);
      const bool pass = r.mismatch <= 1e-10;
      ok = ok && pass;
      std::printf("%s %-16s %-28s grad %.10e  2|D|^2 %.10e  mismatch %.3e\n",
                  pass ? "PASS" : "FAIL", shape.name().c_str(), field.name().c_str(),
                  r.gradient_norm, r.strain_norm, r.mismatch);
    }
  }
  return ok ? kOk : kAudit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled fluid / multilayered wall solver with energy audits"};
  app.set_version_flag("--version", std::string("mlfsi ") + MLFSI_VERSION);
  app.require_subcommand(1);

  std::string config, out;
  std::size_t levels = 3;
  std::vector<std::string> shapes;
  double length = 1.0, radius = 1.0;

  auto* run = app.add_subcommand("run", "Full simulation: ledger, snapshots and manifest");
  run->add_option("--config", config, "Configuration file")->required();
  run->add_option("--out", out, std::string("Output directory (overrides ") + kOutputEnv +
                                    " and [output] dir)");

  auto* conv = app.add_subcommand("convergence-study", "Temporal self-convergence at N, 2N, ...");
  conv->add_option("--config", config, "Configuration file")->required();
  conv->add_option("--levels", levels, "Number of levels (>= 3)")->required()->check(
      CLI::Range(std::size_t{3}, std::size_t{12}));

  auto* audit = app.add_subcommand("energy-audit", "Run and check the discrete energy estimates");
  audit->add_option("--config", config, "Configuration file")->required();

  auto* korn = app.add_subcommand("korn-check", "Korn equality on deformed channels");
  korn->add_option("--eta", shapes, "Wall shape: flat, bump:a or sawtooth:a:K (repeatable)");
  korn->add_option("--length", length, "Channel length")->check(CLI::PositiveNumber);
  korn->add_option("--radius", radius, "Channel radius")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*conv) return cmd_convergence(config, levels);
    if (*audit) return cmd_energy_audit(config);
    if (*korn) return cmd_korn(shapes, length, radius);
  } catch (const mlfsi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const mlfsi::DegeneracyError& e) {
    std::fprintf(stderr, "degeneracy: %s\n", e.what());
    return kDegenerate;
  } catch (const mlfsi::SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
