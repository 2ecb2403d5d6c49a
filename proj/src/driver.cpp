#include "mlfsi/driver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mlfsi/errors.hpp"

namespace mlfsi {

namespace {

Vector zeros(std::size_t n) { return Vector::Zero(static_cast<Eigen::Index>(n)); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double to_number(const std::string& s, const std::string& spec) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("initial: bad number '" + s + "' in profile '" + spec + "'");
  }
}

// Nodal profile on the wall nodes.
Vector wall_profile(const std::string& spec, const std::vector<double>& z, double length) {
  const auto parts = split(spec, ':');
  Vector out = zeros(z.size());
  if (parts.empty()) throw ConfigError("initial: empty profile");
  const std::string& kind = parts[0];
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (kind == "zero" && parts.size() == 1) {
      out[k] = 0.0;
    } else if (kind == "sine" && parts.size() == 3) {
      out[k] = to_number(parts[1], spec) *
               std::sin(to_number(parts[2], spec) * std::numbers::pi * z[i] / length);
    } else if (kind == "bump" && parts.size() == 2) {
      out[k] = to_number(parts[1], spec) * 4.0 * z[i] * (length - z[i]) / (length * length);
    } else if (kind == "const" && parts.size() == 2) {
      out[k] = to_number(parts[1], spec);
    } else {
      throw ConfigError("initial: unknown profile '" + spec +
                        "' (expected zero, sine:a:k, bump:a or const:c)");
    }
  }
  // Round-off at the end points (e.g. sin(k pi)) is cleaned; real violations are kept.
  for (Eigen::Index k : {Eigen::Index{0}, out.size() - 1})
    if (std::abs(out[k]) <= 1e-12) out[k] = 0.0;
  return out;
}

// Thick-layer field with radial component equal to the wall field above each wall node.
Vector lift_to_solid(const Vector& wall, const CoupledProblem& pb) {
  const auto& m = pb.solid_mesh;
  Vector d = zeros(m.vector_dof_count());
  for (std::size_t node = 0; node < m.node_count(); ++node) {
    if (m.has_tag(node, kSolidInlet) || m.has_tag(node, kSolidOutlet)) continue;
    const std::size_t i = node % m.nodes_z();
    d[static_cast<Eigen::Index>(2 * node + 1)] = wall[static_cast<Eigen::Index>(i)];
  }
  return d;
}

}  // namespace

CoupledProblem::CoupledProblem(const GeometryConfig& g, const FormWeights& w,
                               ale::ValidityMonitor monitor, bool freeze_interface)
    : geometry((g.validate(), g)),
      weights((w.validate(), w)),
      fluid_mesh(build_fluid_mesh(g)),
      solid_mesh(build_solid_mesh(g)),
      maps(build_interface_maps(fluid_mesh, solid_mesh)),
      structure(solid_mesh, maps, weights),
      fluid(fluid_mesh, maps, weights, monitor, freeze_interface) {}

CoupledProblem CoupledProblem::with_defaults(const GeometryConfig& g, const FormWeights& w) {
  return CoupledProblem(g, w, ale::ValidityMonitor::for_radius(g.radius));
}

CoupledState CoupledState::zero(const CoupledProblem& pb) {
  CoupledState s;
  s.u = zeros(pb.fluid_mesh.vector_dof_count());
  s.p = zeros(pb.fluid_mesh.pressure_node_count());
  s.v = zeros(pb.maps.wall_node_count());
  s.eta = zeros(pb.maps.wall_node_count());
  s.d = zeros(pb.solid_mesh.vector_dof_count());
  s.V = zeros(pb.solid_mesh.vector_dof_count());
  return s;
}

void RunConfig::validate() const {
  std::ostringstream err;
  if (!(T > 0.0)) err << "time: T must be > 0; ";
  if (N < 1) err << "time: N must be >= 1; ";
  if (!(r_min_factor > 0.0 && r_min_factor < 1.0))
    err << "guards: r_min must lie in (0, 1) (relative to R); ";
  if (!(r_max_factor > 1.0)) err << "guards: r_max must be > 1 (relative to R); ";
  if (!(initial.random_amplitude >= 0.0)) err << "initial: random_amplitude must be >= 0; ";
  try {
    geometry.validate();
  } catch (const ConfigError& e) {
    err << e.what();
  }
  try {
    weights.validate();
  } catch (const ConfigError& e) {
    err << e.what();
  }
  for (const auto* s : {&pressure.inlet, &pressure.outlet}) {
    try {
      s->validate();
    } catch (const ConfigError& e) {
      err << e.what();
    }
  }
  if (!err.str().empty()) throw ConfigError(err.str());
}

CoupledState initial_state(const RunConfig& cfg, const CoupledProblem& pb) {
  CoupledState s = CoupledState::zero(pb);
  s.eta = wall_profile(cfg.initial.eta0, pb.maps.wall_z, cfg.geometry.length);
  s.v = wall_profile(cfg.initial.v0, pb.maps.wall_z, cfg.geometry.length);
  s.d = lift_to_solid(s.eta, pb);
  s.V = lift_to_solid(s.v, pb);

  if (cfg.initial.random_amplitude > 0.0) {
    std::mt19937_64 rng(cfg.initial.seed);
    std::uniform_real_distribution<double> dist(-cfg.initial.random_amplitude,
                                                cfg.initial.random_amplitude);
    auto random = [&](std::size_t n) {
      Vector x(static_cast<Eigen::Index>(n));
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = dist(rng);
      return x;
    };
    const auto& smap = pb.structure.dof_map();
    const auto nw = static_cast<Eigen::Index>(pb.maps.wall_node_count());
    const auto ns = static_cast<Eigen::Index>(pb.solid_mesh.vector_dof_count());
    const Vector dx = smap.prolong(random(smap.reduced_size()));
    const Vector dy = smap.prolong(random(smap.reduced_size()));
    s.eta += dx.head(nw);
    s.d += dx.tail(ns);
    s.v += dy.head(nw);
    s.V += dy.tail(ns);
    s.u = pb.fluid.velocity_map().prolong(random(pb.fluid.velocity_map().reduced_size()));
  }
  // Kinematic compatibility of the initial velocities.
  for (const auto& t : pb.maps.triples)
    s.u[static_cast<Eigen::Index>(t.fluid_radial_dof)] = s.v[static_cast<Eigen::Index>(t.wall_node)];
  validate_compatibility(s, pb, cfg.monitor());
  return s;
}

void validate_compatibility(const CoupledState& s, const CoupledProblem& pb,
                            const ale::ValidityMonitor& mon) {
  std::ostringstream err;
  const std::size_t nw = pb.maps.wall_node_count();
  if (static_cast<std::size_t>(s.eta.size()) != nw || static_cast<std::size_t>(s.v.size()) != nw ||
      static_cast<std::size_t>(s.d.size()) != pb.solid_mesh.vector_dof_count() ||
      static_cast<std::size_t>(s.V.size()) != pb.solid_mesh.vector_dof_count() ||
      static_cast<std::size_t>(s.u.size()) != pb.fluid_mesh.vector_dof_count())
    throw ConfigError("initial: state sizes do not match the meshes");
  constexpr double tol = 1e-12;
  for (const auto& t : pb.maps.triples) {
    const auto w = static_cast<Eigen::Index>(t.wall_node);
    if (t.dirichlet && (std::abs(s.eta[w]) > tol || std::abs(s.v[w]) > tol))
      err << "compatibility condition violated: eta0 and v0 must vanish at z = "
          << pb.maps.wall_z[t.wall_node] << "; ";
    if (std::abs(s.d[static_cast<Eigen::Index>(t.solid_radial_dof)] - s.eta[w]) > tol ||
        std::abs(s.V[static_cast<Eigen::Index>(t.solid_radial_dof)] - s.v[w]) > tol)
      err << "compatibility condition violated: thick-wall trace differs from the thin wall at z = "
          << pb.maps.wall_z[t.wall_node] << "; ";
    if (std::abs(s.u[static_cast<Eigen::Index>(t.fluid_radial_dof)] - s.v[w]) > tol)
      err << "compatibility condition violated: fluid radial trace differs from v0 at z = "
          << pb.maps.wall_z[t.wall_node] << "; ";
  }
  for (const std::size_t dof : pb.maps.pinned_solid_dofs)
    if (std::abs(s.d[static_cast<Eigen::Index>(dof)]) > tol)
      err << "compatibility condition violated: d_z must vanish on the interface; ";
  const auto b = ale::check_validity(s.eta, pb.geometry.radius, mon);
  if (b.degenerate)
    err << "initial radius " << b.min_radius << " is not above the guard " << mon.r_min << "; ";
  if (!err.str().empty()) throw ConfigError(err.str());
}

LedgerRow ledger_row(const CoupledState& s, const Vector& eta_weight, const CoupledProblem& pb,
                     const ale::ValidityMonitor& mon) {
  LedgerRow r;
  r.step = static_cast<long>(s.n);
  r.stage = static_cast<int>(s.stage);
  r.time = s.t;
  r.E_kin = kinetic_energy(pb.fluid, pb.structure, s.u, s.v, s.V, eta_weight);
  r.E_el = elastic_energy(pb.structure, s.eta, s.d);
  const auto b = ale::check_validity(s.eta, pb.geometry.radius, mon);
  r.min_radius = b.min_radius;
  r.max_radius = b.max_radius;
  return r;
}

CoupledState advance_one_step(const CoupledState& s, double dt, const FluidLoads& loads,
                              CoupledProblem& pb, EnergyLedger& ledger, StepAudit& audit,
                              const StepOptions& opt, Vector* v_star) {
  const auto& mon = pb.fluid.monitor();
  audit = StepAudit{};
  audit.loads = loads;

  const StructureState before = s.structure();
  const StructureState half = structure_advance(before, dt, pb.structure);
  audit.structure = structure_energy_audit(before, half, dt, pb.structure);

  CoupledState mid = s;
  mid.eta = half.eta;
  mid.v = half.v;
  mid.d = half.d;
  mid.V = half.V;
  mid.n = s.n + 1;
  mid.t = static_cast<double>(s.n + 1) * dt;
  mid.stage = Stage::kStructure;
  if (v_star) *v_star = half.v;

  LedgerRow r1 = ledger_row(mid, s.eta, pb, mon);
  r1.structure_residual = audit.structure.residual;
  ledger.append(r1);

  const auto bounds = ale::check_validity(half.eta, pb.geometry.radius, mon);
  if (bounds.degenerate) {
    std::ostringstream os;
    os << "channel radius " << bounds.min_radius << " reached the guard " << mon.r_min
       << " at z = " << pb.maps.wall_z[bounds.argmin] << ", t = " << mid.t;
    throw DegeneracyError(os.str(), pb.maps.wall_z[bounds.argmin], bounds.min_radius);
  }

  const FluidStepInput in{s.u, half.v, s.eta, half.eta};
  const FluidStepResult res = fluid_advance(in, dt, loads, pb.fluid);
  audit.fluid = fluid_energy_audit(in, res, dt, loads, pb.fluid, opt.trace_bound);

  CoupledState out = mid;
  out.u = res.u;
  out.p = res.p;
  out.v = res.v;
  out.stage = Stage::kFluid;

  LedgerRow r2 = ledger_row(out, out.eta, pb, mon);
  r2.D = audit.fluid->dissipation;
  r2.fluid_slack = audit.fluid->slack;
  r2.boundary_work = audit.fluid->boundary_work;
  r2.v_vstar_gap = std::sqrt(pb.structure.thin_wall().l2_mass.quadratic(Vector(res.v - half.v)));
  ledger.append(r2);
  return out;
}

RunResult run(const RunConfig& cfg, const StepOptions& opt) {
  cfg.validate();
  CoupledProblem pb(cfg.geometry, cfg.weights, cfg.monitor());
  return run(cfg, pb, initial_state(cfg, pb), opt);
}

RunResult run(const RunConfig& cfg, CoupledProblem& pb, const CoupledState& start,
              const StepOptions& opt) {
  const double dt = cfg.dt();
  const auto& mon = pb.fluid.monitor();
  RunResult res;
  res.ledger.append(ledger_row(start, start.eta, pb, mon));
  auto record = [&res](const CoupledState& s, const Vector& v_star) {
    res.series.t.push_back(s.t);
    res.series.u.push_back(s.u);
    res.series.p.push_back(s.p);
    res.series.v.push_back(s.v);
    res.series.v_star.push_back(v_star);
    res.series.eta.push_back(s.eta);
    res.series.d.push_back(s.d);
    res.series.V.push_back(s.V);
  };
  record(start, start.v);

  CoupledState s = start;
  res.audits.reserve(cfg.N);
  for (std::size_t n = 0; n < cfg.N; ++n) {
    const auto [pin, pout] = pressure_average(cfg.pressure, n, dt);
    StepAudit audit;
    Vector v_star;
    try {
      s = advance_one_step(s, dt, {pin, pout}, pb, res.ledger, audit, opt, &v_star);
    } catch (const DegeneracyError& e) {
      res.audits.push_back(audit);
      res.degenerate = true;
      res.touching_time = static_cast<double>(n + 1) * dt;
      res.touching_z = e.z();
      res.halt_message = e.what();
      break;
    } catch (const SolverError& e) {
      res.solver_failed = true;
      res.solver_message = e.what();
      break;
    }
    res.audits.push_back(audit);
    if (audit.fluid)
      res.max_trace_constant = std::max(res.max_trace_constant, audit.fluid->trace_constant);
    if (res.ledger.back().max_radius >= mon.r_max) res.above_max_radius = true;
    record(s, v_star);
  }
  res.final_state = s;
  return res;
}

}  // namespace mlfsi
