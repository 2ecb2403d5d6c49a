#include "mlfsi/fluid.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "mlfsi/errors.hpp"

namespace mlfsi {

namespace {

void guard(const Vector& eta, const FluidSystem& sys, const char* label) {
  const auto b = ale::check_validity(eta, sys.mesh().lr, sys.monitor());
  if (b.degenerate) {
    std::ostringstream os;
    os << "fluid domain degenerate at " << label << ": radius " << b.min_radius << " <= "
       << sys.monitor().r_min;
    throw DegeneracyError(os.str(), sys.maps().wall_z[b.argmin], b.min_radius);
  }
}

Vector zeros(std::size_t n) { return Vector::Zero(static_cast<Eigen::Index>(n)); }

}  // namespace

FluidSystem::FluidSystem(const FemMesh& fluid, const InterfaceMaps& maps, const FormWeights& w,
                         ale::ValidityMonitor monitor, bool freeze_interface)
    : mesh_(fluid), maps_(maps), w_(w), monitor_(monitor) {
  std::vector<bool> free(mesh_.vector_dof_count(), true);
  for (std::size_t node = 0; node < mesh_.node_count(); ++node) {
    if (mesh_.has_tag(node, kInterface)) {
      free[2 * node] = false;
      if (freeze_interface) free[2 * node + 1] = false;
    }
    if (mesh_.has_tag(node, kAxis) || mesh_.has_tag(node, kInlet) ||
        mesh_.has_tag(node, kOutlet))
      free[2 * node + 1] = false;
  }
  vmap_ = fem::DofMap::from_free_mask(free);
  wall_mass_ = fem::assemble_thin_wall(maps_.wall_z, w_).mass;
  g_in_ = fem::assemble_boundary_flux(mesh_, kInlet);
  g_out_ = fem::assemble_boundary_flux(mesh_, kOutlet);
}

Vector FluidSystem::embed_wall(const Vector& wall) const {
  Vector u = zeros(mesh_.vector_dof_count());
  for (const auto& t : maps_.triples)
    u[static_cast<Eigen::Index>(t.fluid_radial_dof)] = wall[static_cast<Eigen::Index>(t.wall_node)];
  return u;
}

Vector FluidSystem::wall_trace(const Vector& u) const {
  Vector v = zeros(maps_.wall_node_count());
  for (const auto& t : maps_.triples)
    v[static_cast<Eigen::Index>(t.wall_node)] = u[static_cast<Eigen::Index>(t.fluid_radial_dof)];
  return v;
}

double FluidSystem::boundary_work(const Vector& u, const FluidLoads& loads) const {
  return loads.p_in * g_in_.dot(u) - loads.p_out * g_out_.dot(u);
}

double FluidSystem::kinetic_energy(const Vector& u, const Vector& eta) const {
  const auto ale = ale::evaluate_ale(eta, zeros(maps_.wall_node_count()), mesh_);
  const auto m = fem::assemble_weighted_mass(mesh_, fem::jacobian_weights(ale), 2);
  return 0.5 * w_.rho_f * m.quadratic(u);
}

double FluidSystem::strain_norm_squared(const Vector& u, const Vector& eta) const {
  const auto ale = ale::evaluate_ale(eta, zeros(maps_.wall_node_count()), mesh_);
  return fem::assemble_transformed_stiffness(mesh_, ale, 0.5).quadratic(u);
}

FluidStepResult fluid_advance(const FluidStepInput& in, double dt, const FluidLoads& loads,
                              const FluidSystem& sys) {
  if (!(dt > 0.0)) throw std::invalid_argument("fluid step: dt must be positive");
  const auto& mesh = sys.mesh();
  const auto& w = sys.weights();
  const std::size_t nv = mesh.vector_dof_count();
  if (static_cast<std::size_t>(in.u.size()) != nv)
    throw std::invalid_argument("fluid step: velocity size mismatch");
  guard(in.eta_n, sys, "eta^n");
  guard(in.eta_half, sys, "eta^{n+1/2}");

  const auto ale = ale::evaluate_ale(in.eta_n, in.v_half, mesh);
  const CsrMatrix mj = fem::assemble_weighted_mass(mesh, fem::jacobian_weights(ale), 2);
  const CsrMatrix adv = fem::assemble_advection(mesh, ale, in.u, w.rho_f).fused();
  const CsrMatrix visc = fem::assemble_transformed_stiffness(mesh, ale, w.mu);
  const CsrMatrix div = fem::assemble_transformed_divergence(mesh, ale);

  // Interface inertia on the radial trace DOFs.
  fem::TripletList ct(nv, nv);
  {
    const auto& m = sys.wall_mass();
    const auto rp = m.row_offsets();
    const auto ci = m.col_indices();
    const auto val = m.values();
    std::vector<std::size_t> dof(sys.maps().wall_node_count());
    for (const auto& t : sys.maps().triples) dof[t.wall_node] = t.fluid_radial_dof;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) ct.add(dof[i], dof[ci[k]], val[k] / dt);
  }
  const CsrMatrix coupling = CsrMatrix::from_triplets(ct);

  CsrMatrix a = CsrMatrix::add(w.rho_f / dt, mj, 1.0, adv);
  a = CsrMatrix::add(1.0, a, 1.0, visc);
  a = CsrMatrix::add(1.0, a, 1.0, coupling);
  const Vector rhs = (w.rho_f / dt) * (mj * in.u) + coupling * sys.embed_wall(in.v_half) +
                     loads.p_in * sys.inlet_flux() - loads.p_out * sys.outlet_flux();

  const auto& vmap = sys.velocity_map();
  const std::size_t np = mesh.pressure_node_count();
  const fem::DofMap pmap = fem::DofMap::from_free_mask(std::vector<bool>(np, true));
  const CsrMatrix ar = fem::DofMap::reduce(a, vmap, vmap);
  const CsrMatrix br = fem::DofMap::reduce(div, pmap, vmap);
  const std::size_t nu = vmap.reduced_size();

  fem::TripletList st(nu + np, nu + np);
  st.reserve(ar.nnz() + 2 * br.nnz());
  for (std::size_t i = 0; i < ar.rows(); ++i)
    for (std::size_t k = ar.row_offsets()[i]; k < ar.row_offsets()[i + 1]; ++k)
      st.add(i, ar.col_indices()[k], ar.values()[k]);
  for (std::size_t i = 0; i < br.rows(); ++i)
    for (std::size_t k = br.row_offsets()[i]; k < br.row_offsets()[i + 1]; ++k) {
      const std::size_t j = br.col_indices()[k];
      st.add(nu + i, j, -br.values()[k]);
      st.add(j, nu + i, -br.values()[k]);
    }
  Vector b = zeros(nu + np);
  b.head(static_cast<Eigen::Index>(nu)) = vmap.restrict_vector(rhs);

  const Vector x = fem::solve_sparse(CsrMatrix::from_triplets(st), b, fem::MatrixKind::kGeneral);
  FluidStepResult out;
  out.u = vmap.prolong(x.head(static_cast<Eigen::Index>(nu)));
  out.p = x.tail(static_cast<Eigen::Index>(np));
  out.v = sys.wall_trace(out.u);
  return out;
}

std::pair<double, double> trace_norms_squared(const FluidSystem& sys, const Vector& eta) {
  const auto ale = ale::evaluate_ale(eta, zeros(sys.maps().wall_node_count()), sys.mesh());
  const CsrMatrix k = fem::DofMap::reduce(
      fem::assemble_transformed_stiffness(sys.mesh(), ale, 0.5), sys.velocity_map(),
      sys.velocity_map());
  const fem::Factorization f(k, fem::MatrixKind::kSpd);
  const Vector gin = sys.velocity_map().restrict_vector(sys.inlet_flux());
  const Vector gout = sys.velocity_map().restrict_vector(sys.outlet_flux());
  return {gin.dot(f.solve(gin)), gout.dot(f.solve(gout))};
}

FluidAudit fluid_energy_audit(const FluidStepInput& before, const FluidStepResult& after, double dt,
                              const FluidLoads& loads, const FluidSystem& sys, bool with_bound) {
  const auto& mesh = sys.mesh();
  const auto& w = sys.weights();
  const Vector zw = zeros(sys.maps().wall_node_count());
  const auto ale_n = ale::evaluate_ale(before.eta_n, zw, mesh);
  const auto ale_1 = ale::evaluate_ale(before.eta_half, zw, mesh);
  const CsrMatrix mjn = fem::assemble_weighted_mass(mesh, fem::jacobian_weights(ale_n), 2);
  const CsrMatrix mj1 = fem::assemble_weighted_mass(mesh, fem::jacobian_weights(ale_1), 2);
  const CsrMatrix kraw = fem::assemble_transformed_stiffness(mesh, ale_n, 0.5);
  const auto& mw = sys.wall_mass();

  FluidAudit a;
  a.energy_before = 0.5 * (w.rho_f * mjn.quadratic(before.u) + mw.quadratic(before.v_half));
  a.energy_after = 0.5 * (w.rho_f * mj1.quadratic(after.u) + mw.quadratic(after.v));
  a.velocity_jump = 0.5 * w.rho_f * mjn.quadratic(Vector(after.u - before.u));
  a.wall_jump = 0.5 * mw.quadratic(Vector(after.v - before.v_half));
  a.dissipation = dt * kraw.quadratic(after.u);
  a.boundary_work = dt * sys.boundary_work(after.u, loads);
  a.identity_residual = a.energy_after + a.velocity_jump + a.wall_jump +
                        2.0 * w.mu * a.dissipation - a.energy_before - a.boundary_work;
  const double p2 = loads.p_in * loads.p_in + loads.p_out * loads.p_out;
  if (with_bound && p2 > 0.0) {
    const auto [ain, aout] = trace_norms_squared(sys, before.eta_n);
    a.trace_constant = std::max(ain, aout) / (2.0 * w.mu);
  }
  a.slack = a.energy_before + a.trace_constant * dt * p2 -
            (a.energy_after + a.velocity_jump + a.wall_jump + w.mu * a.dissipation);
  return a;
}

}  // namespace mlfsi
