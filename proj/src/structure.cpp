#include "mlfsi/structure.hpp"

#include <stdexcept>

#include "mlfsi/errors.hpp"

namespace mlfsi {

namespace {

CsrMatrix block_diag(const CsrMatrix& a, const CsrMatrix& b) {
  fem::TripletList t(a.rows() + b.rows(), a.cols() + b.cols());
  t.reserve(a.nnz() + b.nnz());
  auto copy = [&t](const CsrMatrix& m, std::size_t off) {
    const auto rp = m.row_offsets();
    const auto ci = m.col_indices();
    const auto v = m.values();
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) t.add(i + off, ci[k] + off, v[k]);
  };
  copy(a, 0);
  copy(b, a.rows());
  return CsrMatrix::from_triplets(t);
}

void check_state(const StructureState& s, const StructureSystem& sys) {
  if (static_cast<std::size_t>(s.eta.size()) != sys.wall_size() ||
      static_cast<std::size_t>(s.v.size()) != sys.wall_size() ||
      static_cast<std::size_t>(s.d.size()) != sys.solid_size() ||
      static_cast<std::size_t>(s.V.size()) != sys.solid_size())
    throw std::invalid_argument("structure state does not match the structure system");
}

}  // namespace

StructureSystem::StructureSystem(const FemMesh& solid, const InterfaceMaps& maps,
                                 const FormWeights& w)
    : nw_(maps.wall_node_count()), ns_(solid.vector_dof_count()) {
  wall_ = fem::assemble_thin_wall(maps.wall_z, w);
  solid_mass_ = fem::assemble_mass(solid, w.rho_s2, 2);
  solid_stiffness_ = fem::assemble_thick_elasticity(solid, w);
  mass_ = block_diag(wall_.mass, solid_mass_);
  stiffness_ = block_diag(wall_.stiffness, solid_stiffness_);
  damping_ = block_diag(wall_.damping, CsrMatrix(ns_, ns_));

  std::vector<long> map(nw_ + ns_, -2);
  long next = 0;
  for (const auto& t : maps.triples) map[t.wall_node] = t.dirichlet ? -1 : next++;
  for (std::size_t node = 0; node < solid.node_count(); ++node)
    if (solid.has_tag(node, kSolidInlet) || solid.has_tag(node, kSolidOutlet)) {
      map[nw_ + 2 * node] = -1;
      map[nw_ + 2 * node + 1] = -1;
    }
  for (const std::size_t dof : maps.pinned_solid_dofs) map[nw_ + dof] = -1;
  for (const auto& t : maps.triples) map[nw_ + t.solid_radial_dof] = map[t.wall_node];
  for (auto& m : map)
    if (m == -2) m = next++;
  map_ = fem::DofMap(std::move(map), static_cast<std::size_t>(next));
}

const fem::Factorization& StructureSystem::factorization(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("structure step: dt must be positive");
  if (!factor_ || factor_dt_ != dt) {
    const CsrMatrix full = CsrMatrix::add(
        1.0, mass_, 1.0, CsrMatrix::add(dt * dt, stiffness_, dt, damping_));
    factor_.emplace(fem::DofMap::reduce(full, map_, map_), fem::MatrixKind::kSpd);
    factor_dt_ = dt;
    ++factorizations_;
  }
  return *factor_;
}

Vector StructureSystem::stack(const Vector& wall, const Vector& solid) const {
  Vector x(static_cast<Eigen::Index>(nw_ + ns_));
  x << wall, solid;
  return x;
}

double StructureSystem::kinetic_energy(const StructureState& s) const {
  return 0.5 * (wall_.mass.quadratic(s.v) + solid_mass_.quadratic(s.V));
}

double StructureSystem::elastic_energy(const StructureState& s) const {
  return 0.5 * (wall_.stiffness.quadratic(s.eta) + solid_stiffness_.quadratic(s.d));
}

StructureState structure_advance(const StructureState& s, double dt, StructureSystem& sys) {
  check_state(s, sys);
  const auto& f = sys.factorization(dt);
  const Vector x = sys.stack(s.eta, s.d);
  const Vector y = sys.stack(s.v, s.V);
  const Vector rhs = sys.mass() * Vector(x + dt * y) + dt * (sys.damping() * x);
  const Vector xn = sys.dof_map().prolong(f.solve(sys.dof_map().restrict_vector(rhs)));
  const Vector yn = (xn - x) / dt;
  const auto nw = static_cast<Eigen::Index>(sys.wall_size());
  const auto ns = static_cast<Eigen::Index>(sys.solid_size());
  return {xn.head(nw), yn.head(nw), xn.tail(ns), yn.tail(ns)};
}

StructureAudit structure_energy_audit(const StructureState& before, const StructureState& after,
                                      double dt, const StructureSystem& sys) {
  check_state(before, sys);
  check_state(after, sys);
  StructureAudit a;
  a.energy_before = sys.kinetic_energy(before) + sys.elastic_energy(before);
  a.energy_after = sys.kinetic_energy(after) + sys.elastic_energy(after);
  const Vector dx = sys.stack(after.eta - before.eta, after.d - before.d);
  const Vector dy = sys.stack(after.v - before.v, after.V - before.V);
  a.kinetic_jump = 0.5 * sys.mass().quadratic(dy);
  a.elastic_jump = 0.5 * sys.stiffness().quadratic(dx);
  a.wall_damping = dt * sys.thin_wall().damping.quadratic(after.v);
  a.residual =
      a.energy_after + a.kinetic_jump + a.elastic_jump + a.wall_damping - a.energy_before;
  return a;
}

}  // namespace mlfsi
