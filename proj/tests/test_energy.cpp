#include "doctest.h"

#include "dense_oracle.hpp"
#include "mlfsi/driver.hpp"
#include "test_util.hpp"

using namespace mlfsi;

namespace {

FormWeights weights() {
  FormWeights w;
  w.rho_f = 1.2;
  w.mu = 0.8;
  w.rho_s1h = 0.7;
  w.c2 = 1.5;
  w.koiter_c0 = 0.2;
  w.lambda = 1.8;
  w.mu_s = 0.6;
  w.rho_s2 = 1.4;
  return w;
}

}  // namespace

TEST_CASE("kinetic energy") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(2, 2, 1));
  const auto z = CoupledState::zero(pb);
  CHECK(kinetic_energy(pb.fluid, pb.structure, z.u, z.v, z.V, z.eta) == 0.0);
  Vector u = z.u;
  for (std::size_t k = 0; k < pb.fluid_mesh.node_count(); ++k) u[static_cast<Eigen::Index>(2 * k)] = 1.0;
  CHECK(kinetic_energy(pb.fluid, pb.structure, u, z.v, z.V, z.eta) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("energies match the dense oracle") {
  const auto w = weights();
  auto pb = CoupledProblem::with_defaults(testutil::geometry(2, 2, 1, 1.2, 0.9, 0.7), w);
  const auto s = testutil::random_state(pb, 0.2, 8);
  const oracle::Grid gf(pb.fluid_mesh), gs(pb.solid_mesh);
  const double R = pb.geometry.radius;
  const auto wall = oracle::wall(pb.maps.wall_z);

  const auto MJ = oracle::mass(gf, 2, [](const oracle::Point& P) { return P.J; }, R, s.eta);
  const auto Ms = oracle::mass(gs, 2, [&](const oracle::Point&) { return w.rho_s2; });
  const double ek = 0.5 * w.rho_f * s.u.dot(MJ * s.u) + 0.5 * w.rho_s1h * s.v.dot(wall.l2 * s.v) +
                    0.5 * s.V.dot(Ms * s.V);
  CHECK(std::abs(kinetic_energy(pb.fluid, pb.structure, s.u, s.v, s.V, s.eta) - ek) <= 1e-12);

  const auto Ks = oracle::elasticity(gs, w.mu_s, w.lambda);
  const double ee = 0.5 * s.eta.dot((w.c2 * wall.grad + w.koiter_c0 * wall.l2) * s.eta) +
                    0.5 * s.d.dot(Ks * s.d);
  CHECK(std::abs(elastic_energy(pb.structure, s.eta, s.d) - ee) <= 1e-12);

  const auto K = oracle::stiffness(gf, R, s.eta, 0.5);
  CHECK(std::abs(dissipation_increment(pb.fluid, s.u, s.eta, 0.01) - 0.01 * s.u.dot(K * s.u)) <=
        1e-12);
}

TEST_CASE("elastic energy of rigid translations") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(2, 2, 1));
  const auto z = CoupledState::zero(pb);
  CHECK(elastic_energy(pb.structure, z.eta, z.d) == 0.0);
  Vector d = z.d;
  for (std::size_t k = 0; k < pb.solid_mesh.node_count(); ++k) {
    d[static_cast<Eigen::Index>(2 * k)] = 0.4;
    d[static_cast<Eigen::Index>(2 * k + 1)] = -0.3;
  }
  CHECK(std::abs(elastic_energy(pb.structure, z.eta, d)) <= 1e-14);
}

TEST_CASE("ledger ordering") {
  EnergyLedger l;
  l.append({});
  LedgerRow r;
  r.step = 1;
  r.stage = 1;
  l.append(r);
  CHECK_THROWS_AS(l.append(r), std::logic_error);
  r.stage = 0;
  CHECK_THROWS_AS(l.append(r), std::logic_error);
  r.stage = 2;
  CHECK_NOTHROW(l.append(r));
  CHECK(l.size() == 3);
}

TEST_CASE("uniform bounds of a run without pressure") {
  RunConfig cfg;
  cfg.geometry = testutil::geometry(4, 4, 2);
  cfg.weights = weights();
  cfg.T = 0.5;
  cfg.N = 50;
  cfg.initial.random_amplitude = 0.1;
  const auto res = run(cfg);
  const auto b = uniform_bound_report(res.ledger, res.audits, cfg.weights, cfg.dt(), 0.0);
  CHECK(b.pass());
  CHECK(b.E0 > 0.0);
  CHECK(b.max_energy <= b.E0 * (1.0 + 1e-12));
  const double tol = 1e-9;
  CHECK(2.0 * cfg.weights.mu * b.sum_dissipation <= b.E0 + tol);
  CHECK(b.sum_fluid_jumps <= b.E0 + tol);
  CHECK(b.sum_structure_jumps <= b.E0 + tol);
  CHECK(b.sum_elastic_jumps <= b.E0 + tol);
  CHECK(std::abs(b.telescoping_residual) <= 50 * 1e-9 * (1.0 + b.E0));
}

TEST_CASE("zero run has zero sums") {
  RunConfig cfg;
  cfg.geometry = testutil::geometry(2, 2, 1);
  cfg.N = 5;
  const auto res = run(cfg);
  const auto b = uniform_bound_report(res.ledger, res.audits, cfg.weights, cfg.dt(), 0.0);
  CHECK(b.pass());
  CHECK(b.sum_dissipation == 0.0);
  CHECK(b.sum_fluid_jumps == 0.0);
  CHECK(b.sum_structure_jumps == 0.0);
  CHECK(b.sum_elastic_jumps == 0.0);
  CHECK(b.max_energy == 0.0);
}

TEST_CASE("pulse bound holds at every step") {
  RunConfig cfg;
  cfg.geometry = testutil::geometry(4, 4, 1);
  cfg.T = 1.0;
  cfg.N = 40;
  cfg.pressure.inlet = PressureSignal::cosine_pulse(1.0, 0.5);
  const auto res = run(cfg);
  const auto b = uniform_bound_report(res.ledger, res.audits, cfg.weights, cfg.dt(),
                                      cfg.pressure.inlet.l2_squared(cfg.T));
  CHECK(b.pass());
  CHECK(b.trace_constant > 0.0);
  CHECK(b.max_energy > 0.0);
  CHECK(b.max_energy <= b.bound);
  CHECK(b.discrete_pressure <= b.pressure_l2 * (1.0 + 1e-12));
}
