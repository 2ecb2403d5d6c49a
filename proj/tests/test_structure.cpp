#include "doctest.h"

#include "dense_oracle.hpp"
#include "mlfsi/driver.hpp"
#include "test_util.hpp"

using namespace mlfsi;

namespace {

FormWeights wall_weights() {
  FormWeights w;
  w.rho_s1h = 0.8;
  w.c2 = 1.3;
  w.koiter_c0 = 0.4;
  w.koiter_d0 = 0.3;
  w.koiter_d1 = 0.1;
  w.lambda = 2.0;
  w.mu_s = 0.7;
  w.rho_s2 = 1.2;
  return w;
}

StructureState zero_state(const StructureSystem& sys) {
  return {Vector::Zero(static_cast<Eigen::Index>(sys.wall_size())),
          Vector::Zero(static_cast<Eigen::Index>(sys.wall_size())),
          Vector::Zero(static_cast<Eigen::Index>(sys.solid_size())),
          Vector::Zero(static_cast<Eigen::Index>(sys.solid_size()))};
}

}  // namespace

TEST_CASE("zero state stays zero") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(4, 4, 2), wall_weights());
  const auto s0 = zero_state(pb.structure);
  const auto s1 = structure_advance(s0, 0.1, pb.structure);
  CHECK(s1.eta.norm() == 0.0);
  CHECK(s1.v.norm() == 0.0);
  CHECK(s1.d.norm() == 0.0);
  CHECK(s1.V.norm() == 0.0);
  CHECK(structure_energy_audit(s0, s1, 0.1, pb.structure).residual == 0.0);
}

TEST_CASE("equilibrium is a fixed point") {
  // At rest in the stiffness kernel of the constrained space (only the zero displacement,
  // since the thin wall ends and the lateral solid ends are clamped).
  auto pb = CoupledProblem::with_defaults(testutil::geometry(2, 2, 1), wall_weights());
  const auto s0 = zero_state(pb.structure);
  for (int i = 0; i < 5; ++i) CHECK(structure_advance(s0, 0.5, pb.structure).eta.norm() == 0.0);
}

TEST_CASE("single step matches the dense oracle") {
  const auto w = wall_weights();
  auto pb = CoupledProblem::with_defaults(testutil::geometry(2, 2, 1, 1.4, 0.9, 0.5), w);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = testutil::random_state(pb, 0.3, seed).structure();
    const auto out = structure_advance(s, 0.1, pb.structure);
    const auto ref = oracle::structure_step(pb.solid_mesh, pb.maps.wall_z, w, s.eta, s.v, s.d,
                                            s.V, 0.1);
    CHECK((out.eta - ref.eta).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((out.v - ref.v).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((out.d - ref.d).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((out.V - ref.V).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(out.eta.norm() > 0.0);
  }
}

TEST_CASE("output stays admissible") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(4, 4, 2), wall_weights());
  const auto out = structure_advance(testutil::random_state(pb, 0.2, 9).structure(), 0.05,
                                     pb.structure);
  for (const auto& t : pb.maps.triples) {
    CHECK(out.d[static_cast<Eigen::Index>(t.solid_radial_dof)] ==
          out.eta[static_cast<Eigen::Index>(t.wall_node)]);
    CHECK(out.V[static_cast<Eigen::Index>(t.solid_radial_dof)] ==
          out.v[static_cast<Eigen::Index>(t.wall_node)]);
    if (t.dirichlet) CHECK(out.eta[static_cast<Eigen::Index>(t.wall_node)] == 0.0);
  }
  for (std::size_t dof : pb.maps.pinned_solid_dofs) CHECK(out.d[static_cast<Eigen::Index>(dof)] == 0.0);
}

TEST_CASE("energy equality and its sensitivity") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(4, 4, 2), wall_weights());
  for (double dt : {1e-1, 1e-3}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto s = testutil::random_state(pb, 0.5, seed).structure();
      const auto out = structure_advance(s, dt, pb.structure);
      const auto a = structure_energy_audit(s, out, dt, pb.structure);
      CHECK(std::abs(a.residual) <= 1e-9 * (1.0 + a.energy_before));
      CHECK(a.wall_damping > 0.0);

      auto bad = out;
      bad.v[2] += 1e-3;
      CHECK(std::abs(structure_energy_audit(s, bad, dt, pb.structure).residual) > 1e-7);
    }
  }
}

TEST_CASE("factorization is reused per time step") {
  auto pb = CoupledProblem::with_defaults(testutil::geometry(2, 2, 1));
  const auto s = zero_state(pb.structure);
  structure_advance(s, 0.1, pb.structure);
  structure_advance(s, 0.1, pb.structure);
  CHECK(pb.structure.factorization_count() == 1);
  structure_advance(s, 0.05, pb.structure);
  CHECK(pb.structure.factorization_count() == 2);
  CHECK_THROWS_AS(structure_advance(s, 0.0, pb.structure), std::invalid_argument);
}

TEST_CASE("unknown count") {
  // 4x2 solid (quadratic): 9 x 5 nodes. Lateral columns (2 x 5 nodes) removed, bottom row keeps
  // only the 7 interior radial traces, identified with the 7 interior wall nodes.
  auto pb = CoupledProblem::with_defaults(testutil::geometry(4, 4, 2));
  CHECK(pb.structure.unknown_count() == 7 + 2 * 7 * 4);
}
