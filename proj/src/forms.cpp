#include "mlfsi/forms.hpp"

#include <array>
#include <sstream>
#include <stdexcept>

#include "mlfsi/basis.hpp"
#include "mlfsi/errors.hpp"

namespace mlfsi {

void FormWeights::validate() const {
  std::ostringstream err;
  if (!(rho_f > 0.0)) err << "physics: rho_f must be > 0; ";
  if (!(mu > 0.0)) err << "physics: mu must be > 0; ";
  if (!(rho_s1h > 0.0)) err << "physics: rho_s1h must be > 0; ";
  if (!(rho_s2 > 0.0)) err << "physics: rho_s2 must be > 0; ";
  if (!(c2 > 0.0)) err << "physics: c2 must be > 0; ";
  if (!(koiter_c0 >= 0.0)) err << "physics: C0 must be >= 0; ";
  if (!(koiter_d0 >= 0.0)) err << "physics: D0 must be >= 0; ";
  if (!(koiter_d1 >= 0.0)) err << "physics: D1 must be >= 0; ";
  if (koiter_c2 != 0.0) err << "physics: C2 is not supported (fourth-order wall term); ";
  if (koiter_d2 != 0.0) err << "physics: D2 is not supported (fourth-order wall term); ";
  if (!(mu_s > 0.0)) err << "physics: mu_s must be > 0; ";
  if (!(lambda + mu_s > 0.0)) err << "physics: lambda + mu_s must be > 0; ";
  if (!err.str().empty()) throw ConfigError(err.str());
}

namespace fem {

namespace {

struct ReferenceTables {
  GaussRule1D rule;
  std::array<Q2Values, kQuadPoints2D> q2;
  std::array<std::array<double, 4>, kQuadPoints2D> q1;
  std::array<double, kQuadPoints2D> weight;  // w_a w_b
};

const ReferenceTables& tables() {
  static const ReferenceTables t = [] {
    ReferenceTables r;
    r.rule = gauss_rule(kQuadPoints1D);
    for (std::size_t qb = 0; qb < kQuadPoints1D; ++qb)
      for (std::size_t qa = 0; qa < kQuadPoints1D; ++qa) {
        const std::size_t q = qa + kQuadPoints1D * qb;
        r.q2[q] = q2_values(r.rule.points[qa], r.rule.points[qb]);
        r.q1[q] = q1_values(r.rule.points[qa], r.rule.points[qb]);
        r.weight[q] = r.rule.weights[qa] * r.rule.weights[qb];
      }
    return r;
  }();
  return t;
}

void require_ale(const FemMesh& mesh, const ale::AleOperators& ale) {
  if (ale.points.size() != mesh.element_count() * kQuadPoints2D)
    throw std::invalid_argument("ALE operators do not match the mesh");
}

// Transformed gradients of the 9 element functions at one quadrature point.
struct Gradients {
  std::array<double, 9> gz, gr;
};

Gradients transformed(const Q2Values& v, const ElementGeometry& g, const ale::AlePoint* p) {
  Gradients out;
  for (int a = 0; a < 9; ++a) {
    const double dz = v.dxi[a] * 2.0 / g.hz;
    const double dr = v.deta[a] * 2.0 / g.hr;
    out.gz[a] = p ? dz + p->zr * dr : dz;
    out.gr[a] = p ? p->rr * dr : dr;
  }
  return out;
}

}  // namespace

ElementGeometry element_geometry(const FemMesh& mesh, std::size_t e) {
  const auto nodes = mesh.element_nodes(e);
  return {mesh.node_z[nodes[0]], mesh.node_r[nodes[0]],
          mesh.node_z[nodes[2]] - mesh.node_z[nodes[0]],
          mesh.node_r[nodes[6]] - mesh.node_r[nodes[0]]};
}

QuadField jacobian_weights(const ale::AleOperators& ale) {
  QuadField w(ale.points.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = ale.points[k].jac;
  return w;
}

CsrMatrix assemble_weighted_mass(const FemMesh& mesh, std::span<const double> weight,
                                 int components) {
  if (weight.size() != mesh.element_count() * kQuadPoints2D)
    throw std::invalid_argument("assemble_weighted_mass: weight field size mismatch");
  if (components < 1 || components > 2)
    throw std::invalid_argument("assemble_weighted_mass: components must be 1 or 2");
  const auto& t = tables();
  const auto nc = static_cast<std::size_t>(components);
  TripletList trip(nc * mesh.node_count(), nc * mesh.node_count());
  trip.reserve(mesh.element_count() * 81 * nc);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto g = element_geometry(mesh, e);
    std::array<double, 81> local{};
    for (std::size_t q = 0; q < kQuadPoints2D; ++q) {
      const double wq = t.weight[q] * 0.25 * g.hz * g.hr * weight[e * kQuadPoints2D + q];
      for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) local[a * 9 + b] += wq * t.q2[q].n[a] * t.q2[q].n[b];
    }
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b)
        for (std::size_t c = 0; c < nc; ++c)
          trip.add(nc * nodes[a] + c, nc * nodes[b] + c, local[a * 9 + b]);
  }
  return CsrMatrix::from_triplets(trip);
}

CsrMatrix assemble_mass(const FemMesh& mesh, double coefficient, int components) {
  const QuadField w(mesh.element_count() * kQuadPoints2D, coefficient);
  return assemble_weighted_mass(mesh, w, components);
}

CsrMatrix assemble_transformed_stiffness(const FemMesh& mesh, const ale::AleOperators& ale,
                                         double mu) {
  require_ale(mesh, ale);
  const auto& t = tables();
  const std::size_t n = mesh.vector_dof_count();
  TripletList trip(n, n);
  trip.reserve(mesh.element_count() * 324);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto g = element_geometry(mesh, e);
    std::array<double, 324> local{};  // (2a+c) * 18 + (2b+d)
    for (std::size_t q = 0; q < kQuadPoints2D; ++q) {
      const auto& p = ale.at(e, q);
      const auto gr = transformed(t.q2[q], g, &p);
      const double wq = mu * p.jac * t.weight[q] * 0.25 * g.hz * g.hr;
      for (int a = 0; a < 9; ++a) {
        const std::array<double, 2> ga{gr.gz[a], gr.gr[a]};
        for (int b = 0; b < 9; ++b) {
          const std::array<double, 2> gb{gr.gz[b], gr.gr[b]};
          const double dot = ga[0] * gb[0] + ga[1] * gb[1];
          // 2 D(N_a e_c) : D(N_b e_d) = delta_cd grad N_a . grad N_b + d_d N_a d_c N_b
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              local[(2 * a + c) * 18 + 2 * b + d] +=
                  wq * ((c == d ? dot : 0.0) + ga[d] * gb[c]);
        }
      }
    }
    for (int i = 0; i < 18; ++i)
      for (int j = 0; j < 18; ++j)
        trip.add(2 * nodes[i / 2] + i % 2, 2 * nodes[j / 2] + j % 2, local[i * 18 + j]);
  }
  return CsrMatrix::from_triplets(trip);
}

AdvectionOperator assemble_advection(const FemMesh& mesh, const ale::AleOperators& ale,
                                     const Vector& transport, double rho_f) {
  require_ale(mesh, ale);
  if (static_cast<std::size_t>(transport.size()) != mesh.vector_dof_count())
    throw std::invalid_argument("assemble_advection: transport field size mismatch");
  const auto& t = tables();
  const std::size_t n = mesh.vector_dof_count();
  TripletList skew(n, n), mass(n, n);
  skew.reserve(mesh.element_count() * 162);
  mass.reserve(mesh.element_count() * 162);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto g = element_geometry(mesh, e);
    std::array<double, 81> ls{}, lm{};
    for (std::size_t q = 0; q < kQuadPoints2D; ++q) {
      const auto& p = ale.at(e, q);
      const auto& v = t.q2[q];
      const auto gr = transformed(v, g, &p);
      double bz = 0.0, br = 0.0;
      for (int a = 0; a < 9; ++a) {
        bz += transport[static_cast<Eigen::Index>(2 * nodes[a])] * v.n[a];
        br += transport[static_cast<Eigen::Index>(2 * nodes[a] + 1)] * v.n[a];
      }
      br -= p.w_r;
      const double area = t.weight[q] * 0.25 * g.hz * g.hr;
      const double ws = 0.5 * rho_f * p.jac * area;
      const double wm = 0.5 * rho_f * (p.v / ale.radius) * area;
      std::array<double, 9> adv{};
      for (int a = 0; a < 9; ++a) adv[a] = bz * gr.gz[a] + br * gr.gr[a];
      // Row a is the test function, column b the unknown.
      for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b) {
          ls[a * 9 + b] += ws * (adv[b] * v.n[a] - adv[a] * v.n[b]);
          lm[a * 9 + b] += wm * v.n[a] * v.n[b];
        }
    }
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b)
        for (std::size_t c = 0; c < 2; ++c) {
          skew.add(2 * nodes[a] + c, 2 * nodes[b] + c, ls[a * 9 + b]);
          mass.add(2 * nodes[a] + c, 2 * nodes[b] + c, lm[a * 9 + b]);
        }
  }
  return {CsrMatrix::from_triplets(skew), CsrMatrix::from_triplets(mass)};
}

CsrMatrix assemble_transformed_divergence(const FemMesh& mesh, const ale::AleOperators& ale) {
  require_ale(mesh, ale);
  const auto& t = tables();
  TripletList trip(mesh.pressure_node_count(), mesh.vector_dof_count());
  trip.reserve(mesh.element_count() * 72);
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto nodes = mesh.element_nodes(e);
    const auto pnodes = mesh.element_pressure_nodes(e);
    const auto g = element_geometry(mesh, e);
    std::array<double, 72> local{};  // k * 18 + 2b + c
    for (std::size_t q = 0; q < kQuadPoints2D; ++q) {
      const auto& p = ale.at(e, q);
      const auto gr = transformed(t.q2[q], g, &p);
      const double wq = p.jac * t.weight[q] * 0.25 * g.hz * g.hr;
      for (int k = 0; k < 4; ++k)
        for (int b = 0; b < 9; ++b) {
          local[k * 18 + 2 * b] += wq * t.q1[q][k] * gr.gz[b];
          local[k * 18 + 2 * b + 1] += wq * t.q1[q][k] * gr.gr[b];
        }
    }
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 18; ++j) trip.add(pnodes[k], 2 * nodes[j / 2] + j % 2, local[k * 18 + j]);
  }
  return CsrMatrix::from_triplets(trip);
}

CsrMatrix assemble_thick_elasticity(const FemMesh& solid, const FormWeights& w) {
  const auto& t = tables();
  const std::size_t n = solid.vector_dof_count();
  TripletList trip(n, n);
  trip.reserve(solid.element_count() * 324);
  for (std::size_t e = 0; e < solid.element_count(); ++e) {
    const auto nodes = solid.element_nodes(e);
    const auto g = element_geometry(solid, e);
    std::array<double, 324> local{};
    for (std::size_t q = 0; q < kQuadPoints2D; ++q) {
      const auto gr = transformed(t.q2[q], g, nullptr);
      const double wq = t.weight[q] * 0.25 * g.hz * g.hr;
      for (int a = 0; a < 9; ++a) {
        const std::array<double, 2> ga{gr.gz[a], gr.gr[a]};
        for (int b = 0; b < 9; ++b) {
          const std::array<double, 2> gb{gr.gz[b], gr.gr[b]};
          const double dot = ga[0] * gb[0] + ga[1] * gb[1];
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              local[(2 * a + c) * 18 + 2 * b + d] +=
                  wq * (w.mu_s * ((c == d ? dot : 0.0) + ga[d] * gb[c]) +
                        w.lambda * ga[c] * gb[d]);
        }
      }
    }
    for (int i = 0; i < 18; ++i)
      for (int j = 0; j < 18; ++j)
        trip.add(2 * nodes[i / 2] + i % 2, 2 * nodes[j / 2] + j % 2, local[i * 18 + j]);
  }
  return CsrMatrix::from_triplets(trip);
}

ThinWallMatrices assemble_thin_wall(std::span<const double> wall_z, const FormWeights& w) {
  if (w.koiter_c2 != 0.0 || w.koiter_d2 != 0.0)
    throw ConfigError("thin wall: C2/D2 fourth-order terms are not supported");
  if (wall_z.size() < 3 || wall_z.size() % 2 == 0)
    throw std::invalid_argument("assemble_thin_wall: need 2*ne+1 wall nodes");
  const auto& t = tables();
  const std::size_t n = wall_z.size();
  const std::size_t ne = (n - 1) / 2;
  TripletList mass(n, n), grad(n, n);
  for (std::size_t e = 0; e < ne; ++e) {
    const double h = wall_z[2 * e + 2] - wall_z[2 * e];
    for (std::size_t q = 0; q < t.rule.n; ++q) {
      const double x = t.rule.points[q];
      const double wq = t.rule.weights[q] * 0.5 * h;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          mass.add(2 * e + a, 2 * e + b, wq * quad1d(a, x) * quad1d(b, x));
          grad.add(2 * e + a, 2 * e + b,
                   wq * quad1d_deriv(a, x) * quad1d_deriv(b, x) * 4.0 / (h * h));
        }
    }
  }
  ThinWallMatrices m;
  m.l2_mass = CsrMatrix::from_triplets(mass);
  m.gradient = CsrMatrix::from_triplets(grad);
  m.mass = m.l2_mass.scaled(w.rho_s1h);
  m.stiffness = CsrMatrix::add(w.c2, m.gradient, w.koiter_c0, m.l2_mass);
  m.damping = CsrMatrix::add(w.koiter_d0, m.l2_mass, w.koiter_d1, m.gradient);
  return m;
}

Vector assemble_boundary_flux(const FemMesh& fluid, BoundaryTag tag) {
  if (tag != kInlet && tag != kOutlet)
    throw std::invalid_argument("assemble_boundary_flux: tag must be inlet or outlet");
  const auto& t = tables();
  const std::size_t i = tag == kInlet ? 0 : fluid.nodes_z() - 1;
  Vector g = Vector::Zero(static_cast<Eigen::Index>(fluid.vector_dof_count()));
  for (std::size_t er = 0; er < static_cast<std::size_t>(fluid.nr); ++er) {
    const double r0 = fluid.node_r[fluid.node_index(i, 2 * er)];
    const double h = fluid.node_r[fluid.node_index(i, 2 * er + 2)] - r0;
    for (std::size_t q = 0; q < t.rule.n; ++q) {
      const double wq = t.rule.weights[q] * 0.5 * h;
      for (int a = 0; a < 3; ++a)
        g[static_cast<Eigen::Index>(2 * fluid.node_index(i, 2 * er + a))] +=
            wq * quad1d(a, t.rule.points[q]);
    }
  }
  return g;
}

}  // namespace fem
}  // namespace mlfsi
