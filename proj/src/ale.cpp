#include "mlfsi/ale.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mlfsi/basis.hpp"
#include "mlfsi/errors.hpp"

namespace mlfsi::ale {

double AleOperators::min_jacobian() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : points) m = std::min(m, p.jac);
  return m;
}

AleOperators evaluate_ale(const Vector& eta, const Vector& v_for_w, const FemMesh& fluid) {
  const std::size_t nwall = fluid.nodes_z();
  if (static_cast<std::size_t>(eta.size()) != nwall ||
      static_cast<std::size_t>(v_for_w.size()) != nwall)
    throw std::invalid_argument("evaluate_ale: interface vectors do not match the mesh");

  const auto rule = fem::gauss_rule(fem::kQuadPoints1D);
  const double radius = fluid.lr;
  for (std::size_t i = 0; i < nwall; ++i) {
    const double jac = 1.0 + eta[static_cast<Eigen::Index>(i)] / radius;
    if (!(jac > 0.0)) {
      std::ostringstream os;
      os << "ALE map degenerate: J = " << jac << " at wall node " << i;
      throw DegeneracyError(os.str(), fluid.node_z[fluid.node_index(i, fluid.nodes_r() - 1)],
                            jac);
    }
  }

  AleOperators ops;
  ops.radius = radius;
  ops.points.resize(fluid.element_count() * fem::kQuadPoints2D);

  for (std::size_t e = 0; e < fluid.element_count(); ++e) {
    const auto nodes = fluid.element_nodes(e);
    const double z0 = fluid.node_z[nodes[0]];
    const double r0 = fluid.node_r[nodes[0]];
    const double hz = fluid.node_z[nodes[2]] - z0;
    const double hr = fluid.node_r[nodes[6]] - r0;
    const std::size_t ez = e % static_cast<std::size_t>(fluid.nz);

    for (std::size_t qb = 0; qb < rule.n; ++qb) {
      for (std::size_t qa = 0; qa < rule.n; ++qa) {
        const double xi = rule.points[qa];
        const double et = rule.points[qb];
        AlePoint p;
        p.z = z0 + 0.5 * (xi + 1.0) * hz;
        p.r = r0 + 0.5 * (et + 1.0) * hr;
        p.weight = rule.weights[qa] * rule.weights[qb] * 0.25 * hz * hr;

        double eta_q = 0.0, deta_q = 0.0, v_q = 0.0;
        for (int a = 0; a < 3; ++a) {
          const auto k = static_cast<Eigen::Index>(2 * ez + static_cast<std::size_t>(a));
          eta_q += eta[k] * fem::quad1d(a, xi);
          deta_q += eta[k] * fem::quad1d_deriv(a, xi) * 2.0 / hz;
          v_q += v_for_w[k] * fem::quad1d(a, xi);
        }
        p.jac = 1.0 + eta_q / radius;
        if (!(p.jac > 0.0)) {
          std::ostringstream os;
          os << "ALE map degenerate: J = " << p.jac << " at z = " << p.z;
          throw DegeneracyError(os.str(), p.z, p.jac);
        }
        p.deta_dz = deta_q;
        p.s = p.r / radius;
        p.zr = -p.s * deta_q / p.jac;
        p.rr = 1.0 / p.jac;
        p.v = v_q;
        p.w_r = v_q * p.s;
        ops.points[e * fem::kQuadPoints2D + qa + rule.n * qb] = p;
      }
    }
  }
  return ops;
}

AleOperators reference_ale(const FemMesh& fluid) {
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(fluid.nodes_z()));
  return evaluate_ale(zero, zero, fluid);
}

RadiusBounds check_validity(const Vector& eta, double radius, const ValidityMonitor& mon) {
  RadiusBounds b;
  if (eta.size() == 0) throw std::invalid_argument("check_validity: empty interface vector");
  b.min_radius = std::numeric_limits<double>::infinity();
  b.max_radius = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double rad = radius + eta[i];
    if (rad < b.min_radius) {
      b.min_radius = rad;
      b.argmin = static_cast<std::size_t>(i);
    }
    b.max_radius = std::max(b.max_radius, rad);
  }
  b.degenerate = b.min_radius <= mon.r_min;
  b.above_max = b.max_radius >= mon.r_max;
  return b;
}

}  // namespace mlfsi::ale
