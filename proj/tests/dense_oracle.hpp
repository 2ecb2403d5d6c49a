#pragma once

// Dense reference assembly with straight loops: its own Gauss rule, Lagrange basis and map to
// physical derivatives. Shares only the node and DOF numbering with the library
// (node j*(2nz+1)+i, vector DOF 2*node+component, pressure node j*(nz+1)+i).

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "mlfsi/forms.hpp"
#include "mlfsi/mesh.hpp"

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline const std::array<double, 3> kPts = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
inline const std::array<double, 3> kWts = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

inline double L2(int a, double x) {
  return a == 0 ? 0.5 * x * (x - 1.0) : a == 1 ? 1.0 - x * x : 0.5 * x * (x + 1.0);
}
inline double dL2(int a, double x) { return a == 0 ? x - 0.5 : a == 1 ? -2.0 * x : x + 0.5; }
inline double L1(int a, double x) { return a == 0 ? 0.5 * (1.0 - x) : 0.5 * (1.0 + x); }

struct Grid {
  double z0, r0, lz, lr;
  int nz, nr;
  explicit Grid(const mlfsi::FemMesh& m) : z0(m.z0), r0(m.r0), lz(m.lz), lr(m.lr), nz(m.nz), nr(m.nr) {}
  int nodes_z() const { return 2 * nz + 1; }
  int nodes_r() const { return 2 * nr + 1; }
  int nodes() const { return nodes_z() * nodes_r(); }
  int node(int i, int j) const { return j * nodes_z() + i; }
  int pnode(int i, int j) const { return j * (nz + 1) + i; }
  double hz() const { return lz / nz; }
  double hr() const { return lr / nr; }
};

/// Everything known at one quadrature point of an element.
struct Point {
  int ez, er, qa, qb;
  double z, r, weight;                 // reference coordinates, w_a w_b hz hr / 4
  std::array<double, 9> n, dz, dr;     // Q2 values and reference derivatives (local a + 3b)
  std::array<double, 4> p;             // Q1 values (local a + 2b)
  std::array<int, 9> nodes;
  std::array<int, 4> pnodes;
  double eta = 0, deta = 0, v = 0;     // wall data at this z
  double J = 1, zr = 0, rr = 1;        // ALE: d/dz -> dz + zr dr, d/dr -> rr dr
  // Physical gradients of each Q2 function.
  double gz(int a) const { return dz[a] + zr * dr[a]; }
  double gr(int a) const { return rr * dr[a]; }
};

/// Calls f(Point) at every quadrature point. `eta` and `v` are wall-node vectors (may be
/// empty for the reference map).
inline void for_each_point(const Grid& g, double R, const Vec& eta, const Vec& v,
                           const std::function<void(const Point&)>& f) {
  const double hz = g.hz(), hr = g.hr();
  for (int er = 0; er < g.nr; ++er)
    for (int ez = 0; ez < g.nz; ++ez)
      for (int qb = 0; qb < 3; ++qb)
        for (int qa = 0; qa < 3; ++qa) {
          Point P;
          P.ez = ez;
          P.er = er;
          P.qa = qa;
          P.qb = qb;
          const double xi = kPts[qa], ze = kPts[qb];
          P.z = g.z0 + (ez + 0.5 * (xi + 1.0)) * hz;
          P.r = g.r0 + (er + 0.5 * (ze + 1.0)) * hr;
          P.weight = kWts[qa] * kWts[qb] * hz * hr / 4.0;
          for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a) {
              const int k = a + 3 * b;
              P.n[k] = L2(a, xi) * L2(b, ze);
              P.dz[k] = dL2(a, xi) * L2(b, ze) * 2.0 / hz;
              P.dr[k] = L2(a, xi) * dL2(b, ze) * 2.0 / hr;
              P.nodes[k] = g.node(2 * ez + a, 2 * er + b);
            }
          for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) {
              P.p[a + 2 * b] = L1(a, xi) * L1(b, ze);
              P.pnodes[a + 2 * b] = g.pnode(ez + a, er + b);
            }
          if (eta.size()) {
            for (int a = 0; a < 3; ++a) {
              P.eta += eta[2 * ez + a] * L2(a, xi);
              P.deta += eta[2 * ez + a] * dL2(a, xi) * 2.0 / hz;
            }
          }
          if (v.size())
            for (int a = 0; a < 3; ++a) P.v += v[2 * ez + a] * L2(a, xi);
          P.J = 1.0 + P.eta / R;
          const double s = P.r / R;
          P.zr = -s * P.deta / P.J;
          P.rr = 1.0 / P.J;
          f(P);
        }
}

/// Weighted scalar mass with `comps` interleaved copies; weight(P) at each point.
inline Mat mass(const Grid& g, int comps, const std::function<double(const Point&)>& weight,
                double R = 1.0, const Vec& eta = {}) {
  const int n = g.nodes() * comps;
  Mat M = Mat::Zero(n, n);
  for_each_point(g, R, eta, {}, [&](const Point& P) {
    const double w = weight(P) * P.weight;
    for (int a = 0; a < 9; ++a)
      for (int b = 0; b < 9; ++b)
        for (int c = 0; c < comps; ++c)
          M(comps * P.nodes[a] + c, comps * P.nodes[b] + c) += w * P.n[a] * P.n[b];
  });
  return M;
}

/// Physical gradient matrix G[c][k] = d_k (phi_a e_c)_c of a vector basis function.
inline Eigen::Matrix2d vector_gradient(const Point& P, int a, int c) {
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  G(c, 0) = P.gz(a);
  G(c, 1) = P.gr(a);
  return G;
}

/// 2 mu int J D(phi_i) : D(phi_j).
inline Mat stiffness(const Grid& g, double R, const Vec& eta, double mu) {
  const int n = 2 * g.nodes();
  Mat K = Mat::Zero(n, n);
  for_each_point(g, R, eta, {}, [&](const Point& P) {
    for (int a = 0; a < 9; ++a)
      for (int c = 0; c < 2; ++c) {
        const Eigen::Matrix2d Ga = vector_gradient(P, a, c);
        const Eigen::Matrix2d Da = 0.5 * (Ga + Ga.transpose());
        for (int b = 0; b < 9; ++b)
          for (int d = 0; d < 2; ++d) {
            const Eigen::Matrix2d Gb = vector_gradient(P, b, d);
            const Eigen::Matrix2d Db = 0.5 * (Gb + Gb.transpose());
            K(2 * P.nodes[a] + c, 2 * P.nodes[b] + d) +=
                2.0 * mu * P.J * P.weight * (Da.cwiseProduct(Db)).sum();
          }
      }
  });
  return K;
}

struct Advection {
  Mat skew, ale_mass;
};

/// rho/2 int J [((b.grad) phi_j).phi_i - ((b.grad) phi_i).phi_j], b = u - (0, v s), and
/// rho/2 int (v/R) phi_i.phi_j.
inline Advection advection(const Grid& g, double R, const Vec& eta, const Vec& v, const Vec& u,
                           double rho) {
  const int n = 2 * g.nodes();
  Advection A{Mat::Zero(n, n), Mat::Zero(n, n)};
  for_each_point(g, R, eta, v, [&](const Point& P) {
    double bz = 0.0, br = 0.0;
    for (int a = 0; a < 9; ++a) {
      bz += u[2 * P.nodes[a]] * P.n[a];
      br += u[2 * P.nodes[a] + 1] * P.n[a];
    }
    br -= P.v * P.r / R;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        const double tj = bz * P.gz(j) + br * P.gr(j);
        const double ti = bz * P.gz(i) + br * P.gr(i);
        for (int c = 0; c < 2; ++c) {
          A.skew(2 * P.nodes[i] + c, 2 * P.nodes[j] + c) +=
              0.5 * rho * P.J * P.weight * (tj * P.n[i] - ti * P.n[j]);
          A.ale_mass(2 * P.nodes[i] + c, 2 * P.nodes[j] + c) +=
              0.5 * rho * (P.v / R) * P.weight * P.n[i] * P.n[j];
        }
      }
  });
  return A;
}

/// B(k, j) = int J psi_k div^eta phi_j.
inline Mat divergence(const Grid& g, double R, const Vec& eta) {
  const int np = (g.nz + 1) * (g.nr + 1);
  Mat B = Mat::Zero(np, 2 * g.nodes());
  for_each_point(g, R, eta, {}, [&](const Point& P) {
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 9; ++a) {
        B(P.pnodes[k], 2 * P.nodes[a]) += P.J * P.weight * P.p[k] * P.gz(a);
        B(P.pnodes[k], 2 * P.nodes[a] + 1) += P.J * P.weight * P.p[k] * P.gr(a);
      }
  });
  return B;
}

/// int 2 mu_s D(phi_i):D(phi_j) + lambda div phi_i div phi_j (reference map).
inline Mat elasticity(const Grid& g, double mu_s, double lambda) {
  const int n = 2 * g.nodes();
  Mat K = Mat::Zero(n, n);
  for_each_point(g, 1.0, {}, {}, [&](const Point& P) {
    for (int a = 0; a < 9; ++a)
      for (int c = 0; c < 2; ++c) {
        const Eigen::Matrix2d Ga = vector_gradient(P, a, c);
        const Eigen::Matrix2d Da = 0.5 * (Ga + Ga.transpose());
        for (int b = 0; b < 9; ++b)
          for (int d = 0; d < 2; ++d) {
            const Eigen::Matrix2d Gb = vector_gradient(P, b, d);
            const Eigen::Matrix2d Db = 0.5 * (Gb + Gb.transpose());
            K(2 * P.nodes[a] + c, 2 * P.nodes[b] + d) +=
                P.weight * (2.0 * mu_s * Da.cwiseProduct(Db).sum() + lambda * Ga.trace() * Gb.trace());
          }
      }
  });
  return K;
}

struct Wall {
  Mat l2, grad;
};

/// 1D quadratic mass and gradient matrices on wall nodes (element e has nodes 2e..2e+2).
inline Wall wall(const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  Wall W{Mat::Zero(n, n), Mat::Zero(n, n)};
  for (int e = 0; 2 * e + 2 < n; ++e) {
    const double h = z[2 * e + 2] - z[2 * e];
    for (int q = 0; q < 3; ++q) {
      const double w = kWts[q] * h / 2.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          W.l2(2 * e + a, 2 * e + b) += w * L2(a, kPts[q]) * L2(b, kPts[q]);
          W.grad(2 * e + a, 2 * e + b) +=
              w * dL2(a, kPts[q]) * dL2(b, kPts[q]) * 4.0 / (h * h);
        }
    }
  }
  return W;
}

/// g[2 node] = int phi_node dr along z = z_edge.
inline Vec boundary_flux(const Grid& g, bool outlet) {
  Vec f = Vec::Zero(2 * g.nodes());
  const int i = outlet ? 2 * g.nz : 0;
  for (int er = 0; er < g.nr; ++er)
    for (int q = 0; q < 3; ++q)
      for (int b = 0; b < 3; ++b)
        f[2 * g.node(i, 2 * er + b)] += kWts[q] * g.hr() / 2.0 * L2(b, kPts[q]);
  return f;
}

// ---------------------------------------------------------------------------------------------
// Dense single-step solves

/// Selection matrix from free flags (n_full x n_free).
inline Mat selection(const std::vector<bool>& free) {
  int nf = 0;
  for (bool f : free) nf += f;
  Mat P = Mat::Zero(static_cast<int>(free.size()), nf);
  int k = 0;
  for (std::size_t i = 0; i < free.size(); ++i)
    if (free[i]) P(static_cast<int>(i), k++) = 1.0;
  return P;
}

inline bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

struct StructureOut {
  Vec eta, v, d, V;
};

/// Backward Euler on [eta; d]: thin wall ends fixed, solid lateral ends fixed, bottom d_z = 0,
/// bottom d_r identified with eta.
inline StructureOut structure_step(const mlfsi::FemMesh& solid, const std::vector<double>& wall_z,
                                   const mlfsi::FormWeights& w, const Vec& eta, const Vec& v,
                                   const Vec& d, const Vec& V, double dt) {
  const Grid g(solid);
  const int nw = static_cast<int>(wall_z.size()), ns = 2 * g.nodes(), n = nw + ns;
  const Wall W = wall(wall_z);
  const Mat Ms = mass(g, 2, [&](const Point&) { return w.rho_s2; });
  const Mat Ks = elasticity(g, w.mu_s, w.lambda);
  Mat M = Mat::Zero(n, n), K = Mat::Zero(n, n), D = Mat::Zero(n, n);
  M.topLeftCorner(nw, nw) = w.rho_s1h * W.l2;
  K.topLeftCorner(nw, nw) = w.c2 * W.grad + w.koiter_c0 * W.l2;
  D.topLeftCorner(nw, nw) = w.koiter_d0 * W.l2 + w.koiter_d1 * W.grad;
  M.bottomRightCorner(ns, ns) = Ms;
  K.bottomRightCorner(ns, ns) = Ks;

  // Columns: free thin-wall nodes (each also drives the bottom d_r), then free solid DOFs.
  std::vector<std::array<int, 2>> cols;  // (row in full vector, optional second row)
  for (int i = 1; i + 1 < nw; ++i) cols.push_back({i, nw + 2 * g.node(i, 0) + 1});
  for (int j = 1; j < g.nodes_r(); ++j)
    for (int i = 1; i + 1 < g.nodes_z(); ++i)
      for (int c = 0; c < 2; ++c) cols.push_back({nw + 2 * g.node(i, j) + c, -1});
  Mat P = Mat::Zero(n, static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    P(cols[k][0], static_cast<int>(k)) = 1.0;
    if (cols[k][1] >= 0) P(cols[k][1], static_cast<int>(k)) = 1.0;
  }
  Vec x(n), y(n);
  x << eta, d;
  y << v, V;
  const Mat A = P.transpose() * (M + dt * dt * K + dt * D) * P;
  const Vec b = P.transpose() * (M * (x + dt * y) + dt * D * x);
  const Vec xn = P * A.fullPivLu().solve(b);
  const Vec yn = (xn - x) / dt;
  return {xn.head(nw), yn.head(nw), xn.tail(ns), yn.tail(ns)};
}

struct FluidOut {
  Vec u, p;
};

/// Monolithic fluid step with the wall inertia on the interface radial DOFs.
inline FluidOut fluid_step(const mlfsi::FemMesh& fluid, const std::vector<double>& wall_z,
                           const mlfsi::FormWeights& w, const Vec& u, const Vec& v_half,
                           const Vec& eta_n, double dt, double p_in, double p_out,
                           bool freeze = false) {
  const Grid g(fluid);
  const double R = fluid.lr;
  const int nv = 2 * g.nodes(), np = (g.nz + 1) * (g.nr + 1);
  const Mat MJ = mass(g, 2, [](const Point& P) { return P.J; }, R, eta_n);
  const Advection adv = advection(g, R, eta_n, v_half, u, w.rho_f);
  const Mat K = stiffness(g, R, eta_n, w.mu);
  const Mat B = divergence(g, R, eta_n);
  const Wall W = wall(wall_z);
  Mat C = Mat::Zero(nv, nv);
  Vec vh = Vec::Zero(nv);
  const int top = g.nodes_r() - 1;
  for (int i = 0; i < g.nodes_z(); ++i) {
    vh[2 * g.node(i, top) + 1] = v_half[i];
    for (int k = 0; k < g.nodes_z(); ++k)
      C(2 * g.node(i, top) + 1, 2 * g.node(k, top) + 1) = w.rho_s1h * W.l2(i, k) / dt;
  }
  const Mat A = (w.rho_f / dt) * MJ + adv.skew + adv.ale_mass + K + C;
  const Vec rhs = (w.rho_f / dt) * MJ * u + C * vh + p_in * boundary_flux(g, false) -
                  p_out * boundary_flux(g, true);

  std::vector<bool> free(nv, true);
  for (int j = 0; j < g.nodes_r(); ++j)
    for (int i = 0; i < g.nodes_z(); ++i) {
      const int k = g.node(i, j);
      if (j == top) free[2 * k] = false;
      if (j == top && freeze) free[2 * k + 1] = false;
      if (j == 0 || i == 0 || i == g.nodes_z() - 1) free[2 * k + 1] = false;
    }
  const Mat P = selection(free);
  const int nu = static_cast<int>(P.cols());
  Mat S = Mat::Zero(nu + np, nu + np);
  S.topLeftCorner(nu, nu) = P.transpose() * A * P;
  S.bottomLeftCorner(np, nu) = -B * P;
  S.topRightCorner(nu, np) = -(B * P).transpose();
  Vec b = Vec::Zero(nu + np);
  b.head(nu) = P.transpose() * rhs;
  const Vec x = S.fullPivLu().solve(b);
  return {P * x.head(nu), x.tail(np)};
}

}  // namespace oracle
