#include "mlfsi/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mlfsi::fem {

GaussRule1D gauss_rule(std::size_t n) {
  if (n < 1 || n > 8) throw std::invalid_argument("gauss_rule: 1 <= n <= 8 required");
  GaussRule1D rule;
  rule.n = n;
  if (n == 1) {
    rule.points[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  // Newton iteration on the Legendre polynomial P_n.
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.points[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double quad1d(int a, double xi) {
  switch (a) {
    case 0: return 0.5 * xi * (xi - 1.0);
    case 1: return 1.0 - xi * xi;
    default: return 0.5 * xi * (xi + 1.0);
  }
}

double quad1d_deriv(int a, double xi) {
  switch (a) {
    case 0: return xi - 0.5;
    case 1: return -2.0 * xi;
    default: return xi + 0.5;
  }
}

double lin1d(int a, double xi) { return a == 0 ? 0.5 * (1.0 - xi) : 0.5 * (1.0 + xi); }

double lin1d_deriv(int a, double /*xi*/) { return a == 0 ? -0.5 : 0.5; }

Q2Values q2_values(double xi, double eta) {
  Q2Values v;
  for (int b = 0; b < 3; ++b) {
    for (int a = 0; a < 3; ++a) {
      const int k = a + 3 * b;
      v.n[k] = quad1d(a, xi) * quad1d(b, eta);
      v.dxi[k] = quad1d_deriv(a, xi) * quad1d(b, eta);
      v.deta[k] = quad1d(a, xi) * quad1d_deriv(b, eta);
    }
  }
  return v;
}

std::array<double, 4> q1_values(double xi, double eta) {
  std::array<double, 4> v{};
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) v[a + 2 * b] = lin1d(a, xi) * lin1d(b, eta);
  return v;
}

}  // namespace mlfsi::fem
