#pragma once

// Lagrange shape functions and Gauss-Legendre rules on the reference interval [-1, 1]
// and square [-1, 1]^2.  Tensor-product ordering: local index = a + 3*b (quadratic) or
// a + 2*b (linear), with a running along z and b along r.

#include <array>
#include <cstddef>

namespace mlfsi::fem {

/// 1D Gauss-Legendre rule with n points.
struct GaussRule1D {
  std::size_t n = 0;
  std::array<double, 8> points{};
  std::array<double, 8> weights{};
};

/// Gauss-Legendre rule with 1 <= n <= 8 points.
GaussRule1D gauss_rule(std::size_t n);

/// The 3-point rule used by every assembly and energy evaluation in the library.
inline constexpr std::size_t kQuadPoints1D = 3;
inline constexpr std::size_t kQuadPoints2D = kQuadPoints1D * kQuadPoints1D;

// 1D quadratic Lagrange basis with nodes -1, 0, 1.
double quad1d(int a, double xi);
double quad1d_deriv(int a, double xi);

// 1D linear Lagrange basis with nodes -1, 1.
double lin1d(int a, double xi);
double lin1d_deriv(int a, double xi);

/// Values and reference derivatives of the 9 biquadratic functions at (xi, eta).
struct Q2Values {
  std::array<double, 9> n{};
  std::array<double, 9> dxi{};
  std::array<double, 9> deta{};
};
Q2Values q2_values(double xi, double eta);

/// Values of the 4 bilinear functions at (xi, eta).
std::array<double, 4> q1_values(double xi, double eta);

}  // namespace mlfsi::fem
