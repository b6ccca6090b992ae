#ifndef MONODG_CORE_QUADRATURE_HPP
#define MONODG_CORE_QUADRATURE_HPP

#include <span>
#include <vector>

namespace monodg {

// One-dimensional quadrature rule on the reference interval [0,1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1 on [0,1]
  int size() const { return int(points.size()); }
};

// Gauss-Legendre rule with n points, exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n);

// Lagrange basis through `nodes`, evaluated at `x`. out[i] = l_i(x).
void lagrange_values(std::span<const double> nodes, double x, std::span<double> out);

// First derivatives of the Lagrange basis at `x`.
void lagrange_derivatives(std::span<const double> nodes, double x, std::span<double> out);

}  // namespace monodg

#endif
