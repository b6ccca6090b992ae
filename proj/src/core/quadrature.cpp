#include "core/quadrature.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace monodg {

namespace {

// Legendre P_n(x) and P_n'(x) on [-1,1] via the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map from [-1,1] to [0,1]; reverse so points come out ascending.
    rule.points[n - 1 - k] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - k] = 0.5 * w;
  }
  return rule;
}

void lagrange_values(std::span<const double> nodes, double x, std::span<double> out) {
  const int n = int(nodes.size());
  assert(int(out.size()) == n);
  for (int i = 0; i < n; ++i) {
    double v = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      v *= (x - nodes[j]) / (nodes[i] - nodes[j]);
    }
    out[i] = v;
  }
}

void lagrange_derivatives(std::span<const double> nodes, double x, std::span<double> out) {
  const int n = int(nodes.size());
  assert(int(out.size()) == n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m == i) continue;
      double term = 1.0 / (nodes[i] - nodes[m]);
      for (int j = 0; j < n; ++j) {
        if (j == i || j == m) continue;
        term *= (x - nodes[j]) / (nodes[i] - nodes[j]);
      }
      sum += term;
    }
    out[i] = sum;
  }
}

}  // namespace monodg
