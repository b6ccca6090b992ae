#include "core/basis.hpp"

#include <stdexcept>

namespace monodg {

Basis::Basis(int order, int dim) : order_(order), dim_(dim) {
  if (order < 1 || order > 3)
    throw std::invalid_argument("basis order must be in [1,3]");
  if (dim < 1 || dim > 2) throw std::invalid_argument("basis dim must be 1 or 2");
  const int n = order + 1;
  n_dofs_ = 1;
  for (int d = 0; d < dim; ++d) n_dofs_ *= n;
  rule_ = gauss_legendre(n);

  deriv_ = Mat(n, n);
  std::vector<double> buf(n);
  for (int i = 0; i < n; ++i) {
    lagrange_derivatives(rule_.points, rule_.points[i], buf);
    for (int j = 0; j < n; ++j) deriv_(i, j) = buf[j];
  }

  for (int side = 0; side < 2; ++side) {
    bnd_val_[side].resize(n);
    bnd_der_[side].resize(n);
    lagrange_values(rule_.points, double(side), bnd_val_[side]);
    lagrange_derivatives(rule_.points, double(side), bnd_der_[side]);
  }

  for (int half = 0; half < 2; ++half) {
    half_val_[half] = Mat(n, n);
    half_der_[half] = Mat(n, n);
    restrict_[half] = Mat(n, n);
    for (int i = 0; i < n; ++i) {
      const double x = 0.5 * (rule_.points[i] + half);
      lagrange_values(rule_.points, x, buf);
      for (int j = 0; j < n; ++j) half_val_[half](i, j) = buf[j];
      lagrange_derivatives(rule_.points, x, buf);
      for (int j = 0; j < n; ++j) half_der_[half](i, j) = buf[j];
    }
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < n; ++q)
        restrict_[half](i, q) =
            rule_.weights[q] / (2.0 * rule_.weights[i]) * half_val_[half](q, i);
  }
}

}  // namespace monodg
