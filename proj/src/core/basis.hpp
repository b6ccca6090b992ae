#ifndef MONODG_CORE_BASIS_HPP
#define MONODG_CORE_BASIS_HPP

#include <array>
#include <vector>

#include "core/dense.hpp"
#include "core/quadrature.hpp"

namespace monodg {

// Nodal tensor-product basis on the reference element [0,1]^dim.
//
// The 1D nodes are the Gauss-Legendre points, so they are strictly interior
// and collocating the quadrature at the nodes makes the element mass matrix
// exactly diagonal. All tables below are per axis; dim-dimensional shape
// functions are products of 1D Lagrange polynomials.
class Basis {
 public:
  Basis(int order, int dim);

  int order() const { return order_; }
  int dim() const { return dim_; }
  int nodes_per_axis() const { return order_ + 1; }
  int nodes_per_element() const { return n_dofs_; }

  const std::vector<double>& nodes_1d() const { return rule_.points; }
  const std::vector<double>& weights_1d() const { return rule_.weights; }

  // d/dx of 1D Lagrange polynomial j at node i: deriv_1d()(i, j).
  const Mat& deriv_1d() const { return deriv_; }

  // Values and derivatives of the 1D basis at the interval endpoints.
  const std::vector<double>& trace_value(int side) const { return bnd_val_[side]; }
  const std::vector<double>& trace_deriv(int side) const { return bnd_der_[side]; }

  // Values l_j((x_i + half)/2): the coarse-side 1D basis traced onto a child
  // sub-interval, tabulated at the quadrature points. half is 0 or 1.
  const Mat& half_values(int half) const { return half_val_[half]; }
  const Mat& half_derivs(int half) const { return half_der_[half]; }

  // 1D embedding P(i, j) = l_j((x_i + half)/2): parent coefficients to child
  // nodal values. Exact for polynomials up to `order`.
  const Mat& child_embed(int half) const { return half_val_[half]; }

  // 1D L2 restriction R(i, q) = w_q/(2 w_i) * l_i((x_q + half)/2): child
  // nodal values to parent coefficients (both children summed give the
  // parent L2 projection).
  const Mat& child_restrict(int half) const { return restrict_[half]; }

  // Tensor node numbering: node = ix + (p+1)*iy.
  int node_index(int ix, int iy) const { return ix + nodes_per_axis() * iy; }
  std::array<int, 2> node_coords(int node) const {
    return {node % nodes_per_axis(), node / nodes_per_axis()};
  }

 private:
  int order_;
  int dim_;
  int n_dofs_;
  QuadratureRule rule_;
  Mat deriv_;
  std::array<std::vector<double>, 2> bnd_val_, bnd_der_;
  std::array<Mat, 2> half_val_, half_der_, restrict_;
};

}  // namespace monodg

#endif
