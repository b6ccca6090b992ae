#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "core/quadrature.hpp"

namespace monodg::oracles {

BasisEval eval_basis(const Basis& basis, const ElementBox& box,
                     std::array<double, 2> x) {
  const int n1 = basis.nodes_per_axis();
  const int nd = basis.nodes_per_element();
  std::vector<double> vx(n1), dx(n1), vy(n1), dy(n1);
  const double rx = (x[0] - box.lo[0]) / box.size[0];
  lagrange_values(basis.nodes_1d(), rx, vx);
  lagrange_derivatives(basis.nodes_1d(), rx, dx);
  if (basis.dim() == 2) {
    const double ry = (x[1] - box.lo[1]) / box.size[1];
    lagrange_values(basis.nodes_1d(), ry, vy);
    lagrange_derivatives(basis.nodes_1d(), ry, dy);
  }
  BasisEval out;
  out.value.resize(nd);
  out.grad.resize(nd);
  for (int dof = 0; dof < nd; ++dof) {
    const auto [ix, iy] = basis.node_coords(dof);
    if (basis.dim() == 1) {
      out.value[dof] = vx[ix];
      out.grad[dof] = {dx[ix] / box.size[0], 0.0};
    } else {
      out.value[dof] = vx[ix] * vy[iy];
      out.grad[dof] = {dx[ix] * vy[iy] / box.size[0],
                       vx[ix] * dy[iy] / box.size[1]};
    }
  }
  return out;
}

Mat dense_mass(const Basis& basis, const ElementBox& box, int n1) {
  const QuadratureRule rule = gauss_legendre(n1);
  const int nd = basis.nodes_per_element();
  const int nqy = basis.dim() == 2 ? n1 : 1;
  Mat m(nd, nd);
  for (int qy = 0; qy < nqy; ++qy) {
    for (int qx = 0; qx < n1; ++qx) {
      std::array<double, 2> x{box.lo[0] + rule.points[qx] * box.size[0], 0.0};
      double w = rule.weights[qx] * box.size[0];
      if (basis.dim() == 2) {
        x[1] = box.lo[1] + rule.points[qy] * box.size[1];
        w *= rule.weights[qy] * box.size[1];
      }
      const BasisEval e = eval_basis(basis, box, x);
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) m(i, j) += w * e.value[i] * e.value[j];
    }
  }
  return m;
}

Mat dense_stiffness(const Basis& basis, const ElementBox& box,
                    const DiffusionTensor& d, int n1) {
  const QuadratureRule rule = gauss_legendre(n1);
  const int nd = basis.nodes_per_element();
  const int nqy = basis.dim() == 2 ? n1 : 1;
  Mat k(nd, nd);
  for (int qy = 0; qy < nqy; ++qy) {
    for (int qx = 0; qx < n1; ++qx) {
      std::array<double, 2> x{box.lo[0] + rule.points[qx] * box.size[0], 0.0};
      double w = rule.weights[qx] * box.size[0];
      if (basis.dim() == 2) {
        x[1] = box.lo[1] + rule.points[qy] * box.size[1];
        w *= rule.weights[qy] * box.size[1];
      }
      const BasisEval e = eval_basis(basis, box, x);
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          const double fx = d.dxx * e.grad[j][0] + d.dxy * e.grad[j][1];
          const double fy = d.dxy * e.grad[j][0] + d.dyy * e.grad[j][1];
          k(i, j) += w * (fx * e.grad[i][0] + fy * e.grad[i][1]);
        }
      }
    }
  }
  return k;
}

std::vector<BruteFace> brute_force_faces(const ForestMesh& mesh) {
  std::vector<BruteFace> faces;
  const auto active = mesh.active_elements();
  const double tol = 1e-9;
  for (size_t a = 0; a < active.size(); ++a) {
    for (size_t b = a + 1; b < active.size(); ++b) {
      const ElementBox ba = mesh.box(active[a]);
      const ElementBox bb = mesh.box(active[b]);
      for (int axis = 0; axis < mesh.dim(); ++axis) {
        const bool touch_hi = std::abs(ba.lo[axis] + ba.size[axis] - bb.lo[axis]) < tol;
        const bool touch_lo = std::abs(bb.lo[axis] + bb.size[axis] - ba.lo[axis]) < tol;
        if (!touch_hi && !touch_lo) continue;
        // Tangential overlap with positive measure (full overlap in 1D).
        bool overlap = true;
        if (mesh.dim() == 2) {
          const int t = 1 - axis;
          const double lo = std::max(ba.lo[t], bb.lo[t]);
          const double hi =
              std::min(ba.lo[t] + ba.size[t], bb.lo[t] + bb.size[t]);
          overlap = hi - lo > tol;
        }
        if (!overlap) continue;
        BruteFace f;
        const int la = mesh.level(active[a]);
        const int lb = mesh.level(active[b]);
        if (la >= lb) {
          f.fine = active[a];
          f.coarse = active[b];
        } else {
          f.fine = active[b];
          f.coarse = active[a];
        }
        f.axis = axis;
        f.conforming = la == lb;
        faces.push_back(f);
      }
    }
  }
  return faces;
}

std::vector<double> global_mass(const ForestMesh& mesh, const Basis& basis) {
  const auto active = mesh.active_elements();
  const int nd = basis.nodes_per_element();
  std::vector<double> mass(active.size() * nd);
  for (size_t slot = 0; slot < active.size(); ++slot) {
    const Mat m = dense_mass(basis, mesh.box(active[slot]), basis.order() + 3);
    for (int i = 0; i < nd; ++i) mass[slot * nd + i] = m(i, i);
  }
  return mass;
}

Mat global_rate_matrix(const ForestMesh& mesh, const Basis& basis,
                       const DiffusionTensor& d, double gamma) {
  const auto active = mesh.active_elements();
  const int nd = basis.nodes_per_element();
  const int n = int(active.size()) * nd;
  std::vector<int> slot_of_id(size_t(*std::max_element(active.begin(), active.end())) + 1,
                              -1);
  for (size_t s = 0; s < active.size(); ++s) slot_of_id[active[s]] = int(s);

  Mat k(n, n);
  // Volume terms.
  for (size_t slot = 0; slot < active.size(); ++slot) {
    const Mat kv = dense_stiffness(basis, mesh.box(active[slot]), d,
                                   basis.order() + 3);
    const int off = int(slot) * nd;
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j) k(off + i, off + j) -= kv(i, j);
  }

  // Face terms on geometric interfaces; quadrature on the fine sub-face with
  // p+2 points (all integrands are polynomials of tangential degree <= 2p,
  // so this matches any rule with >= p+1 points).
  const QuadratureRule rule = gauss_legendre(basis.order() + 2);
  for (const BruteFace& f : brute_force_faces(mesh)) {
    const ElementBox fine_box = mesh.box(f.fine);
    const ElementBox coarse_box = mesh.box(f.coarse);
    const int axis = f.axis;
    // Outward normal of the fine element toward the coarse one.
    const double sign =
        fine_box.lo[axis] < coarse_box.lo[axis] ? 1.0 : -1.0;
    const double h_f = fine_box.size[axis];
    const double c_pen = gamma * (axis == 0 ? d.dxx : d.dyy) / h_f;
    const int so = slot_of_id[f.fine] * nd;
    const int sn = slot_of_id[f.coarse] * nd;

    const double face_x =
        sign > 0 ? fine_box.lo[axis] + fine_box.size[axis] : fine_box.lo[axis];
    const int nq = basis.dim() == 2 ? rule.size() : 1;
    for (int q = 0; q < nq; ++q) {
      std::array<double, 2> x{};
      double w = 1.0;
      if (basis.dim() == 1) {
        x = {face_x, 0.0};
      } else {
        const int t = 1 - axis;
        const double tang = fine_box.lo[t] + rule.points[q] * fine_box.size[t];
        x[axis] = face_x;
        x[t] = tang;
        w = rule.weights[q] * fine_box.size[t];
      }
      const BasisEval eo = eval_basis(basis, fine_box, x);
      const BasisEval en = eval_basis(basis, coarse_box, x);
      auto normal_flux = [&](const BasisEval& e, int j) {
        const double fx = d.dxx * e.grad[j][0] + d.dxy * e.grad[j][1];
        const double fy = d.dxy * e.grad[j][0] + d.dyy * e.grad[j][1];
        return sign * (axis == 0 ? fx : fy);
      };
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          const double go_j = normal_flux(eo, j), gn_j = normal_flux(en, j);
          const double go_i = normal_flux(eo, i), gn_i = normal_flux(en, i);
          // consistency + adjoint consistency + penalty
          k(so + i, so + j) += w * (0.5 * go_j * eo.value[i] +
                                    0.5 * eo.value[j] * go_i -
                                    c_pen * eo.value[j] * eo.value[i]);
          k(so + i, sn + j) += w * (0.5 * gn_j * eo.value[i] -
                                    0.5 * en.value[j] * go_i +
                                    c_pen * en.value[j] * eo.value[i]);
          k(sn + i, so + j) += w * (-0.5 * go_j * en.value[i] +
                                    0.5 * eo.value[j] * gn_i +
                                    c_pen * eo.value[j] * en.value[i]);
          k(sn + i, sn + j) += w * (-0.5 * gn_j * en.value[i] -
                                    0.5 * en.value[j] * gn_i -
                                    c_pen * en.value[j] * en.value[i]);
        }
      }
    }
  }
  return k;
}

CellTrajectory integrate_cell(const CellModel& model, double phi0,
                              std::vector<double> s0, double t_end, double dt,
                              const std::function<double(double)>& stim) {
  const int ns = model.n_states();
  CellTrajectory traj;
  double phi = phi0;
  std::vector<double> s = s0;
  IonicRates r;
  auto rhs = [&](double t, double p, const std::vector<double>& st, double& dp,
                 std::vector<double>& dst) {
    model.eval(p, st, r);
    dp = r.dphi + (stim ? stim(t) : 0.0);
    for (int k = 0; k < ns; ++k) dst[k] = r.ds[k];
  };
  std::vector<double> k1s(ns), k2s(ns), k3s(ns), k4s(ns), tmp(ns);
  const int64_t n = std::llround(t_end / dt);
  traj.t.push_back(0);
  traj.phi.push_back(phi);
  traj.s.push_back(s);
  for (int64_t step = 0; step < n; ++step) {
    const double t = step * dt;
    double k1p, k2p, k3p, k4p;
    rhs(t, phi, s, k1p, k1s);
    for (int k = 0; k < ns; ++k) tmp[k] = s[k] + 0.5 * dt * k1s[k];
    rhs(t + 0.5 * dt, phi + 0.5 * dt * k1p, tmp, k2p, k2s);
    for (int k = 0; k < ns; ++k) tmp[k] = s[k] + 0.5 * dt * k2s[k];
    rhs(t + 0.5 * dt, phi + 0.5 * dt * k2p, tmp, k3p, k3s);
    for (int k = 0; k < ns; ++k) tmp[k] = s[k] + dt * k3s[k];
    rhs(t + dt, phi + dt * k3p, tmp, k4p, k4s);
    phi += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    for (int k = 0; k < ns; ++k)
      s[k] += dt / 6.0 * (k1s[k] + 2 * k2s[k] + 2 * k3s[k] + k4s[k]);
    traj.t.push_back((step + 1) * dt);
    traj.phi.push_back(phi);
    traj.s.push_back(s);
  }
  return traj;
}

std::vector<double> l2_project(const Basis& basis, const ElementBox& box,
                               const std::function<double(std::array<double, 2>)>& f,
                               int n1) {
  const QuadratureRule rule = gauss_legendre(n1);
  const int nd = basis.nodes_per_element();
  const Mat mass = dense_mass(basis, box, n1);
  std::vector<double> rhs(nd, 0.0);
  const int nqy = basis.dim() == 2 ? n1 : 1;
  // Composite rule over the two x-halves so functions with a kink at the
  // element midpoint (coarsening sources) are integrated accurately.
  for (int half = 0; half < 2; ++half) {
    for (int qy = 0; qy < nqy; ++qy) {
      for (int qx = 0; qx < n1; ++qx) {
        std::array<double, 2> x{
            box.lo[0] + 0.5 * (rule.points[qx] + half) * box.size[0], 0.0};
        double w = 0.5 * rule.weights[qx] * box.size[0];
        if (basis.dim() == 2) {
          x[1] = box.lo[1] + rule.points[qy] * box.size[1];
          w *= rule.weights[qy] * box.size[1];
        }
        const BasisEval e = eval_basis(basis, box, x);
        const double fv = f(x);
        for (int i = 0; i < nd; ++i) rhs[i] += w * fv * e.value[i];
      }
    }
  }
  // Solve the small SPD system by Gaussian elimination (mass is nearly
  // diagonal but solve it generically anyway).
  Mat a = mass;
  std::vector<double> sol = rhs;
  const int n = nd;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    for (int c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
    std::swap(sol[col], sol[piv]);
    for (int r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      sol[r] -= factor * sol[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) sol[r] -= a(r, c) * sol[c];
    sol[r] /= a(r, r);
  }
  return sol;
}

}  // namespace monodg::oracles
