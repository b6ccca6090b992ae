#include "core/sipg.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "core/errors.hpp"

namespace monodg {

void DiffusionTensor::validate(int dim) const {
  if (!(dxx >= 0.0)) throw std::invalid_argument("diffusion tensor: dxx must be >= 0");
  if (dim == 2) {
    if (!(dyy >= 0.0))
      throw std::invalid_argument("diffusion tensor: dyy must be >= 0");
    if (dxx * dyy - dxy * dxy < -1e-14 * (dxx + dyy) * (dxx + dyy))
      throw std::invalid_argument("diffusion tensor must be positive semidefinite");
  }
}

namespace {

// Values and physical (D grad .) . n of every shape function at one face
// quadrature point of the given element side.
struct FaceTrace {
  // [q][dof]
  std::vector<std::vector<double>> value;
  std::vector<std::vector<double>> flux;  // (D grad N) . n_owner
};

FaceTrace face_trace(const Basis& basis, const ElementBox& box, int axis, int side,
                     const DiffusionTensor& d, double normal_sign, int hanging_half) {
  // hanging_half < 0: the face spans this element's full edge. Otherwise
  // this is the coarse side of a hanging face and the quadrature points sit
  // on one tangential half of the edge.
  const int dim = basis.dim();
  const int n1 = basis.nodes_per_axis();
  const int nq = (dim == 2) ? n1 : 1;
  const int nd = basis.nodes_per_element();
  FaceTrace t;
  t.value.assign(nq, std::vector<double>(nd));
  t.flux.assign(nq, std::vector<double>(nd));

  std::vector<double> tv(n1), td(n1);
  for (int q = 0; q < nq; ++q) {
    double tang_ref = 0.0;
    if (dim == 2) {
      tang_ref = basis.nodes_1d()[q];
      if (hanging_half >= 0) tang_ref = 0.5 * (tang_ref + hanging_half);
      lagrange_values(basis.nodes_1d(), tang_ref, tv);
      lagrange_derivatives(basis.nodes_1d(), tang_ref, td);
    }
    const auto& nv = basis.trace_value(side);
    const auto& ng = basis.trace_deriv(side);
    for (int dof = 0; dof < nd; ++dof) {
      const auto [ix, iy] = basis.node_coords(dof);
      const int in = (axis == 0) ? ix : iy;   // index along the normal axis
      const int it = (axis == 0) ? iy : ix;   // index along the tangential axis
      double val, grad_n, grad_t;
      if (dim == 1) {
        val = nv[in];
        grad_n = ng[in] / box.size[axis];
        grad_t = 0.0;
      } else {
        val = nv[in] * tv[it];
        grad_n = ng[in] * tv[it] / box.size[axis];
        grad_t = nv[in] * td[it] / box.size[1 - axis];
      }
      double gx, gy;
      if (axis == 0) {
        gx = grad_n;
        gy = grad_t;
      } else {
        gx = grad_t;
        gy = grad_n;
      }
      t.value[q][dof] = val;
      const double dn_x = d(axis, 0) * gx + ((dim == 2) ? d(axis, 1) * gy : 0.0);
      t.flux[q][dof] = normal_sign * dn_x;
    }
  }
  return t;
}

}  // namespace

ElementOps::ElementOps(const ForestMesh& mesh, const Basis& basis,
                       const DiffusionTensor& d, double gamma)
    : basis_(&basis), d_(d), gamma_(gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("penalty gamma must be > 0");
  d_.validate(basis.dim());
  if (basis.dim() != mesh.dim())
    throw std::invalid_argument("basis and mesh dimension mismatch");
  rebuild(mesh);
}

void ElementOps::update(const ForestMesh& mesh) { rebuild(mesh); }

const ElementOps::VolumeEntry& ElementOps::volume_entry(const ForestMesh& mesh,
                                                        ElementId e) {
  // Same level implies identical extents on the Cartesian forest, so the
  // blocks are shared per level.
  const int level = mesh.level(e);
  auto it = volume_cache_.find(level);
  if (it != volume_cache_.end()) return *it->second;

  const Basis& b = *basis_;
  const int dim = b.dim();
  const int nd = b.nodes_per_element();
  const ElementBox box = mesh.box(e);
  double jac = box.size[0];
  if (dim == 2) jac *= box.size[1];
  if (!(jac > 0.0)) throw GeometryError("element has zero measure");

  auto entry = std::make_unique<VolumeEntry>();
  entry->mass.resize(nd);
  entry->minv.resize(nd);
  entry->kvol = Mat(nd, nd);

  // Collocated Gauss-Legendre: the mass matrix is diagonal with entries
  // w_i |J| (exact, the quadrature integrates the degree-2p integrand).
  for (int dof = 0; dof < nd; ++dof) {
    const auto [ix, iy] = b.node_coords(dof);
    double w = b.weights_1d()[ix];
    if (dim == 2) w *= b.weights_1d()[iy];
    entry->mass[dof] = w * jac;
    entry->minv[dof] = 1.0 / (w * jac);
  }

  // Kvol[i][j] = -int_e (D grad N_j) . grad N_i, quadrature at the nodes.
  // grad N_j at node q is sparse in the tensor structure; the plain loop is
  // cheap at these sizes and is only run once per element id.
  const Mat& d1 = b.deriv_1d();
  for (int q = 0; q < nd; ++q) {
    const auto [qx, qy] = b.node_coords(q);
    double wq = b.weights_1d()[qx];
    if (dim == 2) wq *= b.weights_1d()[qy];
    wq *= jac;
    for (int j = 0; j < nd; ++j) {
      const auto [jx, jy] = b.node_coords(j);
      double gjx = 0.0, gjy = 0.0;
      if (dim == 1) {
        gjx = d1(qx, jx) / box.size[0];
      } else {
        gjx = (jy == qy) ? d1(qx, jx) / box.size[0] : 0.0;
        gjy = (jx == qx) ? d1(qy, jy) / box.size[1] : 0.0;
      }
      if (gjx == 0.0 && gjy == 0.0) continue;
      const double fx = d_(0, 0) * gjx + ((dim == 2) ? d_(0, 1) * gjy : 0.0);
      const double fy = (dim == 2) ? d_(1, 0) * gjx + d_(1, 1) * gjy : 0.0;
      for (int i = 0; i < nd; ++i) {
        const auto [ix, iy] = b.node_coords(i);
        double gix = 0.0, giy = 0.0;
        if (dim == 1) {
          gix = d1(qx, ix) / box.size[0];
        } else {
          gix = (iy == qy) ? d1(qx, ix) / box.size[0] : 0.0;
          giy = (ix == qx) ? d1(qy, iy) / box.size[1] : 0.0;
        }
        entry->kvol(i, j) -= wq * (fx * gix + fy * giy);
      }
    }
  }

  ++n_volume_built_;
  const VolumeEntry& ref = *entry;
  volume_cache_.emplace(level, std::move(entry));
  return ref;
}

namespace {

uint32_t face_config_key(const ForestMesh& mesh, const FaceInfo& f) {
  const uint32_t owner_level = uint32_t(mesh.level(f.owner));
  const uint32_t neighbor_level = uint32_t(mesh.level(f.neighbor));
  return uint32_t(f.owner_face_index) | (owner_level << 4) |
         (neighbor_level << 12) | (uint32_t(f.hanging_half + 1) << 20);
}

}  // namespace

const ElementOps::FaceBlocks& ElementOps::face_blocks(const ForestMesh& mesh,
                                                      const FaceInfo& f) {
  const uint32_t key = face_config_key(mesh, f);
  auto it = face_cache_.find(key);
  if (it != face_cache_.end()) return *it->second;

  const Basis& b = *basis_;
  const int dim = b.dim();
  const int nd = b.nodes_per_element();
  const int nq = (dim == 2) ? b.nodes_per_axis() : 1;

  const ElementBox obox = mesh.box(f.owner);
  const ElementBox nbox = mesh.box(f.neighbor);
  // Owner side spans its full face; the coarse neighbor of a hanging face is
  // probed on the matching half.
  const FaceTrace to = face_trace(b, obox, f.axis, f.owner_face_index & 1, d_,
                                  f.normal_sign, -1);
  const FaceTrace tn = face_trace(b, nbox, f.axis, f.neighbor_face_index & 1, d_,
                                  f.normal_sign, f.hanging_half);

  // Penalty coefficient gamma * (n . D n) / h with h the finer side's size.
  const double c_pen = gamma_ * d_(f.axis, f.axis) / f.h_face;
  const double surf = f.weight;  // physical face measure per unit reference

  auto blocks = std::make_unique<FaceBlocks>();
  blocks->a_oo = Mat(nd, nd);
  blocks->a_on = Mat(nd, nd);
  blocks->a_no = Mat(nd, nd);
  blocks->a_nn = Mat(nd, nd);
  blocks->flux_o = Mat(nq, nd);
  blocks->flux_n = Mat(nq, nd);
  for (int q = 0; q < nq; ++q)
    for (int dof = 0; dof < nd; ++dof) {
      blocks->flux_o(q, dof) = to.flux[q][dof];
      blocks->flux_n(q, dof) = tn.flux[q][dof];
    }
  for (int q = 0; q < nq; ++q) {
    const double w = ((dim == 2) ? b.weights_1d()[q] : 1.0) * surf;
    const auto& no = to.value[q];
    const auto& go = to.flux[q];
    const auto& nn = tn.value[q];
    const auto& gn = tn.flux[q];
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nd; ++j) {
        blocks->a_oo(i, j) +=
            w * (0.5 * go[j] * no[i] + 0.5 * no[j] * go[i] - c_pen * no[j] * no[i]);
        blocks->a_on(i, j) +=
            w * (0.5 * gn[j] * no[i] - 0.5 * nn[j] * go[i] + c_pen * nn[j] * no[i]);
        blocks->a_no(i, j) +=
            w * (-0.5 * go[j] * nn[i] + 0.5 * no[j] * gn[i] + c_pen * no[j] * nn[i]);
        blocks->a_nn(i, j) +=
            w * (-0.5 * gn[j] * nn[i] - 0.5 * nn[j] * gn[i] - c_pen * nn[j] * nn[i]);
      }
    }
  }

  ++n_face_built_;
  const FaceBlocks& ref = *blocks;
  face_cache_.emplace(key, std::move(blocks));
  return ref;
}

void ElementOps::rebuild(const ForestMesh& mesh) {
  elems_.assign(mesh.active_elements().begin(), mesh.active_elements().end());
  const int n = int(elems_.size());
  const int nd = basis_->nodes_per_element();
  slot_volume_.assign(n, nullptr);
  slot_self_.assign(n, nullptr);
  couplings_.assign(n, {});
  for (int slot = 0; slot < n; ++slot)
    slot_volume_[slot] = &volume_entry(mesh, elems_[slot]);

  std::unordered_map<ElementId, int> slot_of;
  slot_of.reserve(n);
  for (int slot = 0; slot < n; ++slot) slot_of[elems_[slot]] = slot;

  // Per-slot lists of (face config, self-self block) used to fold the
  // element's own column block; shared per element configuration.
  std::vector<std::vector<std::pair<uint32_t, const Mat*>>> self_parts(n);
  for (const FaceInfo& f : mesh.face_list()) {
    const FaceBlocks& fb = face_blocks(mesh, f);
    const int so = slot_of.at(f.owner);
    const int sn = slot_of.at(f.neighbor);
    couplings_[so].push_back({sn, &fb.a_on});
    couplings_[sn].push_back({so, &fb.a_no});
    const uint32_t key = face_config_key(mesh, f);
    self_parts[so].emplace_back(key | (1u << 24), &fb.a_oo);
    self_parts[sn].emplace_back(key | (2u << 24), &fb.a_nn);
  }

  for (int slot = 0; slot < n; ++slot) {
    std::sort(self_parts[slot].begin(), self_parts[slot].end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<uint32_t> key;
    key.reserve(self_parts[slot].size() + 1);
    key.push_back(uint32_t(mesh.level(elems_[slot])));
    for (const auto& [part_key, mat] : self_parts[slot]) key.push_back(part_key);
    auto it = self_cache_.find(key);
    if (it == self_cache_.end()) {
      auto self = std::make_unique<Mat>(nd, nd);
      *self = slot_volume_[slot]->kvol;
      for (const auto& [part_key, mat] : self_parts[slot])
        for (int i = 0; i < nd; ++i)
          for (int j = 0; j < nd; ++j) (*self)(i, j) += (*mat)(i, j);
      it = self_cache_.emplace(std::move(key), std::move(self)).first;
    }
    slot_self_[slot] = it->second.get();
  }
  generation_ = mesh.generation();
}

std::span<const double> ElementOps::minv_diag(int slot) const {
  return slot_volume_[slot]->minv;
}

std::span<const double> ElementOps::mass_diag(int slot) const {
  return slot_volume_[slot]->mass;
}

const Mat& ElementOps::kvol(int slot) const { return slot_volume_[slot]->kvol; }

void ElementOps::diffusion_rate(int slot, std::span<const double> own,
                                std::span<const std::span<const double>> neighbor_values,
                                std::span<double> rate) const {
  const int nd = n_dofs();
  if (int(neighbor_values.size()) != int(couplings_[slot].size()))
    throw std::invalid_argument("diffusion_rate: a neighbor trace is missing");
  std::fill(rate.begin(), rate.end(), 0.0);
  slot_self_[slot]->mult_add(own, rate);
  for (size_t k = 0; k < couplings_[slot].size(); ++k)
    couplings_[slot][k].a_self_other->mult_add(neighbor_values[k], rate);
  const auto& minv = slot_volume_[slot]->minv;
  for (int i = 0; i < nd; ++i) rate[i] *= minv[i];
}

ElementOps::FaceFlux ElementOps::face_flux(const ForestMesh& mesh,
                                           const FaceInfo& f) const {
  auto it = face_cache_.find(face_config_key(mesh, f));
  if (it == face_cache_.end())
    throw StaleTopologyError("face_flux: face not assembled for this generation");
  return {&it->second->flux_o, &it->second->flux_n};
}

double ElementOps::gershgorin_dt_bound(int slot) const {
  const int nd = n_dofs();
  double worst = 0.0;
  for (int i = 0; i < nd; ++i) {
    double radius = 0.0;
    for (double v : slot_self_[slot]->row(i)) radius += std::abs(v);
    for (const FaceCoupling& c : couplings_[slot])
      for (double v : c.a_self_other->row(i)) radius += std::abs(v);
    radius *= slot_volume_[slot]->minv[i];
    worst = std::max(worst, radius);
  }
  if (worst == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / worst;
}

}  // namespace monodg
