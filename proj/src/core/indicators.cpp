#include "core/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "core/errors.hpp"

namespace monodg {

std::vector<double> kelly_indicator(const ForestMesh& mesh, const ElementOps& ops,
                                    const FieldState& field) {
  if (field.generation != mesh.generation() || ops.generation() != mesh.generation())
    throw StaleTopologyError("kelly_indicator: stale field or operators");
  const Basis& basis = ops.basis();
  const int nd = basis.nodes_per_element();
  const int nq = (basis.dim() == 2) ? basis.nodes_per_axis() : 1;
  const double inv_2p = 1.0 / (2.0 * basis.order());

  std::vector<double> eta2(field.n_elems(), 0.0);
  for (const FaceInfo& f : mesh.face_list()) {
    const auto flux = ops.face_flux(mesh, f);
    const int so = field.slot_of(f.owner);
    const int sn = field.slot_of(f.neighbor);
    const auto phi_o = field.phi_at(so);
    const auto phi_n = field.phi_at(sn);
    double jump_sq = 0.0;
    for (int q = 0; q < nq; ++q) {
      double jo = 0.0, jn = 0.0;
      for (int dof = 0; dof < nd; ++dof) {
        jo += (*flux.owner)(q, dof) * phi_o[dof];
        jn += (*flux.neighbor)(q, dof) * phi_n[dof];
      }
      const double jump = jo - jn;
      const double wq = (basis.dim() == 2) ? basis.weights_1d()[q] : 1.0;
      jump_sq += wq * f.weight * (f.weight * jump) * (f.weight * jump);
    }
    const double contrib = f.h_face * inv_2p * jump_sq;
    eta2[so] += contrib;
    eta2[sn] += contrib;
  }
  std::vector<double> eta(eta2.size());
  for (size_t i = 0; i < eta2.size(); ++i) eta[i] = std::sqrt(eta2[i]);
  return eta;
}

double rvt_indicator(const CellModel& model, const Basis& basis, double measure,
                     std::span<const double> phi_start,
                     std::span<const double> states_start,
                     std::span<const double> phi_end,
                     std::span<const double> states_end, double t_a, double t_b,
                     std::span<const double> stim_start,
                     std::span<const double> stim_mid) {
  if (!(t_b > t_a)) throw std::invalid_argument("rvt_indicator: need t_b > t_a");
  const int nd = basis.nodes_per_element();
  const int ns = model.n_states();
  const double span = t_b - t_a;

  double int_i = 0.0, int_g = 0.0;
  IonicRates ra, rm;
  double smid[kMaxCellStates];
  for (int node = 0; node < nd; ++node) {
    const auto [ix, iy] = basis.node_coords(node);
    double w = basis.weights_1d()[ix];
    if (basis.dim() == 2) w *= basis.weights_1d()[iy];
    w *= measure;

    const double phi_a = phi_start[node];
    const double phi_m = 0.5 * (phi_start[node] + phi_end[node]);
    for (int s = 0; s < ns; ++s)
      smid[s] = 0.5 * (states_start[node * ns + s] + states_end[node * ns + s]);
    model.eval(phi_a, {&states_start[node * ns], size_t(ns)}, ra);
    model.eval(phi_m, {smid, size_t(ns)}, rm);

    double di = rm.dphi - ra.dphi;
    if (!stim_start.empty()) di += stim_mid[node] - stim_start[node];
    int_i += w * di * di;

    double dg2 = 0.0;
    for (int s = 0; s < ns; ++s) {
      const double dg = rm.ds[s] - ra.ds[s];
      dg2 += dg * dg;
    }
    int_g += w * dg2;
  }
  // Midpoint rule in time: ||f||^2 over [t_a,t_b] x element ~ span * int_x,
  // and the 1/span prefactor leaves int_x / span under the square root.
  const double eta_i2 = int_i / span;
  const double eta_g2 = int_g / span;
  return std::sqrt(eta_i2 + eta_g2);
}

void mark_elements(const ForestMesh& mesh, std::span<const double> eta_s,
                   double tau_refine, double tau_coarsen,
                   std::vector<ElementId>& refine_set,
                   std::vector<ElementId>& coarsen_set) {
  if (!(tau_coarsen < tau_refine))
    throw std::invalid_argument("mark_elements: need tau_coarsen < tau_refine");
  const auto active = mesh.active_elements();
  if (eta_s.size() != active.size())
    throw std::invalid_argument("mark_elements: indicator size mismatch");
  refine_set.clear();
  coarsen_set.clear();

  std::unordered_map<ElementId, int> family_marks;
  for (size_t i = 0; i < active.size(); ++i) {
    if (eta_s[i] >= tau_refine) {
      refine_set.push_back(active[i]);
    } else if (eta_s[i] <= tau_coarsen) {
      const ElementId p = mesh.parent(active[i]);
      if (p != kNoElement) family_marks[p]++;
    }
  }
  const int family = (mesh.dim() == 2) ? 4 : 2;
  for (size_t i = 0; i < active.size(); ++i) {
    if (eta_s[i] > tau_coarsen) continue;
    const ElementId p = mesh.parent(active[i]);
    if (p == kNoElement) continue;
    auto it = family_marks.find(p);
    if (it != family_marks.end() && it->second == family) {
      // Only complete families of active leaves can collapse.
      bool all_active = true;
      for (ElementId s : mesh.siblings(active[i]))
        if (s != kNoElement) all_active = all_active && mesh.is_active(s);
      if (all_active) coarsen_set.push_back(active[i]);
    }
  }
  std::sort(coarsen_set.begin(), coarsen_set.end());
  coarsen_set.erase(std::unique(coarsen_set.begin(), coarsen_set.end()),
                    coarsen_set.end());
}

}  // namespace monodg
