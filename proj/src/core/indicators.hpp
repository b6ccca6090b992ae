#ifndef MONODG_CORE_INDICATORS_HPP
#define MONODG_CORE_INDICATORS_HPP

#include <span>
#include <vector>

#include "core/field.hpp"
#include "core/ionics.hpp"
#include "core/mesh.hpp"
#include "core/sipg.hpp"

namespace monodg {

// Per-element indicator values plus the marking sets derived from them.
struct IndicatorReport {
  std::vector<double> eta_s;  // spatial, aligned with the active order
  std::vector<double> eta_t;  // temporal
  std::vector<ElementId> refine_set;
  std::vector<ElementId> coarsen_set;
  double tau_refine = 0.0, tau_coarsen = 0.0, tau_cell = 0.0;
};

// Penalized flux-jump indicator per element:
//   eta_e = sqrt( sum over faces of e of h_F/(2p) * int_F (W_F [[D grad phi . n]])^2 )
// Each hanging sub-face contributes to both adjacent elements.
std::vector<double> kelly_indicator(const ForestMesh& mesh, const ElementOps& ops,
                                    const FieldState& field);

// Temporal drift of the reaction terms over [t_a, t_b], one element:
//   eta = sqrt(eta_I^2 + eta_g^2), each term the Bochner L2 norm of
//   f(u(t)) - f(u(t_a)) scaled by 1/(t_b - t_a), time integral by the
//   midpoint rule with u_mid = (u_start + u_end)/2, space integral by the
//   element quadrature. `stim_*` are optional per-node stimulus values.
double rvt_indicator(const CellModel& model, const Basis& basis, double measure,
                     std::span<const double> phi_start,
                     std::span<const double> states_start,
                     std::span<const double> phi_end,
                     std::span<const double> states_end, double t_a, double t_b,
                     std::span<const double> stim_start = {},
                     std::span<const double> stim_mid = {});

// Threshold marking: refine where eta >= tau_refine, coarsen where
// eta <= tau_coarsen. The coarsen set is filtered to complete sibling
// families so the mesh can actually collapse them.
void mark_elements(const ForestMesh& mesh, std::span<const double> eta_s,
                   double tau_refine, double tau_coarsen,
                   std::vector<ElementId>& refine_set,
                   std::vector<ElementId>& coarsen_set);

}  // namespace monodg

#endif
