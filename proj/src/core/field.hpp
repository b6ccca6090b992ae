#ifndef MONODG_CORE_FIELD_HPP
#define MONODG_CORE_FIELD_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "core/basis.hpp"
#include "core/mesh.hpp"

namespace monodg {

// Nodal values of the transmembrane potential and the cell-state vector on
// the active elements of one mesh generation, together with the two
// per-element time levels the local time stepper interpolates between.
//
// Layout: slot-major; slot k holds element elems[k] (ascending id order).
// phi[k*n_dofs + node], states[(k*n_dofs + node)*n_states + s].
struct FieldState {
  uint64_t generation = 0;
  int n_dofs = 0;
  int n_states = 0;
  std::vector<ElementId> elems;

  std::vector<double> phi, states;            // values at t_curr
  std::vector<double> phi_prev, states_prev;  // values at t_prev
  std::vector<double> t_curr, t_prev;         // per element, ms

  int n_elems() const { return int(elems.size()); }
  int slot_of(ElementId e) const;  // -1 if not present

  std::span<double> phi_at(int slot) {
    return {phi.data() + size_t(slot) * n_dofs, size_t(n_dofs)};
  }
  std::span<const double> phi_at(int slot) const {
    return {phi.data() + size_t(slot) * n_dofs, size_t(n_dofs)};
  }
  std::span<double> states_at(int slot) {
    return {states.data() + size_t(slot) * n_dofs * n_states,
            size_t(n_dofs) * n_states};
  }
  std::span<const double> states_at(int slot) const {
    return {states.data() + size_t(slot) * n_dofs * n_states,
            size_t(n_dofs) * n_states};
  }
  std::span<const double> phi_prev_at(int slot) const {
    return {phi_prev.data() + size_t(slot) * n_dofs, size_t(n_dofs)};
  }
  std::span<const double> states_prev_at(int slot) const {
    return {states_prev.data() + size_t(slot) * n_dofs * n_states,
            size_t(n_dofs) * n_states};
  }
};

// Fresh state on the mesh's current active set, everything zero, all time
// levels at t0.
FieldState make_field_state(const ForestMesh& mesh, const Basis& basis,
                            int n_states, double t0 = 0.0);

// Physical coordinates of a DG node.
std::array<double, 2> node_position(const Basis& basis, const ElementBox& box,
                                    int node);

// Evaluate the element polynomial with the given nodal values at physical x.
double eval_element(const Basis& basis, const ElementBox& box,
                    std::span<const double> nodal, std::array<double, 2> x);

// Move a field across one refine/coarsen delta. Children receive the parent
// polynomial at the child nodes (exact up to order p); collapsed parents
// receive the L2 projection of their children. Timestamps are preserved.
// The post-delta layout is derived from the delta, so deltas can be applied
// in sequence.
FieldState transfer_field(const Basis& basis, const RefinementDelta& delta,
                          const FieldState& old);

// Initialize phi and the state vector from pointwise functions of position.
void fill_field(const ForestMesh& mesh, const Basis& basis, FieldState& f,
                const std::function<double(std::array<double, 2>)>& phi_fn,
                const std::function<void(std::array<double, 2>, std::span<double>)>& state_fn);

}  // namespace monodg

#endif
