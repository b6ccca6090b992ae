#ifndef MONODG_CORE_SLTS_HPP
#define MONODG_CORE_SLTS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/field.hpp"
#include "core/indicators.hpp"
#include "core/ionics.hpp"
#include "core/mesh.hpp"
#include "core/sipg.hpp"

namespace monodg {

// Stable time step bound for one element from Gershgorin discs of
// Minv * K over the element's rows. Infinite when there is no diffusion.
double cfl_estimate(const ElementOps& ops, int slot);

// Power-of-two substep assignment for one element within a barrier step.
struct SubstepChoice {
  int64_t substeps = 1;  // S_e = 2^max(b_cfl, b_cell)
  int b_cfl = 0;
  int b_cell = 0;
};
SubstepChoice substep_count(double dt_barrier, double cfl, double eta_t,
                            double tau_cell, double dt_cell);

// Linear-in-time trace of one element's phi between its two stored time
// levels; exact at the endpoints. Queries outside [t_prev, t_curr] are
// extrapolation and rejected.
void interpolate_neighbor(const FieldState& f, int slot, double t_query,
                          std::span<double> out);

// Per-element plan for one barrier step.
struct StepPlan {
  std::vector<double> cfl;        // ms
  std::vector<double> eta_t;
  std::vector<int64_t> substeps;  // S_e
  int64_t max_substeps = 1;
  double dt_barrier = 0.0;
};

struct BarrierStats {
  double t_start = 0.0;
  int n_active = 0;
  int max_level = 0;
  int64_t max_substeps = 1;
  int64_t element_updates = 0;  // == sum of S_e
  int n_refined = 0, n_coarsened = 0;
  double wall_ms = 0.0;
};

struct RunCounters {
  int64_t element_updates = 0;
  int64_t barrier_steps = 0;
  double phi_min = 0.0, phi_max = 0.0;
  int64_t sync_checks = 0;  // invariant checks performed (all must have passed)
};

// Shared explicit element update used by both the local time stepper and
// the uniform reference solver: forward Euler on phi (diffusion + reaction
// + stimulus), exponential update on gates, forward Euler on other states.
class StepKernel {
 public:
  StepKernel(const ForestMesh& mesh, const ElementOps& ops, const CellModel& model,
             const StimulusProtocol& stim);

  // Advance element `slot` by dt; rates are evaluated at t_eval on the
  // element's own current values and the supplied per-coupling neighbor
  // traces (aligned with ops.couplings(slot)).
  void advance(FieldState& f, int slot, double t_eval, double dt,
               std::span<const std::span<const double>> traces);

  const ForestMesh& mesh() const { return *mesh_; }
  const ElementOps& ops() const { return *ops_; }
  const CellModel& model() const { return *model_; }
  const StimulusProtocol& stimulus() const { return *stim_; }

 private:
  const ForestMesh* mesh_;
  const ElementOps* ops_;
  const CellModel* model_;
  const StimulusProtocol* stim_;
  std::vector<double> rate_;
};

struct SltsOptions {
  double dt_barrier = 0.15;   // ms
  double tau_refine = 0.75;
  double tau_coarsen = 0.25;
  double tau_cell = 0.5;      // temporal indicator threshold
  double dt_cell = 0.01;      // target substep length when eta_t > tau_cell, ms
  bool amr = true;
  bool cell_substepping = true;
  // Testing hook: permutation applied to each queue before processing.
  // Results are identical for any permutation; the default keeps the
  // natural order.
  std::function<void(std::vector<int>&)> queue_permutation;
};

// Adaptive multi-queue synchronous local time stepping. One barrier step:
// estimate spatial error, adapt the mesh, reassemble touched operators,
// assign power-of-two substep counts, then advance the elements in sweeps.
// Within a sweep the due elements are buffered first and then updated, so
// neighbor traces always interpolate pre-sweep values and the sweep order
// cannot matter. Element times are tracked as integer substep indices;
// every element lands on the barrier exactly.
class SltsEngine {
 public:
  SltsEngine(ForestMesh& mesh, ElementOps& ops, const Basis& basis,
             const CellModel& model, const StimulusProtocol& stim,
             FieldState initial, SltsOptions opts);

  BarrierStats barrier_step();

  double time() const { return t_; }
  const FieldState& state() const { return state_; }
  const StepPlan& plan() const { return plan_; }
  const RunCounters& counters() const { return counters_; }
  ForestMesh& mesh() { return *mesh_; }
  const ElementOps& ops() const { return *ops_; }

 private:
  void adapt_mesh(BarrierStats& stats);
  void build_plan();
  void sweep_all(BarrierStats& stats);
  void gather_trace(int other_slot, int64_t index, std::span<double> out) const;

  ForestMesh* mesh_;
  ElementOps* ops_;
  const Basis* basis_;
  const CellModel* model_;
  const StimulusProtocol* stim_;
  SltsOptions opts_;

  FieldState state_;
  FieldState prev_barrier_;
  bool have_prev_barrier_ = false;
  double t_ = 0.0;
  StepPlan plan_;
  RunCounters counters_;
  StepKernel kernel_;

  // Per-barrier bookkeeping, slot-aligned.
  std::vector<int64_t> idx_curr_, idx_prev_;
  std::vector<std::vector<int>> queues_;
  std::vector<double> trace_buf_;
  std::vector<std::span<const double>> trace_spans_;
};

}  // namespace monodg

#endif
