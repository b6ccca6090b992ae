#ifndef MONODG_CORE_REFSOLVER_HPP
#define MONODG_CORE_REFSOLVER_HPP

#include <cstdint>
#include <optional>

#include "core/slts.hpp"
#include "core/trajectory.hpp"

namespace monodg {

// Uniform global-timestep forward-Euler / Rush-Larsen solver on the same
// spatial discretization, used as correctness oracle and wall-clock
// baseline. No mesh adaptation: the element kernels are shared with the
// local time stepper, so a barrier step with all substep counts equal to 1
// reproduces one uniform step bit for bit.
class UniformEngine {
 public:
  UniformEngine(const ForestMesh& mesh, const ElementOps& ops, const Basis& basis,
                const CellModel& model, const StimulusProtocol& stim,
                FieldState initial);

  // One global step of length dt. Throws DivergenceError when the state
  // leaves the finite range.
  void step(double dt);

  double time() const { return t_; }
  const FieldState& state() const { return state_; }
  int64_t element_updates() const { return updates_; }

 private:
  const ForestMesh* mesh_;
  const ElementOps* ops_;
  const Basis* basis_;
  StepKernel kernel_;
  FieldState state_;
  double t_ = 0.0;
  int64_t updates_ = 0;
  std::vector<std::span<const double>> trace_spans_;
};

struct UniformRunResult {
  Trajectory trajectory;
  int64_t element_updates = 0;
  int64_t steps = 0;
  double wall_seconds = 0.0;  // stepping only, snapshots excluded
  bool cfl_warning = false;   // dt exceeded the estimated bound
};

// March to t_end with a fixed dt, snapshotting every `snapshot_every` ms
// (0 keeps only the initial and final states). If dt violates the
// per-element stability estimate the run warns and proceeds, since the
// estimate is deliberately conservative.
UniformRunResult uniform_step_run(const ForestMesh& mesh, const ElementOps& ops,
                                  const Basis& basis, const CellModel& model,
                                  const StimulusProtocol& stim,
                                  const FieldState& initial, double dt,
                                  double t_end, double snapshot_every);

struct StateDiff {
  double linf = 0.0;
  double l2 = 0.0;  // mass-weighted discrete L2, mV * mm^(dim/2)
  std::vector<double> per_element_max;
};

// Discrete norms of phi_a - phi_b; both fields must share one layout.
StateDiff compare_states(const FieldState& a, const FieldState& b,
                         const ElementOps& ops);

}  // namespace monodg

#endif
