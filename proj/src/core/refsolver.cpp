#include "core/refsolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

#include "core/errors.hpp"

namespace monodg {

UniformEngine::UniformEngine(const ForestMesh& mesh, const ElementOps& ops,
                             const Basis& basis, const CellModel& model,
                             const StimulusProtocol& stim, FieldState initial)
    : mesh_(&mesh),
      ops_(&ops),
      basis_(&basis),
      kernel_(mesh, ops, model, stim),
      state_(std::move(initial)) {
  if (state_.generation != mesh.generation() ||
      ops.generation() != mesh.generation())
    throw StaleTopologyError("UniformEngine: state/operators do not match the mesh");
}

void UniformEngine::step(double dt) {
  const int n = state_.n_elems();
  state_.phi_prev = state_.phi;
  state_.states_prev = state_.states;
  for (int slot = 0; slot < n; ++slot) {
    const auto couplings = ops_->couplings(slot);
    trace_spans_.resize(couplings.size());
    for (size_t k = 0; k < couplings.size(); ++k)
      trace_spans_[k] = state_.phi_prev_at(couplings[k].other_slot);
    kernel_.advance(state_, slot, t_, dt, trace_spans_);
    ++updates_;
  }
  t_ += dt;
  for (int slot = 0; slot < n; ++slot) {
    state_.t_prev[slot] = state_.t_curr[slot];
    state_.t_curr[slot] = t_;
  }
  for (double v : state_.phi) {
    if (!std::isfinite(v))
      throw DivergenceError("uniform solver diverged", t_);
  }
}

UniformRunResult uniform_step_run(const ForestMesh& mesh, const ElementOps& ops,
                                  const Basis& basis, const CellModel& model,
                                  const StimulusProtocol& stim,
                                  const FieldState& initial, double dt,
                                  double t_end, double snapshot_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("uniform_step_run: dt must be > 0");
  UniformRunResult result;
  result.trajectory.extent = mesh.extent();
  result.trajectory.counts = mesh.root_counts();
  result.trajectory.dim = mesh.dim();

  double min_bound = std::numeric_limits<double>::infinity();
  for (int slot = 0; slot < ops.n_slots(); ++slot)
    min_bound = std::min(min_bound, ops.gershgorin_dt_bound(slot));
  if (dt > min_bound) {
    result.cfl_warning = true;
    std::cerr << "uniform_step_run: dt=" << dt
              << " ms exceeds the estimated stable step " << min_bound
              << " ms; proceeding (the estimate is conservative)\n";
  }

  UniformEngine engine(mesh, ops, basis, model, stim, initial);
  const int64_t n_steps = std::llround(t_end / dt);
  const int64_t snap_stride =
      snapshot_every > 0.0 ? std::max<int64_t>(1, std::llround(snapshot_every / dt))
                           : 0;

  result.trajectory.append(take_snapshot(mesh, basis, engine.state(), 0.0));
  double wall = 0.0;
  for (int64_t k = 0; k < n_steps; ++k) {
    const auto w0 = std::chrono::steady_clock::now();
    engine.step(dt);
    wall += std::chrono::duration<double>(std::chrono::steady_clock::now() - w0)
                .count();
    const bool last = (k == n_steps - 1);
    if ((snap_stride > 0 && (k + 1) % snap_stride == 0 && !last) || last)
      result.trajectory.append(
          take_snapshot(mesh, basis, engine.state(), engine.time()));
  }
  result.element_updates = engine.element_updates();
  result.steps = n_steps;
  result.wall_seconds = wall;
  return result;
}

StateDiff compare_states(const FieldState& a, const FieldState& b,
                         const ElementOps& ops) {
  if (a.generation != b.generation || a.elems != b.elems || a.n_dofs != b.n_dofs)
    throw LayoutError("compare_states: fields live on different layouts");
  StateDiff d;
  d.per_element_max.assign(a.n_elems(), 0.0);
  double l2sq = 0.0;
  for (int slot = 0; slot < a.n_elems(); ++slot) {
    const auto pa = a.phi_at(slot);
    const auto pb = b.phi_at(slot);
    const auto mass = ops.mass_diag(slot);
    double emax = 0.0;
    for (int i = 0; i < a.n_dofs; ++i) {
      const double diff = pa[i] - pb[i];
      emax = std::max(emax, std::abs(diff));
      l2sq += mass[i] * diff * diff;
    }
    d.per_element_max[slot] = emax;
    d.linf = std::max(d.linf, emax);
  }
  d.l2 = std::sqrt(l2sq);
  return d;
}

}  // namespace monodg
