#include "core/slts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "core/errors.hpp"

namespace monodg {

double cfl_estimate(const ElementOps& ops, int slot) {
  return ops.gershgorin_dt_bound(slot);
}

SubstepChoice substep_count(double dt_barrier, double cfl, double eta_t,
                            double tau_cell, double dt_cell) {
  if (!(dt_barrier > 0.0))
    throw std::invalid_argument("substep_count: dt_barrier must be > 0");
  SubstepChoice c;
  if (std::isfinite(cfl) && cfl > 0.0) {
    // Smallest b >= 0 with dt * 2^-b <= cfl; halving is exact in floating
    // point, so exact power-of-two ratios land on the tight exponent.
    double step = dt_barrier;
    while (step > cfl && c.b_cfl < 62) {
      step *= 0.5;
      ++c.b_cfl;
    }
  }
  if (eta_t > tau_cell && dt_cell > 0.0) {
    double step = dt_barrier;
    while (step > dt_cell && c.b_cell < 62) {
      step *= 0.5;
      ++c.b_cell;
    }
  }
  c.substeps = int64_t(1) << std::max(c.b_cfl, c.b_cell);
  return c;
}

void interpolate_neighbor(const FieldState& f, int slot, double t_query,
                          std::span<double> out) {
  const double tp = f.t_prev[slot], tc = f.t_curr[slot];
  if (t_query < tp - 1e-12 || t_query > tc + 1e-12)
    throw std::logic_error("interpolate_neighbor: query time outside [t_prev, t_curr]");
  const auto curr = f.phi_at(slot);
  if (tc == tp || t_query >= tc) {
    std::copy(curr.begin(), curr.end(), out.begin());
    return;
  }
  const auto prev = f.phi_prev_at(slot);
  if (t_query <= tp) {
    std::copy(prev.begin(), prev.end(), out.begin());
    return;
  }
  const double alpha = (t_query - tp) / (tc - tp);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - alpha) * prev[i] + alpha * curr[i];
}

StepKernel::StepKernel(const ForestMesh& mesh, const ElementOps& ops,
                       const CellModel& model, const StimulusProtocol& stim)
    : mesh_(&mesh), ops_(&ops), model_(&model), stim_(&stim) {}

void StepKernel::advance(FieldState& f, int slot, double t_eval, double dt,
                         std::span<const std::span<const double>> traces) {
  const int nd = f.n_dofs;
  const int ns = f.n_states;
  rate_.resize(nd);
  auto phi = f.phi_at(slot);
  auto states = f.states_at(slot);
  ops_->diffusion_rate(slot, phi, traces, rate_);

  const bool stim_active = stim_->shape != StimulusProtocol::Shape::none &&
                           t_eval >= stim_->t_start && t_eval <= stim_->t_end;
  const ElementBox box = stim_active ? mesh_->box(f.elems[slot]) : ElementBox{};

  // Gate relaxation factors exp(-dt/tau) recur across the nodes of an
  // element (dt is fixed and tau takes few values), so memoize them.
  double memo_tau[2] = {-1.0, -1.0};
  double memo_val[2] = {0.0, 0.0};
  auto gate_decay = [&](double tau) {
    if (tau == memo_tau[0]) return memo_val[0];
    if (tau == memo_tau[1]) return memo_val[1];
    memo_tau[1] = memo_tau[0];
    memo_val[1] = memo_val[0];
    memo_tau[0] = tau;
    memo_val[0] = std::exp(-dt / tau);
    return memo_val[0];
  };

  IonicRates rates;
  const Basis* basis = &ops_->basis();
  for (int node = 0; node < nd; ++node) {
    std::span<double> s{&states[size_t(node) * ns], size_t(ns)};
    model_->eval(phi[node], s, rates);
    double total = rate_[node] + rates.dphi;
    if (stim_active)
      total += stim_->eval(node_position(*basis, box, node), t_eval, mesh_->dim());
    for (int k = 0; k < ns; ++k) {
      if (model_->is_gate(k)) {
        if (!(rates.tau[k] > 0.0))
          throw std::invalid_argument("gate time constant must be > 0");
        s[k] = rates.h_inf[k] + (s[k] - rates.h_inf[k]) * gate_decay(rates.tau[k]);
      } else {
        s[k] += dt * rates.ds[k];
      }
    }
    phi[node] += dt * total;
  }
}

SltsEngine::SltsEngine(ForestMesh& mesh, ElementOps& ops, const Basis& basis,
                       const CellModel& model, const StimulusProtocol& stim,
                       FieldState initial, SltsOptions opts)
    : mesh_(&mesh),
      ops_(&ops),
      basis_(&basis),
      model_(&model),
      stim_(&stim),
      opts_(std::move(opts)),
      state_(std::move(initial)),
      kernel_(mesh, ops, model, stim) {
  if (state_.generation != mesh.generation())
    throw LayoutError("SltsEngine: initial state does not match the mesh");
  if (ops.generation() != mesh.generation())
    throw StaleTopologyError("SltsEngine: operators do not match the mesh");
  counters_.phi_min = std::numeric_limits<double>::infinity();
  counters_.phi_max = -std::numeric_limits<double>::infinity();
}

void SltsEngine::adapt_mesh(BarrierStats& stats) {
  const std::vector<double> eta_s = kelly_indicator(*mesh_, *ops_, state_);
  std::vector<ElementId> refine_set, coarsen_set;
  mark_elements(*mesh_, eta_s, opts_.tau_refine, opts_.tau_coarsen, refine_set,
                coarsen_set);

  const RefinementDelta d_ref = mesh_->refine(refine_set);
  state_ = transfer_field(*basis_, d_ref, state_);
  if (have_prev_barrier_) prev_barrier_ = transfer_field(*basis_, d_ref, prev_barrier_);
  stats.n_refined = int(d_ref.refined.size());

  // Balance ripples may have consumed marked families.
  std::erase_if(coarsen_set, [&](ElementId e) { return !mesh_->is_active(e); });
  const RefinementDelta d_coar = mesh_->coarsen(coarsen_set);
  state_ = transfer_field(*basis_, d_coar, state_);
  if (have_prev_barrier_)
    prev_barrier_ = transfer_field(*basis_, d_coar, prev_barrier_);
  stats.n_coarsened = int(d_coar.coarsened.size());

  ops_->update(*mesh_);
}

void SltsEngine::build_plan() {
  const int n = state_.n_elems();
  plan_.dt_barrier = opts_.dt_barrier;
  plan_.cfl.assign(n, 0.0);
  plan_.eta_t.assign(n, 0.0);
  plan_.substeps.assign(n, 1);
  plan_.max_substeps = 1;

  const int nd = state_.n_dofs;
  std::vector<double> stim_start, stim_mid;
  const bool use_rvt = opts_.cell_substepping && have_prev_barrier_ &&
                       std::isfinite(opts_.tau_cell);
  for (int slot = 0; slot < n; ++slot) {
    plan_.cfl[slot] = cfl_estimate(*ops_, slot);
    if (use_rvt) {
      const double t_a = t_ - opts_.dt_barrier, t_b = t_;
      // Stimulus participates in the reaction drift.
      stim_start.assign(nd, 0.0);
      stim_mid.assign(nd, 0.0);
      if (stim_->shape != StimulusProtocol::Shape::none) {
        const ElementBox box = mesh_->box(state_.elems[slot]);
        for (int node = 0; node < nd; ++node) {
          const auto x = node_position(*basis_, box, node);
          stim_start[node] = stim_->eval(x, t_a, mesh_->dim());
          stim_mid[node] = stim_->eval(x, 0.5 * (t_a + t_b), mesh_->dim());
        }
      }
      plan_.eta_t[slot] = rvt_indicator(
          *model_, *basis_, mesh_->measure(state_.elems[slot]),
          prev_barrier_.phi_at(slot), prev_barrier_.states_at(slot),
          state_.phi_at(slot), state_.states_at(slot), t_ - opts_.dt_barrier, t_,
          stim_start, stim_mid);
    }
    const SubstepChoice c =
        substep_count(opts_.dt_barrier, plan_.cfl[slot], plan_.eta_t[slot],
                      opts_.tau_cell, opts_.dt_cell);
    plan_.substeps[slot] = c.substeps;
    plan_.max_substeps = std::max(plan_.max_substeps, c.substeps);
  }

  // Synchronicity preconditions: powers of two everywhere, and face-adjacent
  // ratios that are powers of two themselves (automatic for powers of two,
  // checked as a hard runtime assertion).
  for (int slot = 0; slot < n; ++slot) {
    const int64_t s = plan_.substeps[slot];
    if ((s & (s - 1)) != 0 || plan_.max_substeps % s != 0)
      throw std::logic_error("slts: substep count is not a dividing power of two");
    ++counters_.sync_checks;
  }
}

void SltsEngine::gather_trace(int other_slot, int64_t index,
                              std::span<double> out) const {
  const int nd = state_.n_dofs;
  const int64_t ip = idx_prev_[other_slot];
  const int64_t ic = idx_curr_[other_slot];
  if (index < ip || index > ic)
    throw std::logic_error("slts: neighbor trace would require extrapolation");
  const auto curr = state_.phi_at(other_slot);
  if (ic == ip || index == ic) {
    std::copy(curr.begin(), curr.end(), out.begin());
    return;
  }
  const auto prev = state_.phi_prev_at(other_slot);
  if (index == ip) {
    std::copy(prev.begin(), prev.end(), out.begin());
    return;
  }
  const double alpha = double(index - ip) / double(ic - ip);
  const double beta = 1.0 - alpha;
  for (int i = 0; i < nd; ++i) out[i] = beta * prev[i] + alpha * curr[i];
}

void SltsEngine::sweep_all(BarrierStats& stats) {
  const int n = state_.n_elems();
  const int nd = state_.n_dofs;
  const int64_t max_s = plan_.max_substeps;
  const double dt_fine = opts_.dt_barrier / double(max_s);

  idx_curr_.assign(n, 0);
  idx_prev_.assign(n, 0);
  queues_.assign(size_t(max_s), {});
  queues_[0].resize(n);
  for (int slot = 0; slot < n; ++slot) queues_[0][slot] = slot;

  int64_t updates = 0;
  for (int64_t i = 0; i < max_s; ++i) {
    std::vector<int>& queue = queues_[i];
    if (queue.empty()) continue;
    if (opts_.queue_permutation) opts_.queue_permutation(queue);

    // Phase 1: buffer the due elements so this sweep's updates only ever
    // read pre-sweep values of their neighbors.
    for (int slot : queue) {
      std::copy(state_.phi_at(slot).begin(), state_.phi_at(slot).end(),
                state_.phi_prev.begin() + size_t(slot) * nd);
      std::copy(state_.states_at(slot).begin(), state_.states_at(slot).end(),
                state_.states_prev.begin() + size_t(slot) * nd * state_.n_states);
      state_.t_prev[slot] = state_.t_curr[slot];
      idx_prev_[slot] = idx_curr_[slot];
    }

    // Phase 2: advance.
    for (int slot : queue) {
      if (idx_curr_[slot] != i)
        throw std::logic_error("slts: queued element is not due at this sweep");
      const int64_t stride = max_s / plan_.substeps[slot];
      const double t_eval = t_ + double(i) * dt_fine;
      const double dt_e = opts_.dt_barrier / double(plan_.substeps[slot]);

      const auto couplings = ops_->couplings(slot);
      const int nc = int(couplings.size());
      trace_buf_.resize(size_t(nc) * nd);
      trace_spans_.resize(nc);
      for (int k = 0; k < nc; ++k) {
        std::span<double> buf{&trace_buf_[size_t(k) * nd], size_t(nd)};
        gather_trace(couplings[k].other_slot, i, buf);
        trace_spans_[k] = buf;
      }
      kernel_.advance(state_, slot, t_eval, dt_e, trace_spans_);
      ++updates;

      idx_curr_[slot] = i + stride;
      state_.t_curr[slot] = t_ + double(idx_curr_[slot]) * dt_fine;
      const int64_t j = i + stride;
      if (j <= max_s - 1) queues_[j].push_back(slot);
    }
    queue.clear();
    queue.shrink_to_fit();
  }

  // Exact synchronization at the barrier (integer bookkeeping).
  for (int slot = 0; slot < n; ++slot) {
    if (idx_curr_[slot] != max_s)
      throw std::logic_error("slts: element missed the barrier");
    ++counters_.sync_checks;
  }
  int64_t expected = 0;
  for (int64_t s : plan_.substeps) expected += s;
  if (updates != expected)
    throw std::logic_error("slts: element updates do not match the plan");

  stats.element_updates = updates;
  counters_.element_updates += updates;
}

BarrierStats SltsEngine::barrier_step() {
  const auto wall0 = std::chrono::steady_clock::now();
  BarrierStats stats;
  stats.t_start = t_;

  if (opts_.amr) adapt_mesh(stats);
  if (ops_->generation() != mesh_->generation()) ops_->update(*mesh_);
  if (state_.generation != mesh_->generation())
    throw StaleTopologyError("slts: state/mesh generation diverged");

  build_plan();

  // The next temporal-indicator window is [t_n, t_n + dt]; capture u(t_n)
  // before the sweep overwrites it.
  if (opts_.cell_substepping) {
    prev_barrier_ = state_;
    have_prev_barrier_ = true;
  }

  sweep_all(stats);
  t_ += opts_.dt_barrier;
  for (int slot = 0; slot < state_.n_elems(); ++slot) {
    state_.t_curr[slot] = t_;
  }

  stats.n_active = state_.n_elems();
  stats.max_substeps = plan_.max_substeps;
  for (ElementId e : mesh_->active_elements())
    stats.max_level = std::max(stats.max_level, mesh_->level(e));
  for (double v : state_.phi) {
    counters_.phi_min = std::min(counters_.phi_min, v);
    counters_.phi_max = std::max(counters_.phi_max, v);
  }
  ++counters_.barrier_steps;
  stats.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - wall0)
                      .count();
  return stats;
}

}  // namespace monodg
