#include "core/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/vtk.hpp"

namespace monodg {

namespace {

void apply_initial_condition(const RunConfig& cfg, const ForestMesh& mesh,
                             const Basis& basis, const CellModel& model,
                             FieldState& f) {
  const double lx = cfg.extent[0];
  const double ly = cfg.dim == 2 ? cfg.extent[1] : 1.0;
  std::vector<double> rest(model.n_states());
  model.rest_states(rest);

  if (cfg.init == InitKind::rest) {
    fill_field(
        mesh, basis, f, [&](std::array<double, 2>) { return model.rest_phi(); },
        [&](std::array<double, 2>, std::span<double> s) {
          for (int k = 0; k < model.n_states(); ++k) s[k] = rest[k];
        });
    return;
  }
  fill_field(
      mesh, basis, f,
      [&](std::array<double, 2> x) {
        double a = x[0] / lx;
        if (cfg.init_mirror_x) a = 1.0 - a;
        return cfg.init_phi_from + a * (cfg.init_phi_to - cfg.init_phi_from);
      },
      [&](std::array<double, 2> x, std::span<double> s) {
        for (int k = 0; k < model.n_states(); ++k) s[k] = rest[k];
        const double b = cfg.dim == 2 ? x[1] / ly : 0.0;
        s[0] = cfg.init_gate_from + b * (cfg.init_gate_to - cfg.init_gate_from);
      });
}

std::string format_csv_row(int64_t step, const BarrierStats& s, bool timing) {
  char buf[256];
  if (timing) {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%d,%lld,%lld,%d,%d,%d,%.3f",
                  (long long)step, s.t_start, s.n_active,
                  (long long)s.element_updates, (long long)s.max_substeps,
                  s.max_level, s.n_refined, s.n_coarsened, s.wall_ms);
  } else {
    std::snprintf(buf, sizeof buf, "%lld,%.9g,%d,%lld,%lld,%d,%d,%d",
                  (long long)step, s.t_start, s.n_active,
                  (long long)s.element_updates, (long long)s.max_substeps,
                  s.max_level, s.n_refined, s.n_coarsened);
  }
  return buf;
}

}  // namespace

Problem build_problem(const RunConfig& cfg) {
  Problem p;
  p.mesh = std::make_unique<ForestMesh>(cfg.extent, cfg.counts, cfg.dim,
                                        cfg.max_level);
  p.basis = std::make_unique<Basis>(cfg.order, cfg.dim);
  p.model = make_cell_model(cfg.model_name, cfg.model_params);
  p.ops = std::make_unique<ElementOps>(*p.mesh, *p.basis, cfg.diffusion,
                                       cfg.effective_gamma());
  p.stimulus = cfg.stimulus;
  p.initial = make_field_state(*p.mesh, *p.basis, p.model->n_states());
  apply_initial_condition(cfg, *p.mesh, *p.basis, *p.model, p.initial);
  return p;
}

RunResult run_simulation(const RunConfig& cfg, const ConfigMap& raw) {
  Problem prob = build_problem(cfg);
  RunResult result;
  result.config_hash = raw.hash();
  result.trajectory.config_hash = result.config_hash;
  result.trajectory.extent = prob.mesh->extent();
  result.trajectory.counts = prob.mesh->root_counts();
  result.trajectory.dim = cfg.dim;

  const bool to_disk = !cfg.output_dir.empty();
  std::filesystem::path dir(cfg.output_dir);
  std::ofstream steps_csv;
  if (to_disk) {
    std::filesystem::create_directories(dir / "snapshots");
    steps_csv.open(dir / "steps.csv");
    steps_csv << "step,t_ms,elements,element_updates,max_substeps,max_level,"
                 "refined,coarsened";
    if (cfg.timing_output) steps_csv << ",wall_ms";
    steps_csv << "\n";
  }

  std::vector<std::pair<double, std::string>> manifest;
  auto emit_snapshot = [&](const Snapshot& snap) {
    if (to_disk) {
      char name[64];
      std::snprintf(name, sizeof name, "snap_%06zu.vtk", manifest.size());
      write_vtk(snap, *prob.basis, (dir / "snapshots" / name).string());
      manifest.emplace_back(snap.time, std::string("snapshots/") + name);
    }
    result.trajectory.append(snap);
  };

  if (cfg.solver == SolverKind::uniform) {
    const UniformRunResult uni = uniform_step_run(
        *prob.mesh, *prob.ops, *prob.basis, *prob.model, prob.stimulus,
        prob.initial, cfg.uniform_dt, cfg.t_end, cfg.snapshot_every);
    for (const Snapshot& s : uni.trajectory.snaps) emit_snapshot(s);
    result.steps = uni.steps;
    result.element_updates = uni.element_updates;
    result.wall_seconds = uni.wall_seconds;
    result.final_elements = prob.mesh->n_active();
    result.max_level_seen = 0;
    for (ElementId e : prob.mesh->active_elements())
      result.max_level_seen = std::max(result.max_level_seen, prob.mesh->level(e));
    result.phi_min = std::numeric_limits<double>::infinity();
    result.phi_max = -std::numeric_limits<double>::infinity();
    for (const Snapshot& s : uni.trajectory.snaps)
      for (double v : s.phi) {
        result.phi_min = std::min(result.phi_min, v);
        result.phi_max = std::max(result.phi_max, v);
      }
  } else {
    SltsOptions opts;
    opts.dt_barrier = cfg.dt_barrier;
    opts.tau_refine = cfg.tau_refine;
    opts.tau_coarsen = cfg.effective_tau_coarsen();
    opts.tau_cell = cfg.tau_cell;
    opts.dt_cell = cfg.dt_cell;
    opts.amr = cfg.amr;
    opts.cell_substepping = cfg.cell_substepping;
    SltsEngine engine(*prob.mesh, *prob.ops, *prob.basis, *prob.model,
                      prob.stimulus, std::move(prob.initial), opts);

    emit_snapshot(take_snapshot(*prob.mesh, *prob.basis, engine.state(), 0.0));
    const int64_t snap_stride =
        cfg.snapshot_every > 0.0
            ? std::max<int64_t>(1, std::llround(cfg.snapshot_every / cfg.dt_barrier))
            : 0;
    int64_t step = 0;
    double wall = 0.0;
    while (engine.time() < cfg.t_end - 1e-9) {
      const BarrierStats stats = engine.barrier_step();
      wall += stats.wall_ms * 1e-3;
      ++step;
      result.max_level_seen = std::max(result.max_level_seen, stats.max_level);
      if (to_disk)
        steps_csv << format_csv_row(step, stats, cfg.timing_output) << "\n";
      const bool last = engine.time() >= cfg.t_end - 1e-9;
      if ((snap_stride > 0 && step % snap_stride == 0 && !last) || last)
        emit_snapshot(
            take_snapshot(*prob.mesh, *prob.basis, engine.state(), engine.time()));
    }
    result.steps = step;
    result.element_updates = engine.counters().element_updates;
    result.wall_seconds = wall;
    result.final_elements = prob.mesh->n_active();
    result.phi_min = engine.counters().phi_min;
    result.phi_max = engine.counters().phi_max;
  }

  nlohmann::json summary{
      {"config_hash", result.config_hash},
      {"solver", cfg.solver == SolverKind::uniform ? "uniform" : "slts"},
      {"t_end_ms", cfg.t_end},
      {"steps", result.steps},
      {"element_updates", result.element_updates},
      {"final_elements", result.final_elements},
      {"max_level_seen", result.max_level_seen},
      {"phi_min_mv", result.phi_min},
      {"phi_max_mv", result.phi_max},
      {"snapshots", result.trajectory.snaps.size()},
  };
  if (cfg.timing_output) summary["wall_seconds"] = result.wall_seconds;
  result.summary_json = summary.dump();

  if (to_disk) {
    write_manifest((dir / "manifest.txt").string(), manifest);
    std::ofstream(dir / "summary.json") << result.summary_json << "\n";
  }
  return result;
}

}  // namespace monodg
