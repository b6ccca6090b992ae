// Short end-to-end runs through the runner and benchmark plumbing: fast
// versions of the behaviors the acceptance suite checks at full scale.
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "core/bench.hpp"
#include "core/config.hpp"
#include "core/indicators.hpp"
#include "core/lat.hpp"
#include "core/runner.hpp"
#include "core/vtk.hpp"

using namespace monodg;

namespace {

ConfigMap short_cable(double t_end = 6.0) {
  ConfigMap map = preset_config("cable");
  map.set("time.t_end", std::to_string(t_end));
  map.set("mesh.max_level", "2");
  return map;
}

std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("cable run produces artifacts and a monotone activation profile") {
  ConfigMap map = short_cable(16.0);  // front travels ~0.4 mm/ms
  const std::string dir = fresh_dir("monodg_run_cable");
  map.set("output.dir", dir);
  const RunConfig cfg = RunConfig::from_map(map);
  const RunResult result = run_simulation(cfg, map);

  CHECK(result.steps > 0);
  CHECK(std::filesystem::exists(dir + "/manifest.txt"));
  CHECK(std::filesystem::exists(dir + "/steps.csv"));
  CHECK(std::filesystem::exists(dir + "/summary.json"));
  CHECK(read_manifest(dir + "/manifest.txt").size() ==
        result.trajectory.snaps.size());

  // Activation time grows with distance from the stimulus.
  const Basis basis(cfg.order, cfg.dim);
  const auto probes = probe_line({1.0, 0.0}, {5.0, 0.0}, 17);
  const auto lat = compute_lat(result.trajectory, basis, probes, -30.0);
  double prev = -1.0;
  for (double v : lat) {
    REQUIRE(v != kNeverActivated);
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
}

TEST_CASE("zero t_end emits only the initial snapshot") {
  ConfigMap map = short_cable(0.0);
  const RunConfig cfg = RunConfig::from_map(map);
  const RunResult result = run_simulation(cfg, map);
  CHECK(result.steps == 0);
  CHECK(result.trajectory.snaps.size() == 1);
}

TEST_CASE("determinism: identical configs give byte-identical artifacts") {
  auto run_to = [&](const std::string& dir) {
    ConfigMap map = short_cable(3.0);
    map.set("output.dir", dir);
    map.set("output.timing", "false");
    run_simulation(RunConfig::from_map(map), map);
  };
  const std::string d1 = fresh_dir("monodg_det_a");
  const std::string d2 = fresh_dir("monodg_det_b");
  run_to(d1);
  run_to(d2);
  for (const char* rel : {"/steps.csv", "/manifest.txt", "/summary.json"}) {
    std::ifstream a(d1 + rel), b(d2 + rel);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }
  // Final snapshots byte-identical too.
  const auto ma = read_manifest(d1 + "/manifest.txt");
  std::ifstream a(d1 + "/" + ma.back().second), b(d2 + "/" + ma.back().second);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("refined band stays contiguous along the cable front") {
  // One barrier step of the cable with AMR active: the refined elements
  // around the front form one contiguous interval along x.
  ConfigMap map = short_cable(6.0);
  const RunConfig cfg = RunConfig::from_map(map);
  Problem prob = build_problem(cfg);
  SltsOptions opts;
  opts.dt_barrier = cfg.dt_barrier;
  opts.tau_refine = cfg.tau_refine;
  opts.tau_coarsen = cfg.effective_tau_coarsen();
  opts.tau_cell = cfg.tau_cell;
  opts.dt_cell = cfg.dt_cell;
  SltsEngine engine(*prob.mesh, *prob.ops, *prob.basis, *prob.model,
                    prob.stimulus, std::move(prob.initial), opts);
  for (int i = 0; i < 40; ++i) engine.barrier_step();  // 6 ms in

  const auto eta = kelly_indicator(*prob.mesh, *prob.ops, engine.state());
  std::vector<ElementId> refine_set, coarsen_set;
  mark_elements(*prob.mesh, eta, opts.tau_refine, opts.tau_coarsen, refine_set,
                coarsen_set);
  REQUIRE(!refine_set.empty());
  std::vector<double> lo, hi;
  for (ElementId e : refine_set) {
    lo.push_back(prob.mesh->box(e).lo[0]);
    hi.push_back(prob.mesh->box(e).lo[0] + prob.mesh->box(e).size[0]);
  }
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());
  for (size_t i = 0; i + 1 < lo.size(); ++i)
    CHECK(lo[i + 1] <= hi[i] + 1e-9);  // intervals chain without gaps

  // Front tracking: the strongest indicator sits within two elements of the
  // steepest gradient.
  const FieldState& f = engine.state();
  int argmax_eta = 0;
  for (size_t i = 0; i < eta.size(); ++i)
    if (eta[i] > eta[argmax_eta]) argmax_eta = int(i);
  // Steepest element-mean gradient via nodal differences.
  int steepest = 0;
  double best = -1.0;
  for (int slot = 0; slot < f.n_elems(); ++slot) {
    const auto phi = f.phi_at(slot);
    const double slope =
        std::abs(phi[f.n_dofs - 1] - phi[0]) / prob.mesh->box(f.elems[slot]).size[0];
    if (slope > best) {
      best = slope;
      steepest = slot;
    }
  }
  const double x_eta = prob.mesh->box(f.elems[argmax_eta]).lo[0];
  const double x_grad = prob.mesh->box(f.elems[steepest]).lo[0];
  const double h_fine = prob.mesh->box(f.elems[steepest]).size[0];
  CHECK(std::abs(x_eta - x_grad) <= 2.0 * h_fine + 1e-9);
}

TEST_CASE("compare of a config against itself reports zero difference") {
  ConfigMap map = short_cable(3.0);
  const CompareReport rep = compare_runs(map, map);
  CHECK(rep.linf == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.l2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("conduction velocity fit recovers a synthetic slope") {
  std::vector<double> x, t;
  for (int i = 0; i < 20; ++i) {
    x.push_back(2.0 + 0.1 * i);
    t.push_back(4.0 + 0.2 * i);  // slope 2 ms/mm -> cv 0.5
  }
  CHECK(fit_conduction_velocity(x, t) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hausdorff distance on simple point sets") {
  std::vector<std::array<double, 2>> a{{0, 0}, {1, 0}};
  std::vector<std::array<double, 2>> b{{0, 0.5}, {1, 0.5}};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5));
  CHECK(hausdorff_distance(a, a) == 0.0);
}

TEST_CASE("matched uniform config mirrors the adaptive one at its finest level") {
  const ConfigMap map = short_cable(6.0);
  const ConfigMap uni = matched_uniform_config(map, 0);
  const RunConfig a = RunConfig::from_map(map);
  const RunConfig b = RunConfig::from_map(uni);
  CHECK(b.counts[0] == a.counts[0] * (1 << a.max_level));
  CHECK(b.max_level == 0);
  CHECK(b.solver == SolverKind::uniform);
  CHECK(b.amr == false);
  CHECK(b.uniform_dt > 0.0);
}
