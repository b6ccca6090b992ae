#include "core/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/lat.hpp"

namespace monodg {

ConfigMap apply_overrides(ConfigMap base, const ConfigMap& overrides) {
  for (const auto& [k, v] : overrides.values) base.set(k, v);
  return base;
}

namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Stable uniform step for a given problem: the Gershgorin bound rounded so
// an integer number of steps lands exactly on t_end.
double pick_uniform_dt(const RunConfig& cfg) {
  Problem prob = build_problem(cfg);
  double bound = std::numeric_limits<double>::infinity();
  for (int slot = 0; slot < prob.ops->n_slots(); ++slot)
    bound = std::min(bound, prob.ops->gershgorin_dt_bound(slot));
  if (!std::isfinite(bound)) bound = cfg.dt_barrier;
  const int64_t n = std::max<int64_t>(1, (int64_t)std::ceil(cfg.t_end / bound - 1e-12));
  return cfg.t_end / double(n);
}

}  // namespace

ConfigMap matched_uniform_config(const ConfigMap& slts_map, int extra_levels) {
  const RunConfig cfg = RunConfig::from_map(slts_map);
  ConfigMap uni = slts_map;
  const int shift = cfg.max_level + extra_levels;
  uni.set("mesh.counts_x", std::to_string(int64_t(cfg.counts[0]) << shift));
  if (cfg.dim == 2)
    uni.set("mesh.counts_y", std::to_string(int64_t(cfg.counts[1]) << shift));
  uni.set("mesh.max_level", "0");
  uni.set("amr.enabled", "false");
  uni.set("solver", "uniform");
  RunConfig probe = RunConfig::from_map(uni);
  probe.t_end = cfg.t_end;
  uni.set("uniform.dt", fmt_num(pick_uniform_dt(probe)));
  return uni;
}

double fit_conduction_velocity(const std::vector<double>& distance,
                               const std::vector<double>& lat) {
  // Least squares slope of lat over distance; CV is its reciprocal.
  const size_t n = distance.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += distance[i];
    sy += lat[i];
    sxx += distance[i] * distance[i];
    sxy += distance[i] * lat[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  const double slope = (n * sxy - sx * sy) / denom;
  if (slope <= 0.0) return 0.0;
  return 1.0 / slope;
}

CableReport bench_cable(const ConfigMap& overrides, bool timing) {
  // The 2D strip variant shares everything but the base preset.
  ConfigMap base = preset_config("cable");
  if (auto it = overrides.values.find("mesh.dim");
      it != overrides.values.end() && it->second == "2")
    base = preset_config("strip");
  const ConfigMap slts_map = apply_overrides(std::move(base), overrides);
  const RunConfig slts_cfg = RunConfig::from_map(slts_map);

  const ConfigMap oracle_map = matched_uniform_config(slts_map, 0);
  const ConfigMap oracle_fine_map = matched_uniform_config(slts_map, 1);

  CableReport report;
  RunResult run_slts = run_simulation(slts_cfg, slts_map);
  RunResult run_oracle =
      run_simulation(RunConfig::from_map(oracle_map), oracle_map);
  RunResult run_fine =
      run_simulation(RunConfig::from_map(oracle_fine_map), oracle_fine_map);

  // Activation along the long axis, central half of the domain.
  const Basis basis(slts_cfg.order, slts_cfg.dim);
  const double lx = slts_cfg.extent[0];
  const double midy = slts_cfg.dim == 2 ? 0.5 * slts_cfg.extent[1] : 0.0;
  const int n_probe = 101;
  const auto probes =
      probe_line({0.25 * lx, midy}, {0.75 * lx, midy}, n_probe);

  auto cv_of = [&](const Trajectory& traj) -> double {
    const auto lat = compute_lat(traj, basis, probes, -30.0);
    std::vector<double> xs, ts;
    for (int i = 0; i < n_probe; ++i) {
      if (lat[i] == kNeverActivated) return 0.0;
      xs.push_back(probes[i][0]);
      ts.push_back(lat[i]);
    }
    return fit_conduction_velocity(xs, ts);
  };
  report.cv_slts = cv_of(run_slts.trajectory);
  report.cv_oracle = cv_of(run_oracle.trajectory);
  report.cv_oracle_fine = cv_of(run_fine.trajectory);
  report.propagated =
      report.cv_slts > 0.0 && report.cv_oracle > 0.0 && report.cv_oracle_fine > 0.0;
  if (report.propagated) {
    report.cv_self_rel_diff =
        std::abs(report.cv_oracle - report.cv_oracle_fine) / report.cv_oracle_fine;
    report.cv_slts_rel_diff =
        std::abs(report.cv_slts - report.cv_oracle_fine) / report.cv_oracle_fine;
  }
  report.updates_slts = run_slts.element_updates;
  report.updates_oracle = run_oracle.element_updates;
  report.wall_slts = run_slts.wall_seconds;
  report.wall_oracle = run_oracle.wall_seconds;

  nlohmann::json j{
      {"benchmark", slts_cfg.dim == 2 ? "strip" : "cable"},
      {"config_hash", slts_map.hash()},
      {"propagated", report.propagated},
      {"cv_slts_mm_per_ms", report.cv_slts},
      {"cv_oracle_mm_per_ms", report.cv_oracle},
      {"cv_oracle_fine_mm_per_ms", report.cv_oracle_fine},
      {"cv_oracle_self_rel_diff", report.cv_self_rel_diff},
      {"cv_slts_rel_diff", report.cv_slts_rel_diff},
      {"element_updates_slts", report.updates_slts},
      {"element_updates_oracle", report.updates_oracle},
  };
  if (timing) {
    j["wall_seconds_slts"] = report.wall_slts;
    j["wall_seconds_oracle"] = report.wall_oracle;
  }
  if (!report.propagated) j["diagnostic"] = "wave failed to propagate";
  report.json = j.dump();
  return report;
}

namespace {

// Marching-squares segment of the zero level set inside one sampling cell,
// from the four corner values (asymptotic-decider-free; ambiguous saddles
// return no segment, which only thins the point cloud).
bool cell_segment(const double c[4], std::array<double, 2>& a,
                  std::array<double, 2>& b) {
  // Corners: 0=(0,0) 1=(1,0) 2=(1,1) 3=(0,1) in cell-local coordinates.
  std::array<std::array<double, 2>, 4> pts;
  int n = 0;
  auto edge = [&](int i, int j, double xi, double yi, double xj, double yj) {
    if ((c[i] < 0) == (c[j] < 0)) return;
    if (c[i] == c[j]) return;
    const double t = c[i] / (c[i] - c[j]);
    if (n < 4) pts[n++] = {xi + t * (xj - xi), yi + t * (yj - yi)};
  };
  edge(0, 1, 0, 0, 1, 0);
  edge(1, 2, 1, 0, 1, 1);
  edge(2, 3, 1, 1, 0, 1);
  edge(3, 0, 0, 1, 0, 0);
  if (n != 2) return false;
  a = pts[0];
  b = pts[1];
  return true;
}

bool segments_intersect(const std::array<double, 2>& p1,
                        const std::array<double, 2>& p2,
                        const std::array<double, 2>& q1,
                        const std::array<double, 2>& q2,
                        std::array<double, 2>& hit) {
  const double rx = p2[0] - p1[0], ry = p2[1] - p1[1];
  const double sx = q2[0] - q1[0], sy = q2[1] - q1[1];
  const double denom = rx * sy - ry * sx;
  if (std::abs(denom) < 1e-14) return false;
  const double qpx = q1[0] - p1[0], qpy = q1[1] - p1[1];
  const double t = (qpx * sy - qpy * sx) / denom;
  const double u = (qpx * ry - qpy * rx) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  hit = {p1[0] + t * rx, p1[1] + t * ry};
  return true;
}

}  // namespace

std::vector<std::array<double, 2>> extract_isoline(const Snapshot& snap,
                                                   const Basis& basis,
                                                   std::array<double, 2> extent,
                                                   double threshold, double grid_h,
                                                   int state,
                                                   double state_threshold) {
  // Marching squares on a regular sampling grid. With `state` < 0, returns
  // the zero crossings of phi - threshold along grid edges (isoline point
  // cloud). With `state` >= 0, returns the intersection points of the phi
  // isoline with the state-component isoline (wavefront tip candidates).
  const int nx = std::max(2, int(std::floor(extent[0] / grid_h)) + 1);
  const int ny = std::max(2, int(std::floor(extent[1] / grid_h)) + 1);
  const double hx = extent[0] / (nx - 1);
  const double hy = extent[1] / (ny - 1);
  std::vector<double> f(size_t(nx) * ny), g;
  if (state >= 0) g.resize(size_t(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::array<double, 2> x{i * hx, j * hy};
      f[size_t(j) * nx + i] = snap.eval(basis, x) - threshold;
      if (state >= 0)
        g[size_t(j) * nx + i] = snap.eval(basis, x, state) - state_threshold;
    }
  }
  std::vector<std::array<double, 2>> points;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const size_t k = size_t(j) * nx + i;
      const double fc[4] = {f[k], f[k + 1], f[k + 1 + nx], f[k + nx]};
      std::array<double, 2> fa, fb;
      if (!cell_segment(fc, fa, fb)) continue;
      if (state < 0) {
        points.push_back({(i + 0.5 * (fa[0] + fb[0])) * hx,
                          (j + 0.5 * (fa[1] + fb[1])) * hy});
        continue;
      }
      const double gc[4] = {g[k], g[k + 1], g[k + 1 + nx], g[k + nx]};
      std::array<double, 2> ga, gb, hit;
      if (!cell_segment(gc, ga, gb)) continue;
      if (segments_intersect(fa, fb, ga, gb, hit))
        points.push_back({(i + hit[0]) * hx, (j + hit[1]) * hy});
    }
  }
  return points;
}

double hausdorff_distance(const std::vector<std::array<double, 2>>& a,
                          const std::vector<std::array<double, 2>>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<std::array<double, 2>>& p,
                     const std::vector<std::array<double, 2>>& q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q) {
        const double dx = x[0] - y[0], dy = x[1] - y[1];
        best = std::min(best, dx * dx + dy * dy);
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

namespace {

// Tip of the spiral: phi threshold crossing restricted to the gate level
// set. Returns the candidate closest to `near` (continuity of the path).
std::optional<std::array<double, 2>> find_tip(const Snapshot& snap,
                                              const Basis& basis,
                                              std::array<double, 2> extent,
                                              double grid_h,
                                              std::optional<std::array<double, 2>> near) {
  const auto candidates =
      extract_isoline(snap, basis, extent, -30.0, grid_h, 0, 0.5);
  if (candidates.empty()) return std::nullopt;
  if (!near) {
    // Without history prefer the most central candidate.
    const std::array<double, 2> c{0.5 * extent[0], 0.5 * extent[1]};
    near = c;
  }
  double best = std::numeric_limits<double>::infinity();
  std::array<double, 2> pick = candidates.front();
  for (const auto& p : candidates) {
    const double dx = p[0] - (*near)[0], dy = p[1] - (*near)[1];
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      pick = p;
    }
  }
  return pick;
}

double total_turning_angle(const std::vector<std::array<double, 2>>& path) {
  double total = 0.0;
  double prev_heading = 0.0;
  bool have_heading = false;
  for (size_t i = 1; i < path.size(); ++i) {
    const double dx = path[i][0] - path[i - 1][0];
    const double dy = path[i][1] - path[i - 1][1];
    if (dx * dx + dy * dy < 1e-12) continue;
    const double heading = std::atan2(dy, dx);
    if (have_heading) {
      double d = heading - prev_heading;
      while (d > M_PI) d -= 2 * M_PI;
      while (d < -M_PI) d += 2 * M_PI;
      total += d;
    }
    prev_heading = heading;
    have_heading = true;
  }
  return total;
}

// Longest contiguous stretch (as a fraction of the whole path) over which
// one coordinate stays within `spacing`.
double locked_fraction(const std::vector<std::array<double, 2>>& path, int axis,
                       double spacing) {
  if (path.size() < 2) return 1.0;
  size_t best = 1;
  for (size_t start = 0; start < path.size(); ++start) {
    double lo = path[start][axis], hi = path[start][axis];
    for (size_t end = start + 1; end < path.size(); ++end) {
      lo = std::min(lo, path[end][axis]);
      hi = std::max(hi, path[end][axis]);
      if (hi - lo >= spacing) break;
      best = std::max(best, end - start + 1);
    }
  }
  return double(best) / double(path.size());
}

}  // namespace

SpiralReport bench_spiral(const ConfigMap& overrides, bool with_oracle,
                          bool with_mirror, bool timing) {
  const ConfigMap slts_map = apply_overrides(preset_config("spiral"), overrides);
  const RunConfig cfg = RunConfig::from_map(slts_map);
  if (cfg.dim != 2)
    throw ConfigError("bench spiral requires mesh.dim = 2", "mesh.dim", 0);

  SpiralReport report;
  report.coarse_h = cfg.extent[0] / cfg.counts[0];
  const double fine_h = report.coarse_h / double(1 << cfg.max_level);
  const Basis basis(cfg.order, cfg.dim);

  RunResult run_slts = run_simulation(cfg, slts_map);
  report.updates_slts = run_slts.element_updates;
  report.wall_slts = run_slts.wall_seconds;

  // Tip per snapshot.
  std::optional<std::array<double, 2>> tip;
  for (const Snapshot& s : run_slts.trajectory.snaps) {
    tip = find_tip(s, basis, cfg.extent, fine_h, tip);
    if (tip) report.tip_path.push_back(*tip);
  }
  report.turning_angle = total_turning_angle(report.tip_path);
  report.locked_fraction_x = locked_fraction(report.tip_path, 0, report.coarse_h);
  report.locked_fraction_y = locked_fraction(report.tip_path, 1, report.coarse_h);
  report.axis_locked =
      report.locked_fraction_x > 0.25 || report.locked_fraction_y > 0.25;
  report.spiral_formed = report.tip_path.size() >= 8 &&
                         std::abs(report.turning_angle) > 2 * M_PI &&
                         !report.axis_locked;

  const auto iso_slts = extract_isoline(run_slts.trajectory.snaps.back(), basis,
                                        cfg.extent, -30.0, fine_h);
  if (with_oracle) {
    const ConfigMap oracle_map = matched_uniform_config(slts_map, 0);
    RunResult run_oracle =
        run_simulation(RunConfig::from_map(oracle_map), oracle_map);
    report.updates_oracle = run_oracle.element_updates;
    report.wall_oracle = run_oracle.wall_seconds;
    const auto iso_oracle = extract_isoline(run_oracle.trajectory.snaps.back(),
                                            basis, cfg.extent, -30.0, fine_h);
    report.hausdorff_vs_oracle = hausdorff_distance(iso_slts, iso_oracle);
  }
  if (with_mirror) {
    ConfigMap mirror_map = slts_map;
    mirror_map.set("init.mirror_x", "true");
    RunResult run_mirror =
        run_simulation(RunConfig::from_map(mirror_map), mirror_map);
    auto iso_mirror = extract_isoline(run_mirror.trajectory.snaps.back(), basis,
                                      cfg.extent, -30.0, fine_h);
    for (auto& p : iso_mirror) p[0] = cfg.extent[0] - p[0];
    report.mirror_hausdorff = hausdorff_distance(iso_slts, iso_mirror);
  }

  nlohmann::json j{
      {"benchmark", "spiral"},
      {"config_hash", slts_map.hash()},
      {"spiral_formed", report.spiral_formed},
      {"turning_angle_rad", report.turning_angle},
      {"locked_fraction_x", report.locked_fraction_x},
      {"locked_fraction_y", report.locked_fraction_y},
      {"axis_locked", report.axis_locked},
      {"coarse_h_mm", report.coarse_h},
      {"element_updates_slts", report.updates_slts},
  };
  if (with_oracle) {
    j["hausdorff_vs_oracle_mm"] = report.hausdorff_vs_oracle;
    j["element_updates_oracle"] = report.updates_oracle;
  }
  if (report.mirror_hausdorff) j["mirror_hausdorff_mm"] = *report.mirror_hausdorff;
  if (timing) {
    j["wall_seconds_slts"] = report.wall_slts;
    if (with_oracle) j["wall_seconds_oracle"] = report.wall_oracle;
  }
  if (!report.spiral_formed) j["diagnostic"] = "no sustained rotating wave";
  report.json = j.dump();
  return report;
}

CompareReport compare_runs(const ConfigMap& a, const ConfigMap& b) {
  const RunConfig cfg_a = RunConfig::from_map(a);
  const RunConfig cfg_b = RunConfig::from_map(b);
  RunResult ra = run_simulation(cfg_a, a);
  RunResult rb = run_simulation(cfg_b, b);

  const Basis basis_a(cfg_a.order, cfg_a.dim);
  const Basis basis_b(cfg_b.order, cfg_b.dim);
  const Snapshot& sa = ra.trajectory.snaps.back();
  const Snapshot& sb = rb.trajectory.snaps.back();

  CompareReport rep;
  rep.t_compare = std::min(sa.time, sb.time);
  const Snapshot& fa = sa;  // compared at each run's final state
  const int nx = 64, ny = cfg_a.dim == 2 ? 64 : 1;
  double l2 = 0.0, linf = 0.0;
  int count = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::array<double, 2> x{
          (i + 0.5) / nx * cfg_a.extent[0],
          cfg_a.dim == 2 ? (j + 0.5) / ny * cfg_a.extent[1] : 0.0};
      const double va = fa.eval(basis_a, x);
      const double vb = sb.eval(basis_b, x);
      const double d = va - vb;
      linf = std::max(linf, std::abs(d));
      l2 += d * d;
      ++count;
    }
  }
  rep.linf = linf;
  rep.l2 = std::sqrt(l2 / count);
  nlohmann::json j{
      {"config_hash_a", a.hash()},   {"config_hash_b", b.hash()},
      {"t_compare_ms", rep.t_compare}, {"linf_mv", rep.linf},
      {"l2_rms_mv", rep.l2},
  };
  rep.json = j.dump();
  return rep;
}

}  // namespace monodg
