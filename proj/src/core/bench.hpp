#ifndef MONODG_CORE_BENCH_HPP
#define MONODG_CORE_BENCH_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/runner.hpp"

namespace monodg {

// Planar wave benchmark (1D cable or 2D strip, depending on mesh.dim):
// adaptive local-time-stepping run against uniform oracles at the matched
// finest resolution and one level finer. Conduction velocity is the
// least-squares slope of activation distance over time along the central
// half of the long axis.
struct CableReport {
  bool propagated = false;
  double cv_slts = 0.0;      // mm/ms
  double cv_oracle = 0.0;    // oracle at the matched finest resolution
  double cv_oracle_fine = 0.0;  // oracle one level finer
  double cv_self_rel_diff = 0.0;
  double cv_slts_rel_diff = 0.0;  // vs the finest oracle
  int64_t updates_slts = 0, updates_oracle = 0;
  double wall_slts = 0.0, wall_oracle = 0.0;
  std::string json;
};
CableReport bench_cable(const ConfigMap& overrides, bool timing = true);

// Spiral-wave benchmark on a square domain with the cross-gradient initial
// condition. Tracks the wavefront tip (phi = -30 mV meets gate = 0.5),
// decides whether a rotating, non-grid-locked spiral formed, and compares
// the final isoline against the uniform oracle at the matched resolution.
struct SpiralReport {
  bool spiral_formed = false;
  double turning_angle = 0.0;        // radians, signed total
  double locked_fraction_x = 0.0;    // longest axis-constant stretch / run
  double locked_fraction_y = 0.0;
  bool axis_locked = false;
  double hausdorff_vs_oracle = 0.0;  // mm
  double coarse_h = 0.0;             // root element size, mm
  std::optional<double> mirror_hausdorff;  // chirality check, mm
  int64_t updates_slts = 0, updates_oracle = 0;
  double wall_slts = 0.0, wall_oracle = 0.0;
  std::vector<std::array<double, 2>> tip_path;
  std::string json;
};
SpiralReport bench_spiral(const ConfigMap& overrides, bool with_oracle = true,
                          bool with_mirror = false, bool timing = true);

// Run two configurations and compare phi on a shared probe grid at the
// final common time.
struct CompareReport {
  double linf = 0.0;
  double l2 = 0.0;
  double t_compare = 0.0;
  std::string json;
};
CompareReport compare_runs(const ConfigMap& a, const ConfigMap& b);

// Helpers shared with the acceptance suite.
ConfigMap apply_overrides(ConfigMap base, const ConfigMap& overrides);
ConfigMap matched_uniform_config(const ConfigMap& slts_map, int extra_levels = 0);
double fit_conduction_velocity(const std::vector<double>& distance,
                               const std::vector<double>& lat);
std::vector<std::array<double, 2>> extract_isoline(const Snapshot& snap,
                                                   const Basis& basis,
                                                   std::array<double, 2> extent,
                                                   double threshold, double grid_h,
                                                   int state = -1,
                                                   double state_threshold = 0.0);
double hausdorff_distance(const std::vector<std::array<double, 2>>& a,
                          const std::vector<std::array<double, 2>>& b);

}  // namespace monodg

#endif
