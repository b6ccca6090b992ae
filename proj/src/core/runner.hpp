#ifndef MONODG_CORE_RUNNER_HPP
#define MONODG_CORE_RUNNER_HPP

#include <memory>
#include <string>

#include "core/config.hpp"
#include "core/refsolver.hpp"
#include "core/slts.hpp"
#include "core/trajectory.hpp"

namespace monodg {

// Mesh, discretization, and initial data assembled from a validated config.
struct Problem {
  std::unique_ptr<ForestMesh> mesh;
  std::unique_ptr<Basis> basis;
  std::unique_ptr<CellModel> model;
  std::unique_ptr<ElementOps> ops;
  StimulusProtocol stimulus;
  FieldState initial;
};

Problem build_problem(const RunConfig& cfg);

struct RunResult {
  Trajectory trajectory;
  int64_t steps = 0;            // barrier steps (slts) or global steps (uniform)
  int64_t element_updates = 0;  // sum over steps of per-element updates
  double wall_seconds = 0.0;    // stepping only; snapshots and file IO excluded
  double phi_min = 0.0, phi_max = 0.0;
  int final_elements = 0;
  int max_level_seen = 0;
  std::string config_hash;
  std::string summary_json;
};

// Execute the configured solver. When cfg.output_dir is set, snapshots
// (VTK + manifest), per-step statistics (steps.csv) and a summary
// (summary.json) are written there.
RunResult run_simulation(const RunConfig& cfg, const ConfigMap& raw);

}  // namespace monodg

#endif
