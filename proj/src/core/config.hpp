#ifndef MONODG_CORE_CONFIG_HPP
#define MONODG_CORE_CONFIG_HPP

#include <array>
#include <map>
#include <string>

#include "core/ionics.hpp"
#include "core/sipg.hpp"

namespace monodg {

// Raw key = value pairs in file order, with line numbers for diagnostics.
struct ConfigMap {
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;

  void set(const std::string& key, const std::string& value, int line = 0);
  // Canonical text (sorted key = value lines) and its FNV-1a hash.
  std::string canonical_text() const;
  std::string hash() const;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

enum class SolverKind { slts, uniform };
enum class InitKind { rest, gradient };

// Fully validated run description. Unknown keys and malformed values are
// rejected with key- and line-precise messages.
struct RunConfig {
  int dim = 1;
  std::array<double, 2> extent{20.0, 0.0};
  std::array<int, 2> counts{20, 1};
  int max_level = 6;
  int order = 1;

  DiffusionTensor diffusion{0.1334, 0.0176, 0.0};
  double gamma = 0.0;  // 0: pick by order (4, 8, 16)

  double dt_barrier = 0.15;
  double t_end = 50.0;

  bool amr = true;
  double tau_refine = 0.75;
  double tau_coarsen = -1.0;  // <0: tau_refine / 3

  bool cell_substepping = true;
  double tau_cell = 0.5;
  double dt_cell = 0.01;

  std::string model_name = "mitchell-schaeffer";
  std::map<std::string, double> model_params;

  StimulusProtocol stimulus;

  InitKind init = InitKind::rest;
  double init_phi_from = 10.0, init_phi_to = -85.0;
  double init_gate_from = 0.6, init_gate_to = 0.1;
  bool init_mirror_x = false;

  SolverKind solver = SolverKind::slts;
  double uniform_dt = 0.01;

  std::string output_dir;
  double snapshot_every = 1.0;
  bool timing_output = true;
  long seed = 0;

  double effective_gamma() const;
  double effective_tau_coarsen() const;

  static RunConfig from_map(const ConfigMap& map);
};

// Baseline configurations for the shipped benchmarks.
ConfigMap preset_config(const std::string& name);  // "cable" | "strip" | "spiral"

}  // namespace monodg

#endif
