#include "core/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"

namespace monodg {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(uint8_t(s[a]))) ++a;
  while (b > a && std::isspace(uint8_t(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mesh.dim",        "mesh.extent_x",       "mesh.extent_y",
      "mesh.counts_x",   "mesh.counts_y",       "mesh.max_level",
      "basis.order",     "diffusion.dxx",       "diffusion.dyy",
      "diffusion.dxy",   "sipg.gamma",          "time.dt_barrier",
      "time.t_end",      "amr.enabled",         "amr.tau_refine",
      "amr.tau_coarsen", "lts.substepping",     "lts.tau_cell",
      "lts.dt_cell",     "model.name",          "stim.shape",
      "stim.center_x",   "stim.center_y",       "stim.half_x",
      "stim.half_y",     "stim.radius",         "stim.amplitude",
      "stim.t_start",    "stim.t_end",          "init.kind",
      "init.phi_from",   "init.phi_to",         "init.gate_from",
      "init.gate_to",    "init.mirror_x",       "solver",
      "uniform.dt",      "output.dir",          "output.snapshot_every",
      "output.timing",   "seed",
  };
  return keys;
}

bool is_known_key(const std::string& key) {
  if (known_keys().count(key)) return true;
  // Cell-model parameter overrides: model.<param> = value.
  return key.rfind("model.", 0) == 0 && key != "model.";
}

class Reader {
 public:
  explicit Reader(const ConfigMap& map) : map_(&map) {}

  bool has(const std::string& key) const { return map_->values.count(key) != 0; }
  int line(const std::string& key) const {
    auto it = map_->lines.find(key);
    return it == map_->lines.end() ? 0 : it->second;
  }

  double number(const std::string& key, double fallback) const {
    auto it = map_->values.find(key);
    if (it == map_->values.end()) return fallback;
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("config key '" + key + "' expects a number, got '" +
                            it->second + "'",
                        key, line(key));
    }
  }

  long integer(const std::string& key, long fallback) const {
    auto it = map_->values.find(key);
    if (it == map_->values.end()) return fallback;
    try {
      size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("config key '" + key + "' expects an integer, got '" +
                            it->second + "'",
                        key, line(key));
    }
  }

  bool boolean(const std::string& key, bool fallback) const {
    auto it = map_->values.find(key);
    if (it == map_->values.end()) return fallback;
    if (it->second == "true" || it->second == "on" || it->second == "1") return true;
    if (it->second == "false" || it->second == "off" || it->second == "0")
      return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" +
                          it->second + "'",
                      key, line(key));
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = map_->values.find(key);
    return it == map_->values.end() ? fallback : it->second;
  }

  void require(bool cond, const std::string& key, const std::string& what) const {
    if (!cond) throw ConfigError("config key '" + key + "': " + what, key, line(key));
  }

 private:
  const ConfigMap* map_;
};

}  // namespace

void ConfigMap::set(const std::string& key, const std::string& value, int line) {
  if (!is_known_key(key))
    throw ConfigError("unknown config key '" + key + "'", key, line);
  values[key] = value;
  if (line > 0) lines[key] = line;
}

std::string ConfigMap::canonical_text() const {
  // output.* keys only steer where artifacts land; the hash identifies the
  // simulation itself.
  std::ostringstream out;
  for (const auto& [k, v] : values)
    if (k.rfind("output.", 0) != 0) out << k << " = " << v << "\n";
  return out.str();
}

std::string ConfigMap::hash() const {
  uint64_t h = 1469598103934665603ull;
  for (char c : canonical_text()) {
    h ^= uint8_t(c);
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                            ": expected 'key = value', got '" + line + "'",
                        "", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value",
                        key, line_no);
    map.set(key, value, line_no);
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

double RunConfig::effective_gamma() const {
  if (gamma > 0.0) return gamma;
  switch (order) {
    case 1: return 4.0;
    case 2: return 8.0;
    default: return 16.0;
  }
}

double RunConfig::effective_tau_coarsen() const {
  return tau_coarsen >= 0.0 ? tau_coarsen : tau_refine / 3.0;
}

RunConfig RunConfig::from_map(const ConfigMap& map) {
  const Reader r(map);
  RunConfig c;

  c.dim = int(r.integer("mesh.dim", 1));
  r.require(c.dim == 1 || c.dim == 2, "mesh.dim", "must be 1 or 2");
  c.extent[0] = r.number("mesh.extent_x", 20.0);
  r.require(c.extent[0] > 0.0, "mesh.extent_x", "must be > 0");
  c.counts[0] = int(r.integer("mesh.counts_x", 20));
  r.require(c.counts[0] >= 1, "mesh.counts_x", "must be >= 1");
  if (c.dim == 2) {
    c.extent[1] = r.number("mesh.extent_y", 7.0);
    r.require(c.extent[1] > 0.0, "mesh.extent_y", "must be > 0");
    c.counts[1] = int(r.integer("mesh.counts_y", 7));
    r.require(c.counts[1] >= 1, "mesh.counts_y", "must be >= 1");
  }
  c.max_level = int(r.integer("mesh.max_level", 6));
  r.require(c.max_level >= 0 && c.max_level <= 12, "mesh.max_level",
            "must be in [0, 12]");
  c.order = int(r.integer("basis.order", 1));
  r.require(c.order >= 1 && c.order <= 3, "basis.order", "must be in [1, 3]");

  c.diffusion.dxx = r.number("diffusion.dxx", 0.1334);
  c.diffusion.dyy = r.number("diffusion.dyy", 0.0176);
  c.diffusion.dxy = r.number("diffusion.dxy", 0.0);
  try {
    c.diffusion.validate(c.dim);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config key 'diffusion.*': ") + e.what(),
                      "diffusion.dxx", r.line("diffusion.dxx"));
  }
  c.gamma = r.number("sipg.gamma", 0.0);
  r.require(c.gamma >= 0.0, "sipg.gamma", "must be >= 0 (0 selects the default)");

  c.dt_barrier = r.number("time.dt_barrier", 0.15);
  r.require(c.dt_barrier > 0.0, "time.dt_barrier", "must be > 0");
  c.t_end = r.number("time.t_end", 50.0);
  r.require(c.t_end >= 0.0, "time.t_end", "must be >= 0");

  c.amr = r.boolean("amr.enabled", true);
  c.tau_refine = r.number("amr.tau_refine", 0.75);
  r.require(c.tau_refine > 0.0, "amr.tau_refine", "must be > 0");
  c.tau_coarsen = r.number("amr.tau_coarsen", -1.0);
  r.require(c.effective_tau_coarsen() < c.tau_refine, "amr.tau_coarsen",
            "must be below amr.tau_refine");

  c.cell_substepping = r.boolean("lts.substepping", true);
  c.tau_cell = r.number("lts.tau_cell", 0.5);
  c.dt_cell = r.number("lts.dt_cell", 0.01);
  r.require(c.dt_cell > 0.0, "lts.dt_cell", "must be > 0");

  c.model_name = r.text("model.name", "mitchell-schaeffer");
  for (const auto& [key, value] : map.values) {
    if (key.rfind("model.", 0) == 0 && key != "model.name")
      c.model_params[key.substr(6)] = r.number(key, 0.0);
  }
  try {
    make_cell_model(c.model_name, c.model_params);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config key 'model.*': ") + e.what(),
                      "model.name", r.line("model.name"));
  }

  const std::string shape = r.text("stim.shape", "none");
  if (shape == "none")
    c.stimulus.shape = StimulusProtocol::Shape::none;
  else if (shape == "box")
    c.stimulus.shape = StimulusProtocol::Shape::box;
  else if (shape == "ball")
    c.stimulus.shape = StimulusProtocol::Shape::ball;
  else
    throw ConfigError("config key 'stim.shape': must be none|box|ball",
                      "stim.shape", r.line("stim.shape"));
  c.stimulus.center = {r.number("stim.center_x", 0.0), r.number("stim.center_y", 0.0)};
  c.stimulus.half_size = {r.number("stim.half_x", 1.0), r.number("stim.half_y", 1.0)};
  c.stimulus.radius = r.number("stim.radius", 1.0);
  c.stimulus.amplitude = r.number("stim.amplitude", 50.0);
  c.stimulus.t_start = r.number("stim.t_start", 0.0);
  c.stimulus.t_end = r.number("stim.t_end", 2.0);
  if (c.stimulus.shape != StimulusProtocol::Shape::none) {
    r.require(c.stimulus.t_end > c.stimulus.t_start, "stim.t_end",
              "must be after stim.t_start");
    if (c.stimulus.shape == StimulusProtocol::Shape::ball)
      r.require(c.stimulus.radius > 0.0, "stim.radius", "must be > 0");
    else
      r.require(c.stimulus.half_size[0] > 0.0 && c.stimulus.half_size[1] > 0.0,
                "stim.half_x", "must be > 0");
  }

  const std::string init = r.text("init.kind", "rest");
  if (init == "rest")
    c.init = InitKind::rest;
  else if (init == "gradient")
    c.init = InitKind::gradient;
  else
    throw ConfigError("config key 'init.kind': must be rest|gradient", "init.kind",
                      r.line("init.kind"));
  c.init_phi_from = r.number("init.phi_from", 10.0);
  c.init_phi_to = r.number("init.phi_to", -85.0);
  c.init_gate_from = r.number("init.gate_from", 0.6);
  c.init_gate_to = r.number("init.gate_to", 0.1);
  c.init_mirror_x = r.boolean("init.mirror_x", false);

  const std::string solver = r.text("solver", "slts");
  if (solver == "slts")
    c.solver = SolverKind::slts;
  else if (solver == "uniform")
    c.solver = SolverKind::uniform;
  else
    throw ConfigError("config key 'solver': must be slts|uniform", "solver",
                      r.line("solver"));
  c.uniform_dt = r.number("uniform.dt", 0.01);
  r.require(c.uniform_dt > 0.0, "uniform.dt", "must be > 0");

  c.output_dir = r.text("output.dir", "");
  c.snapshot_every = r.number("output.snapshot_every", 1.0);
  r.require(c.snapshot_every >= 0.0, "output.snapshot_every", "must be >= 0");
  c.timing_output = r.boolean("output.timing", true);
  c.seed = r.integer("seed", 0);
  return c;
}

ConfigMap preset_config(const std::string& name) {
  ConfigMap m;
  auto set = [&m](const char* k, const char* v) { m.set(k, v); };
  if (name == "cable") {
    set("mesh.dim", "1");
    set("mesh.extent_x", "20.0");
    set("mesh.counts_x", "20");
    set("mesh.max_level", "3");
    set("basis.order", "1");
    set("diffusion.dxx", "0.1334");
    set("time.dt_barrier", "0.15");
    set("time.t_end", "50.0");
    set("amr.tau_refine", "0.75");
    set("lts.tau_cell", "0.5");
    set("lts.dt_cell", "0.01");
    set("model.name", "mitchell-schaeffer");
    set("stim.shape", "box");
    set("stim.center_x", "0.0");
    set("stim.half_x", "1.0");
    set("stim.amplitude", "60.0");
    set("stim.t_start", "0.0");
    set("stim.t_end", "2.0");
    set("output.snapshot_every", "1.0");
  } else if (name == "strip") {
    set("mesh.dim", "2");
    set("mesh.extent_x", "20.0");
    set("mesh.extent_y", "7.0");
    set("mesh.counts_x", "20");
    set("mesh.counts_y", "7");
    set("mesh.max_level", "3");
    set("basis.order", "1");
    set("diffusion.dxx", "0.1334");
    set("diffusion.dyy", "0.0176");
    set("time.dt_barrier", "0.15");
    set("time.t_end", "50.0");
    set("amr.tau_refine", "0.75");
    set("lts.tau_cell", "0.5");
    set("lts.dt_cell", "0.01");
    set("model.name", "mitchell-schaeffer");
    set("stim.shape", "box");
    set("stim.center_x", "0.0");
    set("stim.center_y", "3.5");
    set("stim.half_x", "1.0");
    set("stim.half_y", "3.5");
    set("stim.amplitude", "60.0");
    set("stim.t_start", "0.0");
    set("stim.t_end", "2.0");
    set("output.snapshot_every", "1.0");
  } else if (name == "spiral") {
    set("mesh.dim", "2");
    set("mesh.extent_x", "40.0");
    set("mesh.extent_y", "40.0");
    set("mesh.counts_x", "20");
    set("mesh.counts_y", "20");
    set("mesh.max_level", "3");
    set("basis.order", "2");
    set("sipg.gamma", "8.0");
    set("diffusion.dxx", "0.05");
    set("diffusion.dyy", "0.05");
    set("time.dt_barrier", "0.15");
    set("time.t_end", "320.0");
    set("amr.tau_refine", "1.0");
    set("lts.tau_cell", "0.5");
    set("lts.dt_cell", "0.01");
    set("model.name", "mitchell-schaeffer");
    set("model.tau_close", "60.0");
    set("model.tau_open", "65.0");
    set("init.kind", "gradient");
    set("init.phi_from", "10.0");
    set("init.phi_to", "-85.0");
    set("init.gate_from", "0.6");
    set("init.gate_to", "0.1");
    set("output.snapshot_every", "5.0");
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected cable|strip|spiral)");
  }
  return m;
}

}  // namespace monodg
