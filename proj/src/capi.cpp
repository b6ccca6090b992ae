#include "monodg/monodg.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "core/bench.hpp"
#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/field.hpp"
#include "core/lat.hpp"
#include "core/runner.hpp"
#include "core/vtk.hpp"

using namespace monodg;

struct mdg_config {
  ConfigMap map;
};
struct mdg_report {
  std::string json;
};

namespace {

thread_local std::string g_last_error;

mdg_status fail(mdg_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
mdg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MDG_OK;
  } catch (const ConfigError& e) {
    return fail(MDG_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(MDG_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(MDG_ERR_RUNTIME, e.what());
  }
}

mdg_report* make_report(std::string json) {
  return new mdg_report{std::move(json)};
}

}  // namespace

extern "C" {

const char* mdg_version(void) { return "0.1.0"; }

const char* mdg_last_error(void) { return g_last_error.c_str(); }

mdg_status mdg_config_create(mdg_config** out) {
  if (!out) return fail(MDG_ERR_ARGUMENT, "null output pointer");
  *out = new mdg_config{};
  return MDG_OK;
}

mdg_status mdg_config_load(const char* path, mdg_config** out) {
  if (!path || !out) return fail(MDG_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new mdg_config{parse_config_file(path)}; });
}

mdg_status mdg_config_preset(const char* name, mdg_config** out) {
  if (!name || !out) return fail(MDG_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new mdg_config{preset_config(name)}; });
}

mdg_status mdg_config_set(mdg_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(MDG_ERR_ARGUMENT, "null argument");
  return guarded([&] { cfg->map.set(key, value); });
}

mdg_status mdg_config_validate(const mdg_config* cfg) {
  if (!cfg) return fail(MDG_ERR_ARGUMENT, "null config");
  return guarded([&] { RunConfig::from_map(cfg->map); });
}

void mdg_config_free(mdg_config* cfg) { delete cfg; }

mdg_status mdg_run(const mdg_config* cfg, mdg_report** out) {
  if (!cfg || !out) return fail(MDG_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const RunConfig rc = RunConfig::from_map(cfg->map);
    RunResult result = run_simulation(rc, cfg->map);
    *out = make_report(std::move(result.summary_json));
  });
}

mdg_status mdg_bench_cable(const mdg_config* overrides, mdg_report** out) {
  if (!out) return fail(MDG_ERR_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] {
    const ConfigMap empty;
    CableReport report = bench_cable(overrides ? overrides->map : empty);
    *out = make_report(std::move(report.json));
  });
}

mdg_status mdg_bench_spiral(const mdg_config* overrides, mdg_report** out) {
  if (!out) return fail(MDG_ERR_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] {
    const ConfigMap empty;
    SpiralReport report = bench_spiral(overrides ? overrides->map : empty);
    *out = make_report(std::move(report.json));
  });
}

mdg_status mdg_compare(const mdg_config* a, const mdg_config* b,
                       mdg_report** out) {
  if (!a || !b || !out) return fail(MDG_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    CompareReport report = compare_runs(a->map, b->map);
    *out = make_report(std::move(report.json));
  });
}

mdg_status mdg_lat(const char* manifest_path, double threshold_mv,
                   const char* output_csv_path, mdg_report** out) {
  if (!manifest_path || !out) return fail(MDG_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto entries = read_manifest(manifest_path);
    if (entries.size() < 2)
      throw std::runtime_error("manifest has fewer than two snapshots");
    const std::filesystem::path base =
        std::filesystem::path(manifest_path).parent_path();
    const auto [dim, order] =
        probe_vtk_layout((base / entries.front().second).string());
    const Basis basis(order, dim);

    Trajectory traj;
    for (const auto& [time, file] : entries) {
      Snapshot snap = read_vtk((base / file).string(), basis);
      snap.time = time;
      // Sampling extents from the first snapshot's bounding box.
      if (traj.snaps.empty()) {
        double hx = 0, hy = 0;
        for (const auto& b : snap.boxes) {
          hx = std::max(hx, b.lo[0] + b.size[0]);
          hy = std::max(hy, b.lo[1] + b.size[1]);
        }
        traj.extent = {hx, hy};
        traj.counts = {1, 1};
        traj.dim = dim;
      }
      if (traj.snaps.empty() || time > traj.snaps.back().time)
        traj.append(std::move(snap));
    }

    // Activation times at the first snapshot's node positions.
    std::vector<std::array<double, 2>> points;
    const Snapshot& first = traj.snaps.front();
    for (size_t c = 0; c < first.boxes.size(); ++c)
      for (int node = 0; node < first.n_dofs; ++node)
        points.push_back(node_position(basis, first.boxes[c], node));
    const auto lat = compute_lat(traj, basis, points, threshold_mv);

    double activated = 0;
    for (double v : lat)
      if (v != kNeverActivated) ++activated;
    if (output_csv_path) {
      std::ofstream csv(output_csv_path);
      if (!csv)
        throw std::runtime_error(std::string("cannot write '") + output_csv_path +
                                 "'");
      csv << "x_mm,y_mm,lat_ms\n";
      char buf[96];
      for (size_t i = 0; i < points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", points[i][0],
                      points[i][1], lat[i]);
        csv << buf;
      }
    }
    nlohmann::json j{
        {"threshold_mv", threshold_mv},
        {"points", points.size()},
        {"activated", activated},
        {"activated_fraction", points.empty() ? 0.0 : activated / points.size()},
    };
    if (output_csv_path) j["csv"] = output_csv_path;
    *out = make_report(j.dump());
  });
}

const char* mdg_report_json(const mdg_report* report) {
  return report ? report->json.c_str() : "";
}

void mdg_report_free(mdg_report* report) { delete report; }

}  // extern "C"
