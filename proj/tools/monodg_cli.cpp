// Command-line front end; everything runs through the C API.
//
//   monodg run <config> [--set key=value ...] [--no-timing]
//   monodg bench cable|spiral [--set key=value ...] [--no-timing]
//   monodg compare <configA> <configB> [--set key=value ...]
//   monodg lat <manifest> --threshold <mV> [-o out.csv]
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monodg/monodg.h"

namespace {

int status_to_exit(mdg_status s) {
  switch (s) {
    case MDG_OK:
      return 0;
    case MDG_ERR_CONFIG:
    case MDG_ERR_ARGUMENT:
      return 2;
    default:
      return 1;
  }
}

int finish(mdg_status s, mdg_report* report) {
  if (s != MDG_OK) {
    std::fprintf(stderr, "error: %s\n", mdg_last_error());
  } else if (report) {
    std::printf("%s\n", mdg_report_json(report));
  }
  mdg_report_free(report);
  return status_to_exit(s);
}

// Applies --set key=value pairs and --no-timing to a config handle.
int apply_sets(mdg_config* cfg, const std::vector<std::string>& sets,
               bool no_timing) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n",
                   kv.c_str());
      return 2;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (mdg_config_set(cfg, key.c_str(), value.c_str()) != MDG_OK) {
      std::fprintf(stderr, "error: %s\n", mdg_last_error());
      return 2;
    }
  }
  if (no_timing && mdg_config_set(cfg, "output.timing", "false") != MDG_OK) {
    std::fprintf(stderr, "error: %s\n", mdg_last_error());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monodomain solver with space-time adaptive local time stepping"};
  app.require_subcommand(1);

  std::vector<std::string> sets;
  bool no_timing = false;
  app.add_option("--set", sets, "Override a config key (key=value), repeatable")
      ->take_all();
  app.add_flag("--no-timing", no_timing, "Omit wall-clock fields from outputs");

  std::string run_config;
  CLI::App* cmd_run = app.add_subcommand("run", "Run a configuration file");
  cmd_run->add_option("config", run_config, "Path to config file")->required();

  std::string bench_name;
  CLI::App* cmd_bench = app.add_subcommand("bench", "Run a named benchmark");
  cmd_bench->add_option("name", bench_name, "cable | spiral")->required();

  std::string cmp_a, cmp_b;
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "Run two configs and compare final states");
  cmd_compare->add_option("configA", cmp_a)->required();
  cmd_compare->add_option("configB", cmp_b)->required();

  std::string lat_manifest, lat_csv = "lat.csv";
  double lat_threshold = -30.0;
  CLI::App* cmd_lat =
      app.add_subcommand("lat", "Activation times from a snapshot manifest");
  cmd_lat->add_option("manifest", lat_manifest)->required();
  cmd_lat->add_option("--threshold", lat_threshold, "Threshold in mV");
  cmd_lat->add_option("-o,--output", lat_csv, "Output CSV path");

  CLI11_PARSE(app, argc, argv);

  if (cmd_run->parsed()) {
    mdg_config* cfg = nullptr;
    mdg_status s = mdg_config_load(run_config.c_str(), &cfg);
    if (s != MDG_OK) return finish(s, nullptr);
    if (int rc = apply_sets(cfg, sets, no_timing)) {
      mdg_config_free(cfg);
      return rc;
    }
    mdg_report* report = nullptr;
    s = mdg_run(cfg, &report);
    mdg_config_free(cfg);
    return finish(s, report);
  }

  if (cmd_bench->parsed()) {
    mdg_config* overrides = nullptr;
    if (mdg_config_create(&overrides) != MDG_OK) return 1;
    if (int rc = apply_sets(overrides, sets, no_timing)) {
      mdg_config_free(overrides);
      return rc;
    }
    mdg_report* report = nullptr;
    mdg_status s;
    if (bench_name == "cable") {
      s = mdg_bench_cable(overrides, &report);
    } else if (bench_name == "spiral") {
      s = mdg_bench_spiral(overrides, &report);
    } else {
      std::fprintf(stderr, "error: unknown benchmark '%s' (cable|spiral)\n",
                   bench_name.c_str());
      mdg_config_free(overrides);
      return 2;
    }
    mdg_config_free(overrides);
    return finish(s, report);
  }

  if (cmd_compare->parsed()) {
    mdg_config* a = nullptr;
    mdg_config* b = nullptr;
    mdg_status s = mdg_config_load(cmp_a.c_str(), &a);
    if (s == MDG_OK) s = mdg_config_load(cmp_b.c_str(), &b);
    if (s == MDG_OK) {
      int rc = apply_sets(a, sets, no_timing);
      if (rc == 0) rc = apply_sets(b, sets, no_timing);
      if (rc != 0) {
        mdg_config_free(a);
        mdg_config_free(b);
        return rc;
      }
    }
    mdg_report* report = nullptr;
    if (s == MDG_OK) s = mdg_compare(a, b, &report);
    mdg_config_free(a);
    mdg_config_free(b);
    return finish(s, report);
  }

  if (cmd_lat->parsed()) {
    mdg_report* report = nullptr;
    const mdg_status s =
        mdg_lat(lat_manifest.c_str(), lat_threshold, lat_csv.c_str(), &report);
    return finish(s, report);
  }

  return 2;
}
