/* monodg - monodomain reaction-diffusion solver with adaptive local
 * time stepping. C interface: opaque handles, status codes, JSON reports.
 */
#ifndef MONODG_MONODG_H
#define MONODG_MONODG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdg_status {
  MDG_OK = 0,
  MDG_ERR_RUNTIME = 1, /* solver or I/O failure           */
  MDG_ERR_CONFIG = 2,  /* invalid configuration            */
  MDG_ERR_ARGUMENT = 3 /* bad handle or argument           */
} mdg_status;

typedef struct mdg_config mdg_config;
typedef struct mdg_report mdg_report;

const char* mdg_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* mdg_last_error(void);

/* --- configuration ----------------------------------------------------- */

mdg_status mdg_config_create(mdg_config** out);
mdg_status mdg_config_load(const char* path, mdg_config** out);

/* Built-in benchmark baselines: "cable", "strip", "spiral". */
mdg_status mdg_config_preset(const char* name, mdg_config** out);

/* Set or override one key (same keys as the config file). */
mdg_status mdg_config_set(mdg_config* cfg, const char* key, const char* value);

/* Validate without running; returns MDG_ERR_CONFIG with a message on error. */
mdg_status mdg_config_validate(const mdg_config* cfg);

void mdg_config_free(mdg_config* cfg);

/* --- execution ---------------------------------------------------------- */

/* Run the configured solver; artifacts go to output.dir when set. */
mdg_status mdg_run(const mdg_config* cfg, mdg_report** out);

/* Planar-wave benchmark (1D cable, or 2D strip when mesh.dim = 2). */
mdg_status mdg_bench_cable(const mdg_config* overrides, mdg_report** out);

/* Spiral-wave benchmark. */
mdg_status mdg_bench_spiral(const mdg_config* overrides, mdg_report** out);

/* Run both configurations and compare the final states. */
mdg_status mdg_compare(const mdg_config* a, const mdg_config* b,
                       mdg_report** out);

/* Activation times from a snapshot manifest written by mdg_run. Writes a
 * CSV (x_mm, y_mm, lat_ms; -1 marks never-activated) next to the report. */
mdg_status mdg_lat(const char* manifest_path, double threshold_mv,
                   const char* output_csv_path, mdg_report** out);

/* --- reports ------------------------------------------------------------ */

/* JSON text; owned by the report, valid until mdg_report_free. */
const char* mdg_report_json(const mdg_report* report);
void mdg_report_free(mdg_report* report);

#ifdef __cplusplus
}
#endif

#endif /* MONODG_MONODG_H */
