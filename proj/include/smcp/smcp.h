#ifndef SMCP_SMCP_H
#define SMCP_SMCP_H

/* C interface to the stochastic matching simulator. Every function that can
 * fail returns an smcp_status; on failure smcp_last_error() describes the
 * cause for the calling thread. Strings returned through char** are owned by
 * the caller and released with smcp_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(SMCP_BUILDING_LIBRARY)
#define SMCP_API __attribute__((visibility("default")))
#else
#define SMCP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smcp_status {
  SMCP_OK = 0,
  SMCP_ERR_INVALID_ARGUMENT = 1,
  SMCP_ERR_TOO_LARGE = 2,
  SMCP_ERR_INFEASIBLE = 3,
  SMCP_ERR_CONTRACT = 4,
  SMCP_ERR_IO = 5,
  SMCP_ERR_INTERNAL = 6
} smcp_status;

typedef struct smcp_graph smcp_graph;
typedef struct smcp_report smcp_report;

SMCP_API const char* smcp_last_error(void);
SMCP_API const char* smcp_status_name(smcp_status status);
SMCP_API void smcp_string_free(char* s);

/* Graphs. `spec` is a file path or a generator such as "complete:n=4,p=0.64",
 * "path:0.9,1,0.9", "bipartite:left=3,right=3,p=0.5" or
 * "sparse:n=30,density=0.2,pmin=0.05,pmax=1,seed=7". */
SMCP_API smcp_status smcp_graph_from_spec(const char* spec, smcp_graph** out);
SMCP_API smcp_status smcp_graph_from_json(const char* json, smcp_graph** out);
SMCP_API smcp_status smcp_graph_k4(double p, smcp_graph** out);
SMCP_API smcp_status smcp_graph_to_json(const smcp_graph* g, char** out);
SMCP_API smcp_status smcp_graph_save(const smcp_graph* g, const char* path);
SMCP_API int smcp_graph_vertex_count(const smcp_graph* g);
SMCP_API int smcp_graph_pair_count(const smcp_graph* g);
SMCP_API void smcp_graph_free(smcp_graph* g);

/* Canonical text of a generator spec (file paths are returned unchanged). */
SMCP_API smcp_status smcp_describe_spec(const char* spec, char** out);

typedef struct smcp_experiment_config {
  const char* instance_name; /* report label; NULL for "" */
  const char* algo;          /* twostage, greedy, greedy-random, random-greedy, oblivious-bipartite */
  double alpha;
  const char* q_mode;        /* paper, fast, exact */
  uint64_t samples;          /* 0: profile default */
  double zeta;
  uint64_t trials;
  uint64_t seed;
  const char* opt;           /* auto, exact, mc, mc:<trials> */
  int workers;
} smcp_experiment_config;

SMCP_API void smcp_experiment_config_init(smcp_experiment_config* cfg);
SMCP_API smcp_status smcp_run_experiment(const smcp_graph* g, const smcp_experiment_config* cfg,
                                         smcp_report** out);

typedef struct smcp_report_summary {
  uint64_t trials;
  double mean_alg;
  double mean_opt;
  double ratio;
  double ci95;
} smcp_report_summary;

SMCP_API smcp_status smcp_report_summary_get(const smcp_report* r, smcp_report_summary* out);
/* format: "csv" (header and row), "csv-row" (row only), "csv-header", "json". */
SMCP_API smcp_status smcp_report_render(const smcp_report* r, const char* format, char** out);
SMCP_API void smcp_report_free(smcp_report* r);

/* q table as JSON. q_mode: exact, or paper/fast for Monte Carlo where
 * `samples` > 0 overrides the profile's count. approx_zeta > 0 selects the
 * approximate matcher. */
SMCP_API smcp_status smcp_estimate_q_json(const smcp_graph* g, const char* q_mode,
                                          uint64_t samples, uint64_t seed, double approx_zeta,
                                          int relabel, int workers, char** out);

typedef struct smcp_hardness_result {
  double online;
  double offline;
  double ratio;
} smcp_hardness_result;

SMCP_API smcp_status smcp_hardness(const smcp_graph* g, smcp_hardness_result* out);
/* format: "text" or "json". */
SMCP_API smcp_status smcp_hardness_render(const smcp_hardness_result* h, const char* format,
                                          char** out);
SMCP_API smcp_status smcp_k4_closed_forms(double p, double* online, double* offline);

/* Exact first-occurrence table for a {"p": [...], "r": [...]} profile.
 * format: "text" or "json". *met is set to 1 when every target is met. */
SMCP_API smcp_status smcp_sampler_check(const char* profile_json, const char* format,
                                        char** out, int* met);

SMCP_API smcp_status smcp_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif
