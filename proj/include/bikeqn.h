/*
 * C interface of the bikeqn analysis engine.
 *
 * All functions are thread-compatible: distinct models may be used from
 * distinct threads; a single bqn_model is immutable after parsing and safe
 * to share for concurrent reads. Strings returned through char** outputs
 * are heap-allocated and must be released with bqn_string_free.
 */
#ifndef BIKEQN_H
#define BIKEQN_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bqn_status {
    BQN_OK = 0,
    BQN_ERR_SCHEMA = 1,         /* malformed config document */
    BQN_ERR_MODEL = 2,          /* model invariant violation */
    BQN_ERR_REDUCIBLE = 3,      /* path graph not strongly connected */
    BQN_ERR_NO_CONVERGENCE = 4, /* fixed point hit the iteration cap */
    BQN_ERR_STATE_SPACE = 5,    /* state space exceeds the cap */
    BQN_ERR_BAD_ARGUMENT = 6,
    BQN_ERR_INTERNAL = 7
} bqn_status;

/* Opaque validated model handle. */
typedef struct bqn_model bqn_model;

const char* bqn_version(void);
const char* bqn_status_name(bqn_status status);
void bqn_string_free(char* s);

/*
 * Parses and validates a JSON config document. On success *out receives the
 * model handle. On failure *out is left NULL and *error (when non-NULL)
 * receives a JSON document: an array of findings for validation failures,
 * an object {"message": ...} otherwise.
 */
bqn_status bqn_model_parse(const char* config_json, bqn_model** out, char** error);
void bqn_model_free(bqn_model* model);

int bqn_model_station_count(const bqn_model* model);
/* 1 when the station/road accessibility graph is strongly connected. */
int bqn_model_is_irreducible(const bqn_model* model);
/* Canonical config document; re-parsing it yields an identical model. */
bqn_status bqn_model_echo_config(const bqn_model* model, char** json_out);

/*
 * Runs the analytic pipeline: fixed point over routing, traffic equations
 * and the product form, then the performance report.
 *
 * options_json (NULL or "{}" for the config file's solver settings):
 *   {"tol": number, "damping": number, "max_iter": int, "max_states": int,
 *    "init": number | [numbers], "road_factor_convention": "paper"|"bcmp",
 *    "emit_routing_csv": bool, "emit_marginals_csv": bool,
 *    "emit_stations_csv": bool}
 *
 * result_json: {"pi", "residual", "iterations", "converged", "trace",
 * "logG", "report", optional "routing_csv"/"marginals_csv"/"stations_csv"}.
 * On BQN_ERR_NO_CONVERGENCE the result document is still produced and
 * carries the best iterate and its residual trace.
 */
bqn_status bqn_solve(const bqn_model* model, const char* options_json, char** result_json,
                     char** error);

/* The performance report alone (same options as bqn_solve). */
bqn_status bqn_report(const bqn_model* model, const char* options_json, char** report_json,
                      char** error);

/* Routing matrix at an explicit full-station probability vector, as CSV
 * with labeled rows and columns. */
bqn_status bqn_routing_csv(const bqn_model* model, const double* pi, int pi_len, char** csv_out,
                           char** error);

/*
 * Discrete-event simulation of the physical system.
 *
 * options_json (NULL or "{}" for the config file's sim settings):
 *   {"events": int, "warmup": number, "seed": int, "replications": int,
 *    "compare": bool, plus the bqn_solve solver keys when compare is set}
 *
 * With "compare" the document carries "simulation", "analytic" and a
 * per-station "comparison" table of absolute gaps.
 */
bqn_status bqn_simulate(const bqn_model* model, const char* options_json, char** report_json,
                        char** error);

#ifdef __cplusplus
}
#endif

#endif /* BIKEQN_H */
