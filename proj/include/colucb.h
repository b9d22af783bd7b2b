/* C interface to the grouped-bandit laboratory.
 *
 * Conventions:
 *  - Every function returns an int status code (COLUCB_OK == 0 on success).
 *  - On failure, colucb_last_error() returns a thread-local message.
 *  - Objects are opaque handles freed with their _free function.
 *  - Strings returned through char** are heap-allocated; release them with
 *    colucb_string_free().
 *  - JSON in/out mirrors the documented file formats.
 */
#ifndef COLUCB_H
#define COLUCB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define COLUCB_OK 0
#define COLUCB_EINVAL 1    /* bad argument / usage */
#define COLUCB_EDATA 2     /* missing file, schema violation, invalid domain data */
#define COLUCB_EINTERNAL 3 /* violated invariant or numerical breakdown */

typedef struct colucb_instance_s colucb_instance;

const char* colucb_version(void);
const char* colucb_strerror(int code);
/* Thread-local message describing the most recent failure in this thread. */
const char* colucb_last_error(void);
void colucb_string_free(char* s);

/* ---------------------------------------------------------- instances */

/* Instance files may omit rewards (bare structure). */
int colucb_instance_load(const char* path, colucb_instance** out);
int colucb_instance_parse(const char* json_text, colucb_instance** out);
int colucb_instance_save(const colucb_instance* inst, const char* path);
int colucb_instance_to_json(const colucb_instance* inst, char** json_out);
void colucb_instance_free(colucb_instance* inst);

int colucb_instance_info(const colucb_instance* inst, uint32_t* num_arms,
                         uint32_t* num_groups, int* has_rewards);
/* gap of arm within group; requires rewards. */
int colucb_instance_gap(const colucb_instance* inst, uint32_t group, uint32_t arm,
                        double* gap_out);

/* ---------------------------------------------------------- schedule */

int colucb_t0(const colucb_instance* inst, double* t0_out,
              int64_t* num_out, int64_t* den_out);
int colucb_t_min(const colucb_instance* inst, uint64_t n0, uint64_t* t_min_out);
/* Writes the burn-in schedule as CSV (round,group,arm). */
int colucb_schedule_write_csv(const colucb_instance* inst, uint64_t n0,
                              const char* path);

/* ---------------------------------------------------------- analysis */

/* options_json (all fields optional):
 *   { "horizon": uint, "const_scale": d, "sigma": d, "grid_points": uint,
 *     "force": bool, "c1": d, "alpha": d, "improvement_alpha": d }          */
int colucb_analyze(const colucb_instance* inst, const char* options_json,
                   char** report_json_out);

/* ---------------------------------------------------------- simulation */

/* Loads a colucb-experiment file, applies overrides, runs it, writes
 * manifest.json / report.json / curves.csv (and curves.svg unless disabled)
 * into the output directory, and returns the report JSON.
 * overrides_json (all fields optional):
 *   { "horizon": uint, "num_seeds": uint, "base_seed": uint,
 *     "const_scale": d, "jobs": uint, "out_dir": str, "write_svg": bool,
 *     "reproducible": bool, "dump_trajectories": uint,
 *     "coupled_streams": bool }                                             */
int colucb_simulate(const char* config_path, const char* overrides_json,
                    char** report_json_out);

/* ---------------------------------------------------------- lower bounds */

/* options_json: { "horizon": uint (required), "const_scale": d,
 *                 "base_seed": uint, "pilot_seeds": uint }
 * Returns the two perturbed instances plus meta JSON
 *   { "z": d, "a0": uint, "g0": uint, "nu": d, "pilot_pulls": [d,...] }.    */
int colucb_adversary(const colucb_instance* base, const char* options_json,
                     colucb_instance** j_plus, colucb_instance** j_minus,
                     char** meta_json_out);

/* options_json: { "horizon": uint (required), "kind": "gaussian"|"bernoulli",
 *                 "force": bool } — the contested set S and its cover are the
 * bar_ht_plus minimizers of the structure.  meta: { "subset": [arm,...],
 * "cover_groups": [g,...], "bar_ht_plus": d }                               */
int colucb_minimax_instance(const colucb_instance* structure, const char* options_json,
                            colucb_instance** family_out, char** meta_json_out);

int colucb_perturb(const colucb_instance* base, uint32_t a0, uint32_t g0,
                   double eps, int sign, int clamp_quarter, colucb_instance** out);

/* ---------------------------------------------------------- selftest */

/* options_json (optional, may be NULL):
 *   { "seed": uint, "lp_tolerance_override": d }
 * Returns COLUCB_OK only if every suite passed; the per-suite pass/fail log
 * is returned either way. */
int colucb_selftest(const char* options_json, char** log_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COLUCB_H */
