#ifndef INVASION_H
#define INVASION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum InvStatus {
  INV_STATUS_OK = 0,
  INV_STATUS_NULL_POINTER = 1,
  INV_STATUS_INVALID_UTF8 = 2,
  INV_STATUS_INVALID_ARGUMENT = 3,
  INV_STATUS_CONFIG = 4,
  INV_STATUS_GEOMETRY = 5,
  INV_STATUS_REACTION = 6,
  INV_STATUS_SOLVER = 7,
  INV_STATUS_STATIONARY = 8,
  INV_STATUS_ANALYSIS = 9,
  INV_STATUS_IO = 10,
  INV_STATUS_NOT_FOUND = 11,
  INV_STATUS_BUFFER_TOO_SMALL = 12,
  INV_STATUS_PANIC = 99,
} InvStatus;

typedef enum InvVerdictKind {
  INV_VERDICT_KIND_BLOCKING = 0,
  INV_VERDICT_KIND_PERSISTENCE = 1,
  INV_VERDICT_KIND_INVASION = 2,
  INV_VERDICT_KIND_ORIENTED_INVASION = 3,
  INV_VERDICT_KIND_INCONCLUSIVE = 4,
} InvVerdictKind;

/**
 * The result of running a scenario.
 */
typedef struct InvOutcome InvOutcome;

/**
 * A reaction term `f(x, s)`.
 */
typedef struct InvReaction InvReaction;

/**
 * A loaded scenario.
 */
typedef struct InvScenario InvScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *inv_version(void);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library from the same thread.
 */
const char *inv_last_error_message(void);

/**
 * Parses a scenario from TOML text.
 *
 * # Safety
 * `toml` is a NUL-terminated string; `out` is writable.
 */
enum InvStatus inv_scenario_from_toml(const char *toml, struct InvScenario **out);

/**
 * Loads a scenario file (TOML, or JSON for `.json`).
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` is writable.
 */
enum InvStatus inv_scenario_load(const char *path, struct InvScenario **out);

/**
 * One of the built-in scenarios (`omega1`, `blocking`, `cylinder`, ...).
 *
 * # Safety
 * `name` is a NUL-terminated string; `out` is writable.
 */
enum InvStatus inv_scenario_preset(const char *name, struct InvScenario **out);

/**
 * Multiplies the grid resolution.
 *
 * # Safety
 * `s` is a live scenario handle.
 */
enum InvStatus inv_scenario_set_resolution_multiplier(struct InvScenario *s, uint32_t mult);

/**
 * Writes the scenario's canonical TOML into `buf` (NUL-terminated). `needed`
 * receives the required size including the NUL; a too-small buffer gives
 * `INV_STATUS_BUFFER_TOO_SMALL` and leaves `buf` untouched.
 *
 * # Safety
 * `s` is a live handle; `buf` has `len` writable bytes or is null with `len == 0`.
 */
enum InvStatus inv_scenario_to_toml(const struct InvScenario *s,
                                    char *buf,
                                    size_t len,
                                    size_t *needed);

/**
 * Config hash (git blob sha1 of the canonical TOML), 40 hex digits.
 *
 * # Safety
 * As [`inv_scenario_to_toml`].
 */
enum InvStatus inv_scenario_config_hash(const struct InvScenario *s,
                                        char *buf,
                                        size_t len,
                                        size_t *needed);

/**
 * # Safety
 * `s` is null or a handle not yet freed.
 */
void inv_scenario_free(struct InvScenario *s);

/**
 * Runs the scenario to its horizon.
 *
 * # Safety
 * `s` is a live handle; `out` is writable.
 */
enum InvStatus inv_scenario_run(const struct InvScenario *s, struct InvOutcome **out);

/**
 * Writes the run directory (verdict, probes, config, snapshots, manifest).
 *
 * # Safety
 * Live handles; `dir` is a NUL-terminated string.
 */
enum InvStatus inv_outcome_write_run_dir(const struct InvScenario *s,
                                         const struct InvOutcome *o,
                                         const char *dir);

/**
 * Verdict kind and persistence flag.
 *
 * # Safety
 * `o` is a live handle; the out pointers are writable.
 */
enum InvStatus inv_outcome_verdict(const struct InvOutcome *o,
                                   enum InvVerdictKind *kind,
                                   bool *persistence);

/**
 * Fitted speed and R² of a speed probe.
 *
 * # Safety
 * `o` is a live handle; `probe` is a NUL-terminated string; out pointers writable.
 */
enum InvStatus inv_outcome_speed(const struct InvOutcome *o,
                                 const char *probe,
                                 double *speed,
                                 double *r2);

/**
 * Number of recorded samples.
 *
 * # Safety
 * `o` is null or a live handle.
 */
size_t inv_outcome_len(const struct InvOutcome *o);

/**
 * Copies the record times (`probe` null) or one probe column into `buf`.
 * `written` receives the column length; a short buffer gives
 * `INV_STATUS_BUFFER_TOO_SMALL`.
 *
 * # Safety
 * `o` is a live handle; `probe` is null or NUL-terminated; `buf` has `len` slots.
 */
enum InvStatus inv_outcome_column(const struct InvOutcome *o,
                                  const char *probe,
                                  double *buf,
                                  size_t len,
                                  size_t *written);

/**
 * # Safety
 * `o` is null or a handle not yet freed.
 */
void inv_outcome_free(struct InvOutcome *o);

/**
 * Builds a reaction from JSON, e.g. `{"type":"cubic","theta":0.25,"scale":1}`.
 *
 * # Safety
 * `json` is a NUL-terminated string; `out` is writable.
 */
enum InvStatus inv_reaction_from_json(const char *json, struct InvReaction **out);

/**
 * `f((x, y), s)`.
 *
 * # Safety
 * `r` is a live handle; `value` is writable.
 */
enum InvStatus inv_reaction_eval(const struct InvReaction *r,
                                 double x,
                                 double y,
                                 double s,
                                 double *value);

/**
 * Lower speed bound for ellipticity `lambda <= big_lambda` and
 * `limsup q·x/|x| = q_radial`; `applicable` is false when the bound is not positive.
 *
 * # Safety
 * `r` is a live handle; out pointers writable.
 */
enum InvStatus inv_w_star(const struct InvReaction *r,
                          double lambda,
                          double big_lambda,
                          double q_radial,
                          double *value,
                          bool *applicable);

/**
 * Speed of the 1D travelling front of `min_x f`.
 *
 * # Safety
 * `r` is a live handle; `speed` is writable.
 */
enum InvStatus inv_front_speed(const struct InvReaction *r, double *speed);

/**
 * # Safety
 * `r` is null or a handle not yet freed.
 */
void inv_reaction_free(struct InvReaction *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVASION_H */
