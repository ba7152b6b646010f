#ifndef ETNN_H
#define ETNN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum EtnnStatus {
  ETNN_STATUS_OK = 0,
  ETNN_STATUS_NULL_POINTER = 1,
  ETNN_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad configuration text or file; exit code 2 of the CLI.
   */
  ETNN_STATUS_CONFIG_ERROR = 3,
  /**
   * The plant left its safety envelope; exit code 3 of the CLI.
   */
  ETNN_STATUS_DIVERGED = 4,
  /**
   * The run already reached `t_end`.
   */
  ETNN_STATUS_FINISHED = 5,
  ETNN_STATUS_IO_ERROR = 6,
  /**
   * Arguments outside their admissible range.
   */
  ETNN_STATUS_INVALID_ARGUMENT = 7,
  ETNN_STATUS_PANIC = 8,
} EtnnStatus;

/**
 * Opaque simulation handle.
 */
typedef struct EtnnSim EtnnSim;

/**
 * One control tick, sampled before the plant is advanced.
 */
typedef struct EtnnRow {
  double t;
  double p[3];
  double p_d[3];
  double y1[3];
  double y2[3];
  double alpha2[3];
  double bar_u[3];
  double u_held[3];
  double kappa;
  /**
   * 1 when a command was transmitted at this tick.
   */
  uint8_t event;
  double v_s;
  double fhat[3];
} EtnnRow;

/**
 * Tracking and event statistics over the post-transient window.
 */
typedef struct EtnnMetrics {
  double t_end;
  double window_start;
  double max_err[3];
  double mean_err[3];
  double rms_err[3];
  uint64_t event_count;
  uint64_t total_ticks;
  double transmission_ratio;
  double min_inter_event;
  double mean_inter_event;
  double final_v_s;
} EtnnMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a simulation from configuration text in the `key = value` dialect.
 * A null `config_text` selects the built-in defaults.
 *
 * # Safety
 * `config_text` must be null or a NUL-terminated string; `out` must be a
 * valid pointer. On success `*out` owns a handle for [`etnn_sim_free`].
 */
enum EtnnStatus etnn_sim_new(const char *config_text, struct EtnnSim **out);

/**
 * Creates a simulation from a configuration file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum EtnnStatus etnn_sim_from_file(const char *path, struct EtnnSim **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sim` must be null or a handle from this library not yet freed.
 */
void etnn_sim_free(struct EtnnSim *sim);

/**
 * Advances one control tick and optionally reports its telemetry row.
 *
 * # Safety
 * `sim` must be a live handle; `row` may be null.
 */
enum EtnnStatus etnn_sim_step(struct EtnnSim *sim, struct EtnnRow *row);

/**
 * Advances up to `max_ticks` ticks (0 means until `t_end`). The number of
 * ticks actually taken is written to `ticks_done` when it is non-null.
 * Reaching `t_end` is not an error.
 *
 * # Safety
 * `sim` must be a live handle; `ticks_done` may be null.
 */
enum EtnnStatus etnn_sim_run(struct EtnnSim *sim, uint64_t max_ticks, uint64_t *ticks_done);

/**
 * Current simulation time in seconds, NaN for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
double etnn_sim_time(const struct EtnnSim *sim);

/**
 * 1 once the run reached `t_end`, 0 otherwise (also for null).
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
uint8_t etnn_sim_finished(const struct EtnnSim *sim);

/**
 * Position and velocity of the plant.
 *
 * # Safety
 * `sim` must be a live handle; `p` and `v` must each point to 3 doubles.
 */
enum EtnnStatus etnn_sim_plant_state(const struct EtnnSim *sim, double *p, double *v);

/**
 * Metrics over the ticks simulated so far.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum EtnnStatus etnn_sim_metrics(const struct EtnnSim *sim, struct EtnnMetrics *out);

/**
 * Runs a configuration file to completion and writes the usual artifacts
 * (telemetry, metrics, resolved config) into `out_dir`.
 *
 * # Safety
 * `config_path` and `out_dir` must be NUL-terminated strings; `out` may be
 * null.
 */
enum EtnnStatus etnn_run_file(const char *config_path,
                              const char *out_dir,
                              struct EtnnMetrics *out);

/**
 * Settling-time bound `1/(l ω (1−p)) + 1/(ω m)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EtnnStatus etnn_settling_bound(double l, double m, double p, double omega, double *out);

/**
 * Residual bound on the Lyapunov value.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EtnnStatus etnn_value_bound(double l, double m, double n, double p, double omega, double *out);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`). Returns the buffer size needed for
 * the full message including the terminator, or 0 if there is no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t etnn_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *etnn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ETNN_H */
