#ifndef DFRC_H
#define DFRC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum DfrcStatus {
  DFRC_STATUS_OK = 0,
  DFRC_STATUS_NULL_POINTER = 1,
  /**
   * Bad dimensions, parameters or configuration.
   */
  DFRC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A solver failed or did not converge.
   */
  DFRC_STATUS_SOLVER_FAILURE = 3,
  DFRC_STATUS_IO = 4,
  /**
   * The output buffer is shorter than required.
   */
  DFRC_STATUS_BUFFER_TOO_SMALL = 5,
  /**
   * The design carries no data link (radar-only).
   */
  DFRC_STATUS_NO_DATA = 6,
  DFRC_STATUS_PANIC = 7,
} DfrcStatus;

/**
 * Design strategy selector.
 */
typedef enum DfrcStrategy {
  DFRC_STRATEGY_ISI_MIN_STRICT = 0,
  DFRC_STRATEGY_ISI_MIN_TRADEOFF = 1,
  DFRC_STRATEGY_ARMAX_TRADEOFF = 2,
  DFRC_STRATEGY_COMM_ONLY = 3,
  DFRC_STRATEGY_RADAR_ONLY = 4,
} DfrcStrategy;

/**
 * Per-subcarrier channel matrices.
 */
typedef struct DfrcChannel DfrcChannel;

/**
 * A design together with the inputs needed to evaluate it.
 */
typedef struct DfrcDesign DfrcDesign;

/**
 * System and scene parameters for a design. Fill with
 * [`dfrc_params_default`] and override fields as needed.
 */
typedef struct DfrcParams {
  double total_power;
  /**
   * Communication SNR; the noise variance is `total_power * 10^(-snr_db/10)`.
   */
  double snr_db;
  double antenna_spacing;
  double symbol_energy;
  /**
   * Target angle in radians.
   */
  double target_theta;
  /**
   * Echo SNR (linear).
   */
  double radar_snr;
  double sqp_tol;
  size_t sqp_max_iter;
} DfrcParams;

/**
 * Summary metrics of a design. Absent values are NaN (or -1 for counts).
 */
typedef struct DfrcMetrics {
  /**
   * Bits per subcarrier use.
   */
  double rate;
  double rate_ideal;
  double crb;
  /**
   * CRB over the strict design's CRB.
   */
  double normalized_crb;
  /**
   * Beampattern mismatch against the strict design.
   */
  double nmse;
  int64_t sqp_iterations;
} DfrcMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *dfrc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dfrc_version(void);

/**
 * Writes the default parameters (20 dB, unit power, target at broadside).
 *
 * # Safety
 * `out` must be null or point to writable memory for one `DfrcParams`.
 */
enum DfrcStatus dfrc_params_default(struct DfrcParams *out);

/**
 * I.i.d. standard complex Gaussian channel drawn from `seed`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one pointer.
 */
enum DfrcStatus dfrc_channel_random(size_t n_tx,
                                    size_t n_rx,
                                    size_t n_sc,
                                    uint64_t seed,
                                    struct DfrcChannel **out);

/**
 * Reads a channel JSON file.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out` must be null or
 * point to writable memory for one pointer.
 */
enum DfrcStatus dfrc_channel_load(const char *path, struct DfrcChannel **out);

/**
 * Writes the channel as JSON.
 *
 * # Safety
 * `channel` must be null or a live handle; `path` must be null or a
 * NUL-terminated string.
 */
enum DfrcStatus dfrc_channel_save(const struct DfrcChannel *channel, const char *path);

/**
 * # Safety
 * `channel` must be null or a live handle; each out pointer must be null or
 * writable.
 */
enum DfrcStatus dfrc_channel_dims(const struct DfrcChannel *channel,
                                  size_t *n_tx,
                                  size_t *n_rx,
                                  size_t *n_sc);

/**
 * Releases a channel. Null is ignored.
 *
 * # Safety
 * `channel` must be null or a handle not yet freed.
 */
void dfrc_channel_free(struct DfrcChannel *channel);

/**
 * Designs precoders for `channel`. `rho` is the trade-off factor and is
 * ignored by the strategies that take none. Radar metrics are relative to
 * the strict ISI-min design on the same channel.
 *
 * # Safety
 * `channel` and `params` must be null or valid; `out` must be null or point
 * to writable memory for one pointer.
 */
enum DfrcStatus dfrc_design_new(const struct DfrcChannel *channel,
                                const struct DfrcParams *params,
                                enum DfrcStrategy strategy,
                                double rho,
                                struct DfrcDesign **out);

/**
 * Releases a design. Null is ignored.
 *
 * # Safety
 * `design` must be null or a handle not yet freed.
 */
void dfrc_design_free(struct DfrcDesign *design);

/**
 * # Safety
 * `design` must be null or a live handle; `out` must be null or writable.
 */
enum DfrcStatus dfrc_design_metrics(const struct DfrcDesign *design, struct DfrcMetrics *out);

/**
 * Copies `W(k)` (`n_tx x n_rx`, row-major) into `re` and `im`, each of
 * length at least `n_tx * n_rx`, and its stream powers into `powers`
 * (length at least `n_rx`, may be null).
 *
 * # Safety
 * Buffers must be null or valid for `len` (and `powers_len`) elements.
 */
enum DfrcStatus dfrc_design_precoder(const struct DfrcDesign *design,
                                     size_t subcarrier,
                                     double *re,
                                     double *im,
                                     size_t len,
                                     double *powers,
                                     size_t powers_len);

/**
 * Copies the per-subcarrier weights (length `n_sc`).
 *
 * # Safety
 * `out` must be null or valid for `len` elements.
 */
enum DfrcStatus dfrc_design_weights(const struct DfrcDesign *design, double *out, size_t len);

/**
 * Samples the transmit beampattern on `points` angles uniformly spaced over
 * [-pi/2, pi/2]. `angles` may be null.
 *
 * # Safety
 * `gains` (and `angles` if non-null) must be valid for `points` elements.
 */
enum DfrcStatus dfrc_design_beampattern(const struct DfrcDesign *design,
                                        size_t points,
                                        double *angles,
                                        double *gains);

/**
 * Full design report as a JSON string. Release it with
 * [`dfrc_string_free`].
 *
 * # Safety
 * `design` must be null or a live handle; `out` must be null or writable.
 */
enum DfrcStatus dfrc_design_to_json(const struct DfrcDesign *design, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from [`dfrc_design_to_json`] not yet freed.
 */
void dfrc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DFRC_H */
