#ifndef BLWBENCH_H
#define BLWBENCH_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum BlwStatus {
  BLW_STATUS_OK = 0,
  /**
   * A pointer argument was null.
   */
  BLW_STATUS_NULL_POINTER = 1,
  /**
   * Invalid argument or configuration value.
   */
  BLW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A file could not be parsed.
   */
  BLW_STATUS_PARSE = 3,
  /**
   * I/O failure.
   */
  BLW_STATUS_IO = 4,
  /**
   * Numerical failure inside a method.
   */
  BLW_STATUS_NUMERIC = 5,
  /**
   * Unsupported format or method.
   */
  BLW_STATUS_UNSUPPORTED = 6,
} BlwStatus;

/**
 * Opaque beat-annotation handle.
 */
typedef struct BlwAnnotations BlwAnnotations;

/**
 * Opaque method-configuration handle.
 */
typedef struct BlwConfig BlwConfig;

/**
 * Opaque signal handle.
 */
typedef struct BlwSignal BlwSignal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *blw_last_error_message(void);

/**
 * Wrap a sample buffer into a signal handle.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out` must be a valid
 * destination pointer.
 */
enum BlwStatus blw_signal_create(const double *samples,
                                 size_t len,
                                 double fs,
                                 struct BlwSignal **out);

/**
 * Release a signal handle. A null pointer is a no-op.
 *
 * # Safety
 * `signal` must have been produced by this library and not yet freed.
 */
void blw_signal_free(struct BlwSignal *signal);

/**
 * Number of samples in the signal; 0 for a null handle.
 *
 * # Safety
 * `signal` must be a live handle or null.
 */
size_t blw_signal_len(const struct BlwSignal *signal);

/**
 * Sampling rate in Hz; 0 for a null handle.
 *
 * # Safety
 * `signal` must be a live handle or null.
 */
double blw_signal_fs(const struct BlwSignal *signal);

/**
 * Copy the samples into a caller-provided buffer of `cap` doubles.
 *
 * # Safety
 * `buffer` must point to at least `cap` writable doubles.
 */
enum BlwStatus blw_signal_copy_samples(const struct BlwSignal *signal, double *buffer, size_t cap);

/**
 * Read a one-amplitude-per-line CSV file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` a valid destination.
 */
enum BlwStatus blw_signal_read_csv(const char *path, double fs, struct BlwSignal **out);

/**
 * Read one channel of a WFDB-style record (formats 212 and 16).
 *
 * # Safety
 * `header_path` must be a valid NUL-terminated string; `out` a valid
 * destination.
 */
enum BlwStatus blw_signal_read_wfdb(const char *header_path,
                                    size_t channel,
                                    struct BlwSignal **out);

/**
 * Resample to `target_fs` Hz (polyphase, 40 dB anti-alias stopband).
 *
 * # Safety
 * `signal` must be a live handle; `out` a valid destination.
 */
enum BlwStatus blw_signal_resample(const struct BlwSignal *signal,
                                   double target_fs,
                                   struct BlwSignal **out);

/**
 * Fresh configuration with the documented defaults (0.67 Hz cutoff etc.).
 *
 * # Safety
 * `out` must be a valid destination pointer.
 */
enum BlwStatus blw_config_default(struct BlwConfig **out);

/**
 * Release a configuration handle. A null pointer is a no-op.
 *
 * # Safety
 * `config` must have been produced by this library and not yet freed.
 */
void blw_config_free(struct BlwConfig *config);

/**
 * Set one configuration key from its text form, e.g.
 * `blw_config_set(cfg, "cutoff_hz", "0.67")`. Unknown keys are rejected.
 *
 * # Safety
 * `config` must be a live handle; `key` and `value` valid NUL-terminated
 * strings.
 */
enum BlwStatus blw_config_set(struct BlwConfig *config, const char *key, const char *value);

/**
 * Detect R peaks (derivative-square-integrate with a 5-15 Hz front end).
 *
 * # Safety
 * `signal` must be a live handle; `out` a valid destination.
 */
enum BlwStatus blw_detect_r_peaks(const struct BlwSignal *signal, struct BlwAnnotations **out);

/**
 * Wrap caller-provided ascending R-peak sample indices.
 *
 * # Safety
 * `peaks` must point to `len` readable size_t values; `out` must be valid.
 */
enum BlwStatus blw_annotations_create(const size_t *peaks,
                                      size_t len,
                                      double fs,
                                      struct BlwAnnotations **out);

/**
 * Release an annotation handle. A null pointer is a no-op.
 *
 * # Safety
 * `ann` must have been produced by this library and not yet freed.
 */
void blw_annotations_free(struct BlwAnnotations *ann);

/**
 * Number of annotated beats; 0 for a null handle.
 *
 * # Safety
 * `ann` must be a live handle or null.
 */
size_t blw_annotations_len(const struct BlwAnnotations *ann);

/**
 * Copy the R-peak sample indices into a buffer of `cap` entries.
 *
 * # Safety
 * `buffer` must point to at least `cap` writable size_t values.
 */
enum BlwStatus blw_annotations_copy(const struct BlwAnnotations *ann, size_t *buffer, size_t cap);

/**
 * Run one removal method. `method` is one of: splines, fir, iir, af, maf,
 * ica, issm, emd, wt (plus the `identity` debug pass-through). `config`
 * may be null for defaults; `annotations` may be null unless the method
 * requires beats (splines, af, issm).
 *
 * # Safety
 * All handles must be live or null as documented; `method` must be a
 * valid NUL-terminated string and `out` a valid destination.
 */
enum BlwStatus blw_denoise(const char *method,
                           const struct BlwSignal *signal,
                           const struct BlwConfig *config,
                           const struct BlwAnnotations *annotations,
                           struct BlwSignal **out);

/**
 * Mix `noise` into `clean`, scaled so MAD(noisy, clean) equals
 * `target_mad` exactly; the scale factor is written to `scale_out` when
 * non-null.
 *
 * # Safety
 * `clean` and `noise` must be live handles; `out` a valid destination;
 * `scale_out` writable or null.
 */
enum BlwStatus blw_contaminate(const struct BlwSignal *clean,
                               const struct BlwSignal *noise,
                               double target_mad,
                               struct BlwSignal **out,
                               double *scale_out);

/**
 * Absolute maximum distance between two compatible signals.
 *
 * # Safety
 * `s1` and `s2` must be live handles; `out` must be writable.
 */
enum BlwStatus blw_metric_mad(const struct BlwSignal *s1, const struct BlwSignal *s2, double *out);

/**
 * Sum of squared distances between two compatible signals.
 *
 * # Safety
 * `s1` and `s2` must be live handles; `out` must be writable.
 */
enum BlwStatus blw_metric_ssd(const struct BlwSignal *s1, const struct BlwSignal *s2, double *out);

/**
 * Percentage RMS difference; `s1` is the reference.
 *
 * # Safety
 * `s1` and `s2` must be live handles; `out` must be writable.
 */
enum BlwStatus blw_metric_prd(const struct BlwSignal *s1, const struct BlwSignal *s2, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLWBENCH_H */
