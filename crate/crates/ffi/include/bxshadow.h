#ifndef BXSHADOW_H
#define BXSHADOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum BxsStatus {
  BXS_STATUS_OK = 0,
  BXS_STATUS_NULL_POINTER = 1,
  BXS_STATUS_INVALID_PARAMETER = 2,
  BXS_STATUS_DOMAIN = 3,
  BXS_STATUS_NO_CONVERGENCE = 4,
  BXS_STATUS_QUADRATURE = 5,
  BXS_STATUS_OUT_OF_RANGE = 6,
  BXS_STATUS_INSUFFICIENT_SAMPLES = 7,
  BXS_STATUS_PANIC = 99,
} BxsStatus;

// Opaque channel handle.
typedef struct BxsChannel BxsChannel;

// Channel parameters in linear units.
typedef struct BxsParams {
  double m_x;
  double m_y;
  double omega_x;
  double omega_y;
  double alpha;
  double gamma_bar;
} BxsParams;

// Outage probability with its high-SNR bounds.
typedef struct BxsOutageBounds {
  double lower;
  double exact;
  // May exceed 1 at low SNR.
  double upper;
} BxsOutageBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a channel with the library's default accuracy settings.
//
// # Safety
// `params` must point to a readable `BxsParams` and `out` to writable
// storage for one pointer. The handle written to `out` must be released
// with `bxs_channel_free`.
enum BxsStatus bxs_channel_new(const struct BxsParams *params, struct BxsChannel **out);

// Releases a channel; null is accepted and ignored.
//
// # Safety
// `channel` must be null or a handle from `bxs_channel_new` that has not
// been freed yet.
void bxs_channel_free(struct BxsChannel *channel);

// The normalization constant C_α of the channel.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_c_alpha(const struct BxsChannel *channel, double *out);

// Probability density of the SNR at `gamma`.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_snr_pdf(const struct BxsChannel *channel, double gamma, double *out);

// Distribution function of the SNR at `gamma`.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_snr_cdf(const struct BxsChannel *channel, double gamma, double *out);

// Raw moment E[γ^k], k > 0.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_snr_moment(const struct BxsChannel *channel, double k, double *out);

// Amount of fading Var[γ]/E[γ]².
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_amount_of_fading(const struct BxsChannel *channel, double *out);

// Channel quality estimation index.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_cqei(const struct BxsChannel *channel, double *out);

// P(γ ≤ gamma_th).
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_outage_probability(const struct BxsChannel *channel,
                                      double gamma_th,
                                      double *out);

// Outage probability with its lower and upper bounds.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_outage_bounds(const struct BxsChannel *channel,
                                 double gamma_th,
                                 struct BxsOutageBounds *out);

// Average bit-error rate of Gray-coded QAM-16.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum BxsStatus bxs_average_ber_qam16(const struct BxsChannel *channel, double *out);

// Fills `buffer[0..n]` with SNR samples; identical arguments give
// identical samples.
//
// # Safety
// `params` must be readable and `buffer` must hold `n` writable doubles.
enum BxsStatus bxs_sample_snr(const struct BxsParams *params,
                              uint64_t seed,
                              uint64_t stream_id,
                              double *buffer,
                              size_t n);

// Copies the last failure message of this thread into `buffer` as a
// NUL-terminated string, truncating to `len` bytes.
//
// Returns the buffer size needed for the whole message including the NUL;
// `buffer` may be null to query that size. An empty message means no
// failure has been recorded.
//
// # Safety
// `buffer` must be null or hold `len` writable bytes.
size_t bxs_last_error_message(char *buffer, size_t len);

// Library version as a static NUL-terminated string.
const char *bxs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BXSHADOW_H */
