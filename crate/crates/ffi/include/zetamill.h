#ifndef ZETAMILL_H
#define ZETAMILL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ZmStatus {
  ZM_STATUS_OK = 0,
  ZM_STATUS_NULL_POINTER = 1,
  ZM_STATUS_INVALID_INPUT = 2,
  ZM_STATUS_CAP_EXCEEDED = 3,
  ZM_STATUS_INCONSISTENT = 4,
  ZM_STATUS_INVALID_UTF8 = 5,
  ZM_STATUS_OVERFLOW = 6,
  ZM_STATUS_PANIC = 7,
} ZmStatus;

/**
 * A finite field `F_{p^k}`.
 */
typedef struct ZmField ZmField;

/**
 * A Laurent polynomial over a finite field.
 */
typedef struct ZmPoly ZmPoly;

/**
 * A lattice polytope.
 */
typedef struct ZmPolytope ZmPolytope;

/**
 * A rational zeta function `numerator / denominator`.
 */
typedef struct ZmZeta ZmZeta;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library and valid until the next failing call on this thread.
 */
const char *zm_last_error(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void zm_string_free(char *s);

/**
 * Creates the field `F_{p^k}` with its canonical modulus.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ZmStatus zm_field_new(uint64_t p, uint32_t k, struct ZmField **out);

/**
 * # Safety
 * `f` must come from [`zm_field_new`] and not have been freed.
 */
void zm_field_free(struct ZmField *f);

/**
 * Parses a Laurent polynomial in `x1..x<nvars>` such as `"x1 + x2 - 3"`.
 *
 * # Safety
 * `field` must be a live handle, `text` a NUL-terminated string and `out`
 * a valid pointer.
 */
enum ZmStatus zm_poly_parse(const struct ZmField *field,
                            const char *text,
                            uint32_t nvars,
                            struct ZmPoly **out);

/**
 * # Safety
 * `f` must come from [`zm_poly_parse`] and not have been freed.
 */
void zm_poly_free(struct ZmPoly *f);

/**
 * Number of torus points of `f = 0` over `F_{q^k}`.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum ZmStatus zm_count_points(const struct ZmPoly *f,
                              uint64_t q,
                              uint32_t k,
                              uint64_t cap,
                              uint64_t *out);

/**
 * Bounded Δ-regularity search; writes 1 when no common zero was found over
 * `F_{q^j}`, `j ≤ bound`, and 0 when a witness exists.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum ZmStatus zm_is_delta_regular(const struct ZmPoly *f,
                                  uint32_t bound,
                                  uint64_t cap,
                                  int32_t *out);

/**
 * Reconstructs the zeta function from counts `N_1..N_len`.
 *
 * # Safety
 * `counts` must point to `len` readable values and `out` be valid.
 */
enum ZmStatus zm_zeta_reconstruct(const int64_t *counts,
                                  uintptr_t len,
                                  uint32_t max_order,
                                  struct ZmZeta **out);

/**
 * Degrees of numerator and denominator.
 *
 * # Safety
 * `z` must be a live handle; the output pointers must be valid.
 */
enum ZmStatus zm_zeta_degrees(const struct ZmZeta *z, uint32_t *num_deg, uint32_t *den_deg);

/**
 * Coefficient of `T^i` in the numerator (`which = 0`) or denominator
 * (`which = 1`).
 *
 * # Safety
 * `z` must be a live handle and `out` a valid pointer.
 */
enum ZmStatus zm_zeta_coeff(const struct ZmZeta *z, uint32_t which, uint32_t i, int64_t *out);

/**
 * JSON rendering of a zeta function; free with [`zm_string_free`].
 *
 * # Safety
 * `z` must be a live handle and `out` a valid pointer.
 */
enum ZmStatus zm_zeta_to_json(const struct ZmZeta *z, char **out);

/**
 * # Safety
 * `z` must come from [`zm_zeta_reconstruct`] and not have been freed.
 */
void zm_zeta_free(struct ZmZeta *z);

/**
 * Reads a polytope from `{"n": int, "vertices": [[int, ...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ZmStatus zm_polytope_from_json(const char *json, struct ZmPolytope **out);

/**
 * Normalized volume `n! Vol(Δ)`.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum ZmStatus zm_polytope_volume(const struct ZmPolytope *p, uint64_t *out);

/**
 * Hodge data as JSON; free with [`zm_string_free`].
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum ZmStatus zm_polytope_hodge_json(const struct ZmPolytope *p, char **out);

/**
 * # Safety
 * `p` must come from [`zm_polytope_from_json`] and not have been freed.
 */
void zm_polytope_free(struct ZmPolytope *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZETAMILL_H */
