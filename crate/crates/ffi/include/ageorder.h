#ifndef AGEORDER_H
#define AGEORDER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AoCurve {
  AO_CURVE_TTT = 0,
  AO_CURVE_R_INV = 1,
  AO_CURVE_R = 2,
  AO_CURVE_LORENZ = 3,
} AoCurve;

typedef enum AoOutcome {
  AO_OUTCOME_HOLDS = 0,
  AO_OUTCOME_FAILS = 1,
  AO_OUTCOME_INCONCLUSIVE = 2,
} AoOutcome;

typedef enum AoRelation {
  AO_RELATION_IFR = 0,
  AO_RELATION_IFRA = 1,
  AO_RELATION_NBU = 2,
  AO_RELATION_NBUFR = 3,
  AO_RELATION_NBAFR = 4,
} AoRelation;

typedef enum AoStatus {
  AO_STATUS_OK = 0,
  AO_STATUS_NULL_POINTER = 1,
  AO_STATUS_INVALID_ARGUMENT = 2,
  AO_STATUS_DOMAIN = 3,
  AO_STATUS_NUMERIC = 4,
  AO_STATUS_LEVEL = 5,
  AO_STATUS_PANIC = 6,
} AoStatus;

// Opaque ladder handle.
typedef struct AoChain AoChain;

// Opaque distribution handle.
typedef struct AoDistribution AoDistribution;

// Numeric settings; obtain defaults from [`ao_settings_default`].
typedef struct AoSettings {
  double quad_abs_tol;
  double tail_survival_cut;
  double invert_tol;
  size_t grid_points;
  double window_lo;
  double window_hi;
  bool use_closed_forms;
} AoSettings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *ao_last_error_message(void);

// Library version as a static nul-terminated string.
const char *ao_version(void);

struct AoSettings ao_settings_default(void);

// Parses a distribution spec such as `family=weibull param.shape=2 param.scale=1`.
//
// # Safety
// `spec` is a nul-terminated string; `out` is writable.
enum AoStatus ao_distribution_from_spec(const char *spec, struct AoDistribution **out);

// # Safety
// `out` is writable.
enum AoStatus ao_distribution_exponential(double rate, struct AoDistribution **out);

// # Safety
// `out` is writable.
enum AoStatus ao_distribution_weibull(double shape, double scale, struct AoDistribution **out);

// # Safety
// `out` is writable.
enum AoStatus ao_distribution_gamma(double shape, double rate, struct AoDistribution **out);

// # Safety
// `out` is writable.
enum AoStatus ao_distribution_uniform(double upper, struct AoDistribution **out);

// Empirical law of `len` observations.
//
// # Safety
// `values` is readable for `len` doubles; `out` is writable.
enum AoStatus ao_distribution_empirical(const double *values,
                                        size_t len,
                                        struct AoDistribution **out);

// # Safety
// `d` is null or a handle from this library that has not been freed.
void ao_distribution_free(struct AoDistribution *d);

// # Safety
// `d` is a live handle; `out` is writable.
enum AoStatus ao_distribution_mean(const struct AoDistribution *d, double *out);

// Builds the ladder of `d` up to `max_level`. `settings` may be null for defaults.
//
// # Safety
// `d` is a live handle; `settings` is null or readable; `out` is writable.
enum AoStatus ao_chain_build(const struct AoDistribution *d,
                             size_t max_level,
                             const struct AoSettings *settings,
                             struct AoChain **out);

// # Safety
// `c` is null or a handle from this library that has not been freed.
void ao_chain_free(struct AoChain *c);

// Level-`s` survival at `x`.
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_chain_t_bar(const struct AoChain *c, size_t s, double x, double *out);

// Level-`s` survival inverse at `x` in (0, 1).
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_chain_t_bar_inverse(const struct AoChain *c, size_t s, double x, double *out);

// Level-`s` failure rate at `x`.
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_chain_failure_rate(const struct AoChain *c, size_t s, double x, double *out);

// Level-`s` mean residual life at `x`.
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_chain_mrl(const struct AoChain *c, size_t s, double x, double *out);

// Integral of the level-`s` survival over `[x, ∞)`.
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_chain_tail_integral(const struct AoChain *c, size_t s, double x, double *out);

// Generalized mean of level `s`.
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_chain_generalized_mean(const struct AoChain *c, size_t s, double *out);

// Unit-interval transform `kind` at level `s`, evaluated at `u` in [0, 1].
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_transform(const struct AoChain *c,
                           enum AoCurve kind,
                           size_t s,
                           double u,
                           double *out);

// Decides `X ≤ Y` in `rel` at level `s`. `margin` may be null.
//
// # Safety
// `x`, `y` are live handles built to at least level `s + 1`; `outcome_out`
// is writable; `margin` is null or writable.
enum AoStatus ao_check_relation(const struct AoChain *x,
                                const struct AoChain *y,
                                enum AoRelation rel,
                                size_t s,
                                enum AoOutcome *outcome_out,
                                double *margin);

// Full ordering matrix for levels 1..=`max_level` as JSON. Free with [`ao_string_free`].
//
// # Safety
// `x`, `y` are live handles; `out` is writable.
enum AoStatus ao_ordering_report_json(const struct AoChain *x,
                                      const struct AoChain *y,
                                      size_t max_level,
                                      char **out);

// Ageing classification for levels 1..=`max_level` as JSON. Free with [`ao_string_free`].
//
// # Safety
// `c` is a live handle; `out` is writable.
enum AoStatus ao_classify_json(const struct AoChain *c, size_t max_level, char **out);

// # Safety
// `s` is null or a string returned by this library that has not been freed.
void ao_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AGEORDER_H */
