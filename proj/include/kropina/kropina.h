#ifndef KROPINA_KROPINA_H
#define KROPINA_KROPINA_H

#include <stddef.h>
#include <stdint.h>

#if defined(KROPINA_BUILDING_LIBRARY)
#define KROPINA_API __attribute__((visibility("default")))
#else
#define KROPINA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kr_status {
  KR_OK = 0,
  KR_ERR_INPUT = 1,          /* malformed or non-finite arguments */
  KR_ERR_DOMAIN = 2,         /* point outside the chart */
  KR_ERR_OUTSIDE_CONE = 3,   /* direction outside the conic domain */
  KR_ERR_NEAR_BOUNDARY = 4,  /* too close to the cone boundary for the operation */
  KR_ERR_DEGENERATE = 5,     /* degenerate plane or flag */
  KR_ERR_VALIDATION = 6,     /* model data violates a structural identity */
  KR_ERR_SAMPLING = 7,       /* no admissible sample found */
  KR_ERR_CONFIG = 8,         /* configuration rejected */
  KR_ERR_INTERNAL = 9
} kr_status;

/* Message of the last failing call on this thread; never NULL. */
KROPINA_API const char* kr_last_error(void);

/* ---- Kropina metric on the conic domain ---- */

typedef struct kr_metric kr_metric;

/* model_json is a model object as accepted in the "model" section of a run config. */
KROPINA_API kr_status kr_metric_create(const char* model_json, kr_metric** out);
KROPINA_API void kr_metric_destroy(kr_metric* m);
KROPINA_API size_t kr_metric_dim(const kr_metric* m);

/* Vectors have kr_metric_dim entries; matrices are row-major dim*dim. */
KROPINA_API kr_status kr_metric_domain_contains(const kr_metric* m, const double* x, const double* y, int* out);
KROPINA_API kr_status kr_metric_F(const kr_metric* m, const double* x, const double* y, double* out);
KROPINA_API kr_status kr_metric_fundamental_tensor(const kr_metric* m, const double* x, const double* y,
                                                   double* out);
KROPINA_API kr_status kr_metric_spray(const kr_metric* m, const double* x, const double* y, double* out);
KROPINA_API kr_status kr_metric_flag_curvature(const kr_metric* m, const double* x, const double* y,
                                               const double* X, double* out);
KROPINA_API kr_status kr_metric_hamel_residual(const kr_metric* m, const double* x, const double* y, double* out);

/* ---- Batch commands ---- */

typedef struct kr_report kr_report;

/* Runs check-cc, geodesic, convert, moduli, hamel or indicatrix on a JSON config.
 * seed_override may be NULL. A report is produced whenever *out is non-NULL on
 * return, including for failures; its exit code is 0 ok, 1 check failed or
 * inadmissible data, 2 config error, 3 sampling failure. */
KROPINA_API kr_status kr_run_command(const char* command, const char* config_json, const uint64_t* seed_override,
                                     kr_report** out);
KROPINA_API void kr_report_destroy(kr_report* r);
KROPINA_API int kr_report_exit_code(const kr_report* r);
/* One summary line without a newline. */
KROPINA_API const char* kr_report_summary(const kr_report* r);
KROPINA_API const char* kr_report_json(const kr_report* r);
/* NULL when the command emits no CSV. */
KROPINA_API const char* kr_report_csv(const kr_report* r);

typedef enum kr_artifact { KR_ARTIFACT_REPORT = 0, KR_ARTIFACT_CSV = 1 } kr_artifact;

/* Output path named in the config for the artifact, or NULL. */
KROPINA_API const char* kr_report_artifact_path(const kr_report* r, kr_artifact which);

#ifdef __cplusplus
}
#endif

#endif
