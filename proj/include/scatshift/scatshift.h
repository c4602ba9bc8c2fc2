#ifndef SCATSHIFT_H
#define SCATSHIFT_H

#include <stddef.h>

#if defined(SCATSHIFT_BUILDING_LIBRARY)
#define SCATSHIFT_API __attribute__((visibility("default")))
#else
#define SCATSHIFT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_ERR_INVALID_ARGUMENT = 1,
  SS_ERR_UNISOLVENCE = 2,
  SS_ERR_CONVERGENCE = 3,
  SS_ERR_IO = 4,
  SS_ERR_CERTIFICATE = 5,
  SS_ERR_INTERNAL = 6
} ss_status;

typedef struct ss_basis ss_basis;
typedef struct ss_centers ss_centers;
typedef struct ss_approximant ss_approximant;

/* Message of the last failing call on this thread; "" if none. */
SCATSHIFT_API const char* ss_last_error(void);
SCATSHIFT_API const char* ss_version(void);
/* Releases strings returned through char** out-parameters. */
SCATSHIFT_API void ss_string_free(char* s);

/* Runs a command (density, approximate, low-smooth, nterm, rates, verify) on a
   JSON config. mode selects the rates study and may be NULL. On SS_OK and on
   SS_ERR_CERTIFICATE the JSON report is stored in *report. */
SCATSHIFT_API ss_status ss_run(const char* command, const char* config_json, const char* mode, char** report);
/* Applies "a.b=value" to a JSON config; the result goes to *out. */
SCATSHIFT_API ss_status ss_config_override(const char* config_json, const char* assignment, char** out);
/* Parses, validates for command, and returns the fully resolved config. */
SCATSHIFT_API ss_status ss_config_resolve(const char* config_json, const char* command, char** out);

/* kind: "surface_spline" (order = m) or "truncated_power" (order = kappa, dim 1). */
SCATSHIFT_API ss_status ss_basis_create(const char* kind, int dim, int order, ss_basis** out);
SCATSHIFT_API ss_status ss_basis_eval(const ss_basis* phi, const double* x, double* value);
SCATSHIFT_API int ss_basis_kappa(const ss_basis* phi);
SCATSHIFT_API void ss_basis_free(ss_basis* phi);

/* Center CSV text with header x0[,x1[,x2]]. */
SCATSHIFT_API ss_status ss_centers_parse_csv(const char* text, ss_centers** out);
SCATSHIFT_API ss_status ss_centers_uniform(int dim, const double* lo, const double* hi, double spacing, ss_centers** out);
SCATSHIFT_API size_t ss_centers_size(const ss_centers* cs);
SCATSHIFT_API int ss_centers_dim(const ss_centers* cs);
SCATSHIFT_API void ss_centers_free(ss_centers* cs);

/* Evaluates a registry target such as "bump:c=0.5,R=0.5" at x. */
SCATSHIFT_API ss_status ss_target_eval(const char* target, int dim, const double* x, double* value);

/* Quasi-interpolant of a registry target on the centers. nu is the decay order
   of the local reproductions; panel and order set the Gauss-Legendre rule. */
SCATSHIFT_API ss_status ss_approximant_assemble(const ss_basis* phi, const ss_centers* cs, const char* target, double nu,
                                                double panel, int order, ss_approximant** out);
SCATSHIFT_API ss_status ss_approximant_eval(const ss_approximant* a, const double* xs, size_t count, double* values);
SCATSHIFT_API size_t ss_approximant_size(const ss_approximant* a);
SCATSHIFT_API ss_status ss_approximant_to_json(const ss_approximant* a, char** out);
SCATSHIFT_API void ss_approximant_free(ss_approximant* a);

#ifdef __cplusplus
}
#endif

#endif
