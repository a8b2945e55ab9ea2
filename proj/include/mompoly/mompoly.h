#ifndef MOMPOLY_H
#define MOMPOLY_H

#include <stddef.h>

#if defined(MOMPOLY_BUILDING)
#define MP_API __attribute__((visibility("default")))
#else
#define MP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mp_status {
  MP_OK = 0,
  MP_ERR_ARGUMENT = 1,
  MP_ERR_SPEC = 2,
  MP_ERR_SOLVER = 3,
  MP_ERR_INVALID_CERTIFICATE = 4,
  MP_ERR_IO = 5,
  MP_ERR_PARSE = 6,
  MP_ERR_TOO_LARGE = 7,
  MP_ERR_INTERNAL = 8
} mp_status;

typedef struct mp_spec mp_spec;
typedef struct mp_sdp mp_sdp;
typedef struct mp_solution mp_solution;
typedef struct mp_certificate mp_certificate;

/* Message of the last failing call on this thread; empty if none. */
MP_API const char* mp_last_error(void);
MP_API const char* mp_version(void);
/* Strings returned through char** out-parameters are released with this. */
MP_API void mp_string_free(char* s);

/* Problem specs.  Names for mp_spec_builtin: "cov3322", "bilocal". */
MP_API mp_status mp_spec_load(const char* path, mp_spec** out);
MP_API mp_status mp_spec_parse(const char* json, mp_spec** out);
MP_API mp_status mp_spec_builtin(const char* name, mp_spec** out);
MP_API mp_status mp_spec_clone(const mp_spec* spec, mp_spec** out);
MP_API void mp_spec_free(mp_spec* spec);
MP_API mp_status mp_spec_set_order(mp_spec* spec, int order);
MP_API mp_status mp_spec_set_cone(mp_spec* spec, const char* cone);
MP_API mp_status mp_spec_set_mode(mp_spec* spec, const char* mode);
MP_API mp_status mp_spec_set_perturbation(mp_spec* spec, const char* perturbation);
/* p/q or decimal strings */
MP_API mp_status mp_spec_set_big_m(mp_spec* spec, const char* value);
MP_API mp_status mp_spec_set_epsilon(mp_spec* spec, const char* value);
MP_API int mp_spec_order(const mp_spec* spec);
/* +1 when higher orders can only raise the bound, -1 when they can only lower it. */
MP_API int mp_spec_monotone_direction(const mp_spec* spec);
MP_API mp_status mp_spec_to_json(const mp_spec* spec, char** out);

/* Relaxations */
MP_API mp_status mp_build(const mp_spec* spec, unsigned jobs, mp_sdp** out);
MP_API void mp_sdp_free(mp_sdp* sdp);
/* {"label", "form", "unknowns", "rows", "scalars", "blocks": [...], "max_block"} */
MP_API mp_status mp_sdp_info(const mp_sdp* sdp, char** out);
MP_API mp_status mp_sdp_write_sdpa(const mp_sdp* sdp, const char* path);

/* Solving.  MP_ERR_TOO_LARGE when a block exceeds block_cap. */
MP_API mp_status mp_solve(const mp_sdp* sdp, double tol, int max_iter, size_t block_cap, mp_solution** out);
/* Reads an SDPA or CSDP solution file for sdp and recomputes its residuals. */
MP_API mp_status mp_solution_import(const mp_sdp* sdp, const char* path, double tol, mp_solution** out);
MP_API void mp_solution_free(mp_solution* sol);
MP_API int mp_solution_optimal(const mp_solution* sol);
MP_API double mp_solution_bound(const mp_solution* sol);
/* {"status", "bound", "residuals": {"primal", "dual", "gap"}, "iterations", "message"} */
MP_API mp_status mp_solution_info(const mp_solution* sol, char** out);

/* Certificates.  Names for mp_certificate_builtin: "cov3322", "cov3322_corrected". */
MP_API mp_status mp_certificate_load(const char* path, mp_certificate** out);
MP_API mp_status mp_certificate_builtin(const char* name, mp_certificate** out);
MP_API mp_status mp_certificate_holder(int k, mp_certificate** out);
/* Multi-index i of length n; full == 0 gives the core identity only. */
MP_API mp_status mp_certificate_adhoc(const int* i, size_t n, int full, mp_certificate** out);
MP_API void mp_certificate_free(mp_certificate* cert);
MP_API mp_status mp_certificate_to_json(const mp_certificate* cert, char** out);
/* Fills *report in every case; returns MP_ERR_INVALID_CERTIFICATE unless the
   certificate verifies exactly. */
MP_API mp_status mp_certificate_verify(const mp_certificate* cert, char** report);

/* Worked examples: "cov3322", "bilocal", "h17", "holder", "adhoc".  heavy != 0
   adds the slow parts (bilocal order-3 dual bound). */
MP_API mp_status mp_example(const char* name, int heavy, unsigned jobs, char** report);

/* Classical reformulation over finitely many atoms. */
MP_API mp_status mp_reformulate(const mp_spec* spec, char** report);

/* Pseudo-moment utilities on a functional file ({"n", "degree", "values"}).
   action: "check", "extend" or "perturb"; delta is used by "perturb". */
MP_API mp_status mp_hankel(const char* functional_path, const char* action, const char* delta, char** report);

#ifdef __cplusplus
}
#endif

#endif
