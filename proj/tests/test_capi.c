/* Plain C client of the shared library. */
#include <stdio.h>
#include <string.h>

#include "mompoly/mompoly.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);  \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  mp_spec* spec = NULL;
  mp_sdp* sdp = NULL;
  mp_solution* sol = NULL;
  mp_certificate* cert = NULL;
  char* text = NULL;

  EXPECT(mp_spec_parse("{\"n\": 1, \"objective\": \"m[2] - m[1]^2\", \"order\": 1}", &spec) == MP_OK);
  EXPECT(mp_spec_order(spec) == 1);
  EXPECT(mp_spec_set_cone(spec, "cube") == MP_ERR_SPEC);
  EXPECT(strlen(mp_last_error()) > 0);
  EXPECT(mp_spec_set_order(spec, 2) == MP_OK);
  EXPECT(mp_spec_monotone_direction(spec) == 1);
  EXPECT(mp_build(spec, 1, &sdp) == MP_OK);
  EXPECT(mp_sdp_info(sdp, &text) == MP_OK);
  EXPECT(strstr(text, "\"form\":\"gram\"") != NULL);
  mp_string_free(text);
  EXPECT(mp_solve(sdp, 1e-8, 100, 500, &sol) == MP_OK);
  EXPECT(mp_solution_optimal(sol));
  EXPECT(mp_solution_bound(sol) > -1e-6 && mp_solution_bound(sol) < 1e-6);
  mp_solution_free(sol);
  sol = NULL;
  EXPECT(mp_solve(sdp, 1e-8, 100, 1, &sol) == MP_ERR_TOO_LARGE);
  EXPECT(sol == NULL);
  mp_sdp_free(sdp);
  mp_spec_free(spec);

  EXPECT(mp_spec_parse("{\"n\": 1}", &spec) == MP_ERR_SPEC);
  EXPECT(mp_spec_load("/nonexistent/spec.json", &spec) == MP_ERR_IO);
  EXPECT(mp_build(NULL, 1, &sdp) == MP_ERR_ARGUMENT);

  EXPECT(mp_certificate_holder(4, &cert) == MP_OK);
  EXPECT(mp_certificate_verify(cert, &text) == MP_OK);
  EXPECT(strstr(text, "\"status\":\"valid\"") != NULL);
  mp_string_free(text);
  mp_certificate_free(cert);

  EXPECT(mp_certificate_builtin("cov3322", &cert) == MP_OK);
  EXPECT(mp_certificate_verify(cert, &text) == MP_ERR_INVALID_CERTIFICATE);
  EXPECT(strstr(text, "\"status\":\"invalid\"") != NULL);
  mp_string_free(text);
  mp_certificate_free(cert);

  {
    int i[2] = {1, 2};
    EXPECT(mp_certificate_adhoc(i, 2, 1, &cert) == MP_OK);
    EXPECT(mp_certificate_verify(cert, &text) == MP_OK);
    mp_string_free(text);
    mp_certificate_free(cert);
  }

  EXPECT(mp_example("h17", 0, 1, &text) == MP_OK);
  EXPECT(strstr(text, "\"pseudo_value\":\"-7\"") != NULL);
  mp_string_free(text);
  EXPECT(mp_example("nope", 0, 1, &text) == MP_ERR_ARGUMENT);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  return failures ? 1 : 0;
}
