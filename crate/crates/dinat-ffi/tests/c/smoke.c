#include <stdio.h>
#include <string.h>

#include "dinat.h"

static int failures = 0;

#define EXPECT(cond)                                                        \
  do {                                                                      \
    if (!(cond)) {                                                          \
      const char *why = dinat_last_error();                                 \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond, why ? why : "");\
      failures++;                                                           \
    }                                                                       \
  } while (0)

static const char *DELTA =
    "{\"name\": \"delta\", \"kind\": \"atomic\", \"domVariance\": [\"+\"],"
    " \"codVariance\": [\"+\", \"+\"], \"vars\": 1, \"sigma\": [1],"
    " \"tau\": [1, 1], \"delta\": [1], \"semantics\": {\"builtin\": \"diagonal\"}}";

static const char *EVAL =
    "{\"name\": \"eval\", \"kind\": \"atomic\", \"domVariance\": [\"+\", \"-\", \"+\"],"
    " \"codVariance\": [\"+\"], \"vars\": 2, \"sigma\": [1, 1, 2], \"tau\": [2],"
    " \"delta\": [1, 1], \"semantics\": {\"builtin\": \"eval\"}}";

int main(void) {
  DinatTransformation *delta = NULL, *eval = NULL, *h = NULL;
  EXPECT(dinat_transformation_from_json(DELTA, &delta) == DINAT_STATUS_OK);
  EXPECT(dinat_transformation_from_json(EVAL, &eval) == DINAT_STATUS_OK);

  size_t vars = 0;
  EXPECT(dinat_transformation_vars(eval, &vars) == DINAT_STATUS_OK && vars == 2);

  EXPECT(dinat_hcompose(delta, eval, 2, &h) == DINAT_STATUS_OK);
  DinatCheck check;
  EXPECT(dinat_check(h, 1, &check) == DINAT_STATUS_OK && check.acyclic && check.guaranteed);

  char *dot = NULL;
  EXPECT(dinat_render_dot(delta, &dot) == DINAT_STATUS_OK);
  EXPECT(dot && strstr(dot, "label=\"delta.1\"") != NULL);
  dinat_string_free(dot);

  EXPECT(dinat_oracle_check(eval, 2) == DINAT_STATUS_OK);

  DinatTransformation *bad = NULL;
  EXPECT(dinat_vcompose(delta, eval, &bad) == DINAT_STATUS_INVALID_ARGUMENT);
  EXPECT(bad == NULL);
  EXPECT(dinat_last_error() != NULL);
  EXPECT(dinat_transformation_from_json("{", &bad) == DINAT_STATUS_INVALID_DOCUMENT);
  EXPECT(dinat_transformation_vars(NULL, &vars) == DINAT_STATUS_NULL_POINTER);

  dinat_transformation_free(h);
  dinat_transformation_free(eval);
  dinat_transformation_free(delta);
  if (failures == 0) {
    printf("ok\n");
  }
  return failures == 0 ? 0 : 1;
}
