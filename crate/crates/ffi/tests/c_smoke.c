#include <math.h>
#include <stdio.h>
#include <string.h>
#include "sqrtop.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    SqrtopParams *p = NULL;
    CHECK(sqrtop_params_new(1.5, 1.0, 1.0, 1.0, &p) == SQRTOP_STATUS_OK);
    CHECK(fabs(sqrtop_params_mu(p) - 1.5) < 1e-15);

    double k1 = 0.0;
    CHECK(sqrtop_bessel_k(1, 1.0, &k1) == SQRTOP_STATUS_OK);
    CHECK(fabs(k1 - 0.6019072301972346) < 1e-13);
    CHECK(sqrtop_bessel_k(1, -1.0, &k1) == SQRTOP_STATUS_DOMAIN);
    char msg[256];
    CHECK(sqrtop_last_error_message(msg, sizeof msg) > 0 && strlen(msg) > 0);

    SqrtopField *f = NULL, *g = NULL;
    CHECK(sqrtop_field_new(SQRTOP_GRID_KIND_PERIODIC, 8, 0.5, 1, &f) == SQRTOP_STATUS_OK);
    size_t n = sqrtop_field_len(f);
    CHECK(n == 512);
    double re[512], im[512];
    for (size_t i = 0; i < n; i++) { re[i] = 1.0; im[i] = 0.0; }
    CHECK(sqrtop_field_set(f, re, im, n) == SQRTOP_STATUS_OK);
    CHECK(sqrtop_apply_spectral(p, f, &g) == SQRTOP_STATUS_OK);
    CHECK(sqrtop_field_get(g, re, im, n) == SQRTOP_STATUS_OK);
    for (size_t i = 0; i < n; i++) CHECK(fabs(re[i] - 1.5) < 1e-12 && fabs(im[i]) < 1e-12);

    SqrtopField *bad = NULL;
    CHECK(sqrtop_field_from_text("SQRTFIELD 2\n", &bad) == SQRTOP_STATUS_MALFORMED);
    CHECK(bad == NULL);

    sqrtop_field_free(g);
    sqrtop_field_free(f);
    sqrtop_params_free(p);
    printf("ok %s\n", sqrtop_version());
    return 0;
}
