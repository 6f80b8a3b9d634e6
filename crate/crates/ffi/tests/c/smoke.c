#include <math.h>
#include <stdio.h>
#include <string.h>

#include "fbm_local.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,  \
                    #cond, fl_last_error());                         \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    double v = 0.0;
    CHECK(fl_a_h(0.5, &v) == FL_OK && v == 1.0);
    CHECK(fl_fbm_cov(1.0, 1.0, 0.75, &v) == FL_OK && fabs(v - 1.0) < 1e-15);
    CHECK(fl_fbm_cov(1.0, 1.0, 1.5, &v) == FL_INVALID_ARGUMENT);
    CHECK(strlen(fl_last_error()) > 0);
    CHECK(fl_a_h(0.5, NULL) == FL_NULL_POINTER);

    double a[] = {-1.0, -0.5, -0.5, 0.0};
    double b[] = {0.5, 1.0, 1.0, 1.5};
    double ga[4], gb[4], c[4];
    CHECK(fl_gram(a, 2, 0.7, ga) == FL_OK);
    CHECK(fl_gram(b, 2, 0.7, gb) == FL_OK);
    CHECK(fl_cross_gram(a, 2, b, 2, 0.7, c) == FL_OK);

    FlSpectrum *spec = NULL;
    CHECK(fl_spectrum_new(ga, 2, gb, 2, c, 1e-10, &spec) == FL_OK);
    size_t len = 0;
    CHECK(fl_spectrum_len(spec, &len) == FL_OK && len == 2);
    double mi = 0.0, lo = 0.0, hi = 0.0, det = 0.0;
    CHECK(fl_spectrum_mi(spec, &mi, &lo, &hi) == FL_OK);
    CHECK(fl_mutual_information_det(ga, 2, gb, 2, c, &det) == FL_OK);
    CHECK(fabs(mi - det) <= 1e-10 * det && lo <= mi && mi <= hi);
    fl_spectrum_free(spec);

    double eps[] = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
    FlScanTable *table = NULL;
    CHECK(fl_scan_new(0.75, 0.0, 1.0, eps, 5, 16, 1e-10, &table) == FL_OK);
    FlFit fit;
    CHECK(fl_scan_fit(table, FL_COLUMN_COS_ANGLE, 0.5, &fit) == FL_OK);
    CHECK(fabs(fit.slope - 0.5) < 0.1);
    fl_scan_free(table);

    printf("ok %s\n", fl_version());
    return 0;
}
