/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef FBM_LOCAL_H
#define FBM_LOCAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FL_OK 0

#define FL_INVALID_ARGUMENT 1

#define FL_NULL_POINTER 2

#define FL_DEGENERATE 3

#define FL_NUMERICAL 4

#define FL_IO 5

#define FL_PANIC 6

#define FL_COLUMN_COS_ANGLE 0

#define FL_COLUMN_MI 1

#define FL_COLUMN_HS_NORM 2

// Rows of an angle and information scan between two windows.
typedef struct FlScanTable FlScanTable;

// Canonical correlations of two subspaces.
typedef struct FlSpectrum FlSpectrum;

typedef struct FlSpectrumInfo {
  size_t rank_a;
  size_t rank_b;
  size_t dim_a;
  size_t dim_b;
  double cond;
  bool ill_conditioned;
} FlSpectrumInfo;

typedef struct FlScanRow {
  double eps;
  double cos_angle;
  double mi;
  double hs_lower;
  double hs_upper;
  double hs_norm;
  size_t rank_a;
  size_t rank_b;
  size_t dim_a;
  size_t dim_b;
  double cond;
  bool ill_conditioned;
  bool skipped;
} FlScanRow;

typedef struct FlFit {
  double slope;
  double intercept;
  double r2;
  double theory_slope;
  double theory_gap;
  size_t points;
} FlFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next call on the same thread.
const char *fl_last_error(void);

// Library version as a static NUL-terminated string.
const char *fl_version(void);

// R_H(u, v) for u, v >= 0.
int32_t fl_fbm_cov(double u, double v, double h, double *out);

// Covariance of the increments over (s1, t1) and (s2, t2).
int32_t fl_increment_cov(double s1, double t1, double s2, double t2, double h, double *out);

// Covariance of Levy fBm at two points of dimension `dim`.
int32_t fl_levy_fbm_cov(const double *u, const double *v, size_t dim, double h, double *out);

// Gram matrix of `n` increments; `out` holds `n * n` doubles.
int32_t fl_gram(const double *pairs, size_t n, double h, double *out);

// Cross-covariance of two increment bases; `out` holds `na * nb` doubles.
int32_t fl_cross_gram(const double *a,
                      size_t na,
                      const double *b,
                      size_t nb,
                      double h,
                      double *out);

// Canonical correlations from Gram matrices `ga` (na x na), `gb` (nb x nb)
// and the cross-covariance `c` (na x nb). Free with `fl_spectrum_free`.
int32_t fl_spectrum_new(const double *ga,
                        size_t na,
                        const double *gb,
                        size_t nb,
                        const double *c,
                        double rtol,
                        struct FlSpectrum **out);

void fl_spectrum_free(struct FlSpectrum *spec);

// Number of canonical correlations.
int32_t fl_spectrum_len(const struct FlSpectrum *spec, size_t *out);

// Copies the correlations, largest first, into `out` of capacity `cap`.
int32_t fl_spectrum_sigmas(const struct FlSpectrum *spec, double *out, size_t cap);

int32_t fl_spectrum_info(const struct FlSpectrum *spec, struct FlSpectrumInfo *out);

int32_t fl_spectrum_cos_angle(const struct FlSpectrum *spec, double *out);

// Information and its Hilbert-Schmidt bounds. `lower` and `upper` may be null.
int32_t fl_spectrum_mi(const struct FlSpectrum *spec, double *mi, double *lower, double *upper);

// Information from the joint covariance determinant.
int32_t fl_mutual_information_det(const double *ga,
                                  size_t na,
                                  const double *gb,
                                  size_t nb,
                                  const double *c,
                                  double *out);

int32_t fl_a_h(double h, double *out);

int32_t fl_r_h_spectral(double h, double *out);

int32_t fl_riesz_fourier_constant(uint32_t n, double alpha, double *out);

// Scan between windows around t1 and t2 with `grid_n` points each, over
// `n_eps` strictly decreasing half-widths. Free with `fl_scan_free`.
int32_t fl_scan_new(double h,
                    double t1,
                    double t2,
                    const double *eps,
                    size_t n_eps,
                    size_t grid_n,
                    double rtol,
                    struct FlScanTable **out);

void fl_scan_free(struct FlScanTable *table);

int32_t fl_scan_row_count(const struct FlScanTable *t, size_t *out);

int32_t fl_scan_row(const struct FlScanTable *t, size_t index, struct FlScanRow *out);

// Log-log fit of one `FL_COLUMN_*` against eps, compared with `theory`.
int32_t fl_scan_fit(const struct FlScanTable *t, int32_t column, double theory, struct FlFit *out);

// Writes the table as CSV to the UTF-8 path.
int32_t fl_scan_write_csv(const struct FlScanTable *t, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FBM_LOCAL_H */
