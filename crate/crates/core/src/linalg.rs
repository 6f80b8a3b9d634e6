//! Rank-revealing factorization of positive semidefinite matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Diagonally pivoted Cholesky factorization `P G P^T ~ L L^T`, stopped at
/// the first pivot whose Schur-complement variance drops below
/// `rtol * max(diag(G))`.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    /// Original indices in pivot order; the first `rank` are retained.
    pub pivots: Vec<usize>,
    /// Lower-trapezoidal factor, rows in pivot order, `rank` columns.
    pub factor: DMatrix<f64>,
    pub rank: usize,
}

impl PivotedCholesky {
    pub fn new(g: &DMatrix<f64>, rtol: f64) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Gram matrix must be square, got {}x{}",
                n,
                g.ncols()
            )));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut diag: Vec<f64> = (0..n).map(|i| g[(i, i)]).collect();
        let scale = diag.iter().cloned().fold(0.0_f64, f64::max);
        let mut l = DMatrix::<f64>::zeros(n, n);
        let mut rank = 0;
        if scale > 0.0 && scale.is_finite() {
            let tol = rtol * scale;
            for k in 0..n {
                let (jmax, dmax) = (k..n)
                    .map(|i| (i, diag[perm[i]]))
                    .fold((k, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
                if !(dmax > tol) {
                    break;
                }
                if jmax != k {
                    perm.swap(k, jmax);
                    l.swap_rows(k, jmax);
                }
                let lkk = dmax.sqrt();
                l[(k, k)] = lkk;
                let pk = perm[k];
                for i in k + 1..n {
                    let pi = perm[i];
                    let mut s = g[(pi, pk)];
                    for m in 0..k {
                        s -= l[(i, m)] * l[(k, m)];
                    }
                    let lik = s / lkk;
                    l[(i, k)] = lik;
                    diag[pi] -= lik * lik;
                }
                rank = k + 1;
            }
        }
        let factor = l.columns(0, rank).into_owned();
        Ok(PivotedCholesky {
            pivots: perm,
            factor,
            rank,
        })
    }

    pub fn retained(&self) -> &[usize] {
        &self.pivots[..self.rank]
    }

    /// Triangular factor of the retained principal block.
    pub fn leading_block(&self) -> DMatrix<f64> {
        self.factor.rows(0, self.rank).into_owned()
    }

    /// Squared ratio of the extreme retained pivots; estimates the condition
    /// number of the retained block.
    pub fn condition_estimate(&self) -> f64 {
        if self.rank == 0 {
            return f64::INFINITY;
        }
        let d = (0..self.rank).map(|k| self.factor[(k, k)]);
        let (lo, hi) = d.fold((f64::INFINITY, 0.0_f64), |(lo, hi), x| (lo.min(x), hi.max(x)));
        (hi / lo).powi(2)
    }
}

/// Scales a symmetric matrix to unit diagonal. Returns the scaled matrix and
/// the square roots of the original diagonal; zero-variance rows stay zero.
pub fn equilibrate(g: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let d = DVector::from_iterator(g.nrows(), (0..g.nrows()).map(|i| g[(i, i)].max(0.0).sqrt()));
    let inv = d.map(|x| if x > 0.0 { 1.0 / x } else { 0.0 });
    let scaled = DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)] * inv[i] * inv[j]);
    (scaled, d)
}

/// log det of a strictly positive definite matrix.
pub fn log_det_spd(g: &DMatrix<f64>) -> Result<f64> {
    let chol = nalgebra::Cholesky::new(g.clone())
        .ok_or_else(|| Error::Degenerate("matrix is not positive definite".into()))?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for i in 0..g.nrows() {
        let d = l[(i, i)];
        if !(d > 0.0) {
            return Err(Error::Degenerate("matrix is not positive definite".into()));
        }
        acc += d.ln();
    }
    Ok(2.0 * acc)
}

/// b^T G^+ b restricted to the numerically retained part of G, that is
/// sup over c of (c^T b)^2 / (c^T G c).
pub fn inverse_quadratic_form(g: &DMatrix<f64>, b: &[f64], rtol: f64) -> Result<f64> {
    if b.len() != g.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {}x{} matrix",
            b.len(),
            g.nrows(),
            g.ncols()
        )));
    }
    let (scaled, d) = equilibrate(g);
    let pc = PivotedCholesky::new(&scaled, rtol)?;
    if pc.rank == 0 {
        return Err(Error::Degenerate("quadratic form on a zero matrix".into()));
    }
    let l = pc.leading_block();
    let rhs = DVector::from_iterator(pc.rank, pc.retained().iter().map(|&i| b[i] / d[i]));
    let y = l
        .solve_lower_triangular(&rhs)
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;
    Ok(y.norm_squared())
}

pub fn max_asymmetry(g: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..g.nrows() {
        for j in 0..i {
            worst = worst.max((g[(i, j)] - g[(j, i)]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_factor(n: usize, r: usize, seed: u64) -> DMatrix<f64> {
        // small deterministic LCG; this module has no RNG dependency
        let mut state = seed;
        DMatrix::from_fn(n, r, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn full_rank_matches_plain_cholesky() {
        let b = random_factor(6, 6, 7);
        let g = &b * b.transpose() + DMatrix::identity(6, 6) * 0.1;
        let pc = PivotedCholesky::new(&g, 1e-12).unwrap();
        assert_eq!(pc.rank, 6);
        let l = &pc.factor;
        let rebuilt = l * l.transpose();
        for i in 0..6 {
            for j in 0..6 {
                let (pi, pj) = (pc.pivots[i], pc.pivots[j]);
                assert_relative_eq!(rebuilt[(i, j)], g[(pi, pj)], epsilon = 1e-12);
            }
        }
        let ld = log_det_spd(&g).unwrap();
        let direct: f64 = (0..6).map(|k| pc.factor[(k, k)].ln()).sum::<f64>() * 2.0;
        assert_relative_eq!(ld, direct, epsilon = 1e-12);
    }

    #[test]
    fn detects_rank_deficiency() {
        let b = random_factor(8, 3, 11);
        let g = &b * b.transpose();
        let pc = PivotedCholesky::new(&g, 1e-10).unwrap();
        assert_eq!(pc.rank, 3);
        let zero = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(PivotedCholesky::new(&zero, 1e-10).unwrap().rank, 0);
    }

    #[test]
    fn pivots_pick_largest_variance_first() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 5.0, 3.0]));
        let pc = PivotedCholesky::new(&g, 1e-10).unwrap();
        assert_eq!(pc.pivots, vec![1, 2, 0]);
        assert_relative_eq!(pc.condition_estimate(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn equilibration_gives_unit_diagonal() {
        let b = random_factor(5, 5, 3);
        let g = &b * b.transpose() * 1e-6;
        let (s, d) = equilibrate(&g);
        for i in 0..5 {
            assert_relative_eq!(s[(i, i)], 1.0, epsilon = 1e-14);
            assert_relative_eq!(d[i] * d[i], g[(i, i)], epsilon = 1e-14);
        }
    }

    #[test]
    fn quadratic_form_matches_direct_solve() {
        let b = random_factor(5, 5, 5);
        let g = &b * b.transpose() + DMatrix::identity(5, 5);
        let v = [1.0, -2.0, 0.5, 3.0, 0.0];
        let direct = {
            let x = g.clone().cholesky().unwrap().solve(&DVector::from_row_slice(&v));
            DVector::from_row_slice(&v).dot(&x)
        };
        assert_relative_eq!(
            inverse_quadratic_form(&g, &v, 1e-14).unwrap(),
            direct,
            max_relative = 1e-12
        );
        assert!(inverse_quadratic_form(&g, &v[..3], 1e-14).is_err());
    }

    #[test]
    fn log_det_rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(log_det_spd(&g), Err(Error::Degenerate(_))));
    }
}
