//! Canonical correlations, principal angle and Gaussian mutual information
//! between two finite-dimensional subspaces given by Gram matrices.
//!
//! The production route whitens each Gram matrix by a pivoted Cholesky
//! factor and takes singular values of the whitened cross-covariance. The
//! squared singular values are the nonzero eigenvalues of `P_A P_B P_A`, so
//! mutual information follows from the Gelfand-Yaglom sum. The determinant
//! route is kept as an independent oracle for nondegenerate inputs.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{equilibrate, log_det_spd, max_asymmetry, PivotedCholesky};

pub const DEFAULT_RTOL: f64 = 1e-10;
/// Canonical correlations at or above this value make the information infinite.
pub const INFINITE_THRESHOLD: f64 = 1.0 - 1e-12;
pub const ILL_CONDITIONED_COND: f64 = 1e12;
/// Largest raw singular value tolerated above 1 before flagging.
pub const CLAMP_SLACK: f64 = 1e-8;

/// A value in nats that may be infinite. Serializes as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MiValue {
    Finite(f64),
    Infinite,
}

impl MiValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            MiValue::Finite(v) => Some(v),
            MiValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, MiValue::Infinite)
    }
}

impl std::fmt::Display for MiValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MiValue::Finite(v) => write!(f, "{v}"),
            MiValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for MiValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MiValue::Finite(v) => s.serialize_f64(*v),
            MiValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for MiValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(MiValue::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(MiValue::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Sorted canonical correlations with factorization diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSpectrum {
    /// Descending, clamped to [0, 1].
    pub sigmas: Vec<f64>,
    pub rank_a: usize,
    pub rank_b: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Larger of the two retained-block condition estimates.
    pub cond: f64,
    /// Largest singular value before clamping.
    pub raw_max: f64,
}

impl CanonicalSpectrum {
    /// Builds a spectrum directly from correlations, e.g. for synthetic tests.
    pub fn from_sigmas(mut sigmas: Vec<f64>) -> Result<Self> {
        if sigmas.iter().any(|s| !s.is_finite() || *s < 0.0 || *s > 1.0) {
            return Err(Error::invalid("sigmas", "canonical correlations must lie in [0, 1]"));
        }
        sigmas.sort_by(|a, b| b.total_cmp(a));
        let n = sigmas.len();
        let raw_max = sigmas.first().copied().unwrap_or(0.0);
        Ok(CanonicalSpectrum {
            sigmas,
            rank_a: n,
            rank_b: n,
            dim_a: n,
            dim_b: n,
            cond: 1.0,
            raw_max,
        })
    }

    pub fn ill_conditioned(&self) -> bool {
        self.cond > ILL_CONDITIONED_COND || self.raw_max > 1.0 + CLAMP_SLACK
    }

    /// Either Gram matrix lost rank to truncation.
    pub fn truncated(&self) -> bool {
        self.rank_a < self.dim_a || self.rank_b < self.dim_b
    }

    /// Squared Hilbert-Schmidt norm of `P_B P_A`.
    pub fn hs_squared(&self) -> f64 {
        self.sigmas.iter().map(|s| s * s).sum()
    }
}

/// Information together with its Hilbert-Schmidt sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiResult {
    pub value: MiValue,
    pub lower: f64,
    pub upper: MiValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsBounds {
    pub lower: f64,
    pub upper: MiValue,
}

fn check_gram(name: &'static str, g: &DMatrix<f64>) -> Result<()> {
    if g.nrows() != g.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{name} must be square, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(name, "Gram matrix has non-finite entries"));
    }
    let scale = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if max_asymmetry(g) > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::invalid(name, "Gram matrix is not symmetric"));
    }
    Ok(())
}

pub fn canonical_correlations(
    ga: &DMatrix<f64>,
    gb: &DMatrix<f64>,
    c: &DMatrix<f64>,
    rtol: f64,
) -> Result<CanonicalSpectrum> {
    check_gram("GA", ga)?;
    check_gram("GB", gb)?;
    if c.nrows() != ga.nrows() || c.ncols() != gb.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "cross covariance is {}x{}, expected {}x{}",
            c.nrows(),
            c.ncols(),
            ga.nrows(),
            gb.nrows()
        )));
    }
    if !(rtol > 0.0 && rtol < 1.0) {
        return Err(Error::invalid("rtol", format!("must lie in (0, 1), got {rtol}")));
    }

    // Canonical correlations are invariant under rescaling individual basis
    // vectors; unit variances keep the truncation tolerance meaningful for
    // bases mixing very different increment lengths.
    let (sa, da) = equilibrate(ga);
    let (sb, db) = equilibrate(gb);
    let fa = PivotedCholesky::new(&sa, rtol)?;
    let fb = PivotedCholesky::new(&sb, rtol)?;
    if fa.rank == 0 || fb.rank == 0 {
        return Err(Error::Degenerate(format!(
            "effective rank is zero (rank A = {}, rank B = {})",
            fa.rank, fb.rank
        )));
    }

    let ia = fa.retained();
    let ib = fb.retained();
    let cross = DMatrix::from_fn(ia.len(), ib.len(), |i, j| {
        let (p, q) = (ia[i], ib[j]);
        c[(p, q)] / (da[p] * db[q])
    });
    let la = fa.leading_block();
    let lb = fb.leading_block();
    // M = La^{-1} C Lb^{-T}
    let left = la
        .solve_lower_triangular(&cross)
        .ok_or_else(|| Error::Degenerate("singular whitening factor for A".into()))?;
    let whitened = lb
        .solve_lower_triangular(&left.transpose())
        .ok_or_else(|| Error::Degenerate("singular whitening factor for B".into()))?
        .transpose();

    let mut sigmas: Vec<f64> = whitened.singular_values().iter().copied().collect();
    sigmas.sort_by(|a, b| b.total_cmp(a));
    let raw_max = sigmas.first().copied().unwrap_or(0.0);
    for s in &mut sigmas {
        *s = s.clamp(0.0, 1.0);
    }
    Ok(CanonicalSpectrum {
        sigmas,
        rank_a: fa.rank,
        rank_b: fb.rank,
        dim_a: ga.nrows(),
        dim_b: gb.nrows(),
        cond: fa.condition_estimate().max(fb.condition_estimate()),
        raw_max,
    })
}

/// Cosine of the angle between the subspaces, i.e. `||P_B P_A||`.
pub fn cos_angle(spec: &CanonicalSpectrum) -> f64 {
    spec.sigmas.first().copied().unwrap_or(0.0)
}

pub fn mi_bounds_hs(spec: &CanonicalSpectrum) -> HsBounds {
    let h = spec.hs_squared();
    let m = cos_angle(spec);
    let lower = 0.5 * h;
    let upper = if m >= INFINITE_THRESHOLD {
        MiValue::Infinite
    } else {
        MiValue::Finite(0.5 * h * (1.0 + m / (2.0 * (1.0 - m))))
    };
    HsBounds { lower, upper }
}

/// Gelfand-Yaglom information `-1/2 sum log(1 - sigma_k^2)`.
pub fn mutual_information_gy(spec: &CanonicalSpectrum) -> MiResult {
    let bounds = mi_bounds_hs(spec);
    let value = if spec.sigmas.iter().any(|&s| s >= INFINITE_THRESHOLD) {
        MiValue::Infinite
    } else {
        MiValue::Finite(-0.5 * spec.sigmas.iter().map(|s| (-s * s).ln_1p()).sum::<f64>())
    };
    MiResult {
        value,
        lower: bounds.lower,
        upper: bounds.upper,
    }
}

/// `1/2 log(det GA det GB / det J)` for the joint covariance `J`.
pub fn mutual_information_det(ga: &DMatrix<f64>, gb: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<f64> {
    check_gram("GA", ga)?;
    check_gram("GB", gb)?;
    let (na, nb) = (ga.nrows(), gb.nrows());
    if c.nrows() != na || c.ncols() != nb {
        return Err(Error::DimensionMismatch(format!(
            "cross covariance is {}x{}, expected {}x{}",
            c.nrows(),
            c.ncols(),
            na,
            nb
        )));
    }
    let mut joint = DMatrix::zeros(na + nb, na + nb);
    joint.view_mut((0, 0), (na, na)).copy_from(ga);
    joint.view_mut((na, na), (nb, nb)).copy_from(gb);
    joint.view_mut((0, na), (na, nb)).copy_from(c);
    joint.view_mut((na, 0), (nb, na)).copy_from(&c.transpose());
    // unit diagonal; the scaling cancels between the three determinants
    let (joint, _) = equilibrate(&joint);
    let ld_joint =
        log_det_spd(&joint).map_err(|_| Error::Degenerate("joint covariance is not positive definite".into()))?;
    let ld_a = log_det_spd(&joint.view((0, 0), (na, na)).into_owned())?;
    let ld_b = log_det_spd(&joint.view((na, na), (nb, nb)).into_owned())?;
    Ok(0.5 * (ld_a + ld_b - ld_joint))
}

/// Gram data of two subspaces of one Gaussian space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePair {
    pub ga: DMatrix<f64>,
    pub gb: DMatrix<f64>,
    pub cross: DMatrix<f64>,
}

impl SubspacePair {
    pub fn spectrum(&self, rtol: f64) -> Result<CanonicalSpectrum> {
        canonical_correlations(&self.ga, &self.gb, &self.cross, rtol)
    }

    pub fn swapped(&self) -> Self {
        SubspacePair {
            ga: self.gb.clone(),
            gb: self.ga.clone(),
            cross: self.cross.transpose(),
        }
    }

    pub fn mutual_information_det(&self) -> Result<f64> {
        mutual_information_det(&self.ga, &self.gb, &self.cross)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m1(x: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, x)
    }

    #[test]
    fn identical_one_dimensional_subspaces() {
        let s = canonical_correlations(&m1(1.0), &m1(1.0), &m1(1.0), DEFAULT_RTOL).unwrap();
        assert_eq!(s.sigmas, vec![1.0]);
        assert!(mutual_information_gy(&s).value.is_infinite());
        assert!(mi_bounds_hs(&s).upper.is_infinite());
    }

    #[test]
    fn orthogonal_subspaces() {
        let ga = DMatrix::identity(3, 3);
        let gb = DMatrix::identity(2, 2) * 4.0;
        let s = canonical_correlations(&ga, &gb, &DMatrix::zeros(3, 2), DEFAULT_RTOL).unwrap();
        assert_eq!(s.sigmas, vec![0.0, 0.0]);
        assert_eq!(mutual_information_gy(&s).value, MiValue::Finite(0.0));
    }

    #[test]
    fn adjacent_unit_increments() {
        let rho = 2f64.sqrt() - 1.0;
        let s = canonical_correlations(&m1(1.0), &m1(1.0), &m1(rho), DEFAULT_RTOL).unwrap();
        assert_relative_eq!(s.sigmas[0], rho, epsilon = 1e-15);
        assert_relative_eq!(cos_angle(&s), rho, epsilon = 1e-15);
        // whitening in 1-D divides by standard deviations
        let s = canonical_correlations(&m1(4.0), &m1(9.0), &m1(6.0 * rho), DEFAULT_RTOL).unwrap();
        assert_relative_eq!(s.sigmas[0], rho, epsilon = 1e-15);
    }

    #[test]
    fn cos_angle_passthrough() {
        let s = CanonicalSpectrum::from_sigmas(vec![0.3, 1.0]).unwrap();
        assert_eq!(cos_angle(&s), 1.0);
        let e = CanonicalSpectrum::from_sigmas(vec![]).unwrap();
        assert_eq!(cos_angle(&e), 0.0);
        let p = CanonicalSpectrum::from_sigmas(vec![0.4142]).unwrap();
        assert_eq!(cos_angle(&p), 0.4142);
    }

    #[test]
    fn bivariate_information() {
        for rho in [0.0, 0.1, 0.5, 0.9, 0.999] {
            let s = CanonicalSpectrum::from_sigmas(vec![rho]).unwrap();
            let expect = -(1.0 - rho * rho).sqrt().ln();
            let gy = mutual_information_gy(&s).value.finite().unwrap();
            assert_relative_eq!(gy, expect, epsilon = 1e-14, max_relative = 1e-12);
            let det = mutual_information_det(&m1(1.0), &m1(1.0), &m1(rho)).unwrap();
            assert_relative_eq!(det, expect, epsilon = 1e-14, max_relative = 1e-10);
        }
    }

    #[test]
    fn determinant_route_zero_for_block_diagonal() {
        let ga = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let gb = m1(5.0);
        assert!(mutual_information_det(&ga, &gb, &DMatrix::zeros(2, 1)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn determinant_route_rejects_degenerate_joint() {
        assert!(matches!(
            mutual_information_det(&m1(1.0), &m1(1.0), &m1(1.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn hs_bounds_examples() {
        let zero = CanonicalSpectrum::from_sigmas(vec![0.0]).unwrap();
        let b = mi_bounds_hs(&zero);
        assert_eq!((b.lower, b.upper), (0.0, MiValue::Finite(0.0)));

        let s = CanonicalSpectrum::from_sigmas(vec![0.1]).unwrap();
        let r = mutual_information_gy(&s);
        assert_relative_eq!(r.lower, 0.005, epsilon = 1e-15);
        let up = r.upper.finite().unwrap();
        assert_relative_eq!(up, 0.005 * (1.0 + 0.1 / 1.8), epsilon = 1e-15);
        assert_relative_eq!(up, 0.0052778, epsilon = 1e-7);
        let v = r.value.finite().unwrap();
        assert_relative_eq!(v, 0.0050251, epsilon = 1e-7);
        assert!(r.lower <= v && v <= up);
    }

    #[test]
    fn degenerate_gram_is_reported() {
        let z = DMatrix::zeros(2, 2);
        let err = canonical_correlations(&z, &m1(1.0), &DMatrix::zeros(2, 1), DEFAULT_RTOL);
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn shape_and_rtol_validation() {
        let g = DMatrix::identity(2, 2);
        assert!(matches!(
            canonical_correlations(&g, &g, &DMatrix::zeros(3, 2), DEFAULT_RTOL),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(canonical_correlations(&g, &g, &DMatrix::zeros(2, 2), 0.0).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.1, 1.0]);
        assert!(canonical_correlations(&asym, &g, &DMatrix::zeros(2, 2), DEFAULT_RTOL).is_err());
    }

    #[test]
    fn rank_truncation_is_reported() {
        // second basis vector duplicates the first
        let ga = DMatrix::from_element(2, 2, 1.0);
        let gb = m1(1.0);
        let c = DMatrix::from_element(2, 1, 0.5);
        let s = canonical_correlations(&ga, &gb, &c, DEFAULT_RTOL).unwrap();
        assert_eq!((s.rank_a, s.dim_a), (1, 2));
        assert!(s.truncated());
        assert_relative_eq!(s.sigmas[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn inflated_correlation_flags_ill_conditioning() {
        // inconsistent data: |C| exceeds the geometric mean of the variances
        let s = canonical_correlations(&m1(1.0), &m1(1.0), &m1(1.1), DEFAULT_RTOL).unwrap();
        assert_eq!(s.sigmas, vec![1.0]);
        assert!(s.ill_conditioned());
    }

    #[test]
    fn mi_value_serialization() {
        assert_eq!(serde_json::to_string(&MiValue::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&MiValue::Finite(0.5)).unwrap(), "0.5");
        let back: MiValue = serde_json::from_str("\"inf\"").unwrap();
        assert!(back.is_infinite());
        assert!(serde_json::from_str::<MiValue>("\"nan\"").is_err());
    }
}
