//! Covariance kernels of fractional Brownian motion and Gram assembly.
//!
//! Every covariance here is a function of time *differences* only, so the
//! assembled matrices are exactly invariant under a common translation of
//! all times (up to the rounding of the differences themselves).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance kept from the endpoints 0 and 1 when validating a Hurst index.
pub const HURST_GUARD: f64 = 1e-9;

/// Hurst index of the process, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Hurst(f64);

impl Hurst {
    pub fn new(value: f64) -> Result<Self> {
        if !(HURST_GUARD..=1.0 - HURST_GUARD).contains(&value) {
            return Err(Error::invalid(
                "H",
                format!("Hurst index must lie in ({HURST_GUARD:e}, 1 - {HURST_GUARD:e}), got {value}"),
            ));
        }
        Ok(Hurst(value))
    }

    /// Brownian motion.
    pub fn brownian() -> Self {
        Hurst(0.5)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn two_h(self) -> f64 {
        2.0 * self.0
    }

    /// |2H - 1|, the distance from the Brownian case in the units that
    /// appear in the disjoint-support kernel.
    pub fn brownian_offset(self) -> f64 {
        (2.0 * self.0 - 1.0).abs()
    }
}

impl TryFrom<f64> for Hurst {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Hurst::new(v)
    }
}

impl From<Hurst> for f64 {
    fn from(h: Hurst) -> f64 {
        h.0
    }
}

/// |x|^{2H}, with the origin handled explicitly.
#[inline]
pub fn abs_pow(x: f64, exponent: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (exponent * x.abs().ln()).exp()
    }
}

/// g(x + a) - g(x) for g = |.|^p, computed without cancellation when x and
/// x + a lie strictly on the same side of the origin.
#[inline]
fn power_difference(x: f64, a: f64, p: f64) -> f64 {
    let y = x + a;
    if x != 0.0 && y != 0.0 && (x > 0.0) == (y > 0.0) {
        abs_pow(x, p) * (p * (a / x).ln_1p()).exp_m1()
    } else {
        abs_pow(y, p) - abs_pow(x, p)
    }
}

/// E[X_u X_v] = (|u|^{2H} + |v|^{2H} - |u - v|^{2H}) / 2.
pub fn fbm_cov(u: f64, v: f64, h: Hurst) -> f64 {
    let p = h.two_h();
    0.5 * (abs_pow(u, p) + abs_pow(v, p) - abs_pow(u - v, p))
}

/// Kernel H(2H-1)|u - v|^{2H-2} of the covariance between increments on
/// disjoint supports.
pub fn disjoint_kernel(u: f64, v: f64, h: Hurst) -> Result<f64> {
    if u == v {
        return Err(Error::invalid(
            "u, v",
            "disjoint kernel is singular on the diagonal u = v",
        ));
    }
    let hv = h.value();
    Ok(hv * (2.0 * hv - 1.0) * abs_pow(u - v, 2.0 * hv - 2.0))
}

/// One increment X_t - X_s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimePair {
    pub s: f64,
    pub t: f64,
}

impl TimePair {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s.is_finite() && t.is_finite()) {
            return Err(Error::invalid("pair", "times must be finite"));
        }
        if s == t {
            return Err(Error::invalid("pair", format!("degenerate increment s = t = {s}")));
        }
        Ok(TimePair { s, t })
    }

    pub fn len(&self) -> f64 {
        self.t - self.s
    }

    pub fn lo(&self) -> f64 {
        self.s.min(self.t)
    }

    pub fn hi(&self) -> f64 {
        self.s.max(self.t)
    }
}

/// E[(X_{p.t} - X_{p.s})(X_{q.t} - X_{q.s})].
///
/// Evaluated as half a second difference of |.|^{2H}, so that increments far
/// apart relative to their lengths keep full relative accuracy.
pub fn increment_cov(p: &TimePair, q: &TimePair, h: Hurst) -> f64 {
    let e = h.two_h();
    let d = p.s - q.s;
    let a = p.t - p.s;
    let b = q.t - q.s;
    0.5 * (power_difference(d, a, e) - power_difference(d - b, a, e))
}

/// Uniform grid t_i = a + i (b - a) / (n - 1), i = 0..n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    a: f64,
    b: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::invalid("grid", format!("need finite a < b, got ({a}, {b})")));
        }
        if n < 2 {
            return Err(Error::invalid("n", format!("grid needs at least 2 points, got {n}")));
        }
        Ok(TimeGrid { a, b, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.b - self.a;
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.b
                } else {
                    self.a + span * (i as f64 / last)
                }
            })
            .collect()
    }
}

/// Which endpoint of an interval a graded grid concentrates its points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradeToward {
    Start,
    End,
}

/// Ordered list of increments spanning a finite-dimensional subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementBasis {
    pairs: Vec<TimePair>,
}

impl IncrementBasis {
    pub fn new(pairs: Vec<TimePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("basis", "increment basis must be nonempty"));
        }
        if let Some(p) = pairs.iter().find(|p| p.s == p.t) {
            return Err(Error::invalid("basis", format!("degenerate increment at {}", p.s)));
        }
        Ok(IncrementBasis { pairs })
    }

    fn from_points(points: &[f64]) -> Self {
        let pairs = points.windows(2).map(|w| TimePair { s: w[0], t: w[1] }).collect();
        IncrementBasis { pairs }
    }

    /// Consecutive increments (t_i, t_{i+1}) of a uniform grid.
    pub fn consecutive(grid: &TimeGrid) -> Self {
        Self::from_points(&grid.points())
    }

    /// Consecutive increments of a grid on (a, b) whose spacing shrinks
    /// geometrically toward one endpoint, from b - a down to `h_min`.
    pub fn graded(a: f64, b: f64, n: usize, toward: GradeToward, h_min: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::invalid("grid", format!("need finite a < b, got ({a}, {b})")));
        }
        if n < 3 {
            return Err(Error::invalid(
                "n",
                format!("graded grid needs at least 3 points, got {n}"),
            ));
        }
        let span = b - a;
        if !(h_min > 0.0 && h_min < span) {
            return Err(Error::invalid(
                "h_min",
                format!("grading floor must lie in (0, {span}), got {h_min}"),
            ));
        }
        let ratio = (h_min / span).powf(1.0 / (n - 2) as f64);
        // offsets from the graded endpoint: span, span*q, ..., h_min
        let offsets: Vec<f64> = (0..n - 1).map(|j| span * ratio.powi(j as i32)).collect();
        let points: Vec<f64> = match toward {
            GradeToward::End => {
                let mut p: Vec<f64> = offsets.iter().map(|o| b - o).collect();
                p[0] = a;
                p.push(b);
                p
            }
            GradeToward::Start => {
                let mut p = vec![a];
                p.extend(offsets.iter().rev().map(|o| a + o));
                *p.last_mut().unwrap() = b;
                p
            }
        };
        Ok(Self::from_points(&points))
    }

    /// Concatenation of two bases; spans the sum of the two subspaces.
    pub fn union(&self, other: &IncrementBasis) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        IncrementBasis { pairs }
    }

    pub fn pairs(&self) -> &[TimePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Smallest and largest time touched by the basis.
    pub fn support(&self) -> (f64, f64) {
        self.pairs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.lo()), hi.max(p.hi()))
            })
    }
}

pub fn gram(basis: &IncrementBasis, h: Hurst) -> DMatrix<f64> {
    let n = basis.len();
    let pairs = basis.pairs();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = increment_cov(&pairs[i], &pairs[j], h);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

pub fn cross_gram(a: &IncrementBasis, b: &IncrementBasis, h: Hurst) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| increment_cov(&a.pairs()[i], &b.pairs()[j], h))
}

/// Point of R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point", "dimension must be at least 1"));
        }
        Ok(Point(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

fn check_dims(u: &Point, v: &Point) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "points of dimension {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    Ok(())
}

/// Covariance of Lévy fractional Brownian motion on R^n.
pub fn levy_fbm_cov(u: &Point, v: &Point, h: Hurst) -> Result<f64> {
    check_dims(u, v)?;
    let p = h.two_h();
    Ok(0.5 * (abs_pow(u.norm(), p) + abs_pow(v.norm(), p) - abs_pow(u.distance(v), p)))
}

/// Increment X_to - X_from of a multiparameter process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointIncrement {
    pub from: Point,
    pub to: Point,
}

/// Increment basis of Lévy FBM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyBasis {
    increments: Vec<PointIncrement>,
    dim: usize,
}

impl LevyBasis {
    pub fn new(increments: Vec<PointIncrement>) -> Result<Self> {
        let first = increments
            .first()
            .ok_or_else(|| Error::invalid("basis", "increment basis must be nonempty"))?;
        let dim = first.from.dim();
        for inc in &increments {
            check_dims(&inc.from, &first.from)?;
            check_dims(&inc.to, &first.from)?;
            if inc.from == inc.to {
                return Err(Error::invalid("basis", "degenerate increment with equal endpoints"));
            }
        }
        Ok(LevyBasis { increments, dim })
    }

    /// Differences X_p - X_center for the points p != center of a square
    /// lattice with `per_axis` points per axis spanning the bounding box of
    /// the closed ball of radius `radius`, restricted to the ball.
    pub fn ball_star(center: &Point, radius: f64, per_axis: usize) -> Result<Self> {
        if center.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "ball lattice is two-dimensional, center has dimension {}",
                center.dim()
            )));
        }
        if !(radius > 0.0) || per_axis < 2 {
            return Err(Error::invalid(
                "lattice",
                "need radius > 0 and at least 2 points per axis",
            ));
        }
        let step = 2.0 / (per_axis - 1) as f64;
        let (cx, cy) = (center.0[0], center.0[1]);
        let mut increments = Vec::new();
        for i in 0..per_axis {
            for j in 0..per_axis {
                // lattice offsets in units of the radius
                let ox = -1.0 + step * i as f64;
                let oy = -1.0 + step * j as f64;
                let r2 = ox * ox + oy * oy;
                if !(1e-24..=1.0 + 1e-12).contains(&r2) {
                    continue;
                }
                increments.push(PointIncrement {
                    from: center.clone(),
                    to: Point(vec![cx + radius * ox, cy + radius * oy]),
                });
            }
        }
        if increments.len() < 8 {
            return Err(Error::invalid(
                "grid-per-axis",
                format!("lattice too coarse: only {} points fall in the ball", increments.len()),
            ));
        }
        LevyBasis::new(increments)
    }

    pub fn increments(&self) -> &[PointIncrement] {
        &self.increments
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Covariance of two Lévy increments, written through distances only.
fn levy_increment_cov(p: &PointIncrement, q: &PointIncrement, e: f64) -> f64 {
    let d = |x: &Point, y: &Point| abs_pow(x.distance(y), e);
    -0.5 * (d(&p.to, &q.to) - d(&p.to, &q.from) - d(&p.from, &q.to) + d(&p.from, &q.from))
}

pub fn levy_gram(basis: &LevyBasis, h: Hurst) -> DMatrix<f64> {
    let n = basis.len();
    let inc = basis.increments();
    let e = h.two_h();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = levy_increment_cov(&inc[i], &inc[j], e);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

pub fn levy_cross_gram(a: &LevyBasis, b: &LevyBasis, h: Hurst) -> Result<DMatrix<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "bases of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let e = h.two_h();
    Ok(DMatrix::from_fn(a.len(), b.len(), |i, j| {
        levy_increment_cov(&a.increments()[i], &b.increments()[j], e)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(v: f64) -> Hurst {
        Hurst::new(v).unwrap()
    }

    fn pair(s: f64, t: f64) -> TimePair {
        TimePair::new(s, t).unwrap()
    }

    #[test]
    fn hurst_rejects_endpoints() {
        assert!(Hurst::new(0.0).is_err());
        assert!(Hurst::new(1.0).is_err());
        assert!(Hurst::new(1.0 - 1e-10).is_err());
        assert!(Hurst::new(f64::NAN).is_err());
        assert!(Hurst::new(1e-8).is_ok());
    }

    #[test]
    fn fbm_cov_examples() {
        for hv in [0.1, 0.5, 0.9] {
            assert_relative_eq!(fbm_cov(1.0, 1.0, h(hv)), 1.0, epsilon = 1e-15);
        }
        assert_relative_eq!(fbm_cov(2.0, 3.0, h(0.5)), 2.0, epsilon = 1e-14);
        assert_relative_eq!(fbm_cov(1.0, -1.0, h(0.75)), 1.0 - 2f64.sqrt(), epsilon = 1e-14);
        assert_eq!(fbm_cov(0.0, 0.0, h(0.3)), 0.0);
    }

    #[test]
    fn increment_cov_examples() {
        let unit = pair(0.0, 1.0);
        for hv in [0.2, 0.5, 0.8] {
            assert_relative_eq!(increment_cov(&unit, &unit, h(hv)), 1.0, epsilon = 1e-14);
        }
        let next = pair(1.0, 2.0);
        assert!(increment_cov(&unit, &next, h(0.5)).abs() < 1e-15);
        assert_relative_eq!(increment_cov(&unit, &next, h(0.75)), 2f64.sqrt() - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn increment_cov_matches_four_term_formula() {
        let hv = h(0.37);
        let naive = |p: &TimePair, q: &TimePair| {
            let g = |x: f64| x.abs().powf(hv.two_h());
            0.5 * (g(p.t - q.s) + g(q.t - p.s) - g(p.t - q.t) - g(p.s - q.s))
        };
        let cases = [
            (pair(0.0, 1.0), pair(0.5, 2.0)),
            (pair(-1.0, 0.3), pair(0.3, -0.2)),
            (pair(2.0, 1.0), pair(-4.0, -3.5)),
            (pair(0.0, 1.0), pair(0.0, 1.0)),
        ];
        for (p, q) in cases {
            assert_relative_eq!(increment_cov(&p, &q, hv), naive(&p, &q), epsilon = 1e-13);
        }
    }

    #[test]
    fn disjoint_kernel_examples() {
        assert_eq!(disjoint_kernel(0.0, 1.0, h(0.5)).unwrap(), 0.0);
        assert_relative_eq!(
            disjoint_kernel(0.0, 2.0, h(0.75)).unwrap(),
            0.375 / 2f64.sqrt(),
            epsilon = 1e-14
        );
        assert_relative_eq!(disjoint_kernel(0.0, 1.0, h(0.25)).unwrap(), -0.125, epsilon = 1e-15);
        assert!(disjoint_kernel(1.0, 1.0, h(0.3)).is_err());
    }

    #[test]
    fn gram_examples() {
        let b = IncrementBasis::consecutive(&TimeGrid::new(0.0, 1.0, 3).unwrap());
        let g = gram(&b, h(0.5));
        assert_relative_eq!(g, DMatrix::identity(2, 2) * 0.5, epsilon = 1e-15);

        let g = gram(&b, h(0.75));
        assert_relative_eq!(g[(0, 0)], 2f64.powf(-1.5), epsilon = 1e-14);
        assert_relative_eq!(g[(0, 1)], 0.5 * (1.0 - 2.0 * 2f64.powf(-1.5)), epsilon = 1e-14);
        assert_eq!(g[(0, 1)], g[(1, 0)]);

        let single = IncrementBasis::new(vec![pair(0.0, 1.0)]).unwrap();
        assert_relative_eq!(gram(&single, h(0.3))[(0, 0)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cross_gram_examples() {
        let a = IncrementBasis::consecutive(&TimeGrid::new(0.0, 1.0, 5).unwrap());
        let b = IncrementBasis::consecutive(&TimeGrid::new(2.0, 3.0, 4).unwrap());
        let c = cross_gram(&a, &b, h(0.5));
        assert!(c.iter().all(|x| x.abs() < 1e-15));
        let (self_cross, self_gram) = (cross_gram(&a, &a, h(0.7)), gram(&a, h(0.7)));
        for (x, y) in self_cross.iter().zip(self_gram.iter()) {
            assert_relative_eq!(x, y, max_relative = 1e-14);
        }
        let one = IncrementBasis::new(vec![pair(0.0, 1.0)]).unwrap();
        let two = IncrementBasis::new(vec![pair(1.0, 2.0)]).unwrap();
        assert_relative_eq!(
            cross_gram(&one, &two, h(0.75))[(0, 0)],
            2f64.sqrt() - 1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn basis_validation() {
        assert!(IncrementBasis::new(vec![]).is_err());
        assert!(TimePair::new(1.0, 1.0).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_points_and_consecutive_basis() {
        let g = TimeGrid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let b = IncrementBasis::consecutive(&g);
        assert_eq!(b.len(), 4);
        assert_eq!(b.pairs()[3], TimePair { s: 0.5, t: 1.0 });
    }

    #[test]
    fn graded_grid_shapes() {
        let b = IncrementBasis::graded(-8.0, 0.0, 10, GradeToward::End, 1e-3).unwrap();
        assert_eq!(b.len(), 9);
        let p = b.pairs();
        assert_eq!(p[0].s, -8.0);
        assert_eq!(p[8].t, 0.0);
        assert_relative_eq!(p[8].len(), 1e-3, epsilon = 1e-12);
        assert!(p.windows(2).all(|w| w[1].len() < w[0].len()));

        let b = IncrementBasis::graded(2.0, 10.0, 6, GradeToward::Start, 1e-2).unwrap();
        let p = b.pairs();
        assert_eq!(p[0].s, 2.0);
        assert_relative_eq!(p[0].len(), 1e-2, epsilon = 1e-12);
        assert_eq!(p[4].t, 10.0);
        assert!(p.windows(2).all(|w| w[1].len() > w[0].len()));
        assert!(IncrementBasis::graded(0.0, 1.0, 5, GradeToward::End, 2.0).is_err());
    }

    #[test]
    fn levy_examples() {
        let e1 = Point::new(vec![1.0, 0.0]).unwrap();
        let e2 = Point::new(vec![0.0, 1.0]).unwrap();
        let o = Point::new(vec![0.0, 0.0]).unwrap();
        assert_relative_eq!(levy_fbm_cov(&e1, &e1, h(0.3)).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            levy_fbm_cov(&e1, &e2, h(0.5)).unwrap(),
            0.5 * (2.0 - 2f64.sqrt()),
            epsilon = 1e-15
        );
        assert_eq!(levy_fbm_cov(&o, &e2, h(0.8)).unwrap(), 0.0);
        let bad = Point::new(vec![1.0]).unwrap();
        assert!(matches!(
            levy_fbm_cov(&e1, &bad, h(0.5)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn levy_reduces_to_fbm_in_one_dimension() {
        for (u, v) in [(0.3, -1.2), (2.0, 5.0), (-0.7, -0.1)] {
            let pu = Point::new(vec![u]).unwrap();
            let pv = Point::new(vec![v]).unwrap();
            assert_relative_eq!(
                levy_fbm_cov(&pu, &pv, h(0.65)).unwrap(),
                fbm_cov(u, v, h(0.65)),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn ball_star_lattice() {
        let c = Point::new(vec![0.5, -0.5]).unwrap();
        let b = LevyBasis::ball_star(&c, 0.1, 9).unwrap();
        // offsets (i, j) in {-4..4}^2 with i^2 + j^2 <= 16, minus the center
        let expected = (-4i32..=4)
            .flat_map(|i| (-4i32..=4).map(move |j| i * i + j * j))
            .filter(|&r| r <= 16 && r > 0)
            .count();
        assert_eq!(b.len(), expected);
        assert!(b.increments().iter().all(|inc| inc.to.distance(&c) <= 0.1 + 1e-12));
        assert!(LevyBasis::ball_star(&c, 0.1, 3).is_err());
    }

    #[test]
    fn levy_increment_gram_matches_point_kernel() {
        let hv = h(0.6);
        let c = Point::new(vec![0.0, 0.0]).unwrap();
        let b = LevyBasis::ball_star(&c, 1.0, 5).unwrap();
        let g = levy_gram(&b, hv);
        let inc = b.increments();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let k = |x: &Point, y: &Point| levy_fbm_cov(x, y, hv).unwrap();
                let direct = k(&inc[i].to, &inc[j].to) - k(&inc[i].to, &inc[j].from) - k(&inc[i].from, &inc[j].to)
                    + k(&inc[i].from, &inc[j].from);
                assert_relative_eq!(g[(i, j)], direct, epsilon = 1e-13);
            }
        }
    }
}
