//! Homogeneous fractional Sobolev inner products computed in frequency,
//! explicit constants, and the covariance-pairing identity.
//!
//! Fourier convention: f^(xi) = (2 pi)^{-1/2} \int e^{-i x xi} f(x) dx, so
//! that s = 0 reproduces the L^2 inner product.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::ExponentFit;
use crate::kernels::{abs_pow, gram, GradeToward, Hurst, IncrementBasis};
use crate::linalg::inverse_quadratic_form;
use crate::quadrature::{integrate, integrate_vec, Tolerance};
use crate::special::gamma;

pub const SMOOTHNESS_GUARD: f64 = 1e-9;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SmoothnessIndex(f64);

impl SmoothnessIndex {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s.abs() > 0.5 - SMOOTHNESS_GUARD {
            return Err(Error::invalid(
                "s",
                format!("smoothness index must satisfy |s| < 1/2, got {s}"),
            ));
        }
        Ok(SmoothnessIndex(s))
    }

    /// The index 1/2 - H paired with fBm of Hurst index H.
    pub fn dual_of(h: Hurst) -> Self {
        SmoothnessIndex(0.5 - h.value())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SmoothnessIndex {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        SmoothnessIndex::new(v)
    }
}

impl From<SmoothnessIndex> for f64 {
    fn from(s: SmoothnessIndex) -> f64 {
        s.0
    }
}

/// sin(z)/z.
#[inline]
fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sin() / z
    }
}

/// d/dz sin(z)/z.
#[inline]
fn sinc_prime(z: f64) -> f64 {
    if z.abs() < 0.5 {
        // sum_k (-1)^k 2k z^{2k-1} / (2k+1)!
        let z2 = z * z;
        let mut term = -z / 3.0;
        let mut acc = term;
        for k in 2..12 {
            let kf = k as f64;
            term *= -z2 * kf / ((kf - 1.0) * (2.0 * kf) * (2.0 * kf + 1.0));
            acc += term;
        }
        acc
    } else {
        (z * z.cos() - z.sin()) / (z * z)
    }
}

/// Continuous piecewise-linear function with compact support, given by its
/// values at strictly increasing nodes; it vanishes at the first and last
/// node and outside them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.len() < 3 {
            return Err(Error::invalid("nodes", "a test function needs at least 3 nodes"));
        }
        if nodes.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::invalid("nodes", "nodes and values must be finite"));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("nodes", "nodes must be strictly increasing"));
        }
        if values[0] != 0.0 || *values.last().unwrap() != 0.0 {
            return Err(Error::invalid(
                "values",
                "test function must vanish at both ends of its support",
            ));
        }
        Ok(TestFunction { nodes, values })
    }

    /// Tent rising linearly from 0 at `left` to 1 at `peak` and back to 0 at `right`.
    pub fn hat(left: f64, peak: f64, right: f64) -> Result<Self> {
        Self::new(vec![left, peak, right], vec![0.0, 1.0, 0.0])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if !(x > a && x < b) {
            return 0.0;
        }
        let j = self.nodes.partition_point(|&n| n <= x);
        let (x0, x1) = (self.nodes[j - 1], self.nodes[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// x -> phi(k x).
    pub fn dilate(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(
                "k",
                format!("dilation factor must be positive, got {k}"),
            ));
        }
        Ok(TestFunction {
            nodes: self.nodes.iter().map(|x| x / k).collect(),
            values: self.values.clone(),
        })
    }

    /// x -> phi(x - c).
    pub fn translate(&self, c: f64) -> Self {
        TestFunction {
            nodes: self.nodes.iter().map(|x| x + c).collect(),
            values: self.values.clone(),
        }
    }

    /// a phi + b psi, on the union of both node sets.
    pub fn combine(a: f64, phi: &TestFunction, b: f64, psi: &TestFunction) -> Self {
        let nodes = merged_nodes(phi, psi);
        let values = nodes.iter().map(|&x| a * phi.eval(x) + b * psi.eval(x)).collect();
        TestFunction { nodes, values }
    }

    /// Derivative on each cell.
    pub fn slopes(&self) -> Vec<f64> {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn integral(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }

    pub fn l1_norm(&self) -> f64 {
        let mut acc = 0.0;
        for (x, v) in self.nodes.windows(2).zip(self.values.windows(2)) {
            let h = x[1] - x[0];
            if v[0] * v[1] >= 0.0 {
                acc += 0.5 * h * (v[0].abs() + v[1].abs());
            } else {
                // sign change inside the cell
                acc += 0.5 * h * (v[0] * v[0] + v[1] * v[1]) / (v[0].abs() + v[1].abs());
            }
        }
        acc
    }

    /// Exact L^2 inner product.
    pub fn l2_inner(&self, other: &TestFunction) -> f64 {
        let nodes = merged_nodes(self, other);
        nodes
            .windows(2)
            .map(|w| {
                let (f0, f1) = (self.eval(w[0]), self.eval(w[1]));
                let (g0, g1) = (other.eval(w[0]), other.eval(w[1]));
                (w[1] - w[0]) / 6.0 * (2.0 * f0 * g0 + f0 * g1 + f1 * g0 + 2.0 * f1 * g1)
            })
            .sum()
    }

    pub fn fourier(&self, xi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, v) in self.nodes.windows(2).zip(self.values.windows(2)) {
            let h = x[1] - x[0];
            let mid = 0.5 * (x[0] + x[1]);
            let alpha = 0.5 * (v[0] + v[1]);
            let beta = (v[1] - v[0]) / h;
            let z = 0.5 * xi * h;
            let cell = Complex64::new(alpha * h * sinc(z), beta * 0.5 * h * h * sinc_prime(z));
            let (s, c) = (mid * xi).sin_cos();
            acc += Complex64::new(c, -s) * cell;
        }
        acc * INV_SQRT_2PI
    }

    /// Sum of the absolute slope jumps, including the jumps at the ends of
    /// the support; |f^(xi)| <= (2 pi)^{-1/2} jump_mass / xi^2.
    pub fn jump_mass(&self) -> f64 {
        let slopes = self.slopes();
        let mut acc = slopes[0].abs() + slopes.last().unwrap().abs();
        for w in slopes.windows(2) {
            acc += (w[1] - w[0]).abs();
        }
        acc
    }

    pub fn min_cell(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

fn merged_nodes(a: &TestFunction, b: &TestFunction) -> Vec<f64> {
    let mut nodes: Vec<f64> = a.nodes.iter().chain(&b.nodes).copied().collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

#[derive(Debug, Clone, Copy)]
pub struct SobolevOptions {
    /// Largest admissible ratio of the analytic tail bound to the head.
    pub tail_rtol: f64,
    /// Frequency beyond which the cutoff may not be pushed.
    pub max_cutoff: f64,
    pub rel: f64,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        SobolevOptions {
            tail_rtol: 1e-8,
            max_cutoff: 1e8,
            rel: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevEstimate {
    pub value: f64,
    /// \int |f^| |g^| |xi|^{2s} over |xi| < cutoff.
    pub head: f64,
    pub tail_bound: f64,
    pub cutoff: f64,
    pub panels: usize,
}

const MAX_PANELS: usize = 20_000_000;

/// \int f^(xi) conj(g^(xi)) |xi|^{2s} d xi.
pub fn sobolev_inner(phi: &TestFunction, psi: &TestFunction, s: SmoothnessIndex) -> Result<f64> {
    sobolev_inner_with(phi, psi, s, &SobolevOptions::default()).map(|e| e.value)
}

pub fn sobolev_norm_sq(phi: &TestFunction, s: SmoothnessIndex) -> Result<f64> {
    sobolev_inner(phi, phi, s)
}

pub fn sobolev_inner_with(
    phi: &TestFunction,
    psi: &TestFunction,
    s: SmoothnessIndex,
    opts: &SobolevOptions,
) -> Result<SobolevEstimate> {
    let (values, mut est) = translate_family(phi, psi, 0.0, 1, s, opts)?;
    est.value = values[0];
    Ok(est)
}

/// Inner products of phi with the translates psi(. - l * step) for
/// l = 0..count, integrated in a single frequency sweep. The returned
/// estimate carries the diagnostics shared by all entries.
fn translate_family(
    phi: &TestFunction,
    psi: &TestFunction,
    step: f64,
    count: usize,
    s: SmoothnessIndex,
    opts: &SobolevOptions,
) -> Result<(Vec<f64>, SobolevEstimate)> {
    let s = s.value();
    let two_s = 2.0 * s;
    let dim = count + 1;
    // out[0] = |f^| |g^|, out[1 + l] = Re f^ conj(g_l^)
    let g = |xi: f64, weight: f64, out: &mut [f64]| {
        let a = phi.fourier(xi);
        let b = psi.fourier(xi);
        let p = a * b.conj();
        out[0] = weight * a.norm() * b.norm();
        let rot = Complex64::from_polar(1.0, step * xi);
        let mut z = p * weight;
        for slot in out[1..].iter_mut() {
            *slot = z.re;
            z *= rot;
        }
    };
    let scale = phi.l1_norm() * psi.l1_norm() / (2.0 * PI);
    let tiny = 1e-16 * scale.max(f64::MIN_POSITIVE);

    let low_tol = Tolerance {
        abs: tiny,
        rel: opts.rel,
        max_intervals: 2000,
    };
    let low = if s < 0.0 {
        let p = 1.0 / (1.0 + two_s);
        integrate_vec(
            |eta: f64, out: &mut [f64]| g(eta.powf(p), p, out),
            dim,
            0.0,
            1.0,
            low_tol,
        )?
    } else {
        integrate_vec(
            |xi: f64, out: &mut [f64]| g(xi, abs_pow(xi, two_s), out),
            dim,
            0.0,
            1.0,
            low_tol,
        )?
    };

    let (pa, pb) = phi.support();
    let (qa, qb) = psi.support();
    let reach = step.abs() * count.saturating_sub(1) as f64;
    let spread = (pb - qa + reach).max(qb + reach - pa).max(pb - pa).max(qb - qa);
    let width = PI / spread;
    let amp = INV_SQRT_2PI * INV_SQRT_2PI * phi.jump_mass() * psi.jump_mass();
    let tail_decay = 3.0 - two_s;
    let tail_bound = |cut: f64| 2.0 * amp * cut.powf(-tail_decay) / tail_decay;

    let panel_tol = Tolerance {
        abs: tiny,
        rel: opts.rel,
        max_intervals: 200,
    };
    let mut acc = low.value;
    let mut cut = 1.0;
    let mut target = (64.0 / phi.min_cell().min(psi.min_cell()))
        .max(16.0)
        .min(opts.max_cutoff);
    let mut panels = 0usize;
    loop {
        while cut < target {
            let next = (cut + width).min(target);
            let e = integrate_vec(
                |xi: f64, out: &mut [f64]| g(xi, xi.powf(two_s), out),
                dim,
                cut,
                next,
                panel_tol,
            )?;
            for (a, v) in acc.iter_mut().zip(&e.value) {
                *a += v;
            }
            cut = next;
            panels += 1;
            if panels > MAX_PANELS {
                return Err(Error::Quadrature(format!(
                    "frequency integral needs more than {MAX_PANELS} panels"
                )));
            }
        }
        let head = 2.0 * acc[0];
        let bound = tail_bound(cut);
        let limit = opts.tail_rtol * head;
        if bound <= limit {
            let values = acc[1..].iter().map(|v| 2.0 * v).collect();
            return Ok((
                values,
                SobolevEstimate {
                    value: f64::NAN,
                    head,
                    tail_bound: bound,
                    cutoff: cut,
                    panels,
                },
            ));
        }
        let needed = (2.0 * amp / (tail_decay * limit)).powf(1.0 / tail_decay);
        if cut >= opts.max_cutoff || !needed.is_finite() {
            return Err(Error::TailNotConverged {
                bound,
                limit,
                cutoff: cut,
            });
        }
        target = (needed * 1.01).max(cut * 1.05).min(opts.max_cutoff);
    }
}

/// sin(pi H) Gamma(1 + 2H).
pub fn a_h_constant(h: Hurst) -> f64 {
    (PI * h.value()).sin() * gamma(1.0 + h.two_h())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingCheck {
    pub time_domain: f64,
    pub spectral: f64,
    pub discrepancy: f64,
}

/// \int\int R_H(u, v) phi1'(u) phi2'(v) du dv, integrated exactly cell by
/// cell since both derivatives are piecewise constant.
pub fn pairing_time_domain(phi1: &TestFunction, phi2: &TestFunction, h: Hurst) -> f64 {
    let p = h.two_h();
    // antiderivatives of |x|^p: once (odd) and twice (even)
    let f1 = |x: f64| x.signum() * abs_pow(x, p + 1.0) / (p + 1.0);
    let f2 = |x: f64| abs_pow(x, p + 2.0) / ((p + 1.0) * (p + 2.0));
    let s1 = phi1.slopes();
    let s2 = phi2.slopes();
    let mut acc = 0.0;
    for (i, w1) in phi1.nodes.windows(2).enumerate() {
        let (a, b) = (w1[0], w1[1]);
        for (j, w2) in phi2.nodes.windows(2).enumerate() {
            let (c, d) = (w2[0], w2[1]);
            let single = (d - c) * (f1(b) - f1(a)) + (b - a) * (f1(d) - f1(c));
            let cross = f2(b - c) - f2(a - c) - f2(b - d) + f2(a - d);
            acc += s1[i] * s2[j] * 0.5 * (single - cross);
        }
    }
    acc
}

/// Compares the covariance pairing with a_H times the W^{1/2-H} inner product.
pub fn pairing_identity_check(phi1: &TestFunction, phi2: &TestFunction, h: Hurst) -> Result<PairingCheck> {
    let time_domain = pairing_time_domain(phi1, phi2, h);
    let spectral = a_h_constant(h) * sobolev_inner(phi1, phi2, SmoothnessIndex::dual_of(h))?;
    let discrepancy = (time_domain - spectral).abs() / spectral.abs().max(f64::EPSILON);
    Ok(PairingCheck {
        time_domain,
        spectral,
        discrepancy,
    })
}

/// Fixed set of ten test-function pairs: disjoint, touching, overlapping,
/// identical, sign-changing and widely separated.
pub fn pairing_suite() -> Vec<(TestFunction, TestFunction)> {
    let hat = |a, p, b| TestFunction::hat(a, p, b).expect("valid hat");
    let pl = |n: &[f64], v: &[f64]| TestFunction::new(n.to_vec(), v.to_vec()).expect("valid function");
    vec![
        (hat(0.0, 0.5, 1.0), hat(2.0, 2.5, 3.0)),
        (hat(0.0, 0.5, 1.0), hat(0.0, 0.5, 1.0)),
        (hat(0.0, 0.5, 1.0), hat(0.5, 1.0, 1.5)),
        (hat(0.0, 0.2, 1.0), hat(0.3, 0.9, 1.2)),
        (
            pl(&[0.0, 0.25, 0.5, 0.75, 1.0], &[0.0, 1.0, 0.0, -0.5, 0.0]),
            hat(0.0, 0.5, 1.0),
        ),
        (hat(-1.0, 0.0, 1.0), hat(0.1, 0.2, 0.3)),
        (pl(&[0.0, 0.2, 0.8, 1.0], &[0.0, 1.0, 1.0, 0.0]), hat(1.5, 2.0, 2.5)),
        (hat(0.0, 0.5, 1.0), hat(1.0, 1.5, 2.0)),
        (
            pl(&[0.0, 0.1, 0.35, 0.6, 0.8, 1.0], &[0.0, 0.7, -0.4, 1.2, 0.3, 0.0]),
            pl(&[0.5, 0.9, 1.4, 2.0], &[0.0, -1.0, 0.5, 0.0]),
        ),
        (hat(-2.0, -1.5, -1.0), hat(1.0, 1.5, 2.0)),
    ]
}

/// |chi_(0,1)^(xi)|^2 = (1 - cos xi) / (pi xi^2).
pub fn indicator_power_spectrum(xi: f64) -> f64 {
    if xi.abs() < 1e-4 {
        // 1 - cos x = x^2/2 - x^4/24 + ...
        (0.5 - xi * xi / 24.0) / PI
    } else {
        let half = 0.5 * xi;
        // 1 - cos x = 2 sin^2(x/2)
        2.0 * (half.sin() / xi).powi(2) / PI
    }
}

/// H |2H-1| \int_R |chi_(0,1)^(xi)|^2 |xi|^{2H-1} d xi, the squared
/// full-line norm of the indicator in W^{H-1/2} scaled by H |2H-1|.
pub fn r_h_full_line(h: Hurst) -> Result<f64> {
    let hv = h.value();
    let p = 2.0 * hv - 3.0;
    // (2/pi) J with J = \int_0^inf (1 - cos x) x^p dx
    let mut low = 0.0;
    let mut fact = 1.0;
    for j in 1..30 {
        let two_j = 2 * j;
        fact *= ((two_j - 1) * two_j) as f64;
        let term = 1.0 / (fact * (two_j as f64 + p + 1.0));
        low += if j % 2 == 1 { term } else { -term };
    }
    let cut = 128.0 * PI;
    let mid = integrate(
        |x: f64| [(1.0 - x.cos()) * x.powf(p)],
        1.0,
        cut,
        Tolerance {
            abs: 1e-15,
            rel: 1e-13,
            max_intervals: 20_000,
        },
    )?
    .value[0];
    // \int_cut^inf x^p = cut^{p+1} / -(p+1); cosine part by repeated
    // integration by parts: e^{iX} sum_k i^{k+1} f^(k)(X)
    let plain = -cut.powf(p + 1.0) / (p + 1.0);
    let mut osc = Complex64::new(0.0, 0.0);
    let mut deriv = cut.powf(p);
    let mut ik = Complex64::new(0.0, 1.0);
    for k in 0..12 {
        osc += ik * deriv;
        deriv *= (p - k as f64) / cut;
        ik *= Complex64::new(0.0, 1.0);
    }
    osc *= Complex64::from_polar(1.0, cut);
    let j_total = low + mid + plain - osc.re;
    Ok(hv * h.brownian_offset() * 2.0 / PI * j_total)
}

/// Spectral Gram of the m - 1 interior hats on the uniform grid of [0, 1].
pub fn uniform_hat_gram(m: usize, s: SmoothnessIndex) -> Result<DMatrix<f64>> {
    if m < 2 {
        return Err(Error::invalid("m", format!("need at least 2 cells, got {m}")));
    }
    let h = 1.0 / m as f64;
    let base = TestFunction::hat(0.0, h, 2.0 * h)?;
    // the Gram is Toeplitz: entries depend on the lag only
    let (lags, _) = translate_family(&base, &base, h, m - 1, s, &SobolevOptions::default())?;
    Ok(DMatrix::from_fn(m - 1, m - 1, |i, j| lags[i.abs_diff(j)]))
}

/// sup over piecewise-linear phi on the m-cell grid of (0,1), vanishing at
/// the ends, of (\int phi)^2 / (a_H ||phi||^2_{W^{1/2-H}}).
fn indicator_dual_ratio(h: Hurst, m: usize) -> Result<f64> {
    let g = uniform_hat_gram(m, SmoothnessIndex::dual_of(h))? * a_h_constant(h);
    let b = vec![1.0 / m as f64; m - 1];
    inverse_quadratic_form(&g, &b, 1e-14)
}

/// r_H with the indicator measured in the interval space on (0, 1) as the
/// dual of W_0^{1/2-H}(0, 1), normalized against the increment variance of
/// the window (see README, "Normalization of r_H").
pub fn r_h_spectral(h: Hurst) -> Result<f64> {
    if h.value() == 0.5 {
        return Ok(0.0);
    }
    const M: usize = 64;
    let fine = indicator_dual_ratio(h, M)?;
    let coarse = indicator_dual_ratio(h, M / 2)?;
    // discretization error is first order in the mesh width
    let ratio = 2.0 * fine - coarse;
    let hv = h.value();
    Ok(hv * h.brownian_offset() * 2f64.powf(2.0 - 2.0 * hv) * ratio)
}

/// d_{n,alpha} = 2^{n/2 - alpha} Gamma((n - alpha)/2) / Gamma(alpha/2).
pub fn riesz_fourier_constant(n: u32, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    let nf = n as f64;
    if !(alpha > 0.0 && alpha < nf) {
        return Err(Error::invalid("alpha", format!("need 0 < alpha < {n}, got {alpha}")));
    }
    Ok(2f64.powf(nf / 2.0 - alpha) * gamma((nf - alpha) / 2.0) / gamma(alpha / 2.0))
}

#[derive(Debug, Clone, Copy)]
pub struct DecayOptions {
    pub t_initial: f64,
    pub t_max: f64,
    pub points: usize,
    pub h_min: f64,
    /// Largest relative change under doubling of the truncation accepted as stable.
    pub stability: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            t_initial: 64.0,
            t_max: 1_048_576.0,
            points: 160,
            h_min: 1e-4,
            stability: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub fit: ExponentFit,
    pub ks: Vec<f64>,
    pub sups: Vec<f64>,
    /// Truncation T of (-T, 0) at which the values were taken.
    pub horizon: f64,
    /// Largest relative change of the values under the last doubling of T.
    pub truncation_change: f64,
    pub truncation_sensitive: bool,
}

/// sup of \int phi(x) (k - x)^{-alpha} dx over phi in the unit ball of
/// W_0^s on (-T, 0), for each k.
fn dual_norms(alpha: f64, s: SmoothnessIndex, ks: &[f64], t: f64, opts: &DecayOptions) -> Result<Vec<f64>> {
    let h_dual = Hurst::new(0.5 - s.value())?;
    let basis = IncrementBasis::graded(-t, 0.0, opts.points, GradeToward::End, opts.h_min)?;
    // indicator pairing: (chi_I, chi_J)_{W^s} = E[dX_I dX_J] / a_{H'} for H' = 1/2 - s
    let g = gram(&basis, h_dual) / a_h_constant(h_dual);
    let q = 1.0 - alpha;
    ks.iter()
        .map(|&k| {
            let b: Vec<f64> = basis
                .pairs()
                .iter()
                .map(|p| {
                    let (lo, hi) = (p.lo(), p.hi());
                    let r = (hi - lo) / (k - hi);
                    -(k - hi).powf(q) * (q * r.ln_1p()).exp_m1() / (alpha - 1.0)
                })
                .collect();
            inverse_quadratic_form(&g, &b, 1e-14).map(f64::sqrt)
        })
        .collect()
}

/// Log-log slope of the dual norm of (k - x)^{-alpha} on the negative half
/// line as k grows, against 1/2 + s - alpha.
pub fn lemma22_decay_exponent(alpha: f64, s: SmoothnessIndex, ks: &[f64]) -> Result<DecayReport> {
    lemma22_decay_exponent_with(alpha, s, ks, &DecayOptions::default())
}

pub fn lemma22_decay_exponent_with(
    alpha: f64,
    s: SmoothnessIndex,
    ks: &[f64],
    opts: &DecayOptions,
) -> Result<DecayReport> {
    if !alpha.is_finite() || alpha <= 0.5 + s.value() {
        return Err(Error::invalid("alpha", format!("need alpha > 1/2 + s, got {alpha}")));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::invalid("alpha", "alpha = 1 is excluded"));
    }
    if ks.len() < 2 {
        return Err(Error::invalid("k", "need at least two k values"));
    }
    if ks.iter().any(|&k| !(k >= 2.0 && k.is_finite())) {
        return Err(Error::invalid("k", "all k must be finite and at least 2"));
    }
    let ratio = ks[1] / ks[0];
    if !(ratio > 1.0) || ks.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9) {
        return Err(Error::invalid("k", "k schedule must be increasing and geometric"));
    }
    let mut t = opts.t_initial;
    let mut current = dual_norms(alpha, s, ks, t, opts)?;
    let (sups, truncation_change, sensitive) = loop {
        let next = dual_norms(alpha, s, ks, 2.0 * t, opts)?;
        let change = current
            .iter()
            .zip(&next)
            .map(|(a, b)| ((b - a) / a).abs())
            .fold(0.0, f64::max);
        t *= 2.0;
        if change <= opts.stability {
            break (next, change, false);
        }
        if 2.0 * t > opts.t_max {
            break (next, change, true);
        }
        current = next;
    };
    let fit = ExponentFit::fit(ks, &sups, 0.5 + s.value() - alpha, None)?;
    Ok(DecayReport {
        fit,
        ks: ks.to_vec(),
        sups,
        horizon: t,
        truncation_change,
        truncation_sensitive: sensitive,
    })
}
