//! Globally adaptive Gauss-Kronrod (7/15) quadrature for small vector-valued
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the Kronrod nodes with odd index.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-14,
            rel: 1e-11,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64, &mut [f64])>(f: &F, dim: usize, a: f64, b: f64, buf: &mut [f64], buf2: &mut [f64]) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    f(c, buf);
    for n in 0..dim {
        k[n] = WGK[7] * buf[n];
        g[n] = WG[3] * buf[n];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        f(c - dx, buf);
        f(c + dx, buf2);
        for n in 0..dim {
            let s = buf[n] + buf2[n];
            k[n] += WGK[j] * s;
            if j % 2 == 1 {
                g[n] += WG[j / 2] * s;
            }
        }
    }
    let mut error = 0.0_f64;
    for n in 0..dim {
        k[n] *= h;
        g[n] *= h;
        error = error.max((k[n] - g[n]).abs());
    }
    Piece { a, b, value: k, error }
}

#[derive(Debug, Clone)]
pub struct VecEstimate {
    pub value: Vec<f64>,
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates a `dim`-valued integrand, written into the output slice, over
/// [a, b] until the summed error estimate is below
/// `max(tol.abs, tol.rel * |I|)` in the max norm.
pub fn integrate_vec<F: Fn(f64, &mut [f64])>(f: F, dim: usize, a: f64, b: f64, tol: Tolerance) -> Result<VecEstimate> {
    if a == b {
        return Ok(VecEstimate {
            value: vec![0.0; dim],
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut buf = vec![0.0; dim];
    let mut buf2 = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, dim, a, b, &mut buf, &mut buf2);
    let mut total = first.value.clone();
    let mut error = first.error;
    let mut evaluations = 15;
    heap.push(first);
    loop {
        if !error.is_finite() || total.iter().any(|x| !x.is_finite()) {
            return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
        }
        let scale = total.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if error <= tol.abs.max(tol.rel * scale) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {} subintervals (error {error:e})",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&f, dim, worst.a, mid, &mut buf, &mut buf2);
        let right = kronrod(&f, dim, mid, worst.b, &mut buf, &mut buf2);
        evaluations += 30;
        for (n, t) in total.iter_mut().enumerate() {
            *t += left.value[n] + right.value[n] - worst.value[n];
        }
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    if heap.len() == 1 {
        let p = heap.pop().unwrap();
        return Ok(VecEstimate {
            value: p.value,
            error: p.error,
            evaluations,
        });
    }
    // recompute totals to shed accumulated update rounding
    let mut value = vec![0.0; dim];
    let mut err = 0.0;
    for p in heap.iter() {
        for (v, x) in value.iter_mut().zip(&p.value) {
            *v += x;
        }
        err += p.error;
    }
    Ok(VecEstimate {
        value,
        error: err,
        evaluations,
    })
}

/// Fixed-size convenience wrapper around [`integrate_vec`].
pub fn integrate<const N: usize, F: Fn(f64) -> [f64; N]>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<N>> {
    let e = integrate_vec(|x, out: &mut [f64]| out.copy_from_slice(&f(x)), N, a, b, tol)?;
    let mut value = [0.0; N];
    value.copy_from_slice(&e.value);
    Ok(Estimate {
        value,
        error: e.error,
        evaluations: e.evaluations,
    })
}

pub fn integrate_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    integrate(|x| [f(x)], a, b, tol).map(|e| e.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate_scalar(|x| x.powi(12) - 3.0 * x, -1.0, 2.0, Tolerance::default()).unwrap();
        let exact = (2f64.powi(13) + 1.0) / 13.0 - 1.5 * (4.0 - 1.0);
        assert_relative_eq!(v, exact, epsilon = 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let v = integrate_scalar(
            |x| x.powf(-0.6),
            0.0,
            1.0,
            Tolerance {
                rel: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        assert_relative_eq!(v, 2.5, epsilon = 1e-8);
    }

    #[test]
    fn oscillatory() {
        let v = integrate_scalar(|x| (40.0 * x).cos(), 0.0, 3.0, Tolerance::default()).unwrap();
        assert_relative_eq!(v, (120.0f64).sin() / 40.0, epsilon = 1e-12);
    }

    #[test]
    fn vector_integrand() {
        let e = integrate(|x| [x, x * x], 0.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(e.value[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(e.value[1], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn reports_failure() {
        let tol = Tolerance {
            max_intervals: 4,
            ..Default::default()
        };
        assert!(integrate_scalar(|x| (1.0 / x).sin(), 1e-6, 1.0, tol).is_err());
    }
}
