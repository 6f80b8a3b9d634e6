//! Log-log least-squares exponent fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Range of the abscissa actually used by a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub theory_slope: f64,
    pub theory_gap: f64,
    /// Expected relative order of the first correction term, when known.
    pub correction_order: Option<f64>,
    pub window: FitWindow,
}

impl ExponentFit {
    /// Least-squares fit of `log y = intercept + slope * log x`.
    pub fn fit(x: &[f64], y: &[f64], theory_slope: f64, correction_order: Option<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Fit(format!("{} abscissae but {} ordinates", x.len(), y.len())));
        }
        if x.len() < 2 {
            return Err(Error::Fit(format!("need at least 2 points, got {}", x.len())));
        }
        if let Some((a, b)) = x
            .iter()
            .zip(y)
            .find(|(a, b)| !(**a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite()))
        {
            return Err(Error::Fit(format!(
                "log-log fit needs positive finite data, got ({a}, {b})"
            )));
        }
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        let n = lx.len() as f64;
        let mx = lx.iter().sum::<f64>() / n;
        let my = ly.iter().sum::<f64>() / n;
        let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
        let syy: f64 = ly.iter().map(|b| (b - my) * (b - my)).sum();
        if sxx == 0.0 {
            return Err(Error::Fit("abscissae are all equal".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r2 = if syy == 0.0 {
            1.0
        } else {
            let ss_res: f64 = lx
                .iter()
                .zip(&ly)
                .map(|(a, b)| {
                    let r = b - intercept - slope * a;
                    r * r
                })
                .sum();
            (1.0 - ss_res / syy).clamp(0.0, 1.0)
        };
        let (x_min, x_max) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
        Ok(ExponentFit {
            slope,
            intercept,
            r2,
            theory_slope,
            theory_gap: (slope - theory_slope).abs(),
            correction_order,
            window: FitWindow {
                x_min,
                x_max,
                points: x.len(),
            },
        })
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.theory_gap <= tolerance
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (3..9).map(|k| 2f64.powi(-k)).collect();
        let y: Vec<f64> = x.iter().map(|e| 3.0 * e.powf(0.4)).collect();
        let f = ExponentFit::fit(&x, &y, 0.4, None).unwrap();
        assert_relative_eq!(f.slope, 0.4, epsilon = 1e-13);
        assert_relative_eq!(f.intercept, 3f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(f.r2, 1.0, epsilon = 1e-12);
        assert!(f.theory_gap < 1e-13);
        assert_eq!(f.window.points, 6);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ExponentFit::fit(&[1.0, 2.0], &[1.0, 0.0], 1.0, None).is_err());
        assert!(ExponentFit::fit(&[1.0], &[1.0], 1.0, None).is_err());
        assert!(ExponentFit::fit(&[1.0, 1.0], &[1.0, 2.0], 1.0, None).is_err());
    }

    #[test]
    fn noisy_fit_has_r2_below_one() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y = [1.0, 2.2, 3.7, 8.5];
        let f = ExponentFit::fit(&x, &y, 1.0, Some(1.0)).unwrap();
        assert!(f.r2 < 1.0 && f.r2 > 0.9);
    }
}
