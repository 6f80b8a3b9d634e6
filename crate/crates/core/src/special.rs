//! Special functions.

use statrs::function::gamma as sg;

/// Euler's Gamma function on the positive reals and the non-integer
/// negative reals.
pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_integer_and_factorials() {
        assert_relative_eq!(gamma(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-13);
        let mut fact = 1.0;
        for n in 1..=12u32 {
            fact *= n as f64;
            assert_relative_eq!(gamma(n as f64 + 1.0), fact, max_relative = 1e-12);
        }
        assert_relative_eq!(gamma(2.5), 0.75 * std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn recurrence_on_unit_interval() {
        for k in 1..40 {
            let x = k as f64 * 0.1;
            assert_relative_eq!(gamma(x + 1.0), x * gamma(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn reflection() {
        let x = 0.3;
        let pi = std::f64::consts::PI;
        assert_relative_eq!(gamma(x) * gamma(1.0 - x), pi / (pi * x).sin(), max_relative = 1e-12);
        assert_relative_eq!(ln_gamma(7.0), 720f64.ln(), max_relative = 1e-13);
    }
}
