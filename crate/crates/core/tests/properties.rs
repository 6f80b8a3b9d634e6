use fbm_local::geometry::{
    canonical_correlations, cos_angle, mi_bounds_hs, mutual_information_gy, CanonicalSpectrum, MiValue, DEFAULT_RTOL,
};
use fbm_local::kernels::{fbm_cov, increment_cov, Hurst, TimePair};
use fbm_local::lab::{increment_pair, window, window_pair};
use fbm_local::sobolev::{sobolev_inner, sobolev_norm_sq, SmoothnessIndex, TestFunction};
use proptest::prelude::*;

fn hurst() -> impl Strategy<Value = Hurst> {
    (0.05f64..0.95).prop_map(|h| Hurst::new(h).unwrap())
}

/// Piecewise-linear function on [0, 1] vanishing at the ends.
fn test_function() -> impl Strategy<Value = TestFunction> {
    (
        prop::collection::vec(0.02f64..0.98, 2..5),
        prop::collection::vec(-1.0f64..1.0, 5),
    )
        .prop_filter_map("distinct nodes", |(mut xs, ys)| {
            xs.sort_by(f64::total_cmp);
            if xs.windows(2).any(|w| w[1] - w[0] < 0.02) {
                return None;
            }
            let mut nodes = vec![0.0];
            nodes.extend(&xs);
            nodes.push(1.0);
            let mut values = vec![0.0];
            values.extend(&ys[..xs.len()]);
            values.push(0.0);
            TestFunction::new(nodes, values).ok()
        })
}

fn smoothness() -> impl Strategy<Value = SmoothnessIndex> {
    prop::sample::select(vec![-0.3, -0.1, 0.0, 0.2, 0.35]).prop_map(|s| SmoothnessIndex::new(s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sobolev_inner_is_symmetric_and_bilinear(
        phi in test_function(),
        psi in test_function(),
        chi in test_function(),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        s in smoothness(),
    ) {
        let pc = sobolev_inner(&phi, &chi, s).unwrap();
        let qc = sobolev_inner(&psi, &chi, s).unwrap();
        let cp = sobolev_inner(&chi, &phi, s).unwrap();
        let scale = (sobolev_norm_sq(&phi, s).unwrap() * sobolev_norm_sq(&chi, s).unwrap()).sqrt();
        prop_assert!((pc - cp).abs() <= 1e-10 * scale);
        let mix = TestFunction::combine(a, &phi, b, &psi);
        let lhs = sobolev_inner(&mix, &chi, s).unwrap();
        let bound = (a.abs() + b.abs() + 1.0) * (scale + (sobolev_norm_sq(&psi, s).unwrap() * sobolev_norm_sq(&chi, s).unwrap()).sqrt());
        // the three evaluations may stop at different cutoffs, each within the default tail tolerance
        prop_assert!((lhs - (a * pc + b * qc)).abs() <= 1e-8 * bound, "{lhs} vs {}", a * pc + b * qc);
    }

    #[test]
    fn sobolev_cauchy_schwarz(phi in test_function(), psi in test_function(), s in smoothness()) {
        let ip = sobolev_inner(&phi, &psi, s).unwrap();
        let n1 = sobolev_norm_sq(&phi, s).unwrap();
        let n2 = sobolev_norm_sq(&psi, s).unwrap();
        prop_assert!(n1 > 0.0 && n2 > 0.0);
        prop_assert!(ip * ip <= n1 * n2 * (1.0 + 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn covariance_self_similarity(h in hurst(), u in 0.0f64..5.0, v in 0.0f64..5.0, k in -4i32..5) {
        let c = 2f64.powi(k);
        let lhs = fbm_cov(c * u, c * v, h);
        let rhs = c.powf(h.two_h()) * fbm_cov(u, v, h);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn increment_covariance_symmetry_and_stationarity(
        h in hurst(),
        s1 in -3.0f64..3.0, l1 in 0.01f64..2.0,
        s2 in -3.0f64..3.0, l2 in 0.01f64..2.0,
        k in -3i32..4,
    ) {
        let p = TimePair::new(s1, s1 + l1).unwrap();
        let q = TimePair::new(s2, s2 + l2).unwrap();
        let c = increment_cov(&p, &q, h);
        prop_assert!((c - increment_cov(&q, &p, h)).abs() <= 1e-14 * (l1 * l2).sqrt().max(c.abs()));
        let shift = 2f64.powi(k);
        let ps = TimePair::new(s1 + shift, s1 + l1 + shift).unwrap();
        let qs = TimePair::new(s2 + shift, s2 + l2 + shift).unwrap();
        prop_assert!((increment_cov(&ps, &qs, h) - c).abs() <= 1e-10 * (l1 * l2).sqrt().max(1e-3));
        prop_assert!(c.abs() <= (increment_cov(&p, &p, h) * increment_cov(&q, &q, h)).sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn scan_rows_are_invariant(
        h in hurst(),
        t1 in -4i32..4,
        gap in 1i32..4,
        shift in -6i32..7,
        scale in -3i32..4,
        e in 1usize..4,
    ) {
        let (t1, t2) = (t1 as f64, (t1 + gap) as f64);
        let eps = 0.5f64.powi(e as i32 + 1);
        let base = window_pair(h, t1, t2, eps, 12, DEFAULT_RTOL).unwrap();
        let sh = shift as f64;
        let moved = window_pair(h, t1 + sh, t2 + sh, eps, 12, DEFAULT_RTOL).unwrap();
        let c = 2f64.powi(scale);
        let scaled = window_pair(h, c * t1, c * t2, c * eps, 12, DEFAULT_RTOL).unwrap();
        for other in [&moved, &scaled] {
            prop_assert!((other.cos_angle - base.cos_angle).abs() <= 1e-10);
            let (a, b) = (other.mi.finite().unwrap(), base.mi.finite().unwrap());
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn mi_swap_symmetry_and_range(h in hurst(), gap in 0.0f64..1.0, na in 2usize..9, nb in 2usize..9) {
        let pair = increment_pair(&window(-0.5 - gap, 0.5, na).unwrap(), &window(0.5, 0.5, nb).unwrap(), h);
        let s = pair.spectrum(DEFAULT_RTOL).unwrap();
        let t = pair.swapped().spectrum(DEFAULT_RTOL).unwrap();
        let c = cos_angle(&s);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!((c - cos_angle(&t)).abs() <= 1e-10);
        match (mutual_information_gy(&s).value, mutual_information_gy(&t).value) {
            (MiValue::Finite(a), MiValue::Finite(b)) => prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a)),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn hs_sandwich_holds(sig in prop::collection::vec(0.0f64..0.999, 1..30)) {
        let s = CanonicalSpectrum::from_sigmas(sig).unwrap();
        let b = mi_bounds_hs(&s);
        let mi = mutual_information_gy(&s).value.finite().unwrap();
        prop_assert!(b.lower <= mi * (1.0 + 1e-14) + 1e-300);
        prop_assert!(mi <= b.upper.finite().unwrap() * (1.0 + 1e-14) + 1e-300);
    }

    #[test]
    fn correlations_are_invariant_under_basis_scaling(h in hurst(), k in 0.1f64..10.0) {
        let pair = increment_pair(&window(0.0, 0.25, 6).unwrap(), &window(1.0, 0.25, 5).unwrap(), h);
        let s = pair.spectrum(DEFAULT_RTOL).unwrap();
        let gb = &pair.gb * (k * k);
        let cross = &pair.cross * k;
        let t = canonical_correlations(&pair.ga, &gb, &cross, DEFAULT_RTOL).unwrap();
        for (x, y) in s.sigmas.iter().zip(&t.sigmas) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }
}
