//! Experiments built on the scan engine.

use serde::Serialize;

use super::scan::{
    check_grid, check_schedule, fit_rows, increment_pair, local_independence_scan, param, scan_rows, serialize_params,
    window, Column, Params, ScanConfig, ScanRow, ScanTable,
};
use crate::error::{Error, Result};
use crate::fit::ExponentFit;
use crate::geometry::{canonical_correlations, cos_angle, mutual_information_gy, MiValue, SubspacePair, DEFAULT_RTOL};
use crate::kernels::{levy_cross_gram, levy_gram, GradeToward, Hurst, IncrementBasis, LevyBasis, Point, TimeGrid};
use crate::sobolev::{r_h_full_line, r_h_spectral};

/// Points of the graded grids on semi-infinite pieces.
pub const GRADED_POINTS: usize = 64;
/// Finest spacing of graded grids, relative to the distance to the window.
pub const GRADED_FLOOR: f64 = 1e-3;
/// Slope change under doubling of the truncation regarded as dominant.
pub const TRUNCATION_SLOPE_LIMIT: f64 = 0.02;

fn smallest_usable(rows: &[ScanRow]) -> Option<&ScanRow> {
    rows.iter()
        .filter(|r| r.usable() && r.mi.finite().is_some())
        .min_by(|a, b| a.eps.total_cmp(&b.eps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm21Report {
    pub table: ScanTable,
    pub cos_fit: ExponentFit,
    pub mi_fit: ExponentFit,
    /// cos * (eps / |t1 - t2|)^{2H - 2} at the smallest usable eps.
    pub r_h_extrapolated: f64,
    pub r_h_spectral: Option<f64>,
    pub r_h_full_line: f64,
    /// |extrapolated / spectral - 1|.
    pub constant_gap: Option<f64>,
    /// MI / (cos^2 / 2) at the smallest usable eps.
    pub mi_ratio: f64,
    pub eps_extrapolation: f64,
    /// Whitening truncated a Gram matrix, so the constant comparison is not conclusive.
    pub inconclusive: bool,
}

/// Angle and information rates between two shrinking windows, and the
/// leading constant.
pub fn theorem21_check(cfg: &ScanConfig) -> Result<Thm21Report> {
    let h = cfg.h;
    let table = local_independence_scan(cfg)?;
    let delta = (1.0f64).min(2.0 - h.two_h());
    let cos_fit = fit_rows(&table.rows, Column::CosAngle, 2.0 - h.two_h(), Some(delta))?;
    let mi_fit = fit_rows(&table.rows, Column::Mi, 4.0 - 2.0 * h.two_h(), Some(delta))?;
    let last = smallest_usable(&table.rows).ok_or_else(|| Error::Fit("no usable row for extrapolation".into()))?;
    let dist = (cfg.t1 - cfg.t2).abs();
    let r_ext = last.cos_angle * (last.eps / dist).powf(h.two_h() - 2.0);
    let mi = last.mi.finite().expect("usable rows are finite");
    let mi_ratio = mi / (0.5 * last.cos_angle * last.cos_angle);
    let eps_extrapolation = last.eps;
    let comparable = h.brownian_offset() >= 0.1;
    let r_spec = if comparable { Some(r_h_spectral(h)?) } else { None };
    let constant_gap = r_spec.map(|r| (r_ext / r - 1.0).abs());
    let inconclusive = table.rows.iter().any(|r| r.rank_a < r.dim_a || r.rank_b < r.dim_b);
    Ok(Thm21Report {
        table,
        cos_fit,
        mi_fit,
        r_h_extrapolated: r_ext,
        r_h_spectral: r_spec,
        r_h_full_line: r_h_full_line(h)?,
        constant_gap,
        mi_ratio,
        eps_extrapolation,
        inconclusive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    pub table: ScanTable,
    pub fits: Vec<ExponentFit>,
    /// The same fits with the truncation doubled.
    pub fits_doubled: Vec<ExponentFit>,
    /// Largest slope change under doubling of the truncation.
    pub sensitivity: f64,
    pub truncation_dominated: bool,
}

fn truncation_study<F>(
    config: Params,
    eps: &[f64],
    rtol: f64,
    min_rank: usize,
    truncation: f64,
    columns: &[(Column, f64)],
    build: F,
) -> Result<TruncationReport>
where
    F: Fn(f64, f64) -> Result<SubspacePair> + Sync,
{
    let rows = scan_rows(eps, rtol, min_rank, |e| build(e, truncation))?;
    let rows2 = scan_rows(eps, rtol, min_rank, |e| build(e, 2.0 * truncation))?;
    let fits: Vec<ExponentFit> = columns
        .iter()
        .map(|&(c, th)| fit_rows(&rows, c, th, None))
        .collect::<Result<_>>()?;
    let fits_doubled: Vec<ExponentFit> = columns
        .iter()
        .map(|&(c, th)| fit_rows(&rows2, c, th, None))
        .collect::<Result<_>>()?;
    let sensitivity = fits
        .iter()
        .zip(&fits_doubled)
        .map(|(a, b)| (a.slope - b.slope).abs())
        .fold(0.0, f64::max);
    Ok(TruncationReport {
        table: ScanTable { config, rows },
        fits,
        fits_doubled,
        sensitivity,
        truncation_dominated: sensitivity > TRUNCATION_SLOPE_LIMIT,
    })
}

/// Increments of a graded grid on (-T, 0), finer toward 0.
pub fn truncated_past(truncation: f64, h_min: f64) -> Result<IncrementBasis> {
    IncrementBasis::graded(-truncation, 0.0, GRADED_POINTS, GradeToward::End, h_min)
}

/// Window around t against the truncated past (-T, 0): fits of the angle
/// against 1 - H and of the information against 2 - 2H.
pub fn theorem22_check(
    h: Hurst,
    t: f64,
    truncation: f64,
    eps: &[f64],
    grid_n: usize,
    rtol: f64,
) -> Result<TruncationReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("window center must be positive, got {t}")));
    }
    if !(truncation >= 16.0 * t) {
        return Err(Error::invalid(
            "T",
            format!("need T >= 16 t = {}, got {truncation}", 16.0 * t),
        ));
    }
    check_schedule(eps)?;
    if eps[0] >= t {
        return Err(Error::invalid(
            "eps",
            format!("window must not reach the past: need eps < t = {t}"),
        ));
    }
    check_grid(grid_n)?;
    let config = vec![
        param("H", h.value()),
        param("t", t),
        param("T", truncation),
        param("eps", eps.to_vec()),
        param("n", grid_n),
        param("past_points", GRADED_POINTS),
        param("past_h_min", GRADED_FLOOR * t),
        param("rtol", rtol),
    ];
    truncation_study(
        config,
        eps,
        rtol,
        grid_n / 2,
        truncation,
        &[(Column::CosAngle, 1.0 - h.value()), (Column::Mi, 2.0 - h.two_h())],
        |e, tt| {
            Ok(increment_pair(
                &truncated_past(tt, GRADED_FLOOR * t)?,
                &window(t, e, grid_n)?,
                h,
            ))
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjacencyRow {
    /// Increments per window.
    pub n: usize,
    pub cos_angle: f64,
    pub mi: MiValue,
    /// Relative MI increase over the previous row.
    pub growth: Option<f64>,
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjacencyReport {
    #[serde(serialize_with = "serialize_params")]
    pub config: Params,
    pub rows: Vec<AdjacencyRow>,
    pub strictly_increasing: bool,
    pub min_growth: Option<f64>,
    /// Largest relative MI difference between the tables at eps and eps/4.
    pub self_similarity_gap: f64,
}

fn adjacent_rows(h: Hurst, eps: f64, ns: &[usize], rtol: f64) -> Result<Vec<(f64, MiValue, bool)>> {
    use rayon::prelude::*;
    ns.par_iter()
        .map(|&n| {
            let left = IncrementBasis::consecutive(&TimeGrid::new(-eps, 0.0, n + 1)?);
            let right = IncrementBasis::consecutive(&TimeGrid::new(0.0, eps, n + 1)?);
            let pair = increment_pair(&left, &right, h);
            let spec = pair.spectrum(rtol)?;
            Ok((
                cos_angle(&spec),
                mutual_information_gy(&spec).value,
                spec.ill_conditioned(),
            ))
        })
        .collect()
}

/// Information below this level is treated as rounding noise.
pub const MI_NOISE_FLOOR: f64 = 1e-14;

/// Information between adjacent windows (-eps, 0) and (0, eps) under grid
/// refinement.
pub fn adjacency_divergence(h: Hurst, eps: f64, ns: &[usize], rtol: f64) -> Result<AdjacencyReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
    }
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] < 1 {
        return Err(Error::invalid("n", "grid schedule must be increasing and positive"));
    }
    let base = adjacent_rows(h, eps, ns, rtol)?;
    let scaled = adjacent_rows(h, eps / 4.0, ns, rtol)?;
    let mut rows = Vec::with_capacity(ns.len());
    let mut prev: Option<f64> = None;
    let mut strictly = true;
    let mut min_growth: Option<f64> = None;
    for (&n, &(cos, mi, ill)) in ns.iter().zip(&base) {
        let growth = match (prev, mi.finite()) {
            (Some(p), Some(v)) if p > MI_NOISE_FLOOR => Some(v / p - 1.0),
            _ => None,
        };
        match (prev, mi.finite()) {
            (Some(p), Some(v)) if !(v > p) => strictly = false,
            (_, None) => strictly = false,
            _ => {}
        }
        if let Some(g) = growth {
            min_growth = Some(min_growth.map_or(g, |m: f64| m.min(g)));
        } else if prev.is_some() {
            strictly = false;
        }
        prev = mi.finite();
        rows.push(AdjacencyRow {
            n,
            cos_angle: cos,
            mi,
            growth,
            ill_conditioned: ill,
        });
    }
    let self_similarity_gap = base
        .iter()
        .zip(&scaled)
        .map(|(a, b)| match (a.1.finite(), b.1.finite()) {
            (Some(x), Some(y)) => (x - y).abs() / x.abs().max(f64::MIN_POSITIVE),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    Ok(AdjacencyReport {
        config: vec![
            param("H", h.value()),
            param("eps", eps),
            param("n", ns.to_vec()),
            param("rtol", rtol),
        ],
        rows,
        strictly_increasing: strictly,
        min_growth,
        self_similarity_gap,
    })
}

/// Finest spacing of the past and future grids next to 0.
pub const PAST_FUTURE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PastFuture {
    pub truncation: f64,
    pub n: usize,
    pub cos_angle: f64,
    pub margin: f64,
    pub ill_conditioned: bool,
}

/// Angle between the truncated past (-T, 0) and future (0, T), both on
/// grids of n points graded toward 0.
pub fn past_future_angle(h: Hurst, truncation: f64, n: usize, rtol: f64) -> Result<PastFuture> {
    if !(truncation > PAST_FUTURE_FLOOR && truncation.is_finite()) {
        return Err(Error::invalid(
            "T",
            format!("truncation must exceed {PAST_FUTURE_FLOOR}, got {truncation}"),
        ));
    }
    let past = IncrementBasis::graded(-truncation, 0.0, n, GradeToward::End, PAST_FUTURE_FLOOR)?;
    let future = IncrementBasis::graded(0.0, truncation, n, GradeToward::Start, PAST_FUTURE_FLOOR)?;
    let spec = increment_pair(&past, &future, h).spectrum(rtol)?;
    let c = cos_angle(&spec);
    Ok(PastFuture {
        truncation,
        n,
        cos_angle: c,
        margin: 1.0 - c,
        ill_conditioned: spec.ill_conditioned(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PastFutureStudy {
    pub base: PastFuture,
    pub doubled_n: PastFuture,
    pub doubled_t: PastFuture,
    pub doubled_both: PastFuture,
    /// Largest relative change of the cosine among the three refinements.
    pub drift: f64,
}

pub fn past_future_study(h: Hurst, truncation: f64, n: usize, rtol: f64) -> Result<PastFutureStudy> {
    let base = past_future_angle(h, truncation, n, rtol)?;
    let doubled_n = past_future_angle(h, truncation, 2 * n, rtol)?;
    let doubled_t = past_future_angle(h, 2.0 * truncation, n, rtol)?;
    let doubled_both = past_future_angle(h, 2.0 * truncation, 2 * n, rtol)?;
    let rel = |x: &PastFuture| {
        if base.cos_angle == 0.0 {
            x.cos_angle.abs()
        } else {
            (x.cos_angle / base.cos_angle - 1.0).abs()
        }
    };
    let drift = rel(&doubled_n).max(rel(&doubled_t)).max(rel(&doubled_both));
    Ok(PastFutureStudy {
        base,
        doubled_n,
        doubled_t,
        doubled_both,
        drift,
    })
}

/// Window around t against the truncated complement (-T, t1) and (t2, T),
/// with graded grids toward t1 and t2. Fits the Hilbert-Schmidt norm
/// against 1 - H and the information against 2 - 2H.
#[allow(clippy::too_many_arguments)]
pub fn complement_window_scan(
    h: Hurst,
    t1: f64,
    t: f64,
    t2: f64,
    eps: &[f64],
    truncation: f64,
    grid_n: usize,
    rtol: f64,
) -> Result<TruncationReport> {
    if !(t1 < t && t < t2) {
        return Err(Error::invalid(
            "t1, t, t2",
            format!("need t1 < t < t2, got {t1}, {t}, {t2}"),
        ));
    }
    if !(-truncation < t1 && t2 < truncation) {
        return Err(Error::invalid(
            "T",
            format!("need -T < t1 and t2 < T, got T = {truncation}"),
        ));
    }
    check_schedule(eps)?;
    if eps[0] >= (t - t1).min(t2 - t) {
        return Err(Error::invalid("eps", "windows must stay strictly inside (t1, t2)"));
    }
    check_grid(grid_n)?;
    let floor_left = GRADED_FLOOR * (t - t1);
    let floor_right = GRADED_FLOOR * (t2 - t);
    let config = vec![
        param("H", h.value()),
        param("t1", t1),
        param("t", t),
        param("t2", t2),
        param("T", truncation),
        param("eps", eps.to_vec()),
        param("n", grid_n),
        param("graded_points", GRADED_POINTS),
        param("rtol", rtol),
    ];
    truncation_study(
        config,
        eps,
        rtol,
        grid_n / 2,
        truncation,
        &[(Column::HsNorm, 1.0 - h.value()), (Column::Mi, 2.0 - h.two_h())],
        |e, tt| {
            let left = IncrementBasis::graded(-tt, t1, GRADED_POINTS, GradeToward::End, floor_left)?;
            let right = IncrementBasis::graded(t2, tt, GRADED_POINTS, GradeToward::Start, floor_right)?;
            Ok(increment_pair(&left.union(&right), &window(t, e, grid_n)?, h))
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyReport {
    pub table: ScanTable,
    pub fit: ExponentFit,
}

fn levy_pair(c1: &Point, c2: &Point, eps: f64, per_axis: usize, h: Hurst) -> Result<SubspacePair> {
    let a = LevyBasis::ball_star(c1, eps, per_axis)?;
    let b = LevyBasis::ball_star(c2, eps, per_axis)?;
    Ok(SubspacePair {
        ga: levy_gram(&a, h),
        gb: levy_gram(&b, h),
        cross: levy_cross_gram(&a, &b, h)?,
    })
}

/// Angle between increment spaces of planar Levy fBm on two shrinking balls.
pub fn levy2d_scan(h: Hurst, c1: &Point, c2: &Point, eps: &[f64], per_axis: usize, rtol: f64) -> Result<LevyReport> {
    if c1.dim() != 2 || c2.dim() != 2 {
        return Err(Error::invalid("center", "balls must be planar"));
    }
    let dist = c1.distance(c2);
    check_schedule(eps)?;
    if !(2.0 * eps[0] < dist) {
        return Err(Error::invalid(
            "eps",
            format!("balls must be disjoint: need eps < {}", 0.5 * dist),
        ));
    }
    let dim = LevyBasis::ball_star(c1, eps[0], per_axis)?.len();
    let rows = scan_rows(eps, rtol, dim / 2, |e| levy_pair(c1, c2, e, per_axis, h))?;
    let fit = fit_rows(&rows, Column::CosAngle, 2.0 - h.two_h(), None)?;
    Ok(LevyReport {
        table: ScanTable {
            config: vec![
                param("H", h.value()),
                param("c1", c1.0.clone()),
                param("c2", c2.0.clone()),
                param("eps", eps.to_vec()),
                param("grid_per_axis", per_axis),
                param("rtol", rtol),
            ],
            rows,
        },
        fit,
    })
}

/// cos and information for two explicit interval windows (t1 +- eps, t2 +- eps).
pub fn window_pair(h: Hurst, t1: f64, t2: f64, eps: f64, n: usize, rtol: f64) -> Result<ScanRow> {
    let cfg = ScanConfig {
        h,
        t1,
        t2,
        eps: vec![eps],
        grid_n: n,
        truncation: 1.0,
        rtol,
    };
    cfg.validate()?;
    let pair = increment_pair(&window(t1, eps, n)?, &window(t2, eps, n)?, h);
    super::scan::evaluate_row(eps, &pair, rtol, n / 2)
}

/// Spectrum-based summary shared by the command-line `angle` and `mi` commands.
pub fn spectrum_summary(pair: &SubspacePair) -> Result<(f64, MiValue)> {
    let spec = canonical_correlations(&pair.ga, &pair.gb, &pair.cross, DEFAULT_RTOL)?;
    Ok((cos_angle(&spec), mutual_information_gy(&spec).value))
}
