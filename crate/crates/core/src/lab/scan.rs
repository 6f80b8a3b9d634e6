//! Scans of angle and information over shrinking windows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fit::ExponentFit;
use crate::geometry::{canonical_correlations, cos_angle, mutual_information_gy, MiValue, SubspacePair, DEFAULT_RTOL};
use crate::kernels::{cross_gram, gram, Hurst, IncrementBasis, TimeGrid};

/// Ordered parameter list embedded into every output file.
pub type Params = Vec<(String, Value)>;

pub fn param(key: &str, value: impl Into<Value>) -> (String, Value) {
    (key.to_string(), value.into())
}

/// `count` values start, start*factor, ...; `factor` may be below one.
pub fn geometric_schedule(start: f64, factor: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && start.is_finite()) {
        return Err(Error::invalid(
            "eps",
            format!("schedule start must be positive, got {start}"),
        ));
    }
    if !(factor > 0.0 && factor.is_finite()) || factor == 1.0 {
        return Err(Error::invalid(
            "eps",
            format!("schedule factor must be positive and not 1, got {factor}"),
        ));
    }
    Ok((0..count).map(|k| start * factor.powi(k as i32)).collect())
}

/// Parses "a,b,c" or the geometric form "a:b:factor" (from a down to b).
pub fn parse_schedule(spec: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::invalid("eps", format!("{what} in schedule {spec:?}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected a:b:factor"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("unparsable number")))
            .collect::<Result<_>>()?;
        let (a, b, f) = (nums[0], nums[1], nums[2]);
        if !(a > 0.0 && b > 0.0 && f > 0.0 && f != 1.0) {
            return Err(bad("need positive endpoints and a factor other than 1"));
        }
        // accept both 2 and 0.5 as the factor for a decreasing schedule
        let ratio = if (b < a) == (f < 1.0) { f } else { 1.0 / f };
        let count = ((b / a).ln() / ratio.ln()).round() as i64;
        if !(0..=10_000).contains(&count) || ((a * ratio.powi(count as i32)) / b - 1.0).abs() > 1e-9 {
            return Err(bad("endpoint is not reached by integer powers of the factor"));
        }
        geometric_schedule(a, ratio, count as usize + 1)
    } else {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("unparsable number")))
            .collect()
    }
}

/// Default schedule 2^-3, ..., 2^-8.
pub fn default_schedule() -> Vec<f64> {
    (3..=8).map(|k| 2f64.powi(-k)).collect()
}

pub(crate) fn check_schedule(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::invalid("eps", "schedule is empty"));
    }
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("eps", "all eps must be positive and finite"));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("eps", "schedule must be strictly decreasing"));
    }
    Ok(())
}

pub(crate) fn check_grid(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::invalid(
            "n",
            format!("need at least 4 grid points per window, got {n}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub h: Hurst,
    pub t1: f64,
    pub t2: f64,
    pub eps: Vec<f64>,
    /// Grid points per window.
    pub grid_n: usize,
    /// Truncation of semi-infinite intervals.
    pub truncation: f64,
    pub rtol: f64,
}

impl ScanConfig {
    pub fn new(h: Hurst, t1: f64, t2: f64) -> Self {
        ScanConfig {
            h,
            t1,
            t2,
            eps: default_schedule(),
            grid_n: 64,
            truncation: 64.0,
            rtol: DEFAULT_RTOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1.is_finite() && self.t2.is_finite()) || self.t1 == self.t2 {
            return Err(Error::invalid(
                "t1, t2",
                format!("need distinct finite times, got {} and {}", self.t1, self.t2),
            ));
        }
        check_schedule(&self.eps)?;
        let half_gap = 0.5 * (self.t1 - self.t2).abs();
        if self.eps[0] >= half_gap {
            return Err(Error::invalid(
                "eps",
                format!(
                    "largest eps {} must be below |t1 - t2|/2 = {half_gap} so the windows are disjoint",
                    self.eps[0]
                ),
            ));
        }
        check_grid(self.grid_n)?;
        if !(self.truncation > 0.0 && self.truncation.is_finite()) {
            return Err(Error::invalid(
                "T",
                format!("truncation must be positive, got {}", self.truncation),
            ));
        }
        if !(self.rtol > 0.0 && self.rtol < 1.0) {
            return Err(Error::invalid("rtol", format!("must lie in (0, 1), got {}", self.rtol)));
        }
        Ok(())
    }

    pub fn params(&self) -> Params {
        vec![
            param("H", self.h.value()),
            param("t1", self.t1),
            param("t2", self.t2),
            param("eps", self.eps.clone()),
            param("n", self.grid_n),
            param("T", self.truncation),
            param("rtol", self.rtol),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub eps: f64,
    pub cos_angle: f64,
    pub mi: MiValue,
    pub hs_lower: f64,
    pub hs_upper: MiValue,
    /// Hilbert-Schmidt norm of the product of the two projections.
    pub hs_norm: f64,
    pub rank_a: usize,
    pub rank_b: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub cond: f64,
    pub ill_conditioned: bool,
    pub skipped: bool,
}

impl ScanRow {
    fn skipped(eps: f64, dims: (usize, usize), ranks: (usize, usize)) -> Self {
        ScanRow {
            eps,
            cos_angle: f64::NAN,
            mi: MiValue::Finite(f64::NAN),
            hs_lower: f64::NAN,
            hs_upper: MiValue::Finite(f64::NAN),
            hs_norm: f64::NAN,
            rank_a: ranks.0,
            rank_b: ranks.1,
            dim_a: dims.0,
            dim_b: dims.1,
            cond: f64::INFINITY,
            ill_conditioned: true,
            skipped: true,
        }
    }

    pub fn usable(&self) -> bool {
        !self.skipped && !self.ill_conditioned
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    #[serde(serialize_with = "serialize_params")]
    pub config: Params,
    pub rows: Vec<ScanRow>,
}

pub(crate) fn serialize_params<S: serde::Serializer>(p: &Params, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(p.len()))?;
    for (k, v) in p {
        m.serialize_entry(k, v)?;
    }
    m.end()
}

/// Evaluates one row from the Gram data of the two subspaces. Rows whose
/// effective rank on either side falls below `min_rank` are marked skipped.
pub fn evaluate_row(eps: f64, pair: &SubspacePair, rtol: f64, min_rank: usize) -> Result<ScanRow> {
    let dims = (pair.ga.nrows(), pair.gb.nrows());
    let spec = match canonical_correlations(&pair.ga, &pair.gb, &pair.cross, rtol) {
        Ok(s) => s,
        Err(Error::Degenerate(_)) => return Ok(ScanRow::skipped(eps, dims, (0, 0))),
        Err(e) => return Err(e),
    };
    if spec.rank_a < min_rank || spec.rank_b < min_rank {
        return Ok(ScanRow::skipped(eps, dims, (spec.rank_a, spec.rank_b)));
    }
    let mi = mutual_information_gy(&spec);
    Ok(ScanRow {
        eps,
        cos_angle: cos_angle(&spec),
        mi: mi.value,
        hs_lower: mi.lower,
        hs_upper: mi.upper,
        hs_norm: spec.hs_squared().sqrt(),
        rank_a: spec.rank_a,
        rank_b: spec.rank_b,
        dim_a: spec.dim_a,
        dim_b: spec.dim_b,
        cond: spec.cond,
        ill_conditioned: spec.ill_conditioned(),
        skipped: false,
    })
}

/// Evaluates rows in parallel; the output order follows `eps`.
pub fn scan_rows<F>(eps: &[f64], rtol: f64, min_rank: usize, build: F) -> Result<Vec<ScanRow>>
where
    F: Fn(f64) -> Result<SubspacePair> + Sync,
{
    eps.par_iter()
        .map(|&e| evaluate_row(e, &build(e)?, rtol, min_rank))
        .collect()
}

pub fn increment_pair(a: &IncrementBasis, b: &IncrementBasis, h: Hurst) -> SubspacePair {
    SubspacePair {
        ga: gram(a, h),
        gb: gram(b, h),
        cross: cross_gram(a, b, h),
    }
}

pub fn window(center: f64, eps: f64, points: usize) -> Result<IncrementBasis> {
    Ok(IncrementBasis::consecutive(&TimeGrid::new(
        center - eps,
        center + eps,
        points,
    )?))
}

/// Angle and information between uniform windows around t1 and t2.
pub fn local_independence_scan(cfg: &ScanConfig) -> Result<ScanTable> {
    cfg.validate()?;
    let rows = scan_rows(&cfg.eps, cfg.rtol, cfg.grid_n / 2, |e| {
        Ok(increment_pair(
            &window(cfg.t1, e, cfg.grid_n)?,
            &window(cfg.t2, e, cfg.grid_n)?,
            cfg.h,
        ))
    })?;
    Ok(ScanTable {
        config: cfg.params(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    CosAngle,
    Mi,
    HsNorm,
}

impl Column {
    fn value(self, row: &ScanRow) -> Option<f64> {
        match self {
            Column::CosAngle => Some(row.cos_angle),
            Column::Mi => row.mi.finite(),
            Column::HsNorm => Some(row.hs_norm),
        }
    }
}

/// Log-log slope of a column against eps, dropping the largest eps and any
/// ill-conditioned rows. Skipped or infinite rows in the fit range reject
/// the table.
pub fn fit_exponent(table: &ScanTable, column: Column, theory: f64) -> Result<ExponentFit> {
    fit_rows(&table.rows, column, theory, None)
}

pub fn fit_rows(rows: &[ScanRow], column: Column, theory: f64, correction_order: Option<f64>) -> Result<ExponentFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let largest = rows.iter().map(|r| r.eps).fold(f64::NEG_INFINITY, f64::max);
    for r in rows.iter().filter(|r| r.eps < largest) {
        if r.skipped {
            return Err(Error::Fit(format!("row at eps = {} was skipped", r.eps)));
        }
        let v = column
            .value(r)
            .ok_or_else(|| Error::Fit(format!("row at eps = {} is infinite", r.eps)))?;
        if r.ill_conditioned {
            continue;
        }
        xs.push(r.eps);
        ys.push(v);
    }
    if xs.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 usable rows, got {}", xs.len())));
    }
    ExponentFit::fit(&xs, &ys, theory, correction_order)
}
