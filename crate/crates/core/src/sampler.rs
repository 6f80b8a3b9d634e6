//! Exact sampling of fBm increments on a uniform grid.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mutual_information_det;
use crate::kernels::{abs_pow, cross_gram, gram, Hurst, IncrementBasis, TimeGrid};
use crate::linalg::PivotedCholesky;

/// Paths generated from one random stream.
pub const BLOCK_PATHS: usize = 64;
const MAX_EMBEDDING: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SamplingMethod {
    CirculantEmbedding { size: usize },
    DenseFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePaths {
    pub m: usize,
    pub n: usize,
    pub dt: f64,
    pub h: Hurst,
    pub seed: u64,
    pub method: SamplingMethod,
    /// Row-major m x n.
    pub data: Vec<f64>,
}

impl SamplePaths {
    pub fn path(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// gamma(k) = (dt^{2H}/2)(|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}).
pub fn increment_autocov(k: usize, dt: f64, h: Hurst) -> f64 {
    let p = h.two_h();
    let k = k as f64;
    0.5 * abs_pow(dt, p) * (abs_pow(k + 1.0, p) + abs_pow(k - 1.0, p) - 2.0 * abs_pow(k, p))
}

/// Eigenvalues of the smallest admissible circulant embedding, with its size.
fn embedding_spectrum(n: usize, dt: f64, h: Hurst) -> Option<(usize, Vec<f64>)> {
    let mut size = (2 * n).max(2);
    let mut planner = FftPlanner::<f64>::new();
    while size <= MAX_EMBEDDING {
        let half = size / 2;
        let row: Vec<Complex64> = (0..size)
            .map(|j| {
                let k = if j <= half { j } else { size - j };
                Complex64::new(increment_autocov(k, dt, h), 0.0)
            })
            .collect();
        let mut spec = row;
        planner.plan_fft_forward(size).process(&mut spec);
        let max = spec.iter().fold(0.0_f64, |m, z| m.max(z.re.abs()));
        let min = spec.iter().fold(f64::INFINITY, |m, z| m.min(z.re));
        if min >= -1e-12 * max {
            return Some((size, spec.iter().map(|z| z.re.max(0.0)).collect()));
        }
        size *= 2;
    }
    None
}

fn block_rng(seed: u64, block: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn blocks(m: usize) -> Vec<(usize, usize)> {
    (0..m.div_ceil(BLOCK_PATHS))
        .map(|b| (b, BLOCK_PATHS.min(m - b * BLOCK_PATHS)))
        .collect()
}

fn circulant_paths(n: usize, m: usize, seed: u64, size: usize, eig: &[f64]) -> Vec<f64> {
    let scale: Vec<f64> = eig.iter().map(|l| (l / size as f64).sqrt()).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(size);
    let chunks: Vec<Vec<f64>> = blocks(m)
        .into_par_iter()
        .map(|(b, count)| {
            let mut rng = block_rng(seed, b);
            let mut out = Vec::with_capacity(count * n);
            let mut buf = vec![Complex64::new(0.0, 0.0); size];
            let mut remaining = count;
            while remaining > 0 {
                for (z, s) in buf.iter_mut().zip(&scale) {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    *z = Complex64::new(re * s, im * s);
                }
                fft.process(&mut buf);
                // real and imaginary parts are independent draws
                out.extend(buf[..n].iter().map(|z| z.re));
                remaining -= 1;
                if remaining > 0 {
                    out.extend(buf[..n].iter().map(|z| z.im));
                    remaining -= 1;
                }
            }
            out
        })
        .collect();
    chunks.concat()
}

fn dense_paths(n: usize, dt: f64, h: Hurst, m: usize, seed: u64) -> Result<Vec<f64>> {
    let cov = DMatrix::from_fn(n, n, |i, j| increment_autocov(i.abs_diff(j), dt, h));
    let pc = PivotedCholesky::new(&cov, 1e-14)?;
    if pc.rank == 0 {
        return Err(Error::Sampling("increment covariance has zero rank".into()));
    }
    let chunks: Vec<Vec<f64>> = blocks(m)
        .into_par_iter()
        .map(|(b, count)| {
            let mut rng = block_rng(seed, b);
            let mut out = vec![0.0; count * n];
            let mut z = vec![0.0; pc.rank];
            for p in 0..count {
                for v in z.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let row = &mut out[p * n..(p + 1) * n];
                for (i, &orig) in pc.pivots.iter().enumerate() {
                    row[orig] = (0..pc.rank.min(i + 1)).map(|k| pc.factor[(i, k)] * z[k]).sum();
                }
            }
            out
        })
        .collect();
    Ok(chunks.concat())
}

pub fn sample_fbm_increments(n: usize, dt: f64, h: Hurst, m: usize, seed: u64) -> Result<SamplePaths> {
    sample_fbm_increments_with(n, dt, h, m, seed, MethodChoice::Auto)
}

pub fn sample_fbm_increments_with(
    n: usize,
    dt: f64,
    h: Hurst,
    m: usize,
    seed: u64,
    choice: MethodChoice,
) -> Result<SamplePaths> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one increment per path"));
    }
    if m == 0 {
        return Err(Error::invalid("m", "need at least one path"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("grid spacing must be positive, got {dt}")));
    }
    let embedded = match choice {
        MethodChoice::Auto => embedding_spectrum(n, dt, h),
        MethodChoice::Dense => None,
    };
    let (method, data) = match embedded {
        Some((size, eig)) => (
            SamplingMethod::CirculantEmbedding { size },
            circulant_paths(n, m, seed, size, &eig),
        ),
        None => (
            SamplingMethod::DenseFactor,
            dense_paths(n, dt, h, m, seed).map_err(|e| Error::Sampling(format!("both methods failed: {e}")))?,
        ),
    };
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::Sampling("non-finite sample".into()));
    }
    Ok(SamplePaths {
        m,
        n,
        dt,
        h,
        seed,
        method,
        data,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Ratio-of-sums estimate of the lag-k autocorrelation, with a delta-method
/// standard error computed from per-path statistics.
pub fn lag_correlation(paths: &SamplePaths, lag: usize) -> Result<Estimate> {
    if lag == 0 || lag >= paths.n {
        return Err(Error::invalid("lag", format!("need 0 < lag < n = {}", paths.n)));
    }
    if paths.m < 2 {
        return Err(Error::invalid("m", "need at least two paths for a standard error"));
    }
    let (n, m) = (paths.n, paths.m);
    let stats: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let x = paths.path(i);
            let a: f64 = x.windows(lag + 1).map(|w| w[0] * w[lag]).sum::<f64>() / (n - lag) as f64;
            let b: f64 = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
            (a, b)
        })
        .collect();
    let mf = m as f64;
    let ma = stats.iter().map(|s| s.0).sum::<f64>() / mf;
    let mb = stats.iter().map(|s| s.1).sum::<f64>() / mf;
    let r = ma / mb;
    let var = stats.iter().map(|s| (s.0 - r * s.1).powi(2)).sum::<f64>() / (mf - 1.0);
    Ok(Estimate {
        value: r,
        std_error: (var / mf).sqrt() / mb,
    })
}

/// Per-coordinate sample variance, averaged over coordinates, with the
/// standard error of that average taken across paths.
pub fn marginal_variance(paths: &SamplePaths) -> Estimate {
    let (n, m) = (paths.n, paths.m);
    let per_path: Vec<f64> = (0..m)
        .map(|i| paths.path(i).iter().map(|v| v * v).sum::<f64>() / n as f64)
        .collect();
    let mean = per_path.iter().sum::<f64>() / m as f64;
    let var = per_path.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0).max(1.0);
    Estimate {
        value: mean,
        std_error: (var / m as f64).sqrt(),
    }
}

/// Plug-in covariance X^T X / m (the mean is known to be zero).
pub fn sample_covariance(paths: &SamplePaths) -> DMatrix<f64> {
    let x = DMatrix::from_row_slice(paths.m, paths.n, &paths.data);
    (x.transpose() * &x) / paths.m as f64
}

pub fn analytic_covariance(n: usize, dt: f64, h: Hurst) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| increment_autocov(i.abs_diff(j), dt, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalMi {
    pub empirical: f64,
    pub analytic: f64,
    pub gap: f64,
    /// First-order plug-in bias, split * (n - split) / (2 m).
    pub bias_order: f64,
}

/// Determinant-route information between the first `split` increments and
/// the rest, for the analytic Gram data of the grid.
pub fn analytic_split_mi(n: usize, dt: f64, split: usize, h: Hurst) -> Result<f64> {
    if !(split >= 1 && split < n) {
        return Err(Error::invalid(
            "split",
            format!("need 1 <= split < n = {n}, got {split}"),
        ));
    }
    let grid = TimeGrid::new(0.0, n as f64 * dt, n + 1)?;
    let all = IncrementBasis::consecutive(&grid);
    let a = IncrementBasis::new(all.pairs()[..split].to_vec())?;
    let b = IncrementBasis::new(all.pairs()[split..].to_vec())?;
    mutual_information_det(&gram(&a, h), &gram(&b, h), &cross_gram(&a, &b, h))
}

pub fn empirical_mi_check(paths: &SamplePaths, split: usize, h: Hurst) -> Result<EmpiricalMi> {
    let n = paths.n;
    if !(split >= 1 && split < n) {
        return Err(Error::invalid(
            "split",
            format!("need 1 <= split < n = {n}, got {split}"),
        ));
    }
    if paths.m <= n {
        return Err(Error::invalid(
            "m",
            format!("need more paths than increments (m > {n})"),
        ));
    }
    let s = sample_covariance(paths);
    let nb = n - split;
    let sa = s.view((0, 0), (split, split)).into_owned();
    let sb = s.view((split, split), (nb, nb)).into_owned();
    let sc = s.view((0, split), (split, nb)).into_owned();
    let empirical = mutual_information_det(&sa, &sb, &sc)
        .map_err(|e| Error::Degenerate(format!("sample covariance is singular: {e}")))?;
    let analytic = analytic_split_mi(n, paths.dt, split, h)?;
    Ok(EmpiricalMi {
        empirical,
        analytic,
        gap: (empirical - analytic).abs(),
        bias_order: (split * nb) as f64 / (2.0 * paths.m as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiSpread {
    pub analytic: f64,
    pub mean: f64,
    /// Sample standard deviation of the estimate across seeds.
    pub spread: f64,
    pub estimates: Vec<f64>,
}

/// Empirical information over independent seeds.
pub fn empirical_mi_spread(n: usize, dt: f64, h: Hurst, m: usize, split: usize, seeds: &[u64]) -> Result<MiSpread> {
    if seeds.len() < 2 {
        return Err(Error::invalid("seeds", "need at least two seeds for a spread"));
    }
    let estimates: Vec<f64> = seeds
        .iter()
        .map(|&s| Ok(empirical_mi_check(&sample_fbm_increments(n, dt, h, m, s)?, split, h)?.empirical))
        .collect::<Result<_>>()?;
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    let spread = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    Ok(MiSpread {
        analytic: analytic_split_mi(n, dt, split, h)?,
        mean,
        spread,
        estimates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub n: usize,
    pub m: usize,
    pub dt: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub seed: u64,
    pub method: SamplingMethod,
    pub layout: String,
}

/// Writes little-endian f64 row-major samples to `bin` and the metadata to
/// `bin` with a `.json` extension appended.
pub fn write_raw(paths: &SamplePaths, bin: &Path) -> Result<std::path::PathBuf> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(bin)?);
    for v in &paths.data {
        f.write_all(&v.to_le_bytes())?;
    }
    f.flush()?;
    let mut side = bin.as_os_str().to_owned();
    side.push(".json");
    let side = std::path::PathBuf::from(side);
    let meta = RawSidecar {
        n: paths.n,
        m: paths.m,
        dt: paths.dt,
        h: paths.h.value(),
        seed: paths.seed,
        method: paths.method,
        layout: "f64-le-row-major".into(),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&side, text + "\n")?;
    Ok(side)
}

pub fn read_raw(bin: &Path) -> Result<(RawSidecar, Vec<f64>)> {
    let mut side = bin.as_os_str().to_owned();
    side.push(".json");
    let meta: RawSidecar = serde_json::from_str(&std::fs::read_to_string(std::path::PathBuf::from(side))?)
        .map_err(|e| Error::Io(e.to_string()))?;
    let bytes = std::fs::read(bin)?;
    if bytes.len() != 8 * meta.n * meta.m {
        return Err(Error::Io(format!(
            "expected {} bytes, found {}",
            8 * meta.n * meta.m,
            bytes.len()
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Ok((meta, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(v: f64) -> Hurst {
        Hurst::new(v).unwrap()
    }

    #[test]
    fn autocovariance_values() {
        assert_relative_eq!(increment_autocov(0, 1.0, h(0.75)), 1.0, epsilon = 1e-15);
        assert_relative_eq!(increment_autocov(1, 1.0, h(0.75)), 2f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_relative_eq!(increment_autocov(0, 0.25, h(0.3)), 0.25f64.powf(0.6), epsilon = 1e-15);
        assert!(increment_autocov(3, 1.0, h(0.5)).abs() < 1e-15);
    }

    #[test]
    fn embedding_is_found_at_twice_n() {
        for &hv in &[0.1, 0.25, 0.5, 0.75, 0.95] {
            let (size, eig) = embedding_spectrum(100, 1.0, h(hv)).unwrap();
            assert_eq!(size, 200);
            assert!(eig.iter().all(|l| *l >= 0.0));
        }
    }

    #[test]
    fn deterministic_and_block_structured() {
        let a = sample_fbm_increments(16, 0.1, h(0.7), 150, 42).unwrap();
        let b = sample_fbm_increments(16, 0.1, h(0.7), 150, 42).unwrap();
        assert_eq!(a.data, b.data);
        let c = sample_fbm_increments(16, 0.1, h(0.7), 150, 43).unwrap();
        assert_ne!(a.data, c.data);
        // a prefix of the blocks does not depend on the total count
        let d = sample_fbm_increments(16, 0.1, h(0.7), 64, 42).unwrap();
        assert_eq!(&a.data[..64 * 16], &d.data[..]);
        assert!(matches!(a.method, SamplingMethod::CirculantEmbedding { size: 32 }));
    }

    #[test]
    fn dense_route_has_right_covariance() {
        let p = sample_fbm_increments_with(4, 1.0, h(0.75), 40_000, 7, MethodChoice::Dense).unwrap();
        assert_eq!(p.method, SamplingMethod::DenseFactor);
        let s = sample_covariance(&p);
        let c = analytic_covariance(4, 1.0, h(0.75));
        assert!((s - c).abs().max() < 0.05);
    }

    #[test]
    fn validation() {
        assert!(sample_fbm_increments(0, 1.0, h(0.5), 10, 1).is_err());
        assert!(sample_fbm_increments(4, 0.0, h(0.5), 10, 1).is_err());
        assert!(sample_fbm_increments(4, 1.0, h(0.5), 0, 1).is_err());
        let p = sample_fbm_increments(4, 1.0, h(0.5), 3, 1).unwrap();
        assert!(empirical_mi_check(&p, 2, h(0.5)).is_err());
        assert!(empirical_mi_check(&p, 0, h(0.5)).is_err());
    }

    #[test]
    fn raw_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let bin = dir.path().join("x.bin");
        let p = sample_fbm_increments(5, 0.5, h(0.3), 7, 9).unwrap();
        let side = write_raw(&p, &bin).unwrap();
        assert!(side.exists());
        let (meta, data) = read_raw(&bin).unwrap();
        assert_eq!(data, p.data);
        assert_eq!((meta.n, meta.m, meta.seed), (5, 7, 9));
    }
}
