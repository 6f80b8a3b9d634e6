//! Command-line front end.
//!
//! Every parameter can come from a flag, from a `key=value` config file
//! given with `--config`, or from the built-in default, in that order.
//! Data goes to `--out` when given (summary on stdout), otherwise to
//! stdout (summary on stderr).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::checks;
use crate::error::Error;
use crate::fit::ExponentFit;
use crate::geometry::DEFAULT_RTOL;
use crate::kernels::{fbm_cov, increment_cov, Hurst, Point, TimePair};
use crate::lab::output::{fmt_f64, json_document, scan_csv_string, write_adjacency_csv, write_record_csv};
use crate::lab::{
    adjacency_divergence, complement_window_scan, default_schedule, fit_rows, levy2d_scan, local_independence_scan,
    param, parse_schedule, past_future_study, theorem21_check, theorem22_check, window_pair, Column, Params,
    ScanConfig, ScanRow, ScanTable,
};
use crate::sampler::{empirical_mi_check, lag_correlation, marginal_variance, sample_fbm_increments, write_raw};
use crate::sobolev::{a_h_constant, r_h_full_line, r_h_spectral};

#[derive(Parser, Debug)]
#[command(
    name = "fbm-local",
    version,
    about = "Local independence experiments for fractional Brownian motion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Covariance R_H(t1, t2), and of the two eps-windows when --eps is given
    Cov(Opts),
    /// Angle between the increment spaces of two windows
    Angle(Opts),
    /// Mutual information between two windows, with its bounds
    Mi(Opts),
    /// Angle and information over an eps schedule
    Scan(Opts),
    /// Rates and leading constant for two shrinking windows
    Thm21(Opts),
    /// Rates for a shrinking window against the truncated past
    Thm22(Opts),
    /// Information between adjacent intervals under refinement
    Adjacency(Opts),
    /// Angle between truncated past and future
    Pastfuture(Opts),
    /// Rates for a window against the truncated complement of (t1, t2)
    Complement(Opts),
    /// Angle rate for planar Levy fBm on two balls
    Levy2d(Opts),
    /// The constants a_H and r_H
    Constants(Opts),
    /// Exact samples of fBm increments
    Sample(Opts),
    /// Run the acceptance suite
    CheckAll(Opts),
}

#[derive(Args, Debug, Default, Clone)]
struct Opts {
    /// Hurst index in (0, 1)
    #[arg(long = "H", allow_hyphen_values = true)]
    h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t2: Option<String>,
    /// Window center for thm22 and complement
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Half-width, comma list "a,b,c" or geometric "start:end:factor"
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Grid points per window (increments per path for sample)
    #[arg(long)]
    n: Option<String>,
    /// Truncation horizon
    #[arg(long = "T")]
    truncation: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Relative truncation tolerance of the whitening step
    #[arg(long)]
    rtol: Option<String>,
    /// Number of sample paths
    #[arg(long)]
    m: Option<String>,
    /// Grid spacing of samples
    #[arg(long)]
    dt: Option<String>,
    /// Split index for the empirical information check
    #[arg(long)]
    split: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 on conditioning or truncation warnings
    #[arg(long)]
    strict: bool,
    /// Worker thread cap
    #[arg(long)]
    threads: Option<String>,
    /// Check families or numbers, comma separated
    #[arg(long)]
    only: Option<String>,
    /// Machine-readable check report
    #[arg(long)]
    json: Option<PathBuf>,
    /// key=value file with defaults for any of the above
    #[arg(long)]
    config: Option<PathBuf>,
}

const KEYS: [&str; 18] = [
    "H", "t1", "t2", "t", "eps", "n", "T", "seed", "rtol", "m", "dt", "split", "format", "out", "strict", "threads",
    "only", "json",
];

const COMMON: [&str; 4] = ["format", "out", "strict", "threads"];

fn command_keys(name: &str) -> &'static [&'static str] {
    match name {
        "cov" => &["H", "t1", "t2", "eps"],
        "angle" | "mi" => &["H", "t1", "t2", "eps", "n", "rtol"],
        "scan" | "thm21" => &["H", "t1", "t2", "eps", "n", "rtol"],
        "thm22" => &["H", "t", "eps", "n", "T", "rtol"],
        "complement" => &["H", "t1", "t", "t2", "eps", "n", "T", "rtol"],
        "adjacency" => &["H", "eps", "n", "rtol"],
        "pastfuture" => &["H", "n", "T", "rtol"],
        "levy2d" => &["H", "t1", "t2", "eps", "n", "rtol"],
        "constants" => &["H"],
        "sample" => &["H", "n", "m", "dt", "seed", "split"],
        "check-all" => &["only", "json"],
        _ => &[],
    }
}

enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

/// Resolved parameters for one command.
struct Settings {
    command: &'static str,
    values: BTreeMap<&'static str, String>,
    strict: bool,
}

fn flag_values(o: &Opts) -> Vec<(&'static str, String)> {
    let mut v = Vec::new();
    let mut push = |k: &'static str, x: &Option<String>| {
        if let Some(s) = x {
            v.push((k, s.clone()));
        }
    };
    push("H", &o.h);
    push("t1", &o.t1);
    push("t2", &o.t2);
    push("t", &o.t);
    push("eps", &o.eps);
    push("n", &o.n);
    push("T", &o.truncation);
    push("seed", &o.seed);
    push("rtol", &o.rtol);
    push("m", &o.m);
    push("dt", &o.dt);
    push("split", &o.split);
    push("format", &o.format);
    push("threads", &o.threads);
    push("only", &o.only);
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.to_string_lossy().into_owned());
    push("out", &path(&o.out));
    push("json", &path(&o.json));
    if o.strict {
        v.push(("strict", "true".into()));
    }
    v
}

/// Parses flat `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got `{}`", i + 1, raw.trim()))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

impl Settings {
    fn resolve(command: &'static str, opts: &Opts) -> CmdResult<Self> {
        let allowed = command_keys(command);
        let usable = |k: &str| allowed.contains(&k) || COMMON.contains(&k);
        let mut values = BTreeMap::new();
        if let Some(path) = &opts.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read config file {}: {e}", path.display())))?;
            let entries = parse_config(&text).map_err(|e| invalid(format!("config file {}: {e}", path.display())))?;
            for (k, v) in entries {
                let key = KEYS
                    .iter()
                    .find(|x| **x == k)
                    .ok_or_else(|| invalid(format!("config file {}: unknown key `{k}`", path.display())))?;
                // keys meant for other commands are ignored
                if usable(key) {
                    values.insert(*key, v);
                }
            }
        }
        for (k, v) in flag_values(opts) {
            if !usable(k) {
                return Err(invalid(format!(
                    "flag --{k} is not used by `{command}`; accepted: {}",
                    allowed
                        .iter()
                        .chain(COMMON.iter())
                        .map(|k| format!("--{k}"))
                        .collect::<Vec<_>>()
                        .join(" ")
                )));
            }
            values.insert(k, v);
        }
        let strict = match values.get("strict").map(String::as_str) {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(other) => return Err(invalid(format!("strict must be true or false, got `{other}`"))),
        };
        Ok(Settings {
            command,
            values,
            strict,
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, what: &str) -> CmdResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|_| invalid(format!("--{key} expects {what}, got `{s}`"))),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> CmdResult<f64> {
        let v = self.parse::<f64>(key, "a number")?.unwrap_or(default);
        if !v.is_finite() {
            return Err(invalid(format!("--{key} must be finite, got {v}")));
        }
        Ok(v)
    }

    fn usize_or(&self, key: &str, default: usize) -> CmdResult<usize> {
        Ok(self.parse::<usize>(key, "a nonnegative integer")?.unwrap_or(default))
    }

    fn hurst(&self) -> CmdResult<Hurst> {
        let v = self
            .parse::<f64>("H", "a number")?
            .ok_or_else(|| invalid(format!("`{}` needs --H (Hurst index in (0, 1))", self.command)))?;
        Ok(Hurst::new(v)?)
    }

    fn rtol(&self) -> CmdResult<f64> {
        self.f64_or("rtol", DEFAULT_RTOL)
    }

    fn schedule(&self) -> CmdResult<Vec<f64>> {
        match self.raw("eps") {
            None => Ok(default_schedule()),
            Some(s) => Ok(parse_schedule(s)?),
        }
    }

    fn single_eps(&self, default: f64) -> CmdResult<f64> {
        let e = self.f64_or("eps", default)?;
        if e <= 0.0 {
            return Err(invalid(format!("--eps must be positive, got {e}")));
        }
        Ok(e)
    }

    fn json_output(&self) -> CmdResult<bool> {
        match self.raw("format") {
            None => Ok(self.raw("out").is_some_and(|p| p.ends_with(".json"))),
            Some("csv") => Ok(false),
            Some("json") => Ok(true),
            Some(other) => Err(invalid(format!("--format must be csv or json, got `{other}`"))),
        }
    }
}

/// What a command produced.
struct Report {
    csv: String,
    json: Value,
    summary: String,
    warnings: Vec<String>,
}

fn record_csv(params: &Params, record: &[(String, String)]) -> String {
    let mut buf = Vec::new();
    write_record_csv(params, record, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

fn doc<T: serde::Serialize>(params: &Params, v: &T) -> CmdResult<Value> {
    Ok(json_document(params, v)?)
}

fn row_record(r: &ScanRow) -> Vec<(String, String)> {
    vec![
        ("eps".into(), fmt_f64(r.eps)),
        ("cos_angle".into(), fmt_f64(r.cos_angle)),
        ("mi".into(), r.mi.to_string()),
        ("hs_lower".into(), fmt_f64(r.hs_lower)),
        ("hs_upper".into(), r.hs_upper.to_string()),
        ("hs_norm".into(), fmt_f64(r.hs_norm)),
        ("rank_a".into(), r.rank_a.to_string()),
        ("rank_b".into(), r.rank_b.to_string()),
        ("cond".into(), fmt_f64(r.cond)),
        ("ill_conditioned".into(), r.ill_conditioned.to_string()),
    ]
}

fn row_warnings(rows: &[ScanRow]) -> Vec<String> {
    let mut w = Vec::new();
    let ill: Vec<String> = rows
        .iter()
        .filter(|r| r.ill_conditioned)
        .map(|r| fmt_f64(r.eps))
        .collect();
    if !ill.is_empty() {
        w.push(format!("ill-conditioned rows at eps = {}", ill.join(", ")));
    }
    let skipped: Vec<String> = rows.iter().filter(|r| r.skipped).map(|r| fmt_f64(r.eps)).collect();
    if !skipped.is_empty() {
        w.push(format!("skipped rows (rank lost) at eps = {}", skipped.join(", ")));
    }
    w
}

fn fit_text(label: &str, f: &std::result::Result<ExponentFit, Error>) -> String {
    match f {
        Ok(f) => format!("{label} slope {:.4} (theory {:.4})", f.slope, f.theory_slope),
        Err(_) => format!("{label} slope unavailable"),
    }
}

fn table_report(table: &ScanTable, json: Value, summary: String, mut warnings: Vec<String>) -> Report {
    warnings.extend(row_warnings(&table.rows));
    Report {
        csv: scan_csv_string(table),
        json,
        summary,
        warnings,
    }
}

fn scan_config(s: &Settings) -> CmdResult<ScanConfig> {
    let mut cfg = ScanConfig::new(s.hurst()?, s.f64_or("t1", 0.0)?, s.f64_or("t2", 1.0)?);
    cfg.eps = s.schedule()?;
    cfg.grid_n = s.usize_or("n", cfg.grid_n)?;
    cfg.rtol = s.rtol()?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_cov(s: &Settings) -> CmdResult<Report> {
    let h = s.hurst()?;
    let (t1, t2) = (s.f64_or("t1", 0.0)?, s.f64_or("t2", 1.0)?);
    let r = fbm_cov(t1, t2, h);
    let mut params = vec![param("H", h.value()), param("t1", t1), param("t2", t2)];
    let mut record = vec![("cov".to_string(), fmt_f64(r))];
    let mut summary = format!("R_H({t1}, {t2}) = {}", fmt_f64(r));
    if s.raw("eps").is_some() {
        let e = s.single_eps(0.0)?;
        params.push(param("eps", e));
        let p = TimePair::new(t1 - e, t1 + e)?;
        let q = TimePair::new(t2 - e, t2 + e)?;
        let c = increment_cov(&p, &q, h);
        record.push(("increment_cov".into(), fmt_f64(c)));
        summary.push_str(&format!(", increment covariance {}", fmt_f64(c)));
    }
    let map: serde_json::Map<String, Value> = record
        .iter()
        .map(|(k, v)| (k.clone(), json!(v.parse::<f64>().ok())))
        .collect();
    Ok(Report {
        csv: record_csv(&params, &record),
        json: doc(&params, &map)?,
        summary,
        warnings: vec![],
    })
}

fn cmd_window(s: &Settings, mi: bool) -> CmdResult<Report> {
    let h = s.hurst()?;
    let (t1, t2) = (s.f64_or("t1", 0.0)?, s.f64_or("t2", 1.0)?);
    let eps = s.single_eps(0.125)?;
    let n = s.usize_or("n", 64)?;
    let rtol = s.rtol()?;
    let row = window_pair(h, t1, t2, eps, n, rtol)?;
    let params = vec![
        param("H", h.value()),
        param("t1", t1),
        param("t2", t2),
        param("eps", eps),
        param("n", n),
        param("rtol", rtol),
    ];
    let summary = if mi {
        format!("MI = {} (bounds [{}, {}])", row.mi, fmt_f64(row.hs_lower), row.hs_upper)
    } else {
        format!("cos angle = {}", fmt_f64(row.cos_angle))
    };
    Ok(Report {
        csv: record_csv(&params, &row_record(&row)),
        json: doc(&params, &row)?,
        summary,
        warnings: row_warnings(std::slice::from_ref(&row)),
    })
}

fn cmd_scan(s: &Settings) -> CmdResult<Report> {
    let cfg = scan_config(s)?;
    let table = local_independence_scan(&cfg)?;
    let h2 = cfg.h.two_h();
    let cos = fit_rows(&table.rows, Column::CosAngle, 2.0 - h2, None);
    let mi = fit_rows(&table.rows, Column::Mi, 4.0 - 2.0 * h2, None);
    let summary = format!(
        "{} rows; {}; {}",
        table.rows.len(),
        fit_text("cos", &cos),
        fit_text("MI", &mi)
    );
    let json = doc(&table.config, &table)?;
    Ok(table_report(&table, json, summary, vec![]))
}

fn cmd_thm21(s: &Settings) -> CmdResult<Report> {
    let cfg = scan_config(s)?;
    let r = theorem21_check(&cfg)?;
    let mut summary = format!(
        "slope_cos {:.4} (theory {:.4}), slope_MI {:.4} (theory {:.4}), r_H extrapolated {:.4}",
        r.cos_fit.slope, r.cos_fit.theory_slope, r.mi_fit.slope, r.mi_fit.theory_slope, r.r_h_extrapolated
    );
    if let Some(sp) = r.r_h_spectral {
        summary.push_str(&format!(" vs {sp:.4}"));
    }
    let mut warnings = vec![];
    if r.inconclusive {
        warnings.push("whitening truncated a Gram matrix; the constant comparison is inconclusive".into());
    }
    let json = doc(&r.table.config, &r)?;
    Ok(table_report(&r.table, json, summary, warnings))
}

fn truncation_warning(dominated: bool, sensitivity: f64) -> Vec<String> {
    if dominated {
        vec![format!(
            "slopes move by {sensitivity:.3} when T doubles; truncation dominates"
        )]
    } else {
        vec![]
    }
}

fn cmd_thm22(s: &Settings) -> CmdResult<Report> {
    let h = s.hurst()?;
    let r = theorem22_check(
        h,
        s.f64_or("t", 1.0)?,
        s.f64_or("T", 64.0)?,
        &s.schedule()?,
        s.usize_or("n", 64)?,
        s.rtol()?,
    )?;
    let summary = format!(
        "slope_cos {:.4} (theory {:.4}), slope_MI {:.4} (theory {:.4}), 2T sensitivity {:.2e}",
        r.fits[0].slope, r.fits[0].theory_slope, r.fits[1].slope, r.fits[1].theory_slope, r.sensitivity
    );
    let json = doc(&r.table.config, &r)?;
    Ok(table_report(
        &r.table,
        json,
        summary,
        truncation_warning(r.truncation_dominated, r.sensitivity),
    ))
}

fn cmd_complement(s: &Settings) -> CmdResult<Report> {
    let h = s.hurst()?;
    let r = complement_window_scan(
        h,
        s.f64_or("t1", 0.0)?,
        s.f64_or("t", 1.0)?,
        s.f64_or("t2", 2.0)?,
        &s.schedule()?,
        s.f64_or("T", 64.0)?,
        s.usize_or("n", 64)?,
        s.rtol()?,
    )?;
    let summary = format!(
        "slope_HS {:.4} (theory {:.4}), slope_MI {:.4} (theory {:.4}), 2T sensitivity {:.2e}",
        r.fits[0].slope, r.fits[0].theory_slope, r.fits[1].slope, r.fits[1].theory_slope, r.sensitivity
    );
    let json = doc(&r.table.config, &r)?;
    Ok(table_report(
        &r.table,
        json,
        summary,
        truncation_warning(r.truncation_dominated, r.sensitivity),
    ))
}

fn cmd_adjacency(s: &Settings) -> CmdResult<Report> {
    let h = s.hurst()?;
    let max = s.usize_or("n", 256)?;
    if max < 8 {
        return Err(invalid(format!(
            "--n is the largest increment count and must be at least 8, got {max}"
        )));
    }
    let ns: Vec<usize> = std::iter::successors(Some(4usize), |n| Some(n * 2))
        .take_while(|n| *n <= max)
        .collect();
    let r = adjacency_divergence(h, s.single_eps(1.0)?, &ns, s.rtol()?)?;
    let mut buf = Vec::new();
    write_adjacency_csv(&r, &mut buf)?;
    let summary = format!(
        "MI {} -> {} over n = {}..{}; strictly increasing {}, min growth {}",
        r.rows.first().map(|x| x.mi.to_string()).unwrap_or_default(),
        r.rows.last().map(|x| x.mi.to_string()).unwrap_or_default(),
        ns[0],
        ns[ns.len() - 1],
        r.strictly_increasing,
        r.min_growth.map_or("n/a".into(), |g| format!("{:.2}%", 100.0 * g))
    );
    let mut warnings = vec![];
    if r.rows.iter().any(|x| x.ill_conditioned) {
        warnings.push("ill-conditioned rows present".into());
    }
    Ok(Report {
        csv: String::from_utf8(buf).expect("CSV is ASCII"),
        json: doc(&r.config, &r)?,
        summary,
        warnings,
    })
}

fn cmd_pastfuture(s: &Settings) -> CmdResult<Report> {
    let h = s.hurst()?;
    let (t, n, rtol) = (s.f64_or("T", 16.0)?, s.usize_or("n", 128)?, s.rtol()?);
    let p = past_future_study(h, t, n, rtol)?;
    let params = vec![param("H", h.value()), param("T", t), param("n", n), param("rtol", rtol)];
    let mut record = Vec::new();
    for (label, c) in [
        ("base", &p.base),
        ("doubled_n", &p.doubled_n),
        ("doubled_T", &p.doubled_t),
        ("doubled_both", &p.doubled_both),
    ] {
        record.push((format!("cos_{label}"), fmt_f64(c.cos_angle)));
    }
    record.push(("drift".into(), fmt_f64(p.drift)));
    let summary = format!(
        "cos angle {:.6}, drift under doubling {:.3}%",
        p.base.cos_angle,
        100.0 * p.drift
    );
    let mut warnings = vec![];
    if [&p.base, &p.doubled_n, &p.doubled_t, &p.doubled_both]
        .iter()
        .any(|c| c.ill_conditioned)
    {
        warnings.push("ill-conditioned Gram matrices".into());
    }
    Ok(Report {
        csv: record_csv(&params, &record),
        json: doc(&params, &p)?,
        summary,
        warnings,
    })
}

fn cmd_levy2d(s: &Settings) -> CmdResult<Report> {
    let h = s.hurst()?;
    let c1 = Point::new(vec![s.f64_or("t1", 0.0)?, 0.0])?;
    let c2 = Point::new(vec![s.f64_or("t2", 1.0)?, 0.0])?;
    let r = levy2d_scan(h, &c1, &c2, &s.schedule()?, s.usize_or("n", 9)?, s.rtol()?)?;
    let summary = format!("slope_cos {:.4} (theory {:.4})", r.fit.slope, r.fit.theory_slope);
    let json = doc(&r.table.config, &r)?;
    Ok(table_report(&r.table, json, summary, vec![]))
}

fn cmd_constants(s: &Settings) -> CmdResult<Report> {
    let h = s.hurst()?;
    let a = a_h_constant(h);
    let r = r_h_spectral(h)?;
    let full = r_h_full_line(h)?;
    let params = vec![param("H", h.value())];
    let record = vec![
        ("a_H".to_string(), fmt_f64(a)),
        ("r_H".to_string(), fmt_f64(r)),
        ("r_H_full_line".to_string(), fmt_f64(full)),
    ];
    Ok(Report {
        csv: record_csv(&params, &record),
        json: doc(&params, &json!({ "a_H": a, "r_H": r, "r_H_full_line": full }))?,
        summary: format!("a_H = {}, r_H = {}", fmt_f64(a), fmt_f64(r)),
        warnings: vec![],
    })
}

fn cmd_sample(s: &Settings, out: Option<&Path>) -> CmdResult<Report> {
    let h = s.hurst()?;
    let n = s.usize_or("n", 1024)?;
    let m = s.usize_or("m", 1000)?;
    let dt = s.f64_or("dt", 1.0)?;
    let seed = s.parse::<u64>("seed", "a nonnegative integer")?.unwrap_or(0);
    let paths = sample_fbm_increments(n, dt, h, m, seed)?;
    let mut params = vec![
        param("H", h.value()),
        param("n", n),
        param("m", m),
        param("dt", dt),
        param("seed", seed),
    ];
    let var = marginal_variance(&paths);
    let mut record = vec![
        (
            "method".to_string(),
            serde_json::to_string(&paths.method)
                .unwrap_or_default()
                .replace(',', ";"),
        ),
        ("variance".to_string(), fmt_f64(var.value)),
        ("variance_se".to_string(), fmt_f64(var.std_error)),
        ("variance_target".to_string(), fmt_f64(dt.powf(h.two_h()))),
    ];
    let mut summary = format!(
        "{m} paths of {n} increments; variance {:.5} (target {:.5})",
        var.value,
        dt.powf(h.two_h())
    );
    if n >= 2 && m >= 2 {
        let lag = lag_correlation(&paths, 1)?;
        let target = 2f64.powf(h.two_h() - 1.0) - 1.0;
        record.push(("lag1".into(), fmt_f64(lag.value)));
        record.push(("lag1_se".into(), fmt_f64(lag.std_error)));
        record.push(("lag1_target".into(), fmt_f64(target)));
        summary.push_str(&format!(
            "; lag-1 correlation {:.5} +- {:.1e} (target {:.5})",
            lag.value, lag.std_error, target
        ));
    }
    if let Some(split) = s.parse::<usize>("split", "an index")? {
        params.push(param("split", split));
        let c = empirical_mi_check(&paths, split, h)?;
        record.push(("mi_empirical".into(), fmt_f64(c.empirical)));
        record.push(("mi_analytic".into(), fmt_f64(c.analytic)));
        record.push(("mi_bias_order".into(), fmt_f64(c.bias_order)));
        summary.push_str(&format!(
            "; MI {:.5} vs analytic {:.5} (plug-in bias order {:.1e})",
            c.empirical, c.analytic, c.bias_order
        ));
    }
    if let Some(bin) = out {
        let side = write_raw(&paths, bin)?;
        summary.push_str(&format!("; wrote {} and {}", bin.display(), side.display()));
    }
    let map: serde_json::Map<String, Value> = record.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    Ok(Report {
        csv: record_csv(&params, &record),
        json: doc(&params, &map)?,
        summary,
        warnings: vec![],
    })
}

fn cmd_check_all(s: &Settings) -> CmdResult<i32> {
    let only: Vec<String> = s
        .raw("only")
        .map(|o| {
            o.split(',')
                .map(|x| x.trim().to_string())
                .filter(|x| !x.is_empty())
                .collect()
        })
        .unwrap_or_default();
    let ids = checks::select(&only).map_err(invalid)?;
    let report = checks::run_checks(&ids, |c| println!("{}", c.line()));
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} checks passed in {:.1}s",
        report.checks.len() - failed,
        report.checks.len(),
        report.seconds
    );
    if let Some(path) = s.raw("json") {
        let text = serde_json::to_string_pretty(&json!({ "config": { "only": only }, "result": report }))
            .map_err(|e| Failure::Numerical(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| invalid(format!("cannot write {path}: {e}")))?;
    }
    Ok(if failed == 0 { 0 } else { 2 })
}

fn emit(s: &Settings, report: Report, data: bool) -> CmdResult<i32> {
    let body = if s.json_output()? {
        serde_json::to_string_pretty(&report.json).map_err(|e| Failure::Numerical(e.to_string()))? + "\n"
    } else {
        report.csv
    };
    let to_file = s.raw("out");
    match to_file {
        Some(path) if data => {
            std::fs::write(path, body).map_err(|e| invalid(format!("cannot write {path}: {e}")))?;
            println!("{}", report.summary);
        }
        Some(_) => println!("{}", report.summary),
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(body.as_bytes());
            let _ = out.flush();
            eprintln!("{}", report.summary);
        }
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if s.strict && !report.warnings.is_empty() { 2 } else { 0 })
}

fn dispatch(name: &'static str, opts: &Opts) -> CmdResult<i32> {
    let s = Settings::resolve(name, opts)?;
    let threads = s.parse::<usize>("threads", "a positive integer")?;
    let run = || -> CmdResult<i32> {
        if name == "check-all" {
            return cmd_check_all(&s);
        }
        let out = s.raw("out").map(PathBuf::from);
        let report = match name {
            "cov" => cmd_cov(&s)?,
            "angle" => cmd_window(&s, false)?,
            "mi" => cmd_window(&s, true)?,
            "scan" => cmd_scan(&s)?,
            "thm21" => cmd_thm21(&s)?,
            "thm22" => cmd_thm22(&s)?,
            "adjacency" => cmd_adjacency(&s)?,
            "pastfuture" => cmd_pastfuture(&s)?,
            "complement" => cmd_complement(&s)?,
            "levy2d" => cmd_levy2d(&s)?,
            "constants" => cmd_constants(&s)?,
            "sample" => cmd_sample(&s, out.as_deref())?,
            _ => unreachable!("clap only yields known commands"),
        };
        // for `sample`, --out names the raw binary export instead
        emit(&s, report, name != "sample")
    };
    match threads {
        None => run(),
        Some(0) => Err(invalid("--threads must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Failure::Numerical(format!("cannot start thread pool: {e}")))?
            .install(run),
    }
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (name, opts) = match &cli.command {
        Command::Cov(o) => ("cov", o),
        Command::Angle(o) => ("angle", o),
        Command::Mi(o) => ("mi", o),
        Command::Scan(o) => ("scan", o),
        Command::Thm21(o) => ("thm21", o),
        Command::Thm22(o) => ("thm22", o),
        Command::Adjacency(o) => ("adjacency", o),
        Command::Pastfuture(o) => ("pastfuture", o),
        Command::Complement(o) => ("complement", o),
        Command::Levy2d(o) => ("levy2d", o),
        Command::Constants(o) => ("constants", o),
        Command::Sample(o) => ("sample", o),
        Command::CheckAll(o) => ("check-all", o),
    };
    match dispatch(name, opts) {
        Ok(code) => code,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = parse_config("# comment\nH = 0.7\n\nt2=3 # trailing\n").unwrap();
        assert_eq!(c, vec![("H".into(), "0.7".into()), ("t2".into(), "3".into())]);
        assert!(parse_config("H 0.7").is_err());
        assert!(parse_config("=1").is_err());
    }

    #[test]
    fn flags_are_checked_per_command() {
        let opts = Opts {
            h: Some("0.5".into()),
            seed: Some("3".into()),
            ..Default::default()
        };
        assert!(matches!(
            Settings::resolve("constants", &opts),
            Err(Failure::Validation(_))
        ));
        assert!(Settings::resolve("sample", &opts).is_ok());
        assert!(KEYS.iter().all(|k| COMMON.contains(k)
            || ["cov", "angle", "thm22", "complement", "sample", "check-all"]
                .iter()
                .any(|c| command_keys(c).contains(k))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["fbm-local", "constants", "--H", "0.5"]), 0);
        assert_eq!(run(["fbm-local", "constants", "--H", "1.5"]), 1);
        assert_eq!(run(["fbm-local", "constants"]), 1);
    }
}
