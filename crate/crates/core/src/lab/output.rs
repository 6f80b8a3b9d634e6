//! CSV and JSON serialization of scan results.
//!
//! CSV: comma separated, '.' decimal, LF line endings, floats in shortest
//! round-trip form, "inf" for infinite information, and the full parameter
//! set as leading '#' comment lines.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::experiments::AdjacencyReport;
use super::scan::{Params, ScanTable};
use crate::error::Result;
use crate::geometry::MiValue;

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

fn fmt_mi(v: MiValue) -> String {
    match v {
        MiValue::Finite(x) => fmt_f64(x),
        MiValue::Infinite => "inf".into(),
    }
}

pub fn write_comments<W: Write>(w: &mut W, params: &Params) -> Result<()> {
    for (k, v) in params {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        writeln!(w, "# {k}={shown}")?;
    }
    Ok(())
}

pub const SCAN_HEADER: &str =
    "eps,cos_angle,mi,hs_lower,hs_upper,hs_norm,rank_a,rank_b,dim_a,dim_b,cond,ill_conditioned,skipped";

pub fn write_scan_csv<W: Write>(table: &ScanTable, w: &mut W) -> Result<()> {
    write_comments(w, &table.config)?;
    writeln!(w, "{SCAN_HEADER}")?;
    for r in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.eps),
            fmt_f64(r.cos_angle),
            fmt_mi(r.mi),
            fmt_f64(r.hs_lower),
            fmt_mi(r.hs_upper),
            fmt_f64(r.hs_norm),
            r.rank_a,
            r.rank_b,
            r.dim_a,
            r.dim_b,
            fmt_f64(r.cond),
            r.ill_conditioned,
            r.skipped
        )?;
    }
    Ok(())
}

pub fn scan_csv_string(table: &ScanTable) -> String {
    let mut buf = Vec::new();
    write_scan_csv(table, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

pub fn write_adjacency_csv<W: Write>(report: &AdjacencyReport, w: &mut W) -> Result<()> {
    write_comments(w, &report.config)?;
    writeln!(w, "n,cos_angle,mi,growth,ill_conditioned")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.n,
            fmt_f64(r.cos_angle),
            fmt_mi(r.mi),
            r.growth.map_or_else(String::new, fmt_f64),
            r.ill_conditioned
        )?;
    }
    Ok(())
}

/// Key/value CSV for scalar results.
pub fn write_record_csv<W: Write>(params: &Params, record: &[(String, String)], w: &mut W) -> Result<()> {
    write_comments(w, params)?;
    writeln!(w, "key,value")?;
    for (k, v) in record {
        writeln!(w, "{k},{v}")?;
    }
    Ok(())
}

pub fn params_json(params: &Params) -> Value {
    let mut m = Map::new();
    for (k, v) in params {
        m.insert(k.clone(), v.clone());
    }
    Value::Object(m)
}

/// `{"config": {...}, "result": ...}`.
pub fn json_document<T: Serialize>(params: &Params, result: &T) -> Result<Value> {
    let body = serde_json::to_value(result).map_err(|e| crate::error::Error::Io(e.to_string()))?;
    Ok(json!({ "config": params_json(params), "result": body }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Hurst;
    use crate::lab::scan::{local_independence_scan, ScanConfig};

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(1e-20), "0.00000000000000000001");
        let x = 0.123_456_789_012_345_68_f64;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn scan_csv_layout() {
        let mut c = ScanConfig::new(Hurst::new(0.7).unwrap(), 0.0, 1.0);
        c.grid_n = 8;
        c.eps = vec![0.25, 0.125];
        let t = local_independence_scan(&c).unwrap();
        let s = scan_csv_string(&t);
        assert!(!s.contains('\r'));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# H=0.7");
        assert!(lines.contains(&SCAN_HEADER));
        assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 3);
        let header_cols = SCAN_HEADER.split(',').count();
        assert!(lines
            .iter()
            .filter(|l| !l.starts_with('#'))
            .all(|l| l.split(',').count() == header_cols));
        let doc = json_document(&t.config, &t).unwrap();
        assert_eq!(doc["config"]["n"], 8);
        assert_eq!(doc["result"]["rows"].as_array().unwrap().len(), 2);
    }
}
