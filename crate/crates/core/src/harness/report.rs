//! CSV serialization of replicate rows and per-horizon summaries.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::stats::{KsResult, Moments};

pub const ROW_HEADER: &str = "t,replicate,N,Z,S1,S2,S1_norm,S2_norm,censored";
pub const SUMMARY_HEADER: &str =
    "t,replicates,censored,censoring_rate,ks1,ks2,ks_critical_99,mean1,var1,mean2,var2,corr";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowHorizon {
    Finite(f64),
    /// Draw from the limit law.
    Limit,
}

/// One finite-horizon replicate or one limit draw.
///
/// Limit rows leave `N`, `S1` and `S2` empty and carry the draw in the
/// normalized columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub t: RowHorizon,
    pub replicate: u64,
    pub n: Option<u64>,
    pub z: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub s1_norm: Option<f64>,
    pub s2_norm: Option<f64>,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonSummary {
    pub t: f64,
    pub replicates: usize,
    pub censored: usize,
    /// Two-sample KS of the normalized treaties against the limit draws.
    pub ks1: Option<KsResult>,
    pub ks2: Option<KsResult>,
    pub moments1: Option<Moments>,
    pub moments2: Option<Moments>,
    pub corr: Option<f64>,
}

impl HorizonSummary {
    pub fn censoring_rate(&self) -> f64 {
        self.censored as f64 / self.replicates as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LimitSummary {
    pub draws: usize,
    pub moments1: Option<Moments>,
    pub moments2: Option<Moments>,
    pub corr: Option<f64>,
    /// Why no limit sample was drawn, if none was.
    pub unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub horizons: Vec<HorizonSummary>,
    pub limit: LimitSummary,
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(v: f64) -> String {
    let plain = v.to_string();
    if plain.len() > 24 {
        format!("{v:e}")
    } else {
        plain
    }
}

fn opt_float(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

pub fn format_rows(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(ROW_HEADER);
    out.push('\n');
    for r in rows {
        let t = match r.t {
            RowHorizon::Finite(t) => format_float(t),
            RowHorizon::Limit => "limit".to_string(),
        };
        let n = r.n.map(|n| n.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{t},{},{n},{},{},{},{},{},{}",
            r.replicate,
            opt_float(r.z),
            opt_float(r.s1),
            opt_float(r.s2),
            opt_float(r.s1_norm),
            opt_float(r.s2_norm),
            r.censored
        );
    }
    out
}

pub fn format_summary(summary: &Summary) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    let ks = |k: &Option<KsResult>| opt_float(k.map(|k| k.statistic));
    let mean = |m: &Option<Moments>| opt_float(m.map(|m| m.mean));
    let var = |m: &Option<Moments>| opt_float(m.map(|m| m.variance));
    for h in &summary.horizons {
        let critical = h.ks1.or(h.ks2).map(|k| k.critical_99);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            format_float(h.t),
            h.replicates,
            h.censored,
            format_float(h.censoring_rate()),
            ks(&h.ks1),
            ks(&h.ks2),
            opt_float(critical),
            mean(&h.moments1),
            var(&h.moments1),
            mean(&h.moments2),
            var(&h.moments2),
            opt_float(h.corr)
        );
    }
    let l = &summary.limit;
    let _ = writeln!(
        out,
        "limit,{},0,0,,,,{},{},{},{},{}",
        l.draws,
        mean(&l.moments1),
        var(&l.moments1),
        mean(&l.moments2),
        var(&l.moments2),
        opt_float(l.corr)
    );
    out
}

fn field_error(line: usize, column: &str, value: &str) -> Error {
    Error::Parse(format!("line {line}: bad `{column}` value `{value}`"))
}

fn parse_opt<T: std::str::FromStr>(field: &str, line: usize, column: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| field_error(line, column, field))
}

/// Reads back the output of [`format_rows`].
pub fn parse_rows(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(ROW_HEADER) => {}
        other => {
            return Err(Error::Parse(format!(
                "line 1: expected header `{ROW_HEADER}`, got `{}`",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 9 {
                return Err(Error::Parse(format!(
                    "line {line}: expected 9 fields, got {}",
                    f.len()
                )));
            }
            let t = if f[0] == "limit" {
                RowHorizon::Limit
            } else {
                RowHorizon::Finite(f[0].parse().map_err(|_| field_error(line, "t", f[0]))?)
            };
            Ok(ReportRow {
                t,
                replicate: f[1]
                    .parse()
                    .map_err(|_| field_error(line, "replicate", f[1]))?,
                n: parse_opt(f[2], line, "N")?,
                z: parse_opt(f[3], line, "Z")?,
                s1: parse_opt(f[4], line, "S1")?,
                s2: parse_opt(f[5], line, "S2")?,
                s1_norm: parse_opt(f[6], line, "S1_norm")?,
                s2_norm: parse_opt(f[7], line, "S2_norm")?,
                censored: f[8]
                    .parse()
                    .map_err(|_| field_error(line, "censored", f[8]))?,
            })
        })
        .collect()
}

/// `<path>.summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(".summary.csv");
    PathBuf::from(s)
}

/// Writes the rows to `path` and the summary next to it.
pub fn write_csv(rows: &[ReportRow], summary: &Summary, path: &Path) -> Result<()> {
    std::fs::write(path, format_rows(rows)).map_err(|e| Error::io(path, e))?;
    let sibling = summary_path(path);
    std::fs::write(&sibling, format_summary(summary)).map_err(|e| Error::io(&sibling, e))
}

pub fn read_rows(path: &Path) -> Result<Vec<ReportRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rows(&text)
}
