//! Figure data and CSV/JSON output.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{ConjectureScan, PrimeApproximation};
use crate::search::{Approximation, SearchConfig, SearchReport, Source, EULER_GAMMA};

/// One row of the cumulative-count figure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigurePoint {
    pub b: u64,
    /// Hits with denominator at most `b`.
    pub observed: u64,
    /// `1 + 2 ln b`.
    pub curve_simple: f64,
    /// `2c(gamma + ln b)`.
    pub curve_full: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureSeries {
    pub points: Vec<FigurePoint>,
}

fn point(b: u64, observed: u64, c: f64) -> FigurePoint {
    let ln_b = (b as f64).ln();
    FigurePoint {
        b,
        observed,
        curve_simple: 1.0 + 2.0 * ln_b,
        curve_full: 2.0 * c * (EULER_GAMMA + ln_b),
    }
}

/// Cumulative hit counts at each hit and at `b = 1` and `b = max_b`.
pub fn build_figure_series(report: &SearchReport, cfg: &SearchConfig) -> FigureSeries {
    let c = cfg.c.to_f64().unwrap_or(f64::NAN);
    let mut bs: Vec<u64> = report.approximations.iter().map(|a| a.b).collect();
    bs.sort_unstable();
    let mut points = Vec::with_capacity(bs.len() + 2);
    let mut push = |b: u64, observed: u64| match points.last_mut() {
        Some(FigurePoint { b: last, observed: o, .. }) if *last == b => *o = observed,
        _ => points.push(point(b, observed, c)),
    };
    push(1, bs.iter().take_while(|&&b| b <= 1).count() as u64);
    for (i, &b) in bs.iter().enumerate().filter(|(_, &b)| b <= cfg.max_b) {
        push(b, i as u64 + 1);
    }
    let total = bs.iter().filter(|&&b| b <= cfg.max_b).count() as u64;
    push(cfg.max_b.max(1), total);
    FigureSeries { points }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidConfig(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

/// Something `emit` can write.
pub enum Output<'a> {
    Search(&'a SearchReport),
    Approximations(&'a [Approximation]),
    Figure(&'a FigureSeries),
    Primes(&'a ConjectureScan),
}

pub const SEARCH_COLUMNS: &str = "b,a,alpha,source,Q,quality,reduced";
pub const PRIMES_COLUMNS: &str = "Q,P,alpha,p,a,quality,alpha_over_lnQ";
pub const FIGURE_COLUMNS: &str = "b,observed,curve_simple,curve_full";

fn approximation_row(out: &mut String, a: &Approximation) {
    let q = match &a.source {
        Source::Brute => String::new(),
        Source::Convergent { q, .. } => q.to_string(),
    };
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        a.b,
        a.a,
        a.alpha,
        a.source.label(),
        q,
        a.quality,
        a.reduced
    );
}

fn prime_row(out: &mut String, h: &PrimeApproximation) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{}",
        h.conv_q, h.conv_p, h.alpha, h.p, h.a, h.quality, h.alpha_over_ln_q
    );
}

impl Output<'_> {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Output::Search(r) => {
                out.push_str(SEARCH_COLUMNS);
                out.push('\n');
                r.approximations.iter().for_each(|a| approximation_row(&mut out, a));
            }
            Output::Approximations(v) => {
                out.push_str(SEARCH_COLUMNS);
                out.push('\n');
                v.iter().for_each(|a| approximation_row(&mut out, a));
            }
            Output::Figure(f) => {
                out.push_str(FIGURE_COLUMNS);
                out.push('\n');
                for p in &f.points {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        p.b, p.observed, p.curve_simple, p.curve_full
                    );
                }
            }
            Output::Primes(s) => {
                out.push_str(PRIMES_COLUMNS);
                out.push('\n');
                s.approximations.iter().for_each(|h| prime_row(&mut out, h));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let v = match self {
            Output::Search(r) => serde_json::to_string_pretty(r),
            Output::Approximations(v) => serde_json::to_string_pretty(v),
            Output::Figure(f) => serde_json::to_string_pretty(f),
            Output::Primes(s) => serde_json::to_string_pretty(s),
        };
        let mut s = v.expect("report types serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Write to `dest`, or standard output when `None`.
pub fn emit(output: &Output<'_>, format: Format, dest: Option<&Path>) -> Result<()> {
    let text = output.render(format);
    match dest {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(path, e))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| io_error(path, e))
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> Error {
    Error::Io {
        path: PathBuf::from(path).display().to_string(),
        message: e.to_string(),
    }
}
