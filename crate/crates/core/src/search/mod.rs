//! Hybrid search for approximations `a/b^2` with `|xi - a/b^2| < c/b^3`.
//!
//! Small denominators are scanned directly. Beyond the cutoff each
//! convergent `P/Q` of `xi` contributes the roots `b` of
//! `P b^2 = alpha (mod Q)` for `|alpha| <= ceil(Q^alpha_exponent)`, kept
//! when `b <= ceil(Q^b_exponent)`. Then `a = (P b^2 - alpha)/Q` and
//!
//! ```text
//! |xi - a/b^2| <= |xi - P/Q| + |alpha| / (b^2 Q)
//! ```
//!
//! is only an upper bound, so every candidate is re-tested against the
//! enclosure of `xi` before it is reported.

mod certify;
mod config;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Exponent, SearchConfig};

use crate::cf::{expand_past_denominator, Convergent, DEFAULT_PRECISION_CEILING};
use crate::error::{Error, Result};
use crate::modular::{factorize_with_budget, solve_quadratic_congruence_bounded, MAX_MODULUS};
use crate::realnum::{certified_compare, default_digits, make_real, Certified, PrecisionReal, RealSpec};
use crate::serde_str;
pub(crate) use certify::escalate;
use certify::{lower_f64, nearest_numerator, pair_quality, scan_b, Scan};

/// Euler's constant, for the expected-count curves.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const BRUTE_CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    Brute,
    Convergent {
        index: usize,
        #[serde(with = "serde_str")]
        p: BigInt,
        // tagged enums buffer their fields, which cannot hold a u128
        #[serde(with = "serde_str")]
        q: u128,
    },
}

impl Source {
    pub fn label(&self) -> &'static str {
        match self {
            Source::Brute => "brute",
            Source::Convergent { .. } => "convergent",
        }
    }

    pub fn q(&self) -> Option<u128> {
        match self {
            Source::Brute => None,
            Source::Convergent { q, .. } => Some(*q),
        }
    }
}

/// A certified approximation `a/b^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub b: u64,
    #[serde(with = "serde_str")]
    pub a: BigInt,
    /// `P b^2 - a Q`; zero for direct-scan finds.
    pub alpha: i128,
    pub source: Source,
    /// Certified upper bound on `|xi - a/b^2| b^3`, rounded up to `f64`.
    pub quality: f64,
    /// `gcd(a, b^2) = 1`.
    pub reduced: bool,
}

impl Approximation {
    fn new(b: u64, a: BigInt, alpha: i128, source: Source, quality: f64) -> Self {
        let b2 = BigInt::from(u128::from(b) * u128::from(b));
        let reduced = a.gcd(&b2).is_one();
        Approximation {
            b,
            a,
            alpha,
            source,
            quality,
            reduced,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConvergentStatus {
    Complete,
    /// Some congruence hit the root cap.
    Truncated,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergentStats {
    pub index: usize,
    #[serde(with = "serde_str")]
    pub p: BigInt,
    #[serde(with = "serde_str")]
    pub q: BigInt,
    /// `ceil(Q^alpha_exponent)`.
    pub alpha_bound: u128,
    pub congruences_solved: u64,
    /// Band `(band_lo, band_hi]` of denominators covered.
    pub band_lo: u64,
    pub band_hi: u64,
    pub roots_in_band: u64,
    pub hits: u64,
    pub status: ConvergentStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergentOutcome {
    pub stats: ConvergentStats,
    pub hits: Vec<Approximation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub hits: u64,
    pub brute_hits: u64,
    pub convergent_hits: u64,
    pub convergents_processed: u64,
    pub congruences_solved: u64,
    #[serde(with = "serde_str")]
    pub max_q: BigInt,
    /// Every `b <= max_b` was covered by a completed band.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub xi: RealSpec,
    pub config: SearchConfig,
    pub approximations: Vec<Approximation>,
    pub convergents: Vec<ConvergentStats>,
    /// `(b, 2c(gamma + ln b))` at each hit and at `max_b`.
    pub expected_curve: Vec<(u64, f64)>,
    pub totals: Totals,
}

/// Direct scan of `b = 1..=max_b` with the nearest numerator for each `b`.
pub fn brute_force_scan(spec: &RealSpec, max_b: u64, c: &BigRational) -> Result<Vec<Approximation>> {
    let real = make_real(spec, default_digits(&BigInt::from(max_b)))?;
    brute_force_range(spec, &real, 1, max_b, c, DEFAULT_PRECISION_CEILING)
}

fn brute_force_range(
    spec: &RealSpec,
    real: &PrecisionReal,
    first: u64,
    last: u64,
    c: &BigRational,
    ceiling: u32,
) -> Result<Vec<Approximation>> {
    if last < first {
        return Ok(Vec::new());
    }
    let chunks = (last - first) / BRUTE_CHUNK + 1;
    let parts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let lo = first + k * BRUTE_CHUNK;
            let hi = (lo + BRUTE_CHUNK - 1).min(last);
            let mut out = Vec::new();
            for b in lo..=hi {
                let bb = BigInt::from(b);
                let scan = escalate(
                    spec,
                    real,
                    ceiling,
                    || format!("direct scan undecided at b = {b}"),
                    |r| scan_b(r, &bb, c),
                )?;
                if let Scan::Hit { a, quality } = scan {
                    out.push(Approximation::new(b, a, 0, Source::Brute, quality));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Congruence search on one convergent.
pub fn convergent_search(
    spec: &RealSpec,
    real: &PrecisionReal,
    conv: &Convergent,
    cfg: &SearchConfig,
) -> Result<ConvergentOutcome> {
    let alpha_bound = cfg.alpha_exponent.ceil_pow(&conv.q);
    let band_top = cfg.b_exponent.ceil_pow(&conv.q);
    let band_hi = band_top.to_u64().unwrap_or(u64::MAX).min(cfg.max_b);
    let mut stats = ConvergentStats {
        index: conv.index,
        p: conv.p.clone(),
        q: conv.q.clone(),
        alpha_bound: alpha_bound.to_u128().unwrap_or(u128::MAX),
        congruences_solved: 0,
        band_lo: cfg.brute_cutoff,
        band_hi,
        roots_in_band: 0,
        hits: 0,
        status: ConvergentStatus::Complete,
    };
    let skip = |mut stats: ConvergentStats, reason: String| {
        stats.status = ConvergentStatus::Skipped { reason };
        Ok(ConvergentOutcome {
            stats,
            hits: Vec::new(),
        })
    };

    let (Some(q), Some(p)) = (conv.q.to_u128(), conv.p.to_i128()) else {
        return skip(stats, "convergent exceeds 128-bit arithmetic".into());
    };
    if q > MAX_MODULUS {
        return skip(stats, format!("modulus {q} exceeds 2^126"));
    }
    let Some(alpha_max) = alpha_bound.to_i128() else {
        return skip(stats, "alpha range exceeds 128-bit arithmetic".into());
    };
    let qf = match factorize_with_budget(q, cfg.rho_budget) {
        Ok(f) => f,
        Err(e) => return skip(stats, e.to_string()),
    };

    let band_lo = cfg.brute_cutoff;
    let per_alpha = (-alpha_max..=alpha_max)
        .into_par_iter()
        .map(|alpha| -> Result<(u64, bool, Vec<Approximation>)> {
            let roots = solve_quadratic_congruence_bounded(
                p,
                alpha,
                &qf,
                Some(u128::from(band_hi)),
                cfg.root_cap,
            )?;
            let mut in_band = 0;
            let mut hits = Vec::new();
            for &b in roots.roots.iter().filter(|&&b| b > u128::from(band_lo)) {
                in_band += 1;
                let b = b as u64;
                if let Some(hit) = certify_candidate(spec, real, conv, q, alpha, b, cfg)? {
                    hits.push(hit);
                }
            }
            Ok((in_band, roots.truncated, hits))
        })
        .collect::<Result<Vec<_>>>();
    let per_alpha = match per_alpha {
        Ok(v) => v,
        Err(e @ Error::PrecisionCeiling { .. }) => return skip(stats, e.to_string()),
        Err(e) => return Err(e),
    };

    let mut hits = Vec::new();
    for (in_band, truncated, h) in per_alpha {
        stats.congruences_solved += 1;
        stats.roots_in_band += in_band;
        if truncated {
            stats.status = ConvergentStatus::Truncated;
        }
        hits.extend(h);
    }
    hits.sort_by(|x, y| (x.b, &x.a).cmp(&(y.b, &y.a)));
    stats.hits = hits.len() as u64;
    Ok(ConvergentOutcome { stats, hits })
}

fn certify_candidate(
    spec: &RealSpec,
    real: &PrecisionReal,
    conv: &Convergent,
    q: u128,
    alpha: i128,
    b: u64,
    cfg: &SearchConfig,
) -> Result<Option<Approximation>> {
    let bb = BigInt::from(b);
    let num = &conv.p * &bb * &bb - BigInt::from(alpha);
    let (a, rem) = num.div_rem(&BigInt::from(q));
    debug_assert!(rem.is_zero(), "P b^2 - alpha must be divisible by Q");
    if !rem.is_zero() {
        return Ok(None);
    }
    let verdict = escalate(
        spec,
        real,
        cfg.precision_ceiling,
        || format!("candidate b = {b} undecided"),
        |r| {
            let pq = pair_quality(r, &a, &bb);
            match certified_compare(&pq.quality, &cfg.c) {
                Certified::Below => {
                    // The reported numerator must be the nearest one.
                    let nearest = nearest_numerator(r, &(&bb * &bb))?;
                    Some((nearest == a).then(|| pq.quality.hi_f64_up()))
                }
                Certified::Above | Certified::Equal => Some(None),
                Certified::Undecidable => None,
            }
        },
    )?;
    Ok(verdict.map(|quality| {
        Approximation::new(
            b,
            a,
            alpha,
            Source::Convergent {
                index: conv.index,
                p: conv.p.clone(),
                q,
            },
            quality,
        )
    }))
}

/// Largest convergent denominator `full_search` uses: the least `Q` with
/// `Q^(1 - alpha_exp) >= B`, and never below the one whose band reaches `B`.
pub fn convergent_limit(cfg: &SearchConfig) -> BigInt {
    let max_b = BigInt::from(cfg.max_b);
    let (n, d) = (cfg.alpha_exponent.num(), cfg.alpha_exponent.den());
    let window = Exponent::new(d - n, d)
        .map(|e| e.inverse_ceil(&max_b))
        .unwrap_or_else(|_| max_b.clone());
    window.max(cfg.b_exponent.inverse_ceil(&max_b))
}

/// Direct scan up to the cutoff, then the congruence search on every
/// convergent with `Q <= convergent_limit(cfg)` whose band reaches past the
/// cutoff.
pub fn full_search(spec: &RealSpec, cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let max_b = BigInt::from(cfg.max_b);
    let real = make_real(spec, default_digits(&max_b).min(cfg.precision_ceiling))?;
    let brute = brute_force_range(spec, &real, 1, cfg.brute_cutoff, &cfg.c, cfg.precision_ceiling)?;

    // A hit at b shows up for Q with roughly Q^(1 - alpha_exp) <= b, so the
    // convergents run past the first whose band reaches B.
    let q_limit = convergent_limit(cfg);
    let expansion = expand_past_denominator(spec, &real, &q_limit, cfg.precision_ceiling)?;

    let mut covered = cfg.brute_cutoff;
    let mut outcomes = Vec::new();
    if covered < cfg.max_b {
        for conv in expansion.convergents() {
            if conv.q > q_limit {
                break;
            }
            let top = cfg.b_exponent.ceil_pow(&conv.q);
            if top <= BigInt::from(cfg.brute_cutoff) {
                continue;
            }
            let outcome = convergent_search(spec, &real, &conv, cfg)?;
            if outcome.stats.status == ConvergentStatus::Complete {
                covered = covered.max(outcome.stats.band_hi);
            }
            outcomes.push(outcome);
        }
    }

    let mut merged: BTreeMap<u64, Approximation> = BTreeMap::new();
    let brute_hits = brute.len() as u64;
    let mut convergent_hits = 0;
    for hit in brute
        .into_iter()
        .chain(outcomes.iter().flat_map(|o| o.hits.iter().cloned()))
    {
        if hit.source != Source::Brute {
            convergent_hits += 1;
        }
        match merged.get(&hit.b) {
            Some(old) if old.quality <= hit.quality => {}
            _ => {
                merged.insert(hit.b, hit);
            }
        }
    }
    let approximations: Vec<Approximation> = merged.into_values().collect();

    let mut expected_curve: Vec<(u64, f64)> = approximations
        .iter()
        .map(|a| (a.b, expected_count(a.b, &cfg.c)))
        .collect();
    if expected_curve.last().map(|p| p.0) != Some(cfg.max_b) {
        expected_curve.push((cfg.max_b, expected_count(cfg.max_b, &cfg.c)));
    }

    let convergents: Vec<ConvergentStats> = outcomes.into_iter().map(|o| o.stats).collect();
    let all_complete = convergents
        .iter()
        .all(|s| s.status == ConvergentStatus::Complete);
    let totals = Totals {
        hits: approximations.len() as u64,
        brute_hits,
        convergent_hits,
        convergents_processed: convergents.len() as u64,
        congruences_solved: convergents.iter().map(|s| s.congruences_solved).sum(),
        max_q: convergents
            .iter()
            .map(|s| s.q.clone())
            .max()
            .unwrap_or_else(BigInt::one),
        complete: all_complete && covered >= cfg.max_b,
    };
    Ok(SearchReport {
        xi: spec.clone(),
        config: cfg.clone(),
        approximations,
        convergents,
        expected_curve,
        totals,
    })
}

/// Certified verdict on a single pair `(a, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub accepted: bool,
    /// `Below` when accepted; `Above` or `Equal` says how it failed.
    pub outcome: Certified,
    pub quality_lower: f64,
    pub quality_upper: f64,
    /// Sign of `xi - a/b^2`.
    pub sign: i8,
    /// `a` is the nearest integer to `b^2 xi`.
    pub nearest: bool,
    pub digits: u32,
}

pub fn verify_approximation(
    spec: &RealSpec,
    a: &BigInt,
    b: &BigInt,
    c: &BigRational,
) -> Result<Verification> {
    verify_with_ceiling(spec, a, b, c, DEFAULT_PRECISION_CEILING)
}

pub fn verify_with_ceiling(
    spec: &RealSpec,
    a: &BigInt,
    b: &BigInt,
    c: &BigRational,
    ceiling: u32,
) -> Result<Verification> {
    if !b.is_positive() {
        return Err(Error::InvalidConfig(format!("b = {b} must be positive")));
    }
    let base = make_real(spec, default_digits(b).min(ceiling))?;
    escalate(
        spec,
        &base,
        ceiling,
        || format!("verification of {a}/{b}^2 undecided"),
        |r| {
            let pq = pair_quality(r, a, b);
            let outcome = certified_compare(&pq.quality, c);
            let sign = pq.sign?;
            if outcome == Certified::Undecidable {
                return None;
            }
            let nearest = nearest_numerator(r, &(b * b))?;
            Some(Verification {
                accepted: outcome == Certified::Below,
                outcome,
                quality_lower: lower_f64(&pq.quality),
                quality_upper: pq.quality.hi_f64_up(),
                sign,
                nearest: &nearest == a,
                digits: r.digits(),
            })
        },
    )
}

/// Heuristic number of hits with `b <= max_b`: `2c(gamma + ln max_b)`.
pub fn expected_count(max_b: u64, c: &BigRational) -> f64 {
    let c = c.to_f64().unwrap_or(f64::NAN);
    2.0 * c * (EULER_GAMMA + (max_b as f64).ln())
}
