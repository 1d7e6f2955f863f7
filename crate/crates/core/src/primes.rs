//! Approximations `a/p` with `p` prime and `|xi - a/p| < c ln p / p^2`.
//!
//! For a convergent `P/Q` the linear congruence `P x = alpha (mod Q)` is
//! solved for small `|alpha|`; then `a = (P x - alpha)/Q` and
//!
//! ```text
//! |xi - a/x| <= |xi - P/Q| + |alpha| / (x Q)
//! ```
//!
//! A residue `x` in `[0, Q)` may be tiny, so the progression `x + jQ` is
//! scanned up to `Q^2` for a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{partial_quotients, Convergent, DEFAULT_PRECISION_CEILING};
use crate::error::{Error, Result};
use crate::modular::{gcd, is_probable_prime, solve_linear_congruence};
use crate::realnum::{
    default_digits, ln_enclosure, make_real, rational_to_f64_up, Enclosure, PrecisionReal,
    RealSpec,
};
use crate::search::escalate;
use crate::serde_str;

/// Default multiple of `ln Q` bounding `|alpha|`.
pub const DEFAULT_ALPHA_MAX_FACTOR: u32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeApproximation {
    pub p: u128,
    #[serde(with = "serde_str")]
    pub a: BigInt,
    pub alpha: i128,
    /// Index of the source convergent.
    pub index: usize,
    #[serde(rename = "P", with = "serde_str")]
    pub conv_p: BigInt,
    #[serde(rename = "Q")]
    pub conv_q: u128,
    /// Certified upper bound on `|xi - a/p| p^2 / ln p`, rounded up.
    pub quality: f64,
    /// `|alpha| / ln Q`.
    pub alpha_over_ln_q: f64,
    /// `p = x + jQ` with `x` in `[0, Q)`.
    pub j: u128,
}

impl PrimeApproximation {
    /// The prime lies beyond the residue range `[0, Q)`.
    pub fn extended(&self) -> bool {
        self.j > 0
    }
}

/// Signed values `0, 1, -1, 2, -2, ...` up to `|alpha| <= max`.
fn alpha_order(max: u64) -> impl Iterator<Item = i128> {
    std::iter::once(0).chain((1..=i128::from(max)).flat_map(|k| [k, -k]))
}

/// First prime `x + jQ <= Q^2` in the order of `alpha`, then `j`.
pub fn prime_denominator_search(
    spec: &RealSpec,
    conv: &Convergent,
    alpha_max: u64,
) -> Result<Option<PrimeApproximation>> {
    let q = conv
        .q
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("convergent denominator {} above 2^64", conv.q)))?;
    let q = u128::from(q);
    let limit = q * q;
    let p_red = conv.p.mod_floor(&BigInt::from(q)).to_i128().expect("residue below 2^64");

    for alpha in alpha_order(alpha_max) {
        let Some(sol) = solve_linear_congruence(p_red, alpha, q) else {
            continue;
        };
        let x = sol.x;
        let found = if gcd(x, q) > 1 {
            // every x + jQ shares that factor with Q
            is_probable_prime(x).then_some((x, 0))
        } else {
            let mut hit = None;
            let mut cand = x;
            let mut j = 0;
            while cand <= limit {
                if is_probable_prime(cand) {
                    hit = Some((cand, j));
                    break;
                }
                cand += q;
                j += 1;
            }
            hit
        };
        if let Some((p, j)) = found {
            return certify(spec, conv, q, alpha, p, j).map(Some);
        }
    }
    Ok(None)
}

fn certify(
    spec: &RealSpec,
    conv: &Convergent,
    q: u128,
    alpha: i128,
    p: u128,
    j: u128,
) -> Result<PrimeApproximation> {
    let pb = BigInt::from(p);
    let qb = BigInt::from(q);
    let num = &conv.p * &pb - alpha;
    let (a, rem) = num.div_rem(&qb);
    assert!(rem.is_zero(), "congruence identity failed for p = {p}");

    let base = make_real(spec, default_digits(&pb) + 10)?;
    let quality = escalate(
        spec,
        &base,
        DEFAULT_PRECISION_CEILING,
        || format!("quality of {a}/{p}"),
        |real| prime_quality(real, &a, &pb),
    )?;
    let ln_q = ln_enclosure(&qb, 30);
    let alpha_over_ln_q = if q > 1 {
        let abs = Enclosure::point(&BigRational::from_integer(BigInt::from(alpha.abs())));
        abs.div_positive(&ln_q).hi_f64_up()
    } else {
        f64::INFINITY
    };
    Ok(PrimeApproximation {
        p,
        a,
        alpha,
        index: conv.index,
        conv_p: conv.p.clone(),
        conv_q: q,
        quality,
        alpha_over_ln_q,
        j,
    })
}

/// `|p xi - a| p / ln p`, once its width is below `2^-40` of its size.
fn prime_quality(real: &PrecisionReal, a: &BigInt, p: &BigInt) -> Option<f64> {
    let delta = real.enclosure().mul_int(p).sub_int(a).abs().mul_int(p);
    let ln_p = ln_enclosure(p, real.digits());
    let q = delta.div_positive(&ln_p);
    let width = q.hi() - q.lo();
    if width * BigInt::from(1u64 << 40) > q.lo() && !q.is_point() {
        return None;
    }
    Some(q.hi_f64_up())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityStats {
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureSummary {
    pub convergents_scanned: usize,
    pub hits: usize,
    /// Convergents skipped because `Q^2` does not fit the prime test.
    pub skipped: Vec<usize>,
    pub max_alpha_over_ln_q: Option<f64>,
    pub mean_alpha_over_ln_q: Option<f64>,
    pub quality: Option<QualityStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureScan {
    pub xi: RealSpec,
    #[serde(with = "serde_str::ratio")]
    pub alpha_max_factor: BigRational,
    pub approximations: Vec<PrimeApproximation>,
    pub summary: ConjectureSummary,
}

/// `ceil(factor · ln Q)`, at least 1.
pub fn alpha_max_for(q: &BigInt, factor: &BigRational) -> u64 {
    let ln_q = ln_enclosure(q, 30);
    let (_, hi, den) = ln_q.raw();
    let v = BigRational::new(hi.clone(), den.clone()) * factor;
    v.ceil().to_integer().to_u64().unwrap_or(u64::MAX).max(1)
}

/// Prime-denominator search on the first `num_convergents` convergents.
pub fn conjecture_scan(
    spec: &RealSpec,
    num_convergents: usize,
    alpha_max_factor: &BigRational,
) -> Result<ConjectureScan> {
    if num_convergents == 0 {
        return Err(Error::InvalidConfig("need at least one convergent".into()));
    }
    if !alpha_max_factor.is_positive() {
        return Err(Error::InvalidConfig(format!(
            "alpha max factor {alpha_max_factor} must be positive"
        )));
    }
    let real = make_real(spec, 30)?;
    let expansion = partial_quotients(spec, &real, num_convergents, DEFAULT_PRECISION_CEILING)?;
    let convs = expansion.convergents();

    let results: Vec<Result<Option<PrimeApproximation>>> = convs
        .par_iter()
        .map(|c| prime_denominator_search(spec, c, alpha_max_for(&c.q, alpha_max_factor)))
        .collect();
    let mut approximations = Vec::new();
    let mut skipped = Vec::new();
    for (conv, r) in convs.iter().zip(results) {
        match r {
            Ok(Some(hit)) => approximations.push(hit),
            Ok(None) => {}
            Err(Error::Overflow(_)) => skipped.push(conv.index),
            Err(e) => return Err(e),
        }
    }
    let summary = summarize(convs.len(), &approximations, skipped);
    Ok(ConjectureScan {
        xi: spec.clone(),
        alpha_max_factor: alpha_max_factor.clone(),
        approximations,
        summary,
    })
}

fn summarize(scanned: usize, hits: &[PrimeApproximation], skipped: Vec<usize>) -> ConjectureSummary {
    let ratios: Vec<f64> = hits
        .iter()
        .map(|h| h.alpha_over_ln_q)
        .filter(|r| r.is_finite())
        .collect();
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let mut qs: Vec<f64> = hits.iter().map(|h| h.quality).collect();
    qs.sort_by(f64::total_cmp);
    let quality = (!qs.is_empty()).then(|| {
        let n = qs.len();
        let median = if n % 2 == 1 {
            qs[n / 2]
        } else {
            (qs[n / 2 - 1] + qs[n / 2]) / 2.0
        };
        QualityStats {
            min: qs[0],
            median,
            mean: mean(&qs).unwrap(),
            max: qs[n - 1],
        }
    });
    ConjectureSummary {
        convergents_scanned: scanned,
        hits: hits.len(),
        skipped,
        max_alpha_over_ln_q: ratios.iter().copied().reduce(f64::max),
        mean_alpha_over_ln_q: mean(&ratios),
        quality,
    }
}

/// `P p = alpha (mod Q)` and `a = (P p - alpha)/Q`, re-checked from scratch.
pub fn identity_holds(hit: &PrimeApproximation) -> bool {
    let q = BigInt::from(hit.conv_q);
    let lhs = &hit.conv_p * BigInt::from(hit.p) - hit.alpha;
    lhs.mod_floor(&q).is_zero() && lhs / &q == hit.a
}

/// `|xi - a/p| < bound · ln p / p^2` with `bound` the reported quality.
pub fn quality_holds(spec: &RealSpec, hit: &PrimeApproximation) -> Result<bool> {
    let p = BigInt::from(hit.p);
    let real = make_real(spec, default_digits(&p) + 10)?;
    let delta = real.enclosure().mul_int(&p).sub_int(&hit.a).abs().mul_int(&p);
    let ln_p = ln_enclosure(&p, real.digits());
    let q = delta.div_positive(&ln_p);
    let (_, hi, den) = q.raw();
    Ok(rational_to_f64_up(hi, den) <= hit.quality)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::convergents;
    use crate::realnum::Constant;

    fn conv(p: i64, q: i64, index: usize) -> Convergent {
        let mut c = convergents(&[BigInt::from(p)]).remove(0);
        c.p = BigInt::from(p);
        c.q = BigInt::from(q);
        c.index = index;
        c
    }

    #[test]
    fn alpha_order_is_canonical() {
        let v: Vec<i128> = alpha_order(2).collect();
        assert_eq!(v, vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn pi_22_over_7() {
        // alpha = 0 gives x = 0, sharing 7 with Q; alpha = 1 gives x = 1
        // (22 = 1 mod 7), and the progression 1, 8, 15, 22, 29 reaches 29.
        let spec = RealSpec::constant(Constant::Pi);
        let hit = prime_denominator_search(&spec, &conv(22, 7, 1), 16)
            .unwrap()
            .unwrap();
        assert_eq!((hit.alpha, hit.p, hit.j), (1, 29, 4));
        assert_eq!(hit.a, BigInt::from(91));
        assert!(hit.extended());
        assert!(identity_holds(&hit));
        assert!(quality_holds(&spec, &hit).unwrap());
    }

    #[test]
    fn identity_coefficient() {
        // Q prime and P = 1 (mod Q): alpha = 0 gives x = 0, not prime;
        // alpha = 1 gives x = 1, then 1 + 11 = 12, 23 is prime.
        let spec = RealSpec::rational(45, 11).unwrap();
        let hit = prime_denominator_search(&spec, &conv(45, 11, 0), 3)
            .unwrap()
            .unwrap();
        assert_eq!((hit.alpha, hit.p, hit.j), (1, 23, 2));
        assert_eq!(solve_linear_congruence(45, 2, 11).unwrap().x, 2);
    }

    #[test]
    fn q_one_has_no_prime() {
        let spec = RealSpec::constant(Constant::Pi);
        assert!(prime_denominator_search(&spec, &conv(3, 1, 0), 5)
            .unwrap()
            .is_none());
    }

    #[test]
    fn alpha_max_rounds_up() {
        let factor = BigRational::from_integer(8.into());
        // 8 ln 113 = 37.82
        assert_eq!(alpha_max_for(&BigInt::from(113), &factor), 38);
        assert_eq!(alpha_max_for(&BigInt::from(1), &factor), 1);
    }

    #[test]
    fn rational_stops_at_termination() {
        let spec = RealSpec::rational(355, 113).unwrap();
        let scan = conjecture_scan(&spec, 20, &BigRational::from_integer(8.into())).unwrap();
        // 355/113 = [3; 7, 16]
        assert_eq!(scan.summary.convergents_scanned, 3);
    }
}
