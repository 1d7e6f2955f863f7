//! Exact integer tests of `|xi - a/b^2| b^3 < c` against an enclosure of
//! `xi`, with precision escalation when an enclosure is too wide.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::realnum::{
    certified_compare, make_real, rational_to_f64_up, Certified, Enclosure, PrecisionReal,
    RealSpec,
};

/// Quality enclosure `|b^2 xi - a| · b` and the sign of `xi - a/b^2`.
pub(crate) struct PairQuality {
    pub quality: Enclosure,
    /// `Some(sign)` once the sign of `xi - a/b^2` is certain.
    pub sign: Option<i8>,
}

pub(crate) fn pair_quality(real: &PrecisionReal, a: &BigInt, b: &BigInt) -> PairQuality {
    let b2 = b * b;
    let delta = real.enclosure().mul_int(&b2).sub_int(a);
    let (lo, hi, _) = delta.raw();
    let sign = if lo.is_positive() {
        Some(1)
    } else if hi.is_negative() {
        Some(-1)
    } else if lo.is_zero() && hi.is_zero() {
        Some(0)
    } else {
        None
    };
    PairQuality {
        quality: delta.abs().mul_int(b),
        sign,
    }
}

/// Nearest integer to `b^2 xi`, ties to even; `None` when the enclosure
/// straddles a half-integer.
pub(crate) fn nearest_numerator(real: &PrecisionReal, b2: &BigInt) -> Option<BigInt> {
    let (lo, hi, den) = real.enclosure().raw();
    let two_den = den * 2;
    let lo_num: BigInt = lo * b2 * 2 + den;
    let a = lo_num.div_floor(&two_den);
    let hi_num: BigInt = hi * b2 * 2 + den;
    if hi_num.div_floor(&two_den) != a {
        return None;
    }
    let on_tie = lo_num.is_multiple_of(&two_den);
    if on_tie {
        if lo != hi {
            return None;
        }
        // b^2 xi = a - 1/2 exactly
        return Some(if a.is_even() { a } else { a - 1 });
    }
    Some(a)
}

/// Outcome of testing a single `b` with its nearest numerator.
pub(crate) enum Scan {
    Hit { a: BigInt, quality: f64 },
    Miss,
}

pub(crate) fn scan_b(real: &PrecisionReal, b: &BigInt, c: &BigRational) -> Option<Scan> {
    let a = nearest_numerator(real, &(b * b))?;
    let q = pair_quality(real, &a, b);
    match certified_compare(&q.quality, c) {
        Certified::Below => Some(Scan::Hit {
            quality: q.quality.hi_f64_up(),
            a,
        }),
        Certified::Above | Certified::Equal => Some(Scan::Miss),
        Certified::Undecidable => None,
    }
}

/// Run `f` on successively sharper enclosures until it decides.
pub(crate) fn escalate<T>(
    spec: &RealSpec,
    base: &PrecisionReal,
    ceiling: u32,
    what: impl Fn() -> String,
    f: impl Fn(&PrecisionReal) -> Option<T>,
) -> Result<T> {
    if let Some(v) = f(base) {
        return Ok(v);
    }
    let mut digits = base.digits();
    while digits < ceiling {
        digits = digits.saturating_mul(2).min(ceiling);
        let real = make_real(spec, digits)?;
        if let Some(v) = f(&real) {
            return Ok(v);
        }
    }
    Err(Error::PrecisionCeiling {
        ceiling,
        context: what(),
    })
}

pub(crate) fn lower_f64(e: &Enclosure) -> f64 {
    let (lo, _, den) = e.raw();
    -rational_to_f64_up(&-lo, den)
}
