//! Interval-certified values of the target real.
//!
//! A [`PrecisionReal`] is a closed interval `[lo/den, hi/den]` with integer
//! endpoints and a shared positive denominator. Named constants use a power
//! of two for `den`; rationals, decimal literals and finite continued
//! fractions are stored exactly (`lo == hi`), so their radius is zero at any
//! precision.
//!
//! Decimal literals denote the rational they literally spell: `3.14159` is
//! `314159/100000`, not an approximation of pi.

mod consts;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constant {
    Pi,
    E,
    Sqrt2,
    Golden,
    EulerGamma,
}

impl Constant {
    pub const ALL: [Constant; 5] = [
        Constant::Pi,
        Constant::E,
        Constant::Sqrt2,
        Constant::Golden,
        Constant::EulerGamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
            Constant::Sqrt2 => "sqrt2",
            Constant::Golden => "golden",
            Constant::EulerGamma => "gamma",
        }
    }

    fn eval(self, bits: u32) -> consts::Fx {
        match self {
            Constant::Pi => consts::pi(bits),
            Constant::E => consts::e(bits),
            Constant::Sqrt2 => consts::sqrt_int(2, bits),
            Constant::Golden => consts::golden(bits),
            Constant::EulerGamma => consts::euler_gamma(bits),
        }
    }
}

impl FromStr for Constant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pi" => Ok(Constant::Pi),
            "e" => Ok(Constant::E),
            "sqrt2" => Ok(Constant::Sqrt2),
            "golden" | "phi" => Ok(Constant::Golden),
            "gamma" | "euler-gamma" | "euler_gamma" => Ok(Constant::EulerGamma),
            other => Err(Error::UnknownConstant(other.to_string())),
        }
    }
}

/// Definition of the real number to approximate. Serialized as its
/// command-line text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RealSpec {
    NamedConstant(Constant),
    /// Digit string, e.g. `"-3.1415"`; denotes exactly the rational it spells.
    DecimalLiteral(String),
    Rational { num: BigInt, den: BigInt },
    /// Partial quotients `[a0; a1, a2, ...]` of a finite continued fraction.
    CfTerms(Vec<BigInt>),
}

impl RealSpec {
    pub fn constant(c: Constant) -> Self {
        RealSpec::NamedConstant(c)
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RealSpec::Rational {
            num: num.into(),
            den,
        })
    }

    pub fn decimal(s: &str) -> Result<Self> {
        parse_decimal(s)?;
        Ok(RealSpec::DecimalLiteral(s.trim().to_string()))
    }

    pub fn cf_terms(terms: Vec<BigInt>) -> Result<Self> {
        validate_terms(&terms)?;
        Ok(RealSpec::CfTerms(terms))
    }

    /// gcd of a rational payload's numerator and denominator.
    pub fn rational_gcd(&self) -> Option<BigInt> {
        match self {
            RealSpec::Rational { num, den } => Some(num.gcd(den)),
            _ => None,
        }
    }

    /// The exact value when the spec denotes a rational number.
    pub fn exact_value(&self) -> Result<Option<BigRational>> {
        Ok(match self {
            RealSpec::NamedConstant(_) => None,
            RealSpec::DecimalLiteral(s) => Some(parse_decimal(s)?),
            RealSpec::Rational { num, den } => {
                if den.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                Some(BigRational::new(num.clone(), den.clone()))
            }
            RealSpec::CfTerms(terms) => {
                validate_terms(terms)?;
                let mut acc = BigRational::from_integer(terms[terms.len() - 1].clone());
                for t in terms.iter().rev().skip(1) {
                    acc = BigRational::from_integer(t.clone()) + acc.recip();
                }
                Some(acc)
            }
        })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, RealSpec::NamedConstant(_))
    }
}

impl FromStr for RealSpec {
    type Err = Error;

    /// `pi`, `e`, `sqrt2`, `golden`, `gamma`; `p/q`; `a0,a1,...`; or a decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Ok(RealSpec::NamedConstant(s.parse()?));
        }
        if let Some((n, d)) = s.split_once('/') {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            return RealSpec::rational(num, den);
        }
        if s.starts_with('[') || s.contains(',') {
            let terms = s
                .trim_matches(|c| c == '[' || c == ']')
                .split([',', ';'])
                .map(parse_int)
                .collect::<Result<Vec<_>>>()?;
            return RealSpec::cf_terms(terms);
        }
        RealSpec::decimal(s)
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::NamedConstant(c) => f.write_str(c.name()),
            RealSpec::DecimalLiteral(s) => f.write_str(s),
            RealSpec::Rational { num, den } => write!(f, "{num}/{den}"),
            RealSpec::CfTerms(t) => {
                let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

impl From<RealSpec> for String {
    fn from(s: RealSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for RealSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    let s = s.trim();
    s.parse::<BigInt>()
        .map_err(|_| Error::MalformedNumber(s.to_string()))
}

fn validate_terms(terms: &[BigInt]) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::InvalidTerms("empty".into()));
    }
    if let Some(bad) = terms.iter().skip(1).find(|t| !t.is_positive()) {
        return Err(Error::InvalidTerms(format!(
            "term {bad} after the first must be >= 1"
        )));
    }
    Ok(())
}

/// Parse `[+-]digits[.digits]` into the rational it denotes.
/// `"p/q"` or a decimal literal, as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = parse_int(n.trim())?;
            let d = parse_int(d.trim())?;
            if d.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            Ok(BigRational::new(n, d))
        }
        None => parse_decimal(s),
    }
}

pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::MalformedNumber(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(num, den))
}

/// Closed interval `[lo/den, hi/den]`, `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    den: BigInt,
}

impl Enclosure {
    pub fn new(lo: BigInt, hi: BigInt, den: BigInt) -> Self {
        assert!(den.is_positive(), "enclosure denominator must be positive");
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi, den }
    }

    pub fn point(v: &BigRational) -> Self {
        Enclosure::new(v.numer().clone(), v.numer().clone(), v.denom().clone())
    }

    pub fn from_rationals(lo: &BigRational, hi: &BigRational) -> Self {
        let den = lo.denom() * hi.denom();
        Enclosure::new(lo.numer() * hi.denom(), hi.numer() * lo.denom(), den)
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.den.clone())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.den.clone())
    }

    pub fn center(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, &self.den * 2)
    }

    pub fn radius(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, &self.den * 2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let scaled_lo = &self.lo * x.denom();
        let scaled_hi = &self.hi * x.denom();
        let xn = x.numer() * &self.den;
        scaled_lo <= xn && xn <= scaled_hi
    }

    pub(crate) fn raw(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.lo, &self.hi, &self.den)
    }

    /// `k · self`.
    pub fn mul_int(&self, k: &BigInt) -> Enclosure {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if k.is_negative() {
            Enclosure::new(b, a, self.den.clone())
        } else {
            Enclosure::new(a, b, self.den.clone())
        }
    }

    /// `self - k`.
    pub fn sub_int(&self, k: &BigInt) -> Enclosure {
        let s = k * &self.den;
        Enclosure::new(&self.lo - &s, &self.hi - &s, self.den.clone())
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure::new(lo, hi, &self.den * &o.den)
    }

    /// `{ |x| : x in self }`.
    pub fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            Enclosure::new(-&self.hi, -&self.lo, self.den.clone())
        } else {
            let m = std::cmp::max(-&self.lo, self.hi.clone());
            Enclosure::new(BigInt::zero(), m, self.den.clone())
        }
    }

    /// `self / o` for `self >= 0` and `o > 0`.
    pub fn div_positive(&self, o: &Enclosure) -> Enclosure {
        assert!(!self.lo.is_negative() && o.lo.is_positive());
        let lo = BigRational::new(&self.lo * &o.den, &self.den * &o.hi);
        let hi = BigRational::new(&self.hi * &o.den, &self.den * &o.lo);
        Enclosure::from_rationals(&lo, &hi)
    }

    /// Interval of `floor(x)` over the enclosure.
    pub fn floor_range(&self) -> (BigInt, BigInt) {
        (self.lo.div_floor(&self.den), self.hi.div_floor(&self.den))
    }

    /// Upper endpoint rounded up to the next representable `f64`.
    pub fn hi_f64_up(&self) -> f64 {
        rational_to_f64_up(&self.hi, &self.den)
    }
}

/// Smallest `f64` that is `>= num/den`.
pub(crate) fn rational_to_f64_up(num: &BigInt, den: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let approx = BigRational::new(num.clone(), den.clone())
        .to_f64()
        .unwrap_or(f64::INFINITY);
    if !approx.is_finite() {
        return approx;
    }
    let exact = BigRational::new(num.clone(), den.clone());
    match BigRational::from_float(approx) {
        Some(r) if r >= exact => approx,
        _ => approx.next_up(),
    }
}

/// Result of comparing an enclosure against an exact threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certified {
    /// Whole interval strictly below the threshold.
    Below,
    /// Whole interval strictly above the threshold.
    Above,
    /// Degenerate interval exactly at the threshold.
    Equal,
    /// Interval straddles or touches the threshold; refine and retry.
    Undecidable,
}

pub fn certified_compare(x: &Enclosure, threshold: &BigRational) -> Certified {
    let t = threshold.numer() * &x.den;
    let lo = &x.lo * threshold.denom();
    let hi = &x.hi * threshold.denom();
    if hi < t {
        Certified::Below
    } else if lo > t {
        Certified::Above
    } else if lo == t && hi == t {
        Certified::Equal
    } else {
        Certified::Undecidable
    }
}

/// An enclosure of a target real at a stated working precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionReal {
    enclosure: Enclosure,
    digits: u32,
}

impl PrecisionReal {
    pub fn enclosure(&self) -> &Enclosure {
        &self.enclosure
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn center(&self) -> BigRational {
        self.enclosure.center()
    }

    pub fn radius(&self) -> BigRational {
        self.enclosure.radius()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.enclosure.contains(x)
    }

    pub fn is_exact(&self) -> bool {
        self.enclosure.is_point()
    }
}

/// Binary working precision for a decimal digit count.
pub fn bits_for_digits(digits: u32) -> u32 {
    // log2(10) < 3.3220
    (u64::from(digits) * 33220).div_ceil(10000) as u32 + 8
}

pub fn make_real(spec: &RealSpec, digits: u32) -> Result<PrecisionReal> {
    if digits < MIN_DIGITS {
        return Err(Error::PrecisionTooLow(digits));
    }
    let enclosure = match spec {
        RealSpec::NamedConstant(c) => {
            let bits = bits_for_digits(digits);
            let fx = c.eval(bits);
            Enclosure::new(fx.lo, fx.hi, BigInt::one() << bits)
        }
        _ => {
            let v = spec.exact_value()?.expect("exact spec");
            Enclosure::point(&v)
        }
    };
    Ok(PrecisionReal { enclosure, digits })
}

pub fn refine(spec: &RealSpec, real: &PrecisionReal, digits: u32) -> Result<PrecisionReal> {
    let digits = digits.max(real.digits + 1);
    make_real(spec, digits)
}

/// Working digits for comparisons involving denominators up to `max_b`:
/// `ceil(3·log10(max_b)) + 30`.
pub fn default_digits(max_b: &BigInt) -> u32 {
    let d = max_b.to_string().len() as u32;
    (3 * d + 30).max(MIN_DIGITS)
}

/// Enclosure of `ln n`, `n >= 1`.
pub fn ln_enclosure(n: &BigInt, digits: u32) -> Enclosure {
    let bits = bits_for_digits(digits);
    let fx = consts::ln_int(n, bits);
    Enclosure::new(fx.lo, fx.hi, BigInt::one() << bits)
}
