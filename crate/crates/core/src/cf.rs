//! Certified continued-fraction expansion and convergents.
//!
//! Both endpoints of the enclosure are expanded in lockstep; a partial
//! quotient is emitted only when the two agree, so the output never depends
//! on the starting precision. When they disagree the enclosure is recomputed
//! at twice the precision and the expansion restarts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realnum::{refine, PrecisionReal, RealSpec};

/// Default ceiling for automatic precision escalation.
pub const DEFAULT_PRECISION_CEILING: u32 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub index: usize,
    #[serde(with = "crate::serde_str")]
    pub p: BigInt,
    #[serde(with = "crate::serde_str")]
    pub q: BigInt,
    /// Upper bound on `|xi - p/q|`.
    #[serde(with = "crate::serde_str::ratio")]
    pub residual_bound: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub quotients: Vec<BigInt>,
    /// The real is rational and its expansion ended.
    pub terminated: bool,
    /// Working digits of the enclosure that certified the terms.
    pub digits: u32,
}

impl Expansion {
    /// Convergents of the certified quotients; the final one of a
    /// terminated expansion is exact.
    pub fn convergents(&self) -> Vec<Convergent> {
        let mut out = convergents(&self.quotients);
        if self.terminated {
            if let Some(last) = out.last_mut() {
                last.residual_bound = BigRational::zero();
            }
        }
        out
    }
}

enum Step {
    Emit(BigInt),
    Terminal(BigInt),
    Undecided,
}

/// Lockstep expansion of the interval `[n1/d1, n2/d2]`.
struct IntervalCf {
    n1: BigInt,
    d1: BigInt,
    n2: BigInt,
    d2: BigInt,
}

impl IntervalCf {
    fn new(real: &PrecisionReal) -> Self {
        let (lo, hi, den) = real.enclosure().raw();
        IntervalCf {
            n1: lo.clone(),
            d1: den.clone(),
            n2: hi.clone(),
            d2: den.clone(),
        }
    }

    fn is_point(&self) -> bool {
        &self.n1 * &self.d2 == &self.n2 * &self.d1
    }

    fn step(&mut self) -> Step {
        let q = self.n1.div_floor(&self.d1);
        if self.is_point() {
            let r = &self.n1 - &q * &self.d1;
            if r.is_zero() {
                return Step::Terminal(q);
            }
            let d = std::mem::replace(&mut self.d1, r.clone());
            self.n1 = d.clone();
            self.n2 = d;
            self.d2 = r;
            return Step::Emit(q);
        }
        if self.n2.div_floor(&self.d2) != q {
            return Step::Undecided;
        }
        let r1 = &self.n1 - &q * &self.d1;
        let r2 = &self.n2 - &q * &self.d2;
        if r1.is_zero() {
            // xi - q may be zero; the next quotient is unbounded.
            return Step::Undecided;
        }
        // x - q in [r1/d1, r2/d2] maps to 1/(x - q) in [d2/r2, d1/r1].
        let (d1, d2) = (self.d1.clone(), self.d2.clone());
        self.n1 = d2;
        self.d1 = r2;
        self.n2 = d1;
        self.d2 = r1;
        Step::Emit(q)
    }
}

/// Up to `max_terms` certified partial quotients, escalating precision as
/// needed up to `ceiling` digits.
pub fn partial_quotients(
    spec: &RealSpec,
    real: &PrecisionReal,
    max_terms: usize,
    ceiling: u32,
) -> Result<Expansion> {
    assert!(max_terms >= 1, "max_terms must be positive");
    expand_while(spec, real, ceiling, |terms| terms.len() < max_terms)
}

/// Certified quotients until the convergent denominator exceeds `q_limit`,
/// plus one further quotient so the last convergent's residual is sharp.
pub fn expand_past_denominator(
    spec: &RealSpec,
    real: &PrecisionReal,
    q_limit: &BigInt,
    ceiling: u32,
) -> Result<Expansion> {
    expand_while(spec, real, ceiling, |terms| {
        let conv = convergents(terms);
        match conv.len() {
            0 => true,
            n => {
                // stop once two consecutive denominators are beyond the limit
                n < 2 || &conv[n - 2].q <= q_limit
            }
        }
    })
}

fn expand_while(
    spec: &RealSpec,
    real: &PrecisionReal,
    ceiling: u32,
    mut want_more: impl FnMut(&[BigInt]) -> bool,
) -> Result<Expansion> {
    let mut current = real.clone();
    loop {
        let mut cf = IntervalCf::new(&current);
        let mut terms = Vec::new();
        let mut undecided = false;
        while terms.is_empty() || want_more(&terms) {
            match cf.step() {
                Step::Emit(q) => terms.push(q),
                Step::Terminal(q) => {
                    terms.push(q);
                    return Ok(Expansion {
                        quotients: terms,
                        terminated: true,
                        digits: current.digits(),
                    });
                }
                Step::Undecided => {
                    undecided = true;
                    break;
                }
            }
        }
        if !undecided {
            return Ok(Expansion {
                quotients: terms,
                terminated: false,
                digits: current.digits(),
            });
        }
        if current.digits() >= ceiling {
            return Err(Error::PrecisionCeiling {
                ceiling,
                context: format!("continued fraction undecided at term {}", terms.len()),
            });
        }
        let next = current.digits().saturating_mul(2).min(ceiling);
        current = refine(spec, &current, next)?;
    }
}

/// Convergents `P_n/Q_n` of the given quotients by the standard recurrence.
pub fn convergents(quotients: &[BigInt]) -> Vec<Convergent> {
    let mut out: Vec<Convergent> = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_prev2, mut q_prev2) = (BigInt::zero(), BigInt::one());
    for (index, a) in quotients.iter().enumerate() {
        let p = a * &p_prev + &p_prev2;
        let q = a * &q_prev + &q_prev2;
        p_prev2 = std::mem::replace(&mut p_prev, p.clone());
        q_prev2 = std::mem::replace(&mut q_prev, q.clone());
        out.push(Convergent {
            index,
            p,
            q,
            residual_bound: BigRational::zero(),
        });
    }
    for i in 0..out.len() {
        let bound_den = match out.get(i + 1) {
            Some(next) => &out[i].q * &next.q,
            None => &out[i].q * &out[i].q,
        };
        out[i].residual_bound = BigRational::new(BigInt::one(), bound_den);
    }
    out
}

impl Convergent {
    /// `P_n Q_{n-1} - P_{n-1} Q_n`, which is `(-1)^(n-1)`.
    pub fn determinant(&self, prev: &Convergent) -> BigInt {
        &self.p * &prev.q - &prev.p * &self.q
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}
