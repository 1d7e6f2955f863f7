use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cf::DEFAULT_PRECISION_CEILING;
use crate::error::{Error, Result};
use crate::modular::{DEFAULT_RHO_BUDGET, DEFAULT_ROOT_CAP};
use crate::realnum::{parse_decimal, MIN_DIGITS};
use crate::serde_str;

/// A rational exponent `num/den` in `(0, 1)`, e.g. `0.35 = 7/20`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Exponent {
    num: u32,
    den: u32,
}

impl Exponent {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::InvalidConfig(format!(
                "exponent {num}/{den} must lie in (0, 1)"
            )));
        }
        let g = num_integer::gcd(num, den);
        Ok(Exponent {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// At least `n/d`.
    pub fn at_least(self, n: u32, d: u32) -> bool {
        u64::from(self.num) * u64::from(d) >= u64::from(n) * u64::from(self.den)
    }

    /// `ceil(q^(num/den))`, exactly.
    pub fn ceil_pow(self, q: &BigInt) -> BigInt {
        assert!(!q.is_negative());
        let target = num_traits::pow(q.clone(), self.num as usize);
        let r = target.nth_root(self.den);
        if num_traits::pow(r.clone(), self.den as usize) < target {
            r + 1
        } else {
            r
        }
    }

    /// Smallest `q` with `q^(num/den) >= b`.
    pub fn inverse_ceil(self, b: &BigInt) -> BigInt {
        let target = num_traits::pow(b.clone(), self.den as usize);
        let r = target.nth_root(self.num);
        if num_traits::pow(r.clone(), self.num as usize) < target {
            r + 1
        } else {
            r
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n: u32 = n.trim().parse().map_err(|_| Error::MalformedNumber(s.into()))?;
                let d: u32 = d.trim().parse().map_err(|_| Error::MalformedNumber(s.into()))?;
                return Exponent::new(n, d);
            }
            None => parse_decimal(s)?,
        };
        let (n, d) = (
            r.numer().to_u32().ok_or_else(|| Error::MalformedNumber(s.into()))?,
            r.denom().to_u32().ok_or_else(|| Error::MalformedNumber(s.into()))?,
        );
        Exponent::new(n, d)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl From<Exponent> for String {
    fn from(e: Exponent) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Tunables of the hybrid search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Quality threshold: keep `|xi - a/b^2| b^3 < c`.
    #[serde(with = "serde_str::ratio")]
    pub c: BigRational,
    /// Scan `|alpha| <= ceil(Q^alpha_exponent)`.
    pub alpha_exponent: Exponent,
    /// Keep roots `b <= ceil(Q^b_exponent)`.
    pub b_exponent: Exponent,
    /// Denominators `b <= brute_cutoff` come from the direct scan.
    pub brute_cutoff: u64,
    pub max_b: u64,
    pub root_cap: usize,
    pub precision_ceiling: u32,
    pub rho_budget: u64,
}

impl SearchConfig {
    pub fn new(max_b: u64) -> Self {
        SearchConfig {
            c: BigRational::one(),
            alpha_exponent: Exponent { num: 7, den: 20 },
            b_exponent: Exponent { num: 3, den: 4 },
            brute_cutoff: 1000.min(max_b),
            max_b,
            root_cap: DEFAULT_ROOT_CAP,
            precision_ceiling: DEFAULT_PRECISION_CEILING,
            rho_budget: DEFAULT_RHO_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !self.c.is_positive() {
            return bad(format!("c = {} must be positive", self.c));
        }
        if !self.alpha_exponent.at_least(1, 3) {
            return bad(format!("alpha exponent {} is below 1/3", self.alpha_exponent));
        }
        if !self.b_exponent.at_least(2, 3) {
            return bad(format!("b exponent {} is below 2/3", self.b_exponent));
        }
        if self.max_b == 0 {
            return bad("max b must be positive".into());
        }
        if self.brute_cutoff == 0 || self.brute_cutoff > self.max_b {
            return bad(format!(
                "brute cutoff {} must lie in [1, {}]",
                self.brute_cutoff, self.max_b
            ));
        }
        if self.precision_ceiling < MIN_DIGITS {
            return bad(format!(
                "precision ceiling {} is below {MIN_DIGITS} digits",
                self.precision_ceiling
            ));
        }
        if self.root_cap == 0 {
            return bad("root cap must be positive".into());
        }
        Ok(())
    }
}
