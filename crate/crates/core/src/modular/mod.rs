//! Factorization, primality and root enumeration for quadratic and linear
//! congruences modulo composite `Q`.
//!
//! Moduli are `u128` values below `2^127`. Products are reduced natively
//! when the modulus fits in 64 bits and by shift-and-add otherwise.

mod factor;
mod primality;
mod roots;

use serde::{Deserialize, Serialize};

pub use factor::{factorize, factorize_with_budget, DEFAULT_RHO_BUDGET};
pub use primality::is_probable_prime;
pub use roots::{
    crt_combine, crt_combine_bounded, roots_mod_prime_power, solve_linear_congruence,
    solve_quadratic_congruence, solve_quadratic_congruence_bounded, sqrt_mod_prime,
    LinearSolution, DEFAULT_ROOT_CAP,
};

/// Largest modulus accepted by the modular routines.
pub const MAX_MODULUS: u128 = 1 << 126;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredInteger {
    pub n: u128,
    /// `(prime, exponent)` with strictly increasing primes.
    pub factors: Vec<(u128, u32)>,
}

impl FactoredInteger {
    pub fn prime_powers(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }

    pub fn recompose(&self) -> u128 {
        self.prime_powers().product()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceRoots {
    pub modulus: u128,
    /// Sorted, distinct residues in `[0, modulus)`.
    pub roots: Vec<u128>,
    /// The root-count cap was hit and only the smallest roots are kept.
    pub truncated: bool,
}

impl CongruenceRoots {
    pub fn new(modulus: u128, mut roots: Vec<u128>) -> Self {
        roots.sort_unstable();
        roots.dedup();
        CongruenceRoots {
            modulus,
            roots,
            truncated: false,
        }
    }

    pub fn empty(modulus: u128) -> Self {
        CongruenceRoots::new(modulus, Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }
}

pub(crate) fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(a < m && b < m);
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

pub(crate) fn sub_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

pub(crate) fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, when it exists.
pub(crate) fn inv_mod(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    // Extended Euclid with coefficients tracked modulo m.
    let (mut r0, mut r1) = (m, a % m);
    let (mut t0, mut t1) = (0u128, 1u128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        let qt = mul_mod(q % m, t1, m);
        (t0, t1) = (t1, sub_mod(t0, qt, m));
    }
    (r0 == 1).then_some(t0)
}

/// `x mod m` for signed `x`, in `[0, m)`.
pub(crate) fn reduce_signed(x: i128, m: u128) -> u128 {
    let r = x.unsigned_abs() % m;
    if x < 0 && r != 0 {
        m - r
    } else {
        r
    }
}
