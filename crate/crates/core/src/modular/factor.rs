use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::{gcd, is_probable_prime, mul_mod, FactoredInteger};
use crate::error::{Error, Result};

const TRIAL_LIMIT: u32 = 1_000_000;

/// Pollard-rho iterations allowed per composite cofactor.
pub const DEFAULT_RHO_BUDGET: u64 = 100_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                (i * i..=n).step_by(i).for_each(|j| sieve[j] = false);
            }
            i += 1;
        }
        (0..=n).filter(|&i| sieve[i]).map(|i| i as u32).collect()
    })
}

pub fn factorize(n: u128) -> Result<FactoredInteger> {
    factorize_with_budget(n, DEFAULT_RHO_BUDGET)
}

/// Trial division to 10^6, then Brent's variant of Pollard rho on the
/// remaining cofactors.
pub fn factorize_with_budget(n: u128, budget: u64) -> Result<FactoredInteger> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut found: BTreeMap<u128, u32> = BTreeMap::new();
    let mut m = n;
    for &p in small_primes() {
        let p = u128::from(p);
        if p * p > m {
            break;
        }
        while m % p == 0 {
            m /= p;
            *found.entry(p).or_default() += 1;
        }
    }
    let mut stack = Vec::new();
    if m > 1 {
        stack.push(m);
    }
    while let Some(c) = stack.pop() {
        if c < u128::from(TRIAL_LIMIT) * u128::from(TRIAL_LIMIT) || is_probable_prime(c) {
            // cofactors below 10^12 left by trial division are prime
            *found.entry(c).or_default() += 1;
            continue;
        }
        match brent_rho(c, budget) {
            Some(d) => {
                stack.push(d);
                stack.push(c / d);
            }
            None => {
                return Err(Error::FactorBudget {
                    n,
                    remainder: c,
                    iterations: budget,
                })
            }
        }
    }
    Ok(FactoredInteger {
        n,
        factors: found.into_iter().collect(),
    })
}

/// A nontrivial factor of the odd composite `n`, trying the polynomials
/// `x^2 + c` for `c = 1, 2, ...` from the fixed start `x0 = 2`.
fn brent_rho(n: u128, budget: u64) -> Option<u128> {
    const BATCH: u64 = 128;
    let mut spent = 0u64;
    for c in 1u128.. {
        let f = |x: u128| {
            let y = mul_mod(x, x, n);
            if y >= n - c {
                y - (n - c)
            } else {
                y + c
            }
        };
        let mut y = 2u128;
        let mut r = 1u64;
        let mut q = 1u128;
        let mut g = 1u128;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += steps;
            }
            spent += r;
            if spent > budget {
                return None;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot: replay one step at a time
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    unreachable!()
}
