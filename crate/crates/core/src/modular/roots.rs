use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{
    gcd, inv_mod, mul_mod, pow_mod, reduce_signed, sub_mod, CongruenceRoots, FactoredInteger,
};
use crate::error::{Error, Result};

/// Root-count cap per congruence.
pub const DEFAULT_ROOT_CAP: usize = 1 << 16;

/// All `x` in `[0, p)` with `x^2 = c (mod p)`, `p` an odd prime.
pub fn sqrt_mod_prime(c: u128, p: u128) -> CongruenceRoots {
    let c = c % p;
    if p == 2 {
        return CongruenceRoots::new(2, vec![c]);
    }
    if c == 0 {
        return CongruenceRoots::new(p, vec![0]);
    }
    match tonelli_shanks(c, p) {
        Some(r) => CongruenceRoots::new(p, vec![r, p - r]),
        None => CongruenceRoots::empty(p),
    }
}

fn tonelli_shanks(c: u128, p: u128) -> Option<u128> {
    if pow_mod(c, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(c, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..)
        .find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut cc = pow_mod(z, q, p);
    let mut t = pow_mod(c, q, p);
    let mut r = pow_mod(c, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(cc, 1 << (m - i - 1), p);
        m = i;
        cc = mul_mod(b, b, p);
        t = mul_mod(t, cc, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Roots of `y^2 = u (mod p^m)` for `u` coprime to `p`, `m >= 1`.
fn unit_roots(u: u128, p: u128, m: u32) -> Vec<u128> {
    let pm = p.pow(m);
    if p == 2 {
        return match m {
            1 => vec![1],
            2 if u % 4 == 1 => vec![1, 3],
            2 => vec![],
            _ if u % 8 != 1 => vec![],
            _ => {
                // r^2 = u (mod 2^j) for j = 3; fix one bit per step.
                let mut r: u128 = 1;
                for j in 3..m {
                    let modj = 1u128 << (j + 1);
                    if mul_mod(r, r, modj) != u % modj {
                        r += 1 << (j - 1);
                    }
                }
                let half = pm >> 1;
                let mut v = vec![r % pm, pm - r % pm, (r + half) % pm, (pm - r % pm + half) % pm];
                v.sort_unstable();
                v.dedup();
                v
            }
        };
    }
    let Some(mut r) = tonelli_shanks(u % p, p) else {
        return vec![];
    };
    let mut pk = p;
    for _ in 1..m {
        pk *= p;
        // r <- r - (r^2 - u) / (2r)
        let f = sub_mod(mul_mod(r, r, pk), u % pk, pk);
        let inv = inv_mod(mul_mod(2, r, pk), pk).expect("2r is a unit");
        r = sub_mod(r, mul_mod(f, inv, pk), pk);
    }
    let mut v = vec![r, pm - r];
    v.sort_unstable();
    v.dedup();
    v
}

/// All roots of `x^2 = c (mod p^e)`.
pub fn roots_mod_prime_power(c: u128, p: u128, e: u32) -> CongruenceRoots {
    assert!(e >= 1);
    let pe = p.pow(e);
    let c = c % pe;
    if c == 0 {
        // x = 0 (mod p^ceil(e/2))
        let step = p.pow(e.div_ceil(2));
        return CongruenceRoots::new(pe, (0..pe / step).map(|t| t * step).collect());
    }
    let mut v = 0;
    let mut u = c;
    while u % p == 0 {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return CongruenceRoots::empty(pe);
    }
    let k = v / 2;
    let m = e - v;
    let pk = p.pow(k);
    let pm = p.pow(m);
    // x = p^k y with y^2 = u (mod p^m); y is free modulo p^(e-k).
    let mut roots = Vec::new();
    for y0 in unit_roots(u, p, m) {
        for t in 0..pk {
            roots.push(mul_mod(pk, y0 + t * pm, pe));
        }
    }
    CongruenceRoots::new(pe, roots)
}

pub fn crt_combine(parts: &[CongruenceRoots], cap: usize) -> Result<CongruenceRoots> {
    crt_combine_bounded(parts, None, cap)
}

/// CRT recombination keeping only roots `<= max_root` (when given); at
/// most `cap` of the smallest are returned, flagged as truncated.
pub fn crt_combine_bounded(
    parts: &[CongruenceRoots],
    max_root: Option<u128>,
    cap: usize,
) -> Result<CongruenceRoots> {
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            if gcd(a.modulus, b.modulus) != 1 {
                return Err(Error::NonCoprimeModuli(a.modulus, b.modulus));
            }
        }
    }
    let modulus: u128 = parts.iter().map(|p| p.modulus).product();
    if parts.iter().any(|p| p.is_empty()) {
        return Ok(CongruenceRoots::empty(modulus));
    }
    // Basis e_i = 1 mod m_i, 0 mod m_j; root = sum r_i e_i mod M.
    let basis: Vec<u128> = parts
        .iter()
        .map(|part| {
            let rest = modulus / part.modulus;
            let inv = inv_mod(rest % part.modulus, part.modulus).expect("coprime");
            mul_mod(rest, inv, modulus)
        })
        .collect();
    let terms: Vec<Vec<u128>> = parts
        .iter()
        .zip(&basis)
        .map(|(part, &e)| part.roots.iter().map(|&r| mul_mod(r, e, modulus)).collect())
        .collect();

    let mut heap: BinaryHeap<u128> = BinaryHeap::new();
    let mut truncated = false;
    let mut idx = vec![0usize; terms.len()];
    'outer: loop {
        let mut x = 0u128;
        for (t, &i) in terms.iter().zip(&idx) {
            x = super::add_mod(x, t[i], modulus);
        }
        if max_root.is_none_or(|m| x <= m) {
            if heap.len() < cap {
                heap.push(x);
            } else {
                truncated = true;
                if x < *heap.peek().unwrap() {
                    heap.pop();
                    heap.push(x);
                }
            }
        }
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < terms[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    let mut out = CongruenceRoots::new(modulus, heap.into_vec());
    out.truncated = truncated;
    Ok(out)
}

/// All `b` in `[0, Q)` with `P b^2 = alpha (mod Q)`.
pub fn solve_quadratic_congruence(
    p: i128,
    alpha: i128,
    qf: &FactoredInteger,
) -> Result<CongruenceRoots> {
    solve_quadratic_congruence_bounded(p, alpha, qf, None, DEFAULT_ROOT_CAP)
}

pub fn solve_quadratic_congruence_bounded(
    p: i128,
    alpha: i128,
    qf: &FactoredInteger,
    max_root: Option<u128>,
    cap: usize,
) -> Result<CongruenceRoots> {
    let q = qf.n;
    if qf.recompose() != q {
        return Err(Error::FactorBudget {
            n: q,
            remainder: q / qf.recompose().max(1),
            iterations: 0,
        });
    }
    let pr = reduce_signed(p, q);
    let inv = inv_mod(pr, q).ok_or(Error::NotInvertible { p, q })?;
    let c = mul_mod(reduce_signed(alpha, q), inv, q);
    if q == 1 {
        return Ok(CongruenceRoots::new(1, vec![0]));
    }
    let parts: Vec<CongruenceRoots> = qf
        .factors
        .iter()
        .map(|&(prime, e)| roots_mod_prime_power(c, prime, e))
        .collect();
    crt_combine_bounded(&parts, max_root, cap)
}

/// Solution of `P x = alpha (mod Q)`: `x` is the smallest nonnegative
/// solution and all solutions are `x + k·modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSolution {
    pub x: u128,
    pub modulus: u128,
}

pub fn solve_linear_congruence(p: i128, alpha: i128, q: u128) -> Option<LinearSolution> {
    assert!(q >= 1);
    let pr = reduce_signed(p, q);
    let ar = reduce_signed(alpha, q);
    let g = gcd(pr, q);
    if ar % g != 0 {
        return None;
    }
    let m = q / g;
    let inv = inv_mod((pr / g) % m, m)?;
    Some(LinearSolution {
        x: mul_mod((ar / g) % m, inv, m),
        modulus: m,
    })
}
