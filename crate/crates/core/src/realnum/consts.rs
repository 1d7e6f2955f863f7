//! Certified fixed-point evaluation of the supported constants.
//!
//! Every routine works on integer intervals `[lo, hi]` at an implied scale
//! `2^w` and returns an interval that contains `2^w · x` for the exact
//! constant `x`. Truncating divisions round `lo` down and `hi` up, and every
//! series tail is folded into the interval explicitly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Closed integer interval at an implied binary scale.
#[derive(Clone, Debug)]
pub(crate) struct Fx {
    pub lo: BigInt,
    pub hi: BigInt,
}

impl Fx {
    fn point(v: BigInt) -> Self {
        Fx { lo: v.clone(), hi: v }
    }

    fn zero() -> Self {
        Fx::point(BigInt::zero())
    }

    fn add(&self, o: &Fx) -> Fx {
        Fx {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn sub(&self, o: &Fx) -> Fx {
        Fx {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    fn neg(&self) -> Fx {
        Fx {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    fn mul_u(&self, k: u64) -> Fx {
        Fx {
            lo: &self.lo * k,
            hi: &self.hi * k,
        }
    }

    fn div_u(&self, k: u64) -> Fx {
        let k = BigInt::from(k);
        Fx {
            lo: self.lo.div_floor(&k),
            hi: ceil_div(&self.hi, &k),
        }
    }

    /// Widen by `e` ulps on both sides.
    fn widen(&self, e: &BigInt) -> Fx {
        Fx {
            lo: &self.lo - e,
            hi: &self.hi + e,
        }
    }

    /// Drop `bits` of scale, rounding outward.
    fn rescale_down(&self, bits: u32) -> Fx {
        let d = BigInt::one() << bits;
        Fx {
            lo: self.lo.div_floor(&d),
            hi: ceil_div(&self.hi, &d),
        }
    }
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `arctan(1/x)` by its alternating Taylor series.
fn arctan_inv(x: u64, w: u32) -> Fx {
    let x2 = x * x;
    let mut power = Fx::point(BigInt::one() << w).div_u(x);
    let mut sum = Fx::zero();
    let mut k: u64 = 0;
    loop {
        let term = power.div_u(2 * k + 1);
        if term.hi <= BigInt::one() {
            // Remaining alternating tail is bounded by its first term.
            return sum.widen(&term.hi);
        }
        sum = if k % 2 == 0 {
            sum.add(&term)
        } else {
            sum.sub(&term)
        };
        power = power.div_u(x2);
        k += 1;
    }
}

pub(crate) fn pi(w: u32) -> Fx {
    let g = 16;
    let wg = w + g;
    let a = arctan_inv(5, wg).mul_u(16);
    let b = arctan_inv(239, wg).mul_u(4);
    a.sub(&b).rescale_down(g)
}

pub(crate) fn e(w: u32) -> Fx {
    let g = 16;
    let wg = w + g;
    let mut term = Fx::point(BigInt::one() << wg);
    let mut sum = term.clone();
    let mut k: u64 = 1;
    loop {
        term = term.div_u(k);
        sum = sum.add(&term);
        if term.hi <= BigInt::one() {
            // Sum over j > k of 1/j! is below 1/k!, itself at most one ulp here.
            sum.hi += 1;
            break;
        }
        k += 1;
    }
    sum.rescale_down(g)
}

/// `[floor(sqrt(n)·2^w), floor(sqrt(n)·2^w) + 1]`.
pub(crate) fn sqrt_int(n: u64, w: u32) -> Fx {
    let scaled = BigInt::from(n) << (2 * w);
    let s = scaled.sqrt();
    Fx {
        hi: &s + 1,
        lo: s,
    }
}

/// `(1 + sqrt 5) / 2` at scale `2^w`.
pub(crate) fn golden(w: u32) -> Fx {
    let s = sqrt_int(5, w + 1);
    let one = BigInt::one() << (w + 1);
    Fx {
        lo: &s.lo + &one,
        hi: &s.hi + &one,
    }
    .rescale_down(2)
}

/// `ln 2 = sum_{k>=1} 1 / (k 2^k)`.
pub(crate) fn ln2(w: u32) -> Fx {
    let g = 16;
    let wg = w + g;
    let mut sum = Fx::zero();
    for k in 1..=wg {
        let p = Fx::point(BigInt::one() << (wg - k));
        sum = sum.add(&p.div_u(u64::from(k)));
    }
    // tail for k > wg is below 2^-wg
    sum.hi += 1;
    sum.rescale_down(g)
}

/// `ln n` for `n >= 1`: `ln n = k ln 2 + 2 atanh(t)` with
/// `n = 2^k m`, `m` in `[1, 2)` and `t = (m - 1)/(m + 1) <= 1/3`.
pub(crate) fn ln_int(n: &BigInt, w: u32) -> Fx {
    assert!(n.is_positive());
    let g = 16;
    let wg = w + g;
    let k = n.bits() - 1;
    let base = BigInt::one() << k;
    let (u, v) = (n - &base, n + &base);
    let (u2, v2) = (&u * &u, &v * &v);
    // power = 2^wg t^(2i+1), kept as an interval.
    let mut power = Fx {
        lo: (&u << wg).div_floor(&v),
        hi: ceil_div(&(&u << wg), &v),
    };
    let mut sum = Fx::zero();
    let mut i: u64 = 0;
    while power.hi > BigInt::one() {
        sum = sum.add(&power.div_u(2 * i + 1));
        power = Fx {
            lo: (&power.lo * &u2).div_floor(&v2),
            hi: ceil_div(&(&power.hi * &u2), &v2),
        };
        i += 1;
    }
    // Remaining terms start below one ulp and shrink by t^2 <= 1/9.
    sum.hi += 2;
    let ln_m = sum.mul_u(2);
    let mut k_ln2 = ln2(wg);
    k_ln2.lo *= k;
    k_ln2.hi *= k;
    ln_m.add(&k_ln2).rescale_down(g)
}

/// Euler's constant by the Brent–McMillan formula with `n = 2^j`:
/// `gamma = U/V - eps`, `0 <= |eps| < pi e^(-4n)`, where
/// `V = sum B_k`, `B_k = (n^k / k!)^2` and `U = sum B_k (H_k - ln n)`.
pub(crate) fn euler_gamma(w: u32) -> Fx {
    let mut j: u32 = 1;
    while (1u64 << j) * 5 < u64::from(w) + 8 {
        j += 1;
    }
    let n: u64 = 1 << j;
    let n2 = n * n;
    let terms = 4 * n;
    // Guard bits: |A_k| stays below 2^(3n) ulps of magnitude and each step
    // loses at most a few ulps.
    let g = 32 + 64 - (terms.leading_zeros());
    let wg = w + g;

    let ln_n = ln2(wg).mul_u(u64::from(j));
    let mut b = Fx::point(BigInt::one() << wg);
    let mut a = ln_n.neg();
    let mut u = a.clone();
    let mut v = b.clone();
    for k in 1..=terms {
        b = b.mul_u(n2).div_u(k * k);
        a = a.mul_u(n2).div_u(k).add(&b).div_u(k);
        u = u.add(&a);
        v = v.add(&b);
    }
    // Geometric tails beyond K = 4n: ratio n^2/(k+1)^2 <= 1/16, and
    // |A_k| <= k B_k.
    let tail_b = b.hi.clone();
    let tail_a = &b.hi * BigInt::from(terms);
    let u = u.widen(&tail_a);
    let v = Fx {
        lo: v.lo,
        hi: v.hi + tail_b,
    };

    let one = BigInt::one() << wg;
    let q = div_interval(&u, &v, &one);
    // pi e^(-4n) < 4 · 2^(-5n)
    let eps = BigInt::one() << (wg + 2).saturating_sub(5 * n as u32);
    q.widen(&eps).rescale_down(g)
}

/// `u / v · scale` for `v > 0`, rounded outward.
fn div_interval(u: &Fx, v: &Fx, scale: &BigInt) -> Fx {
    debug_assert!(v.lo.is_positive());
    let lo_den = if u.lo.is_negative() { &v.lo } else { &v.hi };
    let hi_den = if u.hi.is_negative() { &v.hi } else { &v.lo };
    Fx {
        lo: (&u.lo * scale).div_floor(lo_den),
        hi: ceil_div(&(&u.hi * scale), hi_den),
    }
}
