use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{mul_mod, pow_mod};

const SMALL_PRIMES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Witness set {2, ..., 17} is exact below this bound.
const SMALL_WITNESS_LIMIT: u128 = 341_550_071_728_321;
/// The first 13 primes as witnesses are exact below this bound.
const PRIME_WITNESS_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;
const ROUNDS: usize = 64;

/// Miller–Rabin. Deterministic below 3.3·10^24; above that, 64 rounds with
/// bases from a fixed-seed generator (error below 4^-64).
pub fn is_probable_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let witness = |a: u128| -> bool {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                return true;
            }
        }
        false
    };
    if n < SMALL_WITNESS_LIMIT {
        return SMALL_PRIMES[..7].iter().all(|&a| witness(a));
    }
    if !SMALL_PRIMES.iter().all(|&a| witness(a)) {
        return false;
    }
    if n < PRIME_WITNESS_LIMIT {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_b1a5);
    (SMALL_PRIMES.len()..ROUNDS).all(|_| witness(rng.gen_range(2..n - 1)))
}
