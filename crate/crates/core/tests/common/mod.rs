//! Property suites shared by the `properties` and `acceptance` targets.
//! Each runs a fixed-seed proptest runner and reports the first failure.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use sqden::cf::partial_quotients;
use sqden::modular::{
    factorize, is_probable_prime, roots_mod_prime_power, solve_linear_congruence,
    solve_quadratic_congruence,
};
use sqden::primes::PrimeApproximation;
use sqden::realnum::{certified_compare, make_real, Certified, Constant, Enclosure, RealSpec};
use sqden::report::Output;
use sqden::search::{
    brute_force_scan, full_search, Approximation, Exponent, SearchConfig, SearchReport, Source,
};

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn constant() -> impl Strategy<Value = RealSpec> {
    prop::sample::select(Constant::ALL.to_vec()).prop_map(RealSpec::constant)
}

fn cf_terms() -> impl Strategy<Value = Vec<i64>> {
    (-5i64..6, prop::collection::vec(1i64..60, 0..12)).prop_map(|(a0, rest)| {
        let mut v = vec![a0];
        v.extend(rest);
        v
    })
}

fn rational() -> impl Strategy<Value = RealSpec> {
    (-5000i64..5000, 1i64..2000).prop_map(|(n, d)| RealSpec::rational(n, d).unwrap())
}

/// The same number written with a final quotient of at least 2.
fn canonical(mut terms: Vec<i64>) -> Vec<i64> {
    if terms.len() > 1 && terms[terms.len() - 1] == 1 {
        terms.pop();
        *terms.last_mut().unwrap() += 1;
    }
    terms
}

/// Determinant +-1 alternating, coprime convergents, `|xi Q - P| < 1/Q`
/// and the stored residual bound, for constants and cf-term inputs.
pub fn cf_invariants(cases: u32) -> Result<(), String> {
    let input = prop_oneof![
        (constant(), 2usize..40).prop_map(|(s, n)| (s, n, None)),
        cf_terms().prop_map(|t| {
            let spec = RealSpec::cf_terms(ints(&t)).unwrap();
            (spec, t.len() + 2, Some(canonical(t)))
        }),
    ];
    check(cases, input, |(spec, n, expect)| {
        let real = make_real(&spec, 30).unwrap();
        let exp = partial_quotients(&spec, &real, n, 20_000).unwrap();
        if let Some(t) = expect {
            prop_assert!(exp.terminated);
            prop_assert_eq!(&exp.quotients, &ints(&t));
        }
        let convs = exp.convergents();
        let fine = make_real(&spec, 2 * exp.digits + 20).unwrap();
        for (k, c) in convs.iter().enumerate() {
            prop_assert!(c.p.gcd(&c.q).is_one());
            if k > 0 {
                let det = c.determinant(&convs[k - 1]);
                let want = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
                prop_assert_eq!(det, want);
                prop_assert!(c.q > convs[k - 1].q || k == 1);
            }
            let err = fine.enclosure().mul_int(&c.q).sub_int(&c.p);
            let bound = BigRational::new(BigInt::one(), c.q.clone());
            prop_assert!(err.hi() < bound && err.lo() > -bound.clone());
            let x = fine.enclosure();
            let (lo, hi) = (x.lo() - c.value(), x.hi() - c.value());
            prop_assert!(lo.abs() <= c.residual_bound && hi.abs() <= c.residual_bound);
        }
        Ok(())
    })
}

/// `certified_compare` never claims a side the interval does not lie on,
/// and decides whenever the interval misses the threshold.
pub fn compare_soundness(cases: u32) -> Result<(), String> {
    let input = (-2000i64..2000, 0i64..400, 1i64..500, -2000i64..2000, 1i64..500);
    check(cases, input, |(lo, width, den, tn, td)| {
        let e = Enclosure::new(lo.into(), (lo + width).into(), den.into());
        let t = BigRational::new(tn.into(), td.into());
        let (l, h) = (e.lo(), e.hi());
        match certified_compare(&e, &t) {
            Certified::Below => prop_assert!(h < t),
            Certified::Above => prop_assert!(l > t),
            Certified::Equal => prop_assert!(l == t && h == t),
            Certified::Undecidable => prop_assert!(l <= t && t <= h && l != h),
        }
        if h < t {
            prop_assert_eq!(certified_compare(&e, &t), Certified::Below);
        }
        if l > t {
            prop_assert_eq!(certified_compare(&e, &t), Certified::Above);
        }
        Ok(())
    })
}

/// Factorizations recompose, with increasing probable-prime factors.
pub fn factor_recomposition(cases: u32) -> Result<(), String> {
    let factor = prop_oneof![2u128..1000, 2u128..(1 << 24), (1u128 << 30)..(1 << 40)];
    let input = prop::collection::vec(factor, 1..5);
    check(cases, input, |fs| {
        let n = fs.iter().try_fold(1u128, |acc, &f| acc.checked_mul(f));
        let Some(n) = n.filter(|&n| n < 1 << 120) else {
            return Ok(());
        };
        let f = factorize(n).unwrap();
        prop_assert_eq!(f.recompose(), n);
        for w in f.factors.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
        for &(p, e) in &f.factors {
            prop_assert!(e >= 1 && is_probable_prime(p));
        }
        Ok(())
    })
}

/// Root counts are the product of the prime-power counts and the roots
/// are exactly those found by enumeration.
pub fn crt_multiplicativity(cases: u32) -> Result<(), String> {
    let input = (2u128..20_000, 1i128..20_000, -20i128..=20);
    check(cases, input, |(q, p, alpha)| {
        if p.gcd(&(q as i128)) != 1 {
            return Ok(());
        }
        let qf = factorize(q).unwrap();
        let roots = solve_quadratic_congruence(p, alpha, &qf).unwrap();
        prop_assert!(!roots.truncated);
        let c = solve_linear_congruence(p, alpha, q).unwrap().x;
        let product: usize = qf
            .factors
            .iter()
            .map(|&(pr, e)| roots_mod_prime_power(c % pr.pow(e), pr, e).len())
            .product();
        prop_assert_eq!(roots.len(), product);
        let a = alpha.rem_euclid(q as i128) as u128;
        let pm = p.rem_euclid(q as i128) as u128;
        let brute: Vec<u128> = (0..q).filter(|b| pm * (b * b % q) % q == a).collect();
        prop_assert_eq!(&roots.roots, &brute);
        Ok(())
    })
}

fn approximation() -> impl Strategy<Value = Approximation> {
    (
        1u64..u64::MAX,
        any::<i64>(),
        any::<i64>(),
        prop::option::of((0usize..100, any::<i64>(), 1u128..u128::MAX)),
        0.0f64..1.0,
        any::<bool>(),
    )
        .prop_map(|(b, a, alpha, src, quality, reduced)| Approximation {
            b,
            a: BigInt::from(a) * BigInt::from(u64::MAX),
            alpha: i128::from(alpha),
            source: match src {
                None => Source::Brute,
                Some((index, p, q)) => Source::Convergent {
                    index,
                    p: p.into(),
                    q,
                },
            },
            quality,
            reduced,
        })
}

fn config() -> impl Strategy<Value = SearchConfig> {
    (1u64..1 << 40, 1i64..1000, 1i64..1000, 7u32..19, 14u32..19).prop_map(
        |(max_b, cn, cd, an, bn)| {
            let mut cfg = SearchConfig::new(max_b);
            cfg.c = BigRational::new(cn.into(), cd.into());
            cfg.alpha_exponent = Exponent::new(an, 20).unwrap();
            cfg.b_exponent = Exponent::new(bn, 20).unwrap();
            cfg
        },
    )
}

fn prime_hit() -> impl Strategy<Value = PrimeApproximation> {
    (2u128..u128::MAX, any::<i64>(), -50i128..50, 0usize..40, 1u128..u128::MAX, 0.0f64..50.0)
        .prop_map(|(p, a, alpha, index, q, quality)| PrimeApproximation {
            p,
            a: a.into(),
            alpha,
            index,
            conv_p: BigInt::from(a) * 7,
            conv_q: q,
            quality,
            alpha_over_ln_q: quality / 3.0,
            j: p % 17,
        })
}

/// Serialized reports, configs and records parse back to equal values.
pub fn json_round_trip(cases: u32) -> Result<(), String> {
    check(cases, (config(), prop::collection::vec(approximation(), 0..6)), |(cfg, v)| {
        let s = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(serde_json::from_str::<SearchConfig>(&s).unwrap(), cfg);
        let s = Output::Approximations(&v).to_json();
        prop_assert_eq!(serde_json::from_str::<Vec<Approximation>>(&s).unwrap(), v);
        Ok(())
    })?;
    check(cases, prime_hit(), |h| {
        let s = serde_json::to_string(&h).unwrap();
        prop_assert_eq!(serde_json::from_str::<PrimeApproximation>(&s).unwrap(), h);
        Ok(())
    })?;
    check(cases.div_ceil(8), (rational(), 1001u64..5000), |(spec, max_b)| {
        let r = full_search(&spec, &SearchConfig::new(max_b)).unwrap();
        let s = Output::Search(&r).to_json();
        prop_assert_eq!(serde_json::from_str::<SearchReport>(&s).unwrap(), r);
        Ok(())
    })
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

/// Reports and CSV output do not depend on the worker count.
pub fn thread_determinism(cases: u32) -> Result<(), String> {
    let spec = prop_oneof![constant(), rational()];
    check(cases, (spec, 2000u64..60_000, 1u64..1500), |(spec, max_b, cutoff)| {
        let mut cfg = SearchConfig::new(max_b);
        cfg.brute_cutoff = cutoff;
        let one = in_pool(1, || full_search(&spec, &cfg).unwrap());
        let four = in_pool(4, || full_search(&spec, &cfg).unwrap());
        prop_assert_eq!(Output::Search(&one).to_csv(), Output::Search(&four).to_csv());
        prop_assert_eq!(one, four);
        let c = BigRational::one();
        let b1 = in_pool(1, || brute_force_scan(&spec, 10_000, &c).unwrap());
        let b3 = in_pool(3, || brute_force_scan(&spec, 10_000, &c).unwrap());
        prop_assert_eq!(b1, b3);
        Ok(())
    })
}

/// Every reported approximation passes its own quality bound and
/// congruence identity.
pub fn hits_reverify(cases: u32) -> Result<(), String> {
    let spec = prop_oneof![constant(), rational()];
    check(cases, (spec, 2000u64..40_000), |(spec, max_b)| {
        let cfg = SearchConfig::new(max_b);
        let r = full_search(&spec, &cfg).unwrap();
        for w in r.approximations.windows(2) {
            prop_assert!(w[0].b < w[1].b);
        }
        for a in &r.approximations {
            let v = sqden::search::verify_approximation(&spec, &a.a, &BigInt::from(a.b), &cfg.c)
                .unwrap();
            prop_assert!(v.accepted && v.nearest);
            if let Source::Convergent { p, q, .. } = &a.source {
                let b2 = BigInt::from(a.b) * BigInt::from(a.b);
                let lhs = p * &b2 - BigInt::from(a.alpha);
                let q = BigInt::from(*q);
                prop_assert!(lhs.mod_floor(&q).is_zero());
                prop_assert_eq!(lhs / q, a.a.clone());
            }
        }
        Ok(())
    })
}

/// All suites, with their names.
pub fn all_suites(scale: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("cf invariants", cf_invariants(16 * scale)),
        ("certified_compare soundness", compare_soundness(256 * scale)),
        ("factorization recomposition", factor_recomposition(32 * scale)),
        ("CRT root-count multiplicativity", crt_multiplicativity(32 * scale)),
        ("JSON round-trip", json_round_trip(16 * scale)),
        ("determinism across thread counts", thread_determinism(2 * scale)),
        ("hits re-verify", hits_reverify(2 * scale)),
    ]
}
