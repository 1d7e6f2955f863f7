//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqden::modular::{factorize, is_probable_prime, solve_quadratic_congruence};
use sqden::primes::{conjecture_scan, identity_holds, quality_holds};
use sqden::realnum::{Constant, RealSpec};
use sqden::report::{build_figure_series, emit, Format, Output};
use sqden::search::{
    brute_force_scan, expected_count, full_search, verify_approximation, ConvergentStatus,
    SearchConfig,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn pi() -> RealSpec {
    RealSpec::constant(Constant::Pi)
}

fn fixture(c: Constant) -> Vec<(u64, BigInt)> {
    let path = format!("{}/tests/data/{}_1e6.csv", env!("CARGO_MANIFEST_DIR"), c.name());
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let (b, a) = l.split_once(',').unwrap();
            (b.parse().unwrap(), a.parse().unwrap())
        })
        .collect()
}

fn large_pair() -> Verdict {
    let a: BigInt = "36266840658555398816245943123914613560".parse().unwrap();
    let b: BigInt = "3397660065732068041".parse().unwrap();
    let t = Instant::now();
    let v = verify_approximation(&pi(), &a, &b, &BigRational::one()).unwrap();
    let elapsed = t.elapsed();
    // |pi - a/b^2| = quality / b^3
    let b3 = b.to_f64().unwrap().powi(3);
    let digits = -(v.quality_upper / b3 / std::f64::consts::PI).log10();
    verdict(
        v.accepted && v.nearest && v.quality_upper < 1.0 && digits >= 55.0 && elapsed < Duration::from_secs(1),
        format!(
            "quality in [{:.6}, {:.6}], nearest = {}, {digits:.1} agreeing digits, {elapsed:?}",
            v.quality_lower, v.quality_upper, v.nearest
        ),
    )
}

fn oracle_equality() -> Verdict {
    let max_b = 1_000_000;
    let one = BigRational::one();
    let mut pass = true;
    let mut parts = Vec::new();
    for c in Constant::ALL {
        let spec = RealSpec::constant(c);
        let t = Instant::now();
        let brute = brute_force_scan(&spec, max_b, &one).unwrap();
        let t_brute = t.elapsed();
        let t = Instant::now();
        let fast = full_search(&spec, &SearchConfig::new(max_b)).unwrap();
        let t_fast = t.elapsed();
        let key = |v: &[sqden::search::Approximation]| -> Vec<(u64, BigInt)> {
            v.iter().map(|a| (a.b, a.a.clone())).collect()
        };
        let same = key(&brute) == key(&fast.approximations) && key(&brute) == fixture(c);
        let ok = same && t_brute < Duration::from_secs(120) && t_fast < Duration::from_secs(10);
        pass &= ok;
        parts.push(format!(
            "{} {} hits {} (direct {:.1}s, fast {:.2}s)",
            c.name(),
            brute.len(),
            if same { "equal" } else { "DIFFER" },
            t_brute.as_secs_f64(),
            t_fast.as_secs_f64()
        ));
    }
    verdict(pass, parts.join("; "))
}

fn random_composite(rng: &mut ChaCha8Rng, kind: usize) -> u128 {
    const SMALL: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    loop {
        let q: u128 = match kind {
            0 => rng.gen_range(4..=100_000),
            1 => 2 * rng.gen_range(2..=50_000),
            2 => {
                let p = SMALL[rng.gen_range(0..SMALL.len())];
                let e = rng.gen_range(2..=4);
                let k = rng.gen_range(1..=(100_000 / p.pow(e)).max(1));
                p.pow(e) * k
            }
            _ => {
                let mut q = 1;
                let mut n = 0;
                for &p in SMALL.iter().filter(|_| rng.gen_bool(0.5)) {
                    if q * p <= 100_000 {
                        q *= p;
                        n += 1;
                    }
                }
                if n < 4 {
                    continue;
                }
                q
            }
        };
        if q <= 100_000 && q >= 4 && !is_probable_prime(q) {
            return q;
        }
    }
}

fn congruence_completeness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mismatches = 0;
    let mut systems = 0;
    let (mut even, mut square_full, mut many) = (0, 0, 0);
    for i in 0..500 {
        let q = random_composite(&mut rng, i % 4);
        let f = factorize(q).unwrap();
        even += usize::from(q % 2 == 0);
        square_full += usize::from(f.factors.iter().any(|&(_, e)| e >= 2));
        many += usize::from(f.factors.len() >= 4);
        let p = loop {
            let p: i128 = rng.gen_range(1..q as i128);
            if num_integer::gcd(p, q as i128) == 1 {
                break p;
            }
        };
        // residue of P b^2 for every b, sorted for lookup
        let mut table: Vec<(u128, u128)> =
            (0..q).map(|b| ((p as u128 * (b * b % q)) % q, b)).collect();
        table.sort_unstable();
        for alpha in -20i128..=20 {
            let a = alpha.rem_euclid(q as i128) as u128;
            let start = table.partition_point(|&(r, _)| r < a);
            let end = table.partition_point(|&(r, _)| r <= a);
            let want: Vec<u128> = table[start..end].iter().map(|&(_, b)| b).collect();
            let got = solve_quadratic_congruence(p, alpha, &f).unwrap();
            systems += 1;
            if got.truncated || got.roots != want {
                mismatches += 1;
            }
        }
    }
    verdict(
        mismatches == 0,
        format!(
            "{systems} congruences over 500 moduli ({even} even, {square_full} square-full, {many} with >= 4 primes): {mismatches} mismatches"
        ),
    )
}

fn hit_count() -> Verdict {
    let cfg = SearchConfig::new(1_000_000);
    let report = full_search(&pi(), &cfg).unwrap();
    let n = report.approximations.len() as f64;
    let expected = expected_count(cfg.max_b, &cfg.c);
    let series = build_figure_series(&report, &cfg);
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("pi_1e6_figure.csv");
    emit(&Output::Figure(&series), Format::Csv, Some(&path)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let emitted = text.starts_with("b,observed,curve_simple,curve_full\n")
        && text.lines().count() == series.points.len() + 1;
    let last = series.points.last().unwrap();
    let ratio = n / expected;
    verdict(
        (1.0 / 3.0..=3.0).contains(&ratio) && emitted && last.observed as f64 == n,
        format!(
            "{n} hits vs 2(gamma + ln B) = {expected:.2} (ratio {ratio:.2}), 1 + 2 ln B = {:.2}; {} figure rows in {}",
            last.curve_simple,
            series.points.len(),
            path.display()
        ),
    )
}

/// `ceil(q^(7/20))` by integer search.
fn alpha_bound(q: &BigInt) -> u128 {
    let target = num_traits::pow(q.clone(), 7);
    let mut k = q.to_f64().unwrap().powf(0.35) as u128;
    k = k.saturating_sub(2);
    while num_traits::pow(BigInt::from(k), 20) < target {
        k += 1;
    }
    k
}

fn work_accounting() -> Verdict {
    let mut exact = true;
    let mut skipped = 0;
    let mut points = Vec::new();
    for max_b in [10_000u64, 100_000, 1_000_000, 10_000_000] {
        let report = full_search(&pi(), &SearchConfig::new(max_b)).unwrap();
        for s in &report.convergents {
            if matches!(s.status, ConvergentStatus::Skipped { .. }) {
                skipped += 1;
                continue;
            }
            exact &= s.congruences_solved as u128 == 2 * alpha_bound(&s.q) + 1;
        }
        points.push((max_b as f64, report.totals.congruences_solved as f64));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let totals: Vec<String> = points.iter().map(|p| format!("{:.0e}: {}", p.0, p.1)).collect();
    verdict(
        exact && skipped == 0 && slope < 0.6,
        format!(
            "per-convergent solves = 2 ceil(Q^0.35) + 1: {exact}; total solves {}; fitted exponent {slope:.3}",
            totals.join(", ")
        ),
    )
}

fn prime_conjecture() -> Verdict {
    let spec = pi();
    let scan = conjecture_scan(&spec, 20, &BigRational::from_integer(8.into())).unwrap();
    let mut ok = 0;
    let mut bad = 0;
    for h in &scan.approximations {
        let within = (h.alpha.unsigned_abs() as f64) <= 8.0 * (h.conv_q as f64).ln();
        if within && is_probable_prime(h.p) && identity_holds(h) && quality_holds(&spec, h).unwrap() {
            ok += 1;
        } else {
            bad += 1;
        }
    }
    let s = &scan.summary;
    verdict(
        ok >= 15 && bad == 0,
        format!(
            "{ok} of {} convergents give a prime hit ({bad} failing checks); max |alpha|/ln Q = {:.3}, mean {:.3}; {} primes beyond [0, Q)",
            s.convergents_scanned,
            s.max_alpha_over_ln_q.unwrap_or(f64::NAN),
            s.mean_alpha_over_ln_q.unwrap_or(f64::NAN),
            scan.approximations.iter().filter(|h| h.extended()).count()
        ),
    )
}

fn property_suites() -> Verdict {
    let results = common::all_suites(4);
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    let names: Vec<&str> = results.iter().map(|(n, _)| *n).collect();
    verdict(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} suites passed ({})", names.len(), names.join(", "))
        } else {
            failed.join("; ")
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("large published pair verifies", large_pair),
        ("hybrid search equals direct scan at B = 1e6", oracle_equality),
        ("quadratic congruence solver is complete", congruence_completeness),
        ("hit count near 2(gamma + ln B)", hit_count),
        ("congruence work is sublinear", work_accounting),
        ("prime denominators with small alpha", prime_conjecture),
        ("property suites", property_suites),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        failures += usize::from(!v.pass);
        println!(
            "criterion {} {}: {name} -- {} [{:.1}s]",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
