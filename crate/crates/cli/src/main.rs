use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;

use sqden::cf::{partial_quotients, DEFAULT_PRECISION_CEILING};
use sqden::modular::{factorize, solve_quadratic_congruence, MAX_MODULUS};
use sqden::primes::{conjecture_scan, DEFAULT_ALPHA_MAX_FACTOR};
use sqden::realnum::{make_real, parse_decimal, parse_rational, RealSpec};
use sqden::report::{build_figure_series, emit, Format, Output};
use sqden::search::{
    brute_force_scan, full_search, verify_with_ceiling, ConvergentStatus, Exponent, SearchConfig,
};

#[derive(Parser)]
#[command(name = "sqden", version, about = "Rational approximations a/b^2 of real numbers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hybrid search for |xi - a/b^2| < c/b^3 with b <= max-b
    Search(SearchArgs),
    /// Direct scan of every b <= max-b
    Brute(BruteArgs),
    /// Certify a single pair (a, b)
    Verify(VerifyArgs),
    /// Continued fraction quotients and convergents as JSON lines
    Cf(CfArgs),
    /// Roots of P b^2 = alpha (mod Q) as JSON
    Solve(SolveArgs),
    /// Prime denominators a/p from the first convergents
    Primes(PrimesArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Write here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SearchArgs {
    /// pi, e, sqrt2, golden, gamma, a decimal, p/q or [a0,a1,...]
    #[arg(long)]
    xi: String,
    #[arg(long, value_parser = parse_count)]
    max_b: u64,
    #[arg(long, default_value = "1")]
    c: String,
    #[arg(long, default_value = "0.35")]
    alpha_exp: String,
    #[arg(long, default_value = "0.75")]
    b_exp: String,
    #[arg(long, default_value_t = 1000)]
    brute_cutoff: u64,
    /// Also write the cumulative-count figure series here
    #[arg(long)]
    figure: Option<PathBuf>,
    /// Give up beyond this many working digits
    #[arg(long, default_value_t = DEFAULT_PRECISION_CEILING)]
    precision_ceiling: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BruteArgs {
    #[arg(long)]
    xi: String,
    #[arg(long, value_parser = parse_count)]
    max_b: u64,
    #[arg(long, default_value = "1")]
    c: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    xi: String,
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, default_value = "1")]
    c: String,
    /// Give up beyond this many working digits
    #[arg(long, default_value_t = DEFAULT_PRECISION_CEILING)]
    precision_ceiling: u32,
}

#[derive(Args)]
struct CfArgs {
    #[arg(long)]
    xi: String,
    #[arg(long, default_value_t = 20)]
    terms: usize,
    /// Give up beyond this many working digits
    #[arg(long, default_value_t = DEFAULT_PRECISION_CEILING)]
    precision_ceiling: u32,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: i128,
    #[arg(long, allow_hyphen_values = true)]
    alpha: i128,
    #[arg(long)]
    q: u128,
}

#[derive(Args)]
struct PrimesArgs {
    #[arg(long)]
    xi: String,
    #[arg(long, default_value_t = 20)]
    convergents: usize,
    /// alpha ranges over |alpha| <= ceil(factor ln Q)
    #[arg(long, default_value_t = DEFAULT_ALPHA_MAX_FACTOR.to_string())]
    alpha_factor: String,
    #[command(flatten)]
    output: OutputArgs,
}

/// Why the command stopped; maps onto the exit code.
enum Failure {
    Usage(String),
    Budget(String),
}

impl From<sqden::Error> for Failure {
    fn from(e: sqden::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: sqden::Error| e.to_string())
}

/// Positive integers, also written as `1e7` or `2.5e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    let bad = || format!("`{s}` is not a positive integer");
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<u32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let v = parse_decimal(mantissa).map_err(|_| bad())?
        * BigRational::from_integer(num_traits::pow(BigInt::from(10), exp as usize));
    if !v.is_integer() {
        return Err(bad());
    }
    match v.to_integer().to_u64() {
        Some(n) if n > 0 => Ok(n),
        _ => Err(bad()),
    }
}

fn spec(s: &str) -> Result<RealSpec, Failure> {
    Ok(s.parse::<RealSpec>()?)
}

fn rational(name: &str, s: &str) -> Result<BigRational, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn integer(name: &str, s: &str) -> Result<BigInt, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("--{name}: `{s}` is not an integer")))
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn run_search(args: SearchArgs) -> Outcome {
    let xi = spec(&args.xi)?;
    let mut cfg = SearchConfig::new(args.max_b);
    cfg.c = rational("c", &args.c)?;
    cfg.alpha_exponent = args.alpha_exp.parse::<Exponent>()?;
    cfg.b_exponent = args.b_exp.parse::<Exponent>()?;
    cfg.brute_cutoff = args.brute_cutoff;
    cfg.precision_ceiling = args.precision_ceiling;
    cfg.validate()?;

    let report = with_threads(args.output.threads, || full_search(&xi, &cfg))??;
    emit(&Output::Search(&report), args.output.format, args.output.out.as_deref())?;
    if let Some(path) = &args.figure {
        let series = build_figure_series(&report, &cfg);
        emit(&Output::Figure(&series), args.output.format, Some(path))?;
    }
    let failed: Vec<String> = report
        .convergents
        .iter()
        .filter_map(|s| match &s.status {
            ConvergentStatus::Complete => None,
            ConvergentStatus::Truncated => Some(format!("Q = {}: root cap reached", s.q)),
            ConvergentStatus::Skipped { reason } => Some(format!("Q = {}: {reason}", s.q)),
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Budget(failed.join("; ")))
    }
}

fn run_brute(args: BruteArgs) -> Outcome {
    let xi = spec(&args.xi)?;
    let c = rational("c", &args.c)?;
    if c <= BigRational::from_integer(0.into()) {
        return Err(Failure::Usage("--c must be positive".into()));
    }
    let hits = with_threads(args.output.threads, || brute_force_scan(&xi, args.max_b, &c))??;
    emit(&Output::Approximations(&hits), args.output.format, args.output.out.as_deref())?;
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Outcome {
    let xi = spec(&args.xi)?;
    let a = integer("a", &args.a)?;
    let b = integer("b", &args.b)?;
    if b <= BigInt::from(0) {
        return Err(Failure::Usage("--b must be positive".into()));
    }
    let c = rational("c", &args.c)?;
    let v = verify_with_ceiling(&xi, &a, &b, &c, args.precision_ceiling)?;
    println!("{}", serde_json::to_string(&v).expect("verification serializes"));
    Ok(())
}

fn run_cf(args: CfArgs) -> Outcome {
    if args.terms == 0 {
        return Err(Failure::Usage("--terms must be positive".into()));
    }
    let xi = spec(&args.xi)?;
    let real = make_real(&xi, 30.min(args.precision_ceiling).max(10))?;
    let expansion = partial_quotients(&xi, &real, args.terms, args.precision_ceiling)?;
    for (a, conv) in expansion.quotients.iter().zip(expansion.convergents()) {
        let line = json!({
            "index": conv.index,
            "a": a.to_string(),
            "p": conv.p.to_string(),
            "q": conv.q.to_string(),
            "residual_bound": conv.residual_bound.to_string(),
        });
        println!("{line}");
    }
    if expansion.terminated {
        println!("{}", json!({ "terminated": true }));
    }
    Ok(())
}

fn run_solve(args: SolveArgs) -> Outcome {
    if args.q == 0 || args.q > MAX_MODULUS {
        return Err(Failure::Usage("--q must lie in [1, 2^126]".into()));
    }
    let qf = factorize(args.q)?;
    let roots = solve_quadratic_congruence(args.p, args.alpha, &qf)?;
    let line = json!({
        "p": args.p.to_string(),
        "alpha": args.alpha.to_string(),
        "q": args.q.to_string(),
        "factors": qf.factors.iter().map(|(p, e)| json!([p.to_string(), e])).collect::<Vec<_>>(),
        "roots": roots.roots.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "count": roots.roots.len(),
        "truncated": roots.truncated,
    });
    println!("{line}");
    Ok(())
}

fn run_primes(args: PrimesArgs) -> Outcome {
    if args.convergents == 0 {
        return Err(Failure::Usage("--convergents must be positive".into()));
    }
    let xi = spec(&args.xi)?;
    let factor = rational("alpha-factor", &args.alpha_factor)?;
    let scan = with_threads(args.output.threads, || {
        conjecture_scan(&xi, args.convergents, &factor)
    })??;
    emit(&Output::Primes(&scan), args.output.format, args.output.out.as_deref())?;
    if scan.summary.skipped.is_empty() {
        Ok(())
    } else {
        Err(Failure::Budget(format!(
            "convergents {:?} skipped: Q^2 exceeds the prime test range",
            scan.summary.skipped
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Search(a) => run_search(a),
        Command::Brute(a) => run_brute(a),
        Command::Verify(a) => run_verify(a),
        Command::Cf(a) => run_cf(a),
        Command::Solve(a) => run_solve(a),
        Command::Primes(a) => run_primes(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
