//! `densesum`: solve, factorize, generate, verify, bench.
//!
//! Exit codes: `0` yes / ok, `1` no / check failed, `2` error.

mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use densesum::divisor::{audit_strip, strip_almost_divisors};
use densesum::factor::factorize_batch;
use densesum::io::{format_instance, parse_values, read_instance};
use densesum::modular::is_complete_mod;
use densesum::rational::{ceil_u64, display, parse_rational};
use densesum::reduction::{
    ceil_pow, exponents, random_dense_instance, random_ksum, reduce_ksum, validate_setting, Classification,
};
use densesum::solver::{constants_for, solve, ConstantsMode, ConstantsProfile};
use densesum::structure::{check_completeness_precondition, verify_interval};
use densesum::{MultiSet, Rational};

#[derive(Parser)]
#[command(name = "densesum", version, about = "Dense Subset Sum toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether some sub-multi-set sums to t.
    Solve(SolveArgs),
    /// Factor a file of integers with the batch algorithm.
    Factorize(FactorizeArgs),
    /// Write hard reduction instances or random dense sets.
    Generate(GenerateArgs),
    /// Run structural checks on an instance.
    Verify(VerifyArgs),
    /// Time preprocessing, queries and the exact DP over a size sweep.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum, default_value = "practical")]
    constants: Mode,
    #[arg(long, requires_all = ["c_alpha", "c_lambda"])]
    c_delta: Option<String>,
    #[arg(long, requires_all = ["c_delta", "c_lambda"])]
    c_alpha: Option<String>,
    #[arg(long, requires_all = ["c_delta", "c_alpha"])]
    c_lambda: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Paper,
    Practical,
}

impl ConstantsArgs {
    fn resolve(&self, x: &MultiSet) -> Result<ConstantsProfile> {
        let mode = match self.constants {
            Mode::Paper => ConstantsMode::Paper,
            Mode::Practical => ConstantsMode::Practical,
        };
        let overrides = match (&self.c_delta, &self.c_alpha, &self.c_lambda) {
            (Some(d), Some(a), Some(l)) => Some((parse_rational(d)?, parse_rational(a)?, parse_rational(l)?)),
            _ => None,
        };
        let p = x.profile();
        Ok(constants_for(p.n, p.mul, mode, overrides)?)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Target; defaults to the one in the file header.
    #[arg(short, long)]
    t: Option<u64>,
    #[command(flatten)]
    constants: ConstantsArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct FactorizeArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Upper bound `s` on every value.
    #[arg(long)]
    limit: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct GenerateArgs {
    /// `τ,ξ,σ` for reduction instances.
    #[arg(long, conflicts_with = "dense", required_unless_present = "dense")]
    setting: Option<String>,
    #[arg(long, default_value_t = 3)]
    k: u64,
    #[arg(long)]
    u: Option<u64>,
    /// `|Z|`; defaults to `⌈U^α⌉`.
    #[arg(long)]
    count: Option<u64>,
    #[arg(long)]
    planted: bool,
    /// `n,ξ` for a random dense set.
    #[arg(long)]
    dense: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances, with seeds `seed, seed+1, …`.
    #[arg(long, default_value_t = 1)]
    instances: u64,
    #[arg(long, default_value = "corpus")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Interval,
    Completeness,
    ReductionAudit,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    check: Check,
    /// Interval start; defaults to `⌈C_λ·μ·mx·σ/n²⌉`.
    #[arg(long)]
    lambda: Option<u64>,
    #[arg(long)]
    tau: Option<u64>,
    #[command(flatten)]
    constants: ConstantsArgs,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Factorize(a) => cmd_factorize(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => bench::cmd_bench(&a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `DENSESUM_THREADS` caps rayon's pool; `0` or unset means automatic.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("DENSESUM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("DENSESUM_THREADS={raw:?} is not a count"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn cmd_solve(a: &SolveArgs) -> Result<bool> {
    let inst = read_instance(&a.input)?;
    let t = a.t.unwrap_or(inst.t);
    let c = a.constants.resolve(&inst.x)?;
    let r = solve(&inst.x, t, &c);
    let word = if r.answer { "yes" } else { "no" };
    match a.format {
        Format::Text => {
            let d = r.d.map_or_else(|| "-".to_string(), |d| d.to_string());
            println!("{word} certified={} d={d} reason={}", r.certified, r.reason);
        }
        Format::Json => println!(
            "{}",
            json!({ "answer": word, "t": t, "certified": r.certified, "d": r.d, "reason": r.reason.to_string() })
        ),
    }
    Ok(r.answer)
}

fn cmd_factorize(a: &FactorizeArgs) -> Result<bool> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let values = parse_values(&text)?;
    for f in factorize_batch(&values, a.limit)? {
        match a.format {
            Format::Text => println!("{f}"),
            Format::Json => println!("{}", json!({ "value": f.value, "factors": f.factors })),
        }
    }
    Ok(true)
}

fn split3(s: &str) -> Result<(Rational, Rational, Rational)> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b, c] = parts[..] else {
        bail!("expected three comma-separated values, got {s:?}");
    };
    Ok((parse_rational(a)?, parse_rational(b)?, parse_rational(c)?))
}

fn cmd_generate(a: &GenerateArgs) -> Result<bool> {
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let mut manifest = String::from("# seed setting alpha beta gamma n mx sum t planted\n");
    if let Some(spec) = &a.dense {
        let (n, xi) = spec.split_once(',').with_context(|| format!("--dense expects n,ξ, got {spec:?}"))?;
        let n: u64 = n.trim().parse().with_context(|| format!("bad n {n:?}"))?;
        let xi = parse_rational(xi)?;
        for seed in a.seed..a.seed + a.instances {
            let x = random_dense_instance(n, &xi, seed)?;
            let t = x.sum() / 2;
            write_file(&a.out.join(format!("dense-{n}-{seed}.txt")), &format_instance(&x, t))?;
            let p = x.profile();
            manifest += &format!("{seed} dense:{n},{} - - - {} {} {} {t} -\n", display(&xi), p.n, p.mx, p.sum);
        }
    } else {
        let (tau, xi, sigma) = split3(a.setting.as_deref().expect("clap requires --setting or --dense"))?;
        let setting = validate_setting(&tau, &xi, &sigma);
        match setting.classification {
            Classification::Trivial => bail!("setting {setting} is trivial: {} fails", setting.violations.join(", ")),
            Classification::Nontrivial => bail!("setting {setting} is not hard: τ < ξ+σ−2 fails"),
            Classification::HardNontrivial => {}
        }
        let u = a.u.context("--u is required with --setting")?;
        let e = exponents(&setting)?;
        let count = match a.count {
            Some(c) => c,
            None => ceil_pow(u, &e.alpha)?.min(u),
        };
        for seed in a.seed..a.seed + a.instances {
            let inst = random_ksum(count, u, a.k, seed, a.planted)?;
            let out = reduce_ksum(&inst, &setting)?;
            write_file(&a.out.join(format!("reduction-{seed}.txt")), &format_instance(&out.x, out.t))?;
            let p = out.x.profile();
            manifest += &format!(
                "{seed} {setting} {} {} {} {} {} {} {} {}\n",
                display(&e.alpha),
                display(&e.beta),
                display(&e.gamma),
                p.n,
                p.mx,
                p.sum,
                out.t,
                a.planted
            );
        }
    }
    write_file(&a.out.join("manifest.txt"), &manifest)?;
    Ok(true)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    let inst = read_instance(&a.input)?;
    let x = &inst.x;
    let (ok, text, report) = match a.check {
        Check::Interval => {
            let lambda = match a.lambda {
                Some(l) => l,
                None => {
                    let c = a.constants.resolve(x)?;
                    ceil_u64(&(c.c_lambda.clone() * x.profile().spread())).context("λ does not fit in u64")?
                }
            };
            let r = verify_interval(x, lambda);
            let text = match r.first_miss {
                None => "interval: ok".to_string(),
                Some(t) => format!("interval: miss at t={t}"),
            };
            (r.ok, text, json!({ "check": "interval", "lambda": lambda, "ok": r.ok, "first_miss": r.first_miss }))
        }
        Check::Completeness => {
            let tau = a.tau.context("--tau is required for the completeness check")?;
            let precondition = check_completeness_precondition(x, tau);
            let first_incomplete = (1..=tau).find(|&d| !is_complete_mod(x, d));
            let ok = first_incomplete.is_none();
            let text = match first_incomplete {
                None => format!("completeness: ok precondition={precondition}"),
                Some(d) => format!("completeness: incomplete mod {d} precondition={precondition}"),
            };
            let report = json!({
                "check": "completeness", "tau": tau, "ok": ok,
                "precondition": precondition, "first_incomplete": first_incomplete,
            });
            (ok, text, report)
        }
        Check::ReductionAudit => {
            let c = a.constants.resolve(x)?;
            let trace = strip_almost_divisors(x, &c.c_alpha, &c.c_delta)?;
            let audit = audit_strip(x, &c.c_alpha, &c.c_delta, &trace);
            let ok = audit.all();
            let text = format!(
                "reduction-audit: {} d={} no_almost_divisor={} dense={} d_within_spread={} d_linear={} \
                 size_kept={} sum_kept={}",
                if ok { "ok" } else { "failed" },
                trace.d,
                audit.no_almost_divisor,
                audit.dense,
                audit.d_within_spread,
                audit.d_linear,
                audit.size_kept,
                audit.sum_kept
            );
            let report = json!({
                "check": "reduction-audit", "ok": ok, "d": trace.d,
                "no_almost_divisor": audit.no_almost_divisor, "dense": audit.dense,
                "d_within_spread": audit.d_within_spread, "d_linear": audit.d_linear,
                "size_kept": audit.size_kept, "sum_kept": audit.sum_kept,
                "sizes_after_steps": audit.sizes_after_steps, "step_count": audit.step_count,
            });
            (ok, text, report)
        }
    };
    match a.format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{report}"),
    }
    Ok(ok)
}
