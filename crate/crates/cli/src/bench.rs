use std::hint::black_box;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::Args;

use densesum::oracle::oracle_decide;
use densesum::rational::parse_rational;
use densesum::reduction::random_dense_instance;
use densesum::solver::{constants_for, preprocess, ConstantsMode};

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated sizes, e.g. `1000,10000,100000`.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Values are drawn from `[1, ⌈n^ξ⌉]`.
    #[arg(long, default_value = "1.5")]
    xi: String,
    /// Timed repetitions per column; the median is reported.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Queries per timed repetition.
    #[arg(long, default_value_t = 100_000)]
    queries: u64,
    /// The exact DP is skipped when `σ/2` exceeds this.
    #[arg(long, default_value_t = 100_000_000)]
    oracle_limit: u64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn timed<T>(runs: usize, mut f: impl FnMut() -> T) -> f64 {
    median(
        (0..runs)
            .map(|_| {
                let start = Instant::now();
                black_box(f());
                start.elapsed().as_secs_f64()
            })
            .collect(),
    )
}

pub fn cmd_bench(a: &BenchArgs) -> Result<bool> {
    if a.runs < 5 {
        bail!("--runs must be at least 5");
    }
    let xi = parse_rational(&a.xi)?;
    println!("n,mx,sum,d,window_width,preprocess_ms,query_ns,oracle_ms");
    for &n in &a.sizes {
        let x = random_dense_instance(n, &xi, a.seed)?;
        let p = x.profile();
        let c = constants_for(p.n, p.mul, ConstantsMode::Practical, None)?;
        let na = || "NA".to_string();
        let (d, width, pre, query) = match preprocess(&x, &c) {
            Err(_) => (na(), na(), na(), na()),
            Ok(prepared) => {
                let pre = timed(a.runs, || preprocess(&x, &c).map(|s| s.d()));
                let w = *prepared.window();
                let query = if w.empty {
                    na()
                } else {
                    let (lo, width) = (w.lo as u64, w.width());
                    let per_run = timed(a.runs, || {
                        let mut yes = 0u64;
                        for i in 0..a.queries {
                            let t = lo + i.wrapping_mul(0x9E37_79B9_7F4A_7C15) % width;
                            yes += prepared.query(black_box(t)).map_or(0, |q| q.answer as u64);
                        }
                        yes
                    });
                    format!("{:.1}", per_run * 1e9 / a.queries as f64)
                };
                (prepared.d().to_string(), w.width().to_string(), format!("{:.3}", pre * 1e3), query)
            }
        };
        let oracle = if p.sum / 2 <= a.oracle_limit {
            format!("{:.3}", timed(a.runs, || oracle_decide(&x, p.sum / 2)) * 1e3)
        } else {
            na()
        };
        println!("{n},{},{},{d},{width},{pre},{query},{oracle}", p.mx, p.sum);
    }
    Ok(true)
}
