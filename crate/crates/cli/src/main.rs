//! Command-line surface for the supernorm toolkit: the partition/integer
//! map, partition statistics, density series, the prime-gap model, and the
//! verification sweeps. Data goes to stdout, logs to stderr.

mod context;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use context::{
    parse_f64_list, parse_magnitude, parse_magnitude_list, Context, DEFAULT_SIEVE_LIMIT,
};
use supernorm::bijections::{supernorm, supernorm_inverse};
use supernorm::density::{
    conjecture2_partial_sums, dirichlet_ratio, qseries_abelian, theorem1_partial_sums,
    ArithmeticFn, IndexSet,
};
use supernorm::formulas::{
    log_norm_direct, log_norm_from_lengths, log_norm_stated, size_from_lengths, size_stated,
    supernorm_approximation,
};
use supernorm::gaps::{
    average_gap_check, correction_candidates, model_table, rows_to_csv, twin_prediction_audit,
};
use supernorm::{Error, Partition};

#[derive(Parser)]
#[command(
    name = "supernorm",
    version,
    about = "Partitions, prime factorizations, and the bijection between them"
)]
struct Cli {
    /// Sieve limit; flags beat SUPERNORM_SIEVE_LIMIT, which beats the 1e7 default.
    #[arg(long, global = true, value_parser = parse_magnitude)]
    sieve_limit: Option<u64>,

    /// Directory for sieve cache files; beats SUPERNORM_CACHE_DIR.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Suppress progress logs on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Fail instead of rebuilding when an operation outruns the sieve.
    #[arg(long, global = true)]
    no_auto_extend: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map an integer to its index partition (or back with --inverse).
    Map {
        /// Integer to map.
        value: Option<String>,
        /// Partition in text form, e.g. "<1^2,3>", mapped to its integer.
        #[arg(long)]
        inverse: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Statistics of one partition, with closed-form cross-checks.
    Stats {
        /// Partition in text form, e.g. "<1,2^2,3>".
        partition: String,
        #[arg(long)]
        json: bool,
    },
    /// Density series and Abelian-limit evaluators.
    #[command(subcommand)]
    Density(DensityCmd),
    /// The divisor-count model of prime gaps.
    #[command(subcommand)]
    Gaps(GapsCmd),
    /// Verification sweeps; exit code 1 if a check is violated.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum DensityCmd {
    /// Partial sums of mu*(n)/n over n whose smallest prime factor has its
    /// index in the given set.
    Theorem1 {
        /// Index set, e.g. "ap:1 mod 2", "finite:{1,4}", "complement(...)".
        #[arg(long)]
        set: String,
        /// Ascending truncation points, e.g. "1e4,1e5,1e6".
        #[arg(long)]
        truncations: String,
        #[arg(long)]
        json: bool,
    },
    /// Smallest-part q-series sum_k f(k) q^k prod_{j>k}(1-q^j).
    Qseries {
        /// Arithmetic function: one | mu | id | indicator(SET) | table{n=v,...}.
        #[arg(long)]
        f: String,
        /// q values in (0,1), e.g. "0.9,0.99,0.999".
        #[arg(long)]
        q: String,
        #[arg(long)]
        json: bool,
    },
    /// Ratio of prime sums sum f(idx(p)) p^-s / sum p^-s.
    Dirichlet {
        #[arg(long)]
        f: String,
        /// s values above 1, e.g. "1.5,1.1,1.01".
        #[arg(long)]
        s: String,
        /// Prime truncation for both sums.
        #[arg(long, default_value = "1e6")]
        primes: String,
        #[arg(long)]
        json: bool,
    },
    /// Partial sums of mu*(n) f(idx(p_min(n)))/n.
    Conjecture2 {
        #[arg(long)]
        f: String,
        #[arg(long)]
        truncations: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum GapsCmd {
    /// Model rows next to the actual gaps.
    Table {
        #[arg(long, default_value = "25")]
        n: String,
        /// Emit CSV (n,p_n,actual_gap,predicted_gap,match).
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        json: bool,
    },
    /// Mean predicted gap against ln N and the Dirichlet divisor mean.
    Average {
        #[arg(long = "N")]
        n: String,
        #[arg(long)]
        json: bool,
    },
    /// Confusion matrix of predicted twin-gap positions below x.
    Twins {
        #[arg(long, default_value = "100")]
        x: String,
        #[arg(long)]
        json: bool,
    },
    /// Longer-partition correction candidates for the gap above p_n.
    Correction {
        #[arg(long)]
        n: String,
        #[arg(long, default_value = "3")]
        length_min: u64,
        /// Norm search cap (defaults to n).
        #[arg(long)]
        cap: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Supernorm bounds: --theorem 4 (power bound) or 5 (size interval).
    Bounds {
        #[arg(long)]
        theorem: u8,
        /// Norm limit (theorem 4) or size limit (theorem 5).
        #[arg(long)]
        limit: String,
        /// Sweep bound for the exponent a(d) (theorem 4 only).
        #[arg(long, default_value = "1e5")]
        exponent_limit: String,
        /// How many adjoined 1s to probe in the findings sweep (theorem 4).
        #[arg(long, default_value = "8")]
        ones_max: u64,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form statistics against direct sums, exhaustive + sampled.
    Formulas {
        #[arg(long, default_value = "1000")]
        samples: u64,
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Exhaustive audit covers all partitions of size up to this.
        #[arg(long, default_value = "18")]
        max_size: u64,
        #[arg(long)]
        json: bool,
    },
    /// Supernorm round trip, lattice isomorphism, and counting equalities.
    Bijections {
        /// Round-trip every integer up to this limit.
        #[arg(long, default_value = "1e6")]
        limit: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe (head, etc.) closes early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let ctx = Context {
        configured_limit: cli
            .sieve_limit
            .or_else(|| {
                std::env::var("SUPERNORM_SIEVE_LIMIT")
                    .ok()
                    .and_then(|v| parse_magnitude(&v).ok())
            })
            .unwrap_or(DEFAULT_SIEVE_LIMIT),
        cache_dir: cli
            .cache_dir
            .clone()
            .or_else(|| std::env::var("SUPERNORM_CACHE_DIR").ok().map(PathBuf::from)),
        quiet: cli.quiet,
        auto_extend: !cli.no_auto_extend,
    };
    match run(cli.command, &ctx) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, ctx: &Context) -> supernorm::Result<ExitCode> {
    match command {
        Command::Map {
            value,
            inverse,
            json,
        } => run_map(ctx, value, inverse, json),
        Command::Stats { partition, json } => run_stats(ctx, &partition, json),
        Command::Density(cmd) => run_density(ctx, cmd),
        Command::Gaps(cmd) => run_gaps(ctx, cmd),
        Command::Verify(cmd) => verify::run(ctx, cmd),
    }
}

fn factorization_line(n_text: &str, factors: &[(u64, u64)]) -> String {
    if factors.is_empty() {
        return format!("{n_text} = 1");
    }
    let parts: Vec<String> = factors
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect();
    format!("{n_text} = {}", parts.join(" * "))
}

fn run_map(
    ctx: &Context,
    value: Option<String>,
    inverse: Option<String>,
    json: bool,
) -> supernorm::Result<ExitCode> {
    match (value, inverse) {
        (Some(raw), None) => {
            let n = parse_magnitude(&raw).map_err(Error::Parse)?;
            if n == 0 {
                return Err(Error::BelowDomain { got: 0, min: 1 });
            }
            // Indexing the largest prime factor needs the sieve to reach it;
            // start from sqrt-coverage and let auto-extension do the rest.
            let required = (n.isqrt() + 1).min(n);
            let (partition, factors) = ctx.with_table(required, |table| {
                let p = supernorm_inverse(n, table)?;
                let f = table.factor(n)?;
                Ok((p, f.factors))
            })?;
            let factors: Vec<(u64, u64)> = factors.iter().map(|&(p, e)| (p, e as u64)).collect();
            let index_sum = partition.size();
            if json {
                println!(
                    "{}",
                    json!({
                        "integer": n.to_string(),
                        "partition": partition.to_string(),
                        "factorization": factors,
                        "index_sum": index_sum,
                    })
                );
            } else {
                println!("{partition}");
                println!("{}", factorization_line(&n.to_string(), &factors));
                println!("index_sum: {index_sum}");
            }
            Ok(ExitCode::SUCCESS)
        }
        (None, Some(text)) => {
            let partition: Partition = text.parse()?;
            let largest = partition.largest_part().unwrap_or(0);
            let required = Context::limit_for_nth_prime(largest);
            let (value, factors) = ctx.with_table(required, |table| {
                let v = supernorm(&partition, table)?;
                let f = partition
                    .multiplicities()
                    .iter()
                    .map(|&(part, m)| Ok((table.nth_prime(part)?, m)))
                    .collect::<supernorm::Result<Vec<_>>>()?;
                Ok((v, f))
            })?;
            let index_sum = partition.size();
            if json {
                println!(
                    "{}",
                    json!({
                        "integer": value.to_string(),
                        "partition": partition.to_string(),
                        "factorization": factors,
                        "index_sum": index_sum,
                    })
                );
            } else {
                println!("{value}");
                println!("{}", factorization_line(&value.to_string(), &factors));
                println!("index_sum: {index_sum}");
            }
            Ok(ExitCode::SUCCESS)
        }
        _ => Err(Error::InvalidArgument(
            "pass exactly one of <INT> or --inverse \"<partition>\"".into(),
        )),
    }
}

fn run_stats(ctx: &Context, text: &str, json: bool) -> supernorm::Result<ExitCode> {
    let p: Partition = text.parse()?;
    let largest = p.largest_part().unwrap_or(0);
    let required = Context::limit_for_nth_prime(largest);
    let (hat, estimate) = ctx.with_table(required, |table| {
        Ok((supernorm(&p, table)?, supernorm_approximation(&p, table)?))
    })?;

    let log_direct = log_norm_direct(&p);
    let lengths_log = log_norm_from_lengths(&p).ok();
    let stated_log = log_norm_stated(&p).ok();
    let lengths_size = size_from_lengths(&p).ok();
    let stated_size = size_stated(&p).ok();

    if json {
        println!(
            "{}",
            json!({
                "partition": p.to_string(),
                "size": p.size(),
                "length": p.length(),
                "largest_part": p.largest_part().ok(),
                "smallest_part": p.smallest_part().ok(),
                "norm": p.norm().to_string(),
                "supernorm": hat.to_string(),
                "mobius_p": p.mobius(),
                "log_norm_direct": log_direct,
                "log_norm_from_lengths": lengths_log,
                "log_norm_stated": stated_log,
                "size_from_lengths": lengths_size,
                "size_stated": stated_size,
                "supernorm_estimate": {
                    "approx_log": estimate.approx_log,
                    "exact_log": estimate.exact_log,
                    "log_ratio": estimate.log_ratio,
                },
            })
        );
        return Ok(ExitCode::SUCCESS);
    }

    println!("partition: {p}");
    println!("size: {}", p.size());
    println!("length: {}", p.length());
    match p.largest_part() {
        Ok(r) => println!("largest_part: {r}"),
        Err(_) => println!("largest_part: n/a"),
    }
    match p.smallest_part() {
        Ok(s) => println!("smallest_part: {s}"),
        Err(_) => println!("smallest_part: n/a"),
    }
    println!("norm: {}", p.norm());
    println!("supernorm: {hat}");
    println!("mobius_p: {}", p.mobius());
    println!("log_norm_direct: {log_direct}");
    match lengths_log {
        Some(v) => println!(
            "log_norm_from_lengths: {v} (delta {:e})",
            (v - log_direct).abs()
        ),
        None => println!("log_norm_from_lengths: n/a (needs largest part > 1)"),
    }
    match stated_log {
        Some(v) => println!("log_norm_stated: {v} (delta {:e})", (v - log_direct).abs()),
        None => println!("log_norm_stated: n/a (needs largest part > 1)"),
    }
    match lengths_size {
        Some(v) => println!("size_from_lengths: {v} (delta {})", v.abs_diff(p.size())),
        None => println!("size_from_lengths: n/a (empty partition)"),
    }
    match stated_size {
        Some(v) => println!(
            "size_stated: {v} (delta {})",
            (v - p.size() as i64).unsigned_abs()
        ),
        None => println!("size_stated: n/a (empty partition)"),
    }
    println!(
        "supernorm_estimate: approx_log {} exact_log {} ratio {}",
        estimate.approx_log, estimate.exact_log, estimate.log_ratio
    );
    Ok(ExitCode::SUCCESS)
}

fn run_density(ctx: &Context, cmd: DensityCmd) -> supernorm::Result<ExitCode> {
    match cmd {
        DensityCmd::Theorem1 {
            set,
            truncations,
            json,
        } => {
            let set: IndexSet = set.parse()?;
            let truncations = parse_magnitude_list(&truncations).map_err(Error::Parse)?;
            let max = truncations.iter().copied().max().unwrap_or(2);
            let report = ctx.with_table(max, |table| {
                theorem1_partial_sums(&set, &truncations, table)
            })?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print!("{}", report.to_csv());
            }
            Ok(ExitCode::SUCCESS)
        }
        DensityCmd::Qseries { f, q, json } => {
            let f: ArithmeticFn = f.parse()?;
            let qs = parse_f64_list(&q).map_err(Error::Parse)?;
            let traj = ctx.with_table(1 << 16, |table| qseries_abelian(&f, &qs, table))?;
            ctx.log(&format!("verdict: {}", traj.verdict()));
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&traj).expect("serializable")
                );
            } else {
                print!("{}", traj.to_csv());
            }
            Ok(ExitCode::SUCCESS)
        }
        DensityCmd::Dirichlet { f, s, primes, json } => {
            let f: ArithmeticFn = f.parse()?;
            let ss = parse_f64_list(&s).map_err(Error::Parse)?;
            let prime_limit = parse_magnitude(&primes).map_err(Error::Parse)?;
            let traj = ctx.with_table(prime_limit, |table| {
                dirichlet_ratio(&f, &ss, prime_limit, table)
            })?;
            ctx.log(&format!("verdict: {}", traj.verdict()));
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&traj).expect("serializable")
                );
            } else {
                print!("{}", traj.to_csv());
            }
            Ok(ExitCode::SUCCESS)
        }
        DensityCmd::Conjecture2 {
            f,
            truncations,
            json,
        } => {
            let f: ArithmeticFn = f.parse()?;
            let truncations = parse_magnitude_list(&truncations).map_err(Error::Parse)?;
            let max = truncations.iter().copied().max().unwrap_or(2);
            let report = ctx.with_table(max, |table| {
                conjecture2_partial_sums(&f, &truncations, table)
            })?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print!("{}", report.to_csv());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_gaps(ctx: &Context, cmd: GapsCmd) -> supernorm::Result<ExitCode> {
    match cmd {
        GapsCmd::Table { n, csv, json } => {
            let n_max = parse_magnitude(&n).map_err(Error::Parse)?;
            let required = Context::limit_for_nth_prime(n_max + 1);
            let rows = ctx.with_table(required, |table| model_table(n_max, table))?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&rows).expect("serializable")
                );
            } else if csv {
                print!("{}", rows_to_csv(&rows));
            } else {
                println!(
                    "{:>6} {:>10} {:>7} {:>10} {:>6}",
                    "n", "p_n", "actual", "predicted", "match"
                );
                for r in &rows {
                    println!(
                        "{:>6} {:>10} {:>7} {:>10} {:>6}",
                        r.n,
                        r.prime,
                        r.actual_gap,
                        r.predicted_gap,
                        if r.matches { "yes" } else { "no" }
                    );
                }
                let hits = rows.iter().filter(|r| r.matches).count();
                println!("matches: {hits}/{}", rows.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        GapsCmd::Average { n, json } => {
            let n_max = parse_magnitude(&n).map_err(Error::Parse)?;
            let report = ctx.with_table(n_max, |table| average_gap_check(n_max, table))?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                println!("n_max: {}", report.n_max);
                println!("model_mean: {}", report.model_mean);
                println!("log_reference: {}", report.log_reference);
                println!("dirichlet_reference: {}", report.dirichlet_reference);
                println!("divisor_mean: {}", report.divisor_mean);
                println!("ceiling_inflation: {}", report.ceiling_inflation);
            }
            Ok(ExitCode::SUCCESS)
        }
        GapsCmd::Twins { x, json } => {
            let x_max = parse_magnitude(&x).map_err(Error::Parse)?;
            let audit = ctx.with_table(x_max, |table| twin_prediction_audit(x_max, table))?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&audit).expect("serializable")
                );
            } else {
                println!("gaps below {}: {}", audit.x_max, audit.positions_considered);
                println!(
                    "twin positions ({}): {:?}",
                    audit.twin_positions.len(),
                    audit.twin_positions
                );
                println!(
                    "predicted positions ({}): {:?}",
                    audit.predicted_positions.len(),
                    audit.predicted_positions
                );
                println!(
                    "correct ({}): {:?}",
                    audit.correct_positions.len(),
                    audit.correct_positions
                );
                println!(
                    "confusion: tp={} fp={} fn={} tn={}",
                    audit.true_positives,
                    audit.false_positives,
                    audit.false_negatives,
                    audit.true_negatives
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        GapsCmd::Correction {
            n,
            length_min,
            cap,
            json,
        } => {
            let n = parse_magnitude(&n).map_err(Error::Parse)?;
            let cap = match cap {
                Some(raw) => parse_magnitude(&raw).map_err(Error::Parse)?,
                None => n,
            };
            let report = correction_candidates(n, length_min, cap)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                println!(
                    "n: {} | window [{}, {}) | norm cap {} (no intrinsic bound; cap is explicit) | length >= {}",
                    report.n, report.window_lo, report.window_hi, report.norm_cap, report.length_min
                );
                if report.candidates.is_empty() {
                    println!("candidates: none");
                } else {
                    for c in &report.candidates {
                        println!("{} norm={} weight={}", c.partition, c.norm, c.weight);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
