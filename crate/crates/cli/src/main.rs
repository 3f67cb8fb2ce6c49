//! Command-line front end: every subcommand is a thin adapter over the
//! library; all numeric work happens in `guesswork`.

mod output;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use guesswork::cost::{
    arikan_bounds, grover_queries, moment_bruteforce_explicit, moment_typed,
    montanaro_factor_log2, speedup, CostReport,
};
use guesswork::dist::{BuiltDistribution, DistributionSpec, EntropyFamily, ProductDistribution};
use guesswork::rank::{core_set_size, RankTable, DEFAULT_CLASS_BUDGET};
use guesswork::sim::{
    core_set_mass_estimate, multi_key_guess, multi_key_guess_skipping_found,
    quantum_multi_key_guess, SimConfig, SimOutcome,
};
use guesswork::textfmt::sig12;
use guesswork::verify;

use output::{write_output, OutputFormat};

#[derive(Parser)]
#[command(
    name = "guesswork",
    version,
    about = "Entropy bounds, rank enumeration and guessing-cost simulation for non-uniform key distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the entropy family of a distribution.
    Entropy(EntropyArgs),
    /// Quantum speed-up report for a distribution.
    Speedup(SpeedupArgs),
    /// Guessing-moment bracket plus the two-sided entropy bound.
    Cost(CostArgs),
    /// Run the multi-key guessing simulation.
    Simulate(SimulateArgs),
    /// Rank ↔ key queries over a product distribution.
    Rank(RankArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Sweep a family parameter and emit a data table.
    Sweep(sweep::SweepArgs),
    /// Grover query count for a search-space size.
    Grover(GroverArgs),
}

#[derive(Args)]
struct DistArg {
    /// Distribution literal: inline JSON or a path to a JSON file.
    #[arg(long, value_name = "JSON|FILE")]
    dist: String,
}

impl DistArg {
    fn build(&self) -> anyhow::Result<BuiltDistribution> {
        let text = if self.dist.trim_start().starts_with('{') {
            self.dist.clone()
        } else {
            std::fs::read_to_string(&self.dist)
                .with_context(|| format!("reading distribution file {}", self.dist))?
        };
        Ok(DistributionSpec::parse(&text)?.build()?)
    }
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Rényi orders to evaluate (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.6666666666666666")]
    alpha: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct SpeedupArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Product exponent for the finite-size bound (ignored for zipf/explicit).
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct CostArgs {
    #[command(flatten)]
    dist: DistArg,
    /// Product exponent n of χ^n.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Moment exponent: 1 (classical) or 0.5 (quantum).
    #[arg(long)]
    rho: f64,
    /// Skip the rank table and report only the entropy bounds.
    #[arg(long)]
    bounds_only: bool,
    /// Type-class memory budget for the rank table.
    #[arg(long, default_value_t = DEFAULT_CLASS_BUDGET)]
    budget: u64,
    /// Rank-table cache file (read if present and matching, else written).
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    dist: DistArg,
    #[arg(long)]
    n: u32,
    /// Number of sampled keys.
    #[arg(long)]
    m: u64,
    /// Target recovered fraction in (0, 1).
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Charge Grover query counts instead of classical trial counts.
    #[arg(long)]
    quantum: bool,
    /// Skip keys recovered in earlier phases (changes costs, not outcomes).
    #[arg(long)]
    skip_found: bool,
    #[arg(long)]
    max_doublings: Option<u32>,
    /// Write a per-phase CSV (phase t, keys recovered, queries charged).
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CLASS_BUDGET)]
    budget: u64,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    dist: DistArg,
    #[arg(long)]
    n: u32,
    /// Rank to convert to a key (1-based, decimal).
    #[arg(long, group = "query")]
    index: Option<String>,
    /// Key to convert to a rank, e.g. "0,1,1".
    #[arg(long, group = "query")]
    key: Option<String>,
    /// Report log2 of the mass of the top-t keys.
    #[arg(long, group = "query")]
    mass: Option<String>,
    /// Report the core-set size for this delta.
    #[arg(long, group = "query")]
    core_set_delta: Option<f64>,
    /// With --core-set-delta: Monte Carlo membership estimate over this many
    /// sampled keys instead of the exact size.
    #[arg(long, requires = "core_set_delta")]
    estimate_trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CLASS_BUDGET)]
    budget: u64,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or "all".
    suite: String,
    #[arg(long, default_value_t = 0xC0FFEE)]
    seed: u64,
}

#[derive(Args)]
struct GroverArgs {
    /// Search-space size t (decimal).
    t: String,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Entropy(args) => cmd_entropy(args),
        Command::Speedup(args) => cmd_speedup(args),
        Command::Cost(args) => cmd_cost(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => sweep::cmd_sweep(args),
        Command::Grover(args) => cmd_grover(args),
    }
}

fn cmd_entropy(args: EntropyArgs) -> anyhow::Result<()> {
    let d = args.dist.build()?;
    let mut rows: Vec<(String, f64)> = Vec::new();
    for &alpha in &args.alpha {
        rows.push((format!("H[{alpha}]"), d.renyi_entropy(alpha)?));
    }
    rows.push(("shannon".into(), d.shannon_entropy()));
    rows.push(("min_entropy".into(), d.min_entropy()));
    rows.push(("log2_support".into(), d.log2_support_size()));

    match args.format {
        OutputFormat::Csv => {
            let mut text = String::from("quantity,bits\n");
            for (name, bits) in &rows {
                text.push_str(&format!("{name},{}\n", sig12(*bits)));
            }
            write_output(args.out.as_deref(), &text)
        }
        OutputFormat::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows
                .into_iter()
                .map(|(name, bits)| (name, serde_json::json!(bits)))
                .collect();
            write_output(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&map)?),
            )
        }
    }
}

fn cmd_speedup(args: SpeedupArgs) -> anyhow::Result<()> {
    let d = args.dist.build()?;
    let report = match &d {
        BuiltDistribution::Atom(atom) => {
            let prod = ProductDistribution::new(atom.clone(), args.n)?;
            speedup(&prod)?
        }
        other => speedup(other)?,
    };
    if report.s_lower <= 0.0 {
        eprintln!(
            "note: the finite-size lower bound is non-positive ({:.4}); the key space is too small for it to be informative",
            report.s_lower
        );
    }
    let value = serde_json::json!({
        "s_asymptotic": report.s_asymptotic,
        "s_lower": report.s_lower,
    });
    match args.format {
        OutputFormat::Json => write_output(
            args.out.as_deref(),
            &format!("{}\n", serde_json::to_string_pretty(&value)?),
        ),
        OutputFormat::Csv => {
            let text = format!(
                "s_asymptotic,s_lower\n{},{}\n",
                sig12(report.s_asymptotic),
                sig12(report.s_lower)
            );
            write_output(args.out.as_deref(), &text)
        }
    }
}

/// Build (or load) the rank table for an atom distribution, consulting the
/// cache file when given.
fn table_for(
    d: &ProductDistribution,
    budget: u64,
    cache: Option<&std::path::Path>,
) -> anyhow::Result<RankTable> {
    if let Some(path) = cache {
        if path.exists() {
            let tbl = RankTable::load_cache(path)?;
            if tbl.same_instance(d) {
                return Ok(tbl);
            }
            bail!(
                "cache {} holds a different instance; delete it or pass another path",
                path.display()
            );
        }
    }
    let tbl = RankTable::build_with_budget(d, budget)?;
    if let Some(path) = cache {
        tbl.write_cache(path)?;
    }
    Ok(tbl)
}

fn cmd_cost(args: CostArgs) -> anyhow::Result<()> {
    if args.rho != 1.0 && args.rho != 0.5 {
        bail!("--rho must be 1 (classical) or 0.5 (quantum)");
    }
    let built = args.dist.build()?;
    let report: CostReport = match &built {
        BuiltDistribution::Atom(atom) => {
            let d = ProductDistribution::new(atom.clone(), args.n)?;
            if args.bounds_only {
                bounds_only_report(&d, args.rho)?
            } else {
                match table_for(&d, args.budget, args.cache.as_deref()) {
                    Ok(tbl) => moment_typed(&tbl, args.rho)?,
                    Err(err) => {
                        if err.downcast_ref::<guesswork::Error>().map_or(false, |e| {
                            matches!(e, guesswork::Error::ClassBudgetExceeded { .. })
                        }) {
                            bail!("{err:#}; rerun with --bounds-only or raise --budget");
                        }
                        return Err(err);
                    }
                }
            }
        }
        BuiltDistribution::Explicit(e) => {
            if args.n != 1 {
                bail!("explicit distributions support only --n 1");
            }
            let (lo, hi) = arikan_bounds(e, args.rho)?;
            if args.bounds_only {
                CostReport {
                    rho: args.rho,
                    log2_lower: f64::NEG_INFINITY,
                    log2_upper: f64::INFINITY,
                    arikan_log2_lower: lo,
                    arikan_log2_upper: hi,
                }
            } else {
                let bits = moment_bruteforce_explicit(e, args.rho)?.log2();
                CostReport {
                    rho: args.rho,
                    log2_lower: bits,
                    log2_upper: bits,
                    arikan_log2_lower: lo,
                    arikan_log2_upper: hi,
                }
            }
        }
        BuiltDistribution::Zipf(z) => {
            if args.n != 1 {
                bail!("zipf distributions support only --n 1");
            }
            if !args.bounds_only {
                eprintln!("note: zipf cost is reported bounds-only (closed-form entropies)");
            }
            let (lo, hi) = arikan_bounds(z, args.rho)?;
            CostReport {
                rho: args.rho,
                log2_lower: f64::NEG_INFINITY,
                log2_upper: f64::INFINITY,
                arikan_log2_lower: lo,
                arikan_log2_upper: hi,
            }
        }
    };

    let mut value = serde_json::to_value(&report)?;
    if args.rho == 0.5 {
        value["montanaro_factor_log2"] = serde_json::json!(montanaro_factor_log2());
    }
    match args.format {
        OutputFormat::Json => write_output(
            args.out.as_deref(),
            &format!("{}\n", serde_json::to_string_pretty(&value)?),
        ),
        OutputFormat::Csv => {
            let text = format!(
                "rho,log2_lower,log2_upper,arikan_log2_lower,arikan_log2_upper\n{},{},{},{},{}\n",
                sig12(report.rho),
                sig12(report.log2_lower),
                sig12(report.log2_upper),
                sig12(report.arikan_log2_lower),
                sig12(report.arikan_log2_upper)
            );
            write_output(args.out.as_deref(), &text)
        }
    }
}

fn bounds_only_report(d: &ProductDistribution, rho: f64) -> anyhow::Result<CostReport> {
    let (lo, hi) = arikan_bounds(d, rho)?;
    Ok(CostReport {
        rho,
        log2_lower: f64::NEG_INFINITY,
        log2_upper: f64::INFINITY,
        arikan_log2_lower: lo,
        arikan_log2_upper: hi,
    })
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let built = args.dist.build()?;
    let atom = built
        .as_atom()
        .ok_or_else(|| anyhow!("simulate requires a finite atom distribution (product χ^n)"))?;
    let d = ProductDistribution::new(atom.clone(), args.n)?;
    let tbl = table_for(&d, args.budget, args.cache.as_deref())?;
    let cfg = SimConfig {
        seed: args.seed,
        m: args.m,
        c: args.c,
        max_doublings: args.max_doublings,
    };
    let outcome: SimOutcome = if args.skip_found {
        multi_key_guess_skipping_found(&tbl, &cfg, args.quantum)?
    } else if args.quantum {
        quantum_multi_key_guess(&tbl, &cfg)?
    } else {
        multi_key_guess(&tbl, &cfg)?
    };

    if let Some(trace_path) = &args.trace {
        let mut text = String::from("phase_t,keys_recovered,queries_charged\n");
        for phase in &outcome.phases {
            let t = BigUint::from(1u32) << phase.alpha;
            text.push_str(&format!(
                "{t},{},{}\n",
                phase.recovered, phase.queries_charged
            ));
        }
        std::fs::write(trace_path, text)
            .with_context(|| format!("writing trace {}", trace_path.display()))?;
    }

    match args.format {
        OutputFormat::Json => write_output(
            args.out.as_deref(),
            &format!("{}\n", serde_json::to_string_pretty(&outcome)?),
        ),
        OutputFormat::Csv => {
            let text = format!(
                "seed,recovered,alpha_max,queries_total\n{},{},{},{}\n",
                outcome.seed, outcome.recovered, outcome.alpha_max, outcome.queries_total
            );
            write_output(args.out.as_deref(), &text)
        }
    }
}

fn cmd_rank(args: RankArgs) -> anyhow::Result<()> {
    let built = args.dist.build()?;
    let atom = built
        .as_atom()
        .ok_or_else(|| anyhow!("rank queries require a finite atom distribution"))?;
    let d = ProductDistribution::new(atom.clone(), args.n)?;

    let value = if let Some(delta) = args.core_set_delta {
        if let Some(trials) = args.estimate_trials {
            let est = core_set_mass_estimate(&d, delta, trials, args.seed)?;
            serde_json::to_value(&est)?
        } else {
            let size = core_set_size(&d, delta)?;
            serde_json::json!({"core_set_delta": delta, "core_set_size": size.to_string()})
        }
    } else {
        let tbl = table_for(&d, args.budget, args.cache.as_deref())?;
        if let Some(index) = &args.index {
            let rank = BigUint::from_str(index).map_err(|_| anyhow!("--index must be decimal"))?;
            let key = tbl.get_key(&rank)?;
            serde_json::json!({
                "rank": rank.to_string(),
                "key": key,
                "log2_prob": d.log2_prob_of_key(&key)?,
            })
        } else if let Some(key_text) = &args.key {
            let key: Vec<i64> = key_text
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| anyhow!("--key must be comma-separated integers"))?;
            let rank = tbl.rank_of_key(&key)?;
            serde_json::json!({
                "key": key,
                "rank": rank.to_string(),
                "log2_prob": d.log2_prob_of_key(&key)?,
            })
        } else if let Some(mass_t) = &args.mass {
            let t = BigUint::from_str(mass_t).map_err(|_| anyhow!("--mass must be decimal"))?;
            serde_json::json!({
                "t": t.to_string(),
                "cumulative_log2_mass": tbl.cumulative_log2_mass(&t)?,
            })
        } else {
            serde_json::json!({
                "key_count": tbl.key_count().to_string(),
                "classes": tbl.classes().len(),
                "log2_total_mass": tbl.log2_total_mass(),
            })
        }
    };
    write_output(
        args.out.as_deref(),
        &format!("{}\n", serde_json::to_string_pretty(&value)?),
    )
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<()> {
    let suites: Vec<&str> = if args.suite == "all" {
        verify::SUITES.to_vec()
    } else {
        vec![args.suite.as_str()]
    };
    let mut all_pass = true;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for name in suites {
        let report = verify::run_suite(name, args.seed)?;
        writeln!(out, "== suite {name} (seed {}) ==", args.seed)?;
        for check in &report.checks {
            writeln!(
                out,
                "{} {}: {}",
                if check.pass { "PASS" } else { "FAIL" },
                check.name,
                check.detail
            )?;
        }
        writeln!(
            out,
            "suite {name}: {} ({} checks, {} failures)",
            if report.passed() { "PASS" } else { "FAIL" },
            report.checks.len(),
            report.failures()
        )?;
        all_pass &= report.passed();
    }
    if !all_pass {
        std::process::exit(1);
    }
    Ok(())
}

fn cmd_grover(args: GroverArgs) -> anyhow::Result<()> {
    let t = BigUint::from_str(&args.t).map_err(|_| anyhow!("t must be a decimal integer"))?;
    println!("{}", grover_queries(&t)?);
    Ok(())
}
