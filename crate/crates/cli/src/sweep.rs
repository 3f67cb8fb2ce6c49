//! Parameter sweeps over the named families: the data behind the paper-style
//! speed-up and entropy curves, as stable CSV/JSON tables.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail};
use clap::Args;

use guesswork::cost::speedup_from_entropies;
use guesswork::dist::{
    make_bernoulli, make_binomial, make_discrete_gaussian, make_geometric, make_poisson,
    make_ternary, EntropyFamily, ZipfLaw,
};
use guesswork::textfmt::sig12;

use crate::output::{write_output, OutputFormat};

const ALL_COLUMNS: [&str; 6] = [
    "h_half",
    "h_twothirds",
    "shannon",
    "min_entropy",
    "s_asymptotic",
    "s_lower",
];

#[derive(Args)]
pub struct SweepArgs {
    /// Family: bernoulli | ternary | binomial | discrete_gaussian |
    /// geometric | poisson | zipf.
    #[arg(long)]
    family: String,
    /// Parameter to sweep (p, m, sigma, lambda, t).
    #[arg(long)]
    param: String,
    #[arg(long)]
    start: f64,
    #[arg(long)]
    stop: f64,
    /// Grid points, endpoints included.
    #[arg(long, default_value_t = 200)]
    steps: u32,
    /// Fixed family parameters, e.g. --fixed n_max=1000 --fixed bound=100.
    #[arg(long, value_parser = parse_fixed)]
    fixed: Vec<(String, f64)>,
    /// Product exponent used for the s_lower column.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Output columns (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = ALL_COLUMNS.map(String::from))]
    columns: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

fn parse_fixed(text: &str) -> Result<(String, f64), String> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{text}`"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad value in `{text}`: {e}"))?;
    Ok((k.to_string(), v))
}

struct Entropies {
    h_half: f64,
    h_twothirds: f64,
    shannon: f64,
    min_entropy: f64,
    log2_support: f64,
}

fn entropies_of<D: EntropyFamily + ?Sized>(d: &D) -> guesswork::Result<Entropies> {
    Ok(Entropies {
        h_half: d.renyi_entropy(0.5)?,
        h_twothirds: d.renyi_entropy(2.0 / 3.0)?,
        shannon: d.shannon_entropy(),
        min_entropy: d.min_entropy(),
        log2_support: d.log2_support_size(),
    })
}

pub fn cmd_sweep(args: SweepArgs) -> anyhow::Result<()> {
    if args.steps < 2 {
        bail!("--steps must be at least 2");
    }
    if !(args.start < args.stop) {
        bail!("--start must be below --stop");
    }
    for col in &args.columns {
        if !ALL_COLUMNS.contains(&col.as_str()) {
            bail!("unknown column `{col}`; available: {}", ALL_COLUMNS.join(","));
        }
    }
    let fixed: BTreeMap<String, f64> = args.fixed.iter().cloned().collect();

    let mut rows: Vec<(f64, Vec<f64>)> = Vec::with_capacity(args.steps as usize);
    for i in 0..args.steps {
        let value =
            args.start + (args.stop - args.start) * i as f64 / (args.steps as f64 - 1.0);
        let e = evaluate(&args.family, &args.param, value, &fixed)
            .map_err(|err| anyhow!("at {} = {value}: {err:#}", args.param))?;
        // zipf is a whole-key distribution; product families scale by n for
        // the finite-size bound
        let (scale, log2_k) = if args.family == "zipf" {
            (1.0, e.log2_support)
        } else {
            (args.n as f64, args.n as f64 * e.log2_support)
        };
        let s = speedup_from_entropies(scale * e.h_half, scale * e.h_twothirds, log2_k)?;
        let mut cells = Vec::with_capacity(args.columns.len());
        for col in &args.columns {
            cells.push(match col.as_str() {
                "h_half" => e.h_half,
                "h_twothirds" => e.h_twothirds,
                "shannon" => e.shannon,
                "min_entropy" => e.min_entropy,
                "s_asymptotic" => s.s_asymptotic,
                "s_lower" => s.s_lower,
                _ => unreachable!(),
            });
        }
        rows.push((value, cells));
    }

    match args.format {
        OutputFormat::Csv => {
            let mut text = format!("{},{}\n", args.param, args.columns.join(","));
            for (value, cells) in &rows {
                text.push_str(&sig12(*value));
                for cell in cells {
                    text.push(',');
                    text.push_str(&sig12(*cell));
                }
                text.push('\n');
            }
            write_output(args.out.as_deref(), &text)
        }
        OutputFormat::Json => {
            let list: Vec<serde_json::Value> = rows
                .iter()
                .map(|(value, cells)| {
                    let mut obj = serde_json::Map::new();
                    obj.insert(args.param.clone(), serde_json::json!(value));
                    for (col, cell) in args.columns.iter().zip(cells) {
                        obj.insert(col.clone(), serde_json::json!(cell));
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            write_output(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&list)?),
            )
        }
    }
}

fn fixed_u32(fixed: &BTreeMap<String, f64>, key: &str, default: u32) -> u32 {
    fixed.get(key).map(|&v| v as u32).unwrap_or(default)
}

fn evaluate(
    family: &str,
    param: &str,
    value: f64,
    fixed: &BTreeMap<String, f64>,
) -> anyhow::Result<Entropies> {
    let e = match (family, param) {
        ("bernoulli", "p") => entropies_of(&make_bernoulli(value)?)?,
        ("ternary", "p") => entropies_of(&make_ternary(value)?)?,
        ("binomial", "m") => entropies_of(&make_binomial(value.round() as u32)?)?,
        ("discrete_gaussian", "sigma") => {
            let bound = fixed_u32(fixed, "bound", 100);
            entropies_of(&make_discrete_gaussian(bound, value)?)?
        }
        ("geometric", "p") => {
            let n_max = fixed_u32(fixed, "n_max", 1000);
            entropies_of(&make_geometric(n_max, value)?)?
        }
        ("poisson", "lambda") => {
            let n_max = fixed_u32(fixed, "n_max", 1000);
            entropies_of(&make_poisson(n_max, value)?)?
        }
        ("zipf", "t") => {
            let n = fixed.get("n").map(|&v| v as u64).unwrap_or(1 << 20);
            entropies_of(&ZipfLaw::new(n, value)?)?
        }
        _ => bail!("family `{family}` has no sweepable parameter `{param}`"),
    };
    Ok(e)
}
