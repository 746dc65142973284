use super::print_json;
use crate::error::CliError;
use crate::spec::{read_file, write_or_print, RoundingArgs};
use clap::{Args, ValueEnum};
use oblivious_kand::instance::Instance;
use oblivious_kand::oblivious::{oblivious_value, snapshot, PatternSpace};
use oblivious_kand::rational::{ratio, to_f64};
use oblivious_kand::streaming::{bounded_degree_estimate, generate_random_instance, max_degree, random_order_estimate, shuffle_stream, BiasProfile, ClauseStream};
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RandomOrder,
    BoundedDegree,
}

fn profile(s: &str) -> Result<BiasProfile, String> {
    let q = |v: &str| v.parse::<f64>().ok().filter(|q| (0.0..=1.0).contains(q)).ok_or_else(|| format!("bad probability {v:?}"));
    match s.split_once(':') {
        None if s == "uniform" => Ok(BiasProfile::Uniform),
        Some(("skewed", v)) => Ok(BiasProfile::Skewed(q(v)?)),
        Some(("planted", v)) => Ok(BiasProfile::Planted(q(v)?)),
        _ => Err(format!("unknown profile {s:?}: use uniform, skewed:Q or planted:Q")),
    }
}

/// Instance either read from a file or generated.
#[derive(Args)]
pub struct Source {
    /// Instance file; otherwise one is generated from -k -n -m.
    #[arg(long, conflicts_with_all = ["k", "n", "m"])]
    instance: Option<PathBuf>,
    #[arg(short = 'k')]
    k: Option<usize>,
    #[arg(short = 'n')]
    n: Option<usize>,
    #[arg(short = 'm')]
    m: Option<usize>,
    /// uniform, skewed:Q or planted:Q.
    #[arg(long, default_value = "uniform", value_parser = profile)]
    profile: BiasProfile,
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    gen_seed: u64,
}

impl Source {
    fn load(&self) -> Result<Instance, CliError> {
        if let Some(path) = &self.instance {
            return Ok(Instance::parse(&read_file(path)?)?);
        }
        match (self.k, self.n, self.m) {
            (Some(k), Some(n), Some(m)) => Ok(generate_random_instance(k, n, m, self.profile, self.degree_cap, self.gen_seed)?),
            _ => Err(CliError::Usage("give --instance FILE or all of -k -n -m".into())),
        }
    }
}

#[derive(Args)]
pub struct StreamArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[command(flatten)]
    source: Source,
    /// Algorithm; defaults to --perturbed 1/100 1/1000.
    #[command(flatten)]
    spec: RoundingArgs,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// The constant C in the sampling rate.
    #[arg(long = "c", default_value_t = 32.0)]
    c: f64,
    /// Number of runs; run i uses seed `--seed + i`.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degree bound D (bounded-degree mode); defaults to the instance's max degree.
    #[arg(short = 'D', long = "degree")]
    degree: Option<usize>,
    /// Quantile summary across seeds as CSV.
    #[arg(long)]
    aggregate: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunLine {
    mode: Mode,
    k: usize,
    eps: f64,
    #[serde(rename = "C")]
    c: f64,
    seed: u64,
    estimate: f64,
    linear: f64,
    exact_value: f64,
    snapshot_l1_error: f64,
    stored_clauses: usize,
    tracked_vars: usize,
    q: f64,
    exact_path: bool,
}

pub fn stream(a: StreamArgs) -> Result<(), CliError> {
    let inst = a.source.load()?;
    let k = inst.k();
    let mut spec = a.spec.clone();
    if !spec.is_given() {
        spec.perturbed = Some(vec![ratio(1, 100), ratio(1, 1000)]);
    }
    let r = spec.resolve(k)?;
    if a.seeds == 0 {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }
    let space = PatternSpace::new(k, r.t.ell())?;
    let exact = snapshot(&inst, &r.t)?.to_dense(&space);
    let obl = to_f64(&oblivious_value(&inst, &r.t, &r.p)?);
    let d = a.degree.unwrap_or_else(|| max_degree(&inst));
    let given = match a.mode {
        Mode::BoundedDegree => Some(ClauseStream::from_instance(&inst)?),
        Mode::RandomOrder => None,
    };
    let lines: Vec<RunLine> = (0..a.seeds)
        .into_par_iter()
        .map(|i| {
            let seed = a.seed.wrapping_add(i);
            let out = match &given {
                None => random_order_estimate(&shuffle_stream(&inst, seed)?, &r.t, &r.p, a.eps, a.c)?,
                Some(s) => bounded_degree_estimate(s, d, inst.m(), &r.t, &r.p, a.eps, a.c, seed)?,
            };
            let l1 = exact.iter().zip(&out.mhat).map(|(x, y)| (x - y).abs()).sum();
            Ok(RunLine {
                mode: a.mode,
                k,
                eps: a.eps,
                c: a.c,
                seed,
                estimate: out.estimate,
                linear: out.linear,
                exact_value: obl,
                snapshot_l1_error: l1,
                stored_clauses: out.stored_clauses,
                tracked_vars: out.tracked_vars,
                q: out.q,
                exact_path: out.exact,
            })
        })
        .collect::<Result<_, oblivious_kand::Error>>()?;
    for l in &lines {
        print_json(l)?;
    }
    if let Some(path) = &a.aggregate {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["metric", "runs", "mean", "min", "p50", "p90", "p95", "p99", "max"])?;
        let metrics: [(&str, fn(&RunLine) -> f64); 4] = [
            ("estimate", |l| l.estimate),
            ("snapshot_l1_error", |l| l.snapshot_l1_error),
            ("stored_clauses", |l| l.stored_clauses as f64),
            ("tracked_vars", |l| l.tracked_vars as f64),
        ];
        for (name, f) in metrics {
            let mut v: Vec<f64> = lines.iter().map(f).collect();
            v.sort_by(f64::total_cmp);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let mut row = vec![name.to_string(), v.len().to_string(), mean.to_string()];
            row.extend([0.0, 0.5, 0.9, 0.95, 0.99, 1.0].iter().map(|&q| quantile(&v, q).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(short = 'k')]
    k: usize,
    #[arg(short = 'n')]
    n: usize,
    #[arg(short = 'm')]
    m: usize,
    #[arg(long, default_value = "uniform", value_parser = profile)]
    profile: BiasProfile,
    #[arg(long)]
    degree_cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let inst = generate_random_instance(a.k, a.n, a.m, a.profile, a.degree_cap, a.seed)?;
    write_or_print(a.out.as_deref(), &inst.to_text())
}
