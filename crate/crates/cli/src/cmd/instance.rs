use super::print_json;
use crate::error::CliError;
use crate::spec::{rational, read_file, write_or_print, RoundingArgs};
use clap::Args;
use oblivious_kand::instance::Instance;
use oblivious_kand::oblivious::{oblivious_value, snapshot as snap, BiasPartition, PatternSpace};
use oblivious_kand::rational::{format_rational, to_f64};
use oblivious_kand::Rational;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Args)]
pub struct ValueArgs {
    file: PathBuf,
    #[command(flatten)]
    spec: RoundingArgs,
    /// Refuse brute force above this many variables.
    #[arg(long, default_value_t = oblivious_kand::instance::DEFAULT_BRUTE_FORCE_CAP)]
    max_vars: usize,
}

#[derive(Serialize)]
struct ValueReport {
    k: usize,
    n: usize,
    m: usize,
    spec: String,
    val: f64,
    obl: f64,
    ratio: f64,
    val_exact: String,
    obl_exact: String,
    assignment: Vec<i8>,
}

pub fn value(a: ValueArgs) -> Result<(), CliError> {
    let inst = Instance::parse(&read_file(&a.file)?)?;
    let r = a.spec.resolve(inst.k())?;
    let (x, val) = inst.brute_force_optimum_with_cap(a.max_vars)?;
    let obl = oblivious_value(&inst, &r.t, &r.p)?;
    let ratio = if val == Rational::from_integer(0.into()) { 1.0 } else { to_f64(&(&obl / &val)) };
    print_json(&ValueReport {
        k: inst.k(),
        n: inst.n(),
        m: inst.m(),
        spec: r.label,
        val: to_f64(&val),
        obl: to_f64(&obl),
        ratio,
        val_exact: format_rational(&val),
        obl_exact: format_rational(&obl),
        assignment: x.values().to_vec(),
    })
}

#[derive(Args)]
pub struct SnapshotArgs {
    file: PathBuf,
    /// Thresholds t_0,…,t_ℓ.
    #[arg(short = 't', long, value_delimiter = ',', value_parser = rational, default_value = "0,1")]
    thresholds: Vec<Rational>,
    /// Print exact `p/q` weights.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn snapshot(a: SnapshotArgs) -> Result<(), CliError> {
    let inst = Instance::parse(&read_file(&a.file)?)?;
    let t = BiasPartition::new(a.thresholds)?;
    let space = PatternSpace::new(inst.k(), t.ell())?;
    write_or_print(a.out.as_deref(), &snap(&inst, &t)?.to_csv(&space, a.exact))
}
