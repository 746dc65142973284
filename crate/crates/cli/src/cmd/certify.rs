use super::print_json;
use crate::error::CliError;
use crate::spec::{rational, write_or_print};
use clap::Args;
use oblivious_kand::certificates::{check_bernoulli, check_suff_cond, constants, solve_core_strict};
use oblivious_kand::factor_lp::approximation_ratio_with;
use oblivious_kand::lp::solver_from_env;
use oblivious_kand::rational::{format_rational, to_f64};
use oblivious_kand::Rational;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Args)]
pub struct CertifyArgs {
    #[arg(short = 'k')]
    k: usize,
    /// Initial perturbation; halved until the strict system is solvable.
    #[arg(long, default_value = "1/1000", value_parser = rational)]
    eps: Rational,
    /// Directory for the margin table.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Serialize)]
struct Exact {
    delta: String,
    eps: String,
    eta: String,
    x: String,
    y: String,
    beta: String,
}

#[derive(Serialize)]
struct CertifyReport {
    k: usize,
    delta: f64,
    eps: f64,
    eta: f64,
    #[serde(rename = "X")]
    x: f64,
    #[serde(rename = "Y")]
    y: f64,
    /// Certified constant β', so the bound is `2^{-(k-1)} β'`.
    beta: f64,
    certified_lower_bound: f64,
    lp_primal_value: f64,
    margin_table_path: String,
    beta_k: f64,
    alpha_star: f64,
    gamma: f64,
    halvings: usize,
    exact: Exact,
}

pub fn certify(a: CertifyArgs, tol: f64) -> Result<(), CliError> {
    let c = constants(a.k)?;
    let s = solve_core_strict(a.k, &a.eps)?;
    let margins = check_suff_cond(a.k, &s.delta, &s.gamma, &s.beta, &s.x, &s.y)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let path = a.out_dir.join(format!("certify_k{}_margins.csv", a.k));
    write_or_print(Some(&path), &margins.to_csv())?;
    let lp = approximation_ratio_with(solver_from_env()?.as_ref(), a.k, &s.partition()?, &s.rounding()?, tol)?.ratio;
    let bound = to_f64(&s.certified_lower_bound);
    print_json(&CertifyReport {
        k: a.k,
        delta: to_f64(&s.delta),
        eps: to_f64(&s.eps),
        eta: to_f64(&s.eta),
        x: to_f64(&s.x),
        y: to_f64(&s.y),
        beta: to_f64(&s.beta_prime),
        certified_lower_bound: bound,
        lp_primal_value: lp,
        margin_table_path: path.display().to_string(),
        beta_k: to_f64(&s.beta),
        alpha_star: to_f64(&c.alpha_star),
        gamma: to_f64(&s.gamma),
        halvings: s.halvings,
        exact: Exact {
            delta: format_rational(&s.delta),
            eps: format_rational(&s.eps),
            eta: format_rational(&s.eta),
            x: format_rational(&s.x),
            y: format_rational(&s.y),
            beta: format_rational(&s.beta_prime),
        },
    })?;
    if s.certified_lower_bound <= c.alpha_star {
        return Err(CliError::Check(format!("certified bound {bound} does not exceed α*_{}", a.k)));
    }
    if lp < bound - tol {
        return Err(CliError::Check(format!("LP value {lp} is below the certified bound {bound}")));
    }
    Ok(())
}

#[derive(Args)]
pub struct BernoulliArgs {
    #[arg(short = 'k')]
    k: usize,
    /// Check every k up to this value.
    #[arg(long)]
    k_max: Option<usize>,
    /// Write all margins `k,i,j,margin` as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct BernoulliLine {
    k: usize,
    holds: bool,
    tight: Vec<(usize, usize)>,
    tight_count: usize,
    /// Smallest nonzero margin.
    min_margin: f64,
}

pub fn bernoulli(a: BernoulliArgs) -> Result<(), CliError> {
    let hi = a.k_max.unwrap_or(a.k);
    if hi < a.k {
        return Err(CliError::Usage("--k-max must be at least k".into()));
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["k", "i", "j", "margin"])?;
    let mut failed = Vec::new();
    for k in a.k..=hi {
        let r = check_bernoulli(k)?;
        let min = r.margins.iter().map(|(_, _, m)| m).filter(|m| **m != Rational::from_integer(0.into())).min().map(to_f64);
        for (i, j, m) in &r.margins {
            w.write_record([k.to_string(), i.to_string(), j.to_string(), to_f64(m).to_string()])?;
        }
        if !r.holds {
            failed.push(k);
        }
        print_json(&BernoulliLine { k, holds: r.holds, tight_count: r.tight.len(), tight: r.tight, min_margin: min.unwrap_or(0.0) })?;
    }
    if let Some(path) = &a.csv {
        let text = String::from_utf8(w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?).expect("csv output is utf-8");
        write_or_print(Some(path), &text)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("inequality fails for k in {failed:?}")))
    }
}
