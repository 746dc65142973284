//! Partition/rounding specifications shared by several commands.

use crate::error::CliError;
use clap::{Args, ValueEnum};
use oblivious_kand::certificates::constants;
use oblivious_kand::oblivious::{piecewise_linear_params_at, BiasPartition, RoundingVector, SamplePoint};
use oblivious_kand::rational::{format_rational, int, parse_rational};
use oblivious_kand::Rational;
use std::path::Path;

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum SampleAt {
    #[default]
    Right,
    Midpoint,
}

impl From<SampleAt> for SamplePoint {
    fn from(s: SampleAt) -> Self {
        match s {
            SampleAt::Right => SamplePoint::RightEndpoint,
            SampleAt::Midpoint => SamplePoint::Midpoint,
        }
    }
}

/// Exactly one of the four forms must be given.
#[derive(Args, Clone, Debug, Default)]
pub struct RoundingArgs {
    /// t = (0, 1), p = p*_k.
    #[arg(long)]
    pub superoblivious: bool,
    /// Thresholds t_0,…,t_ℓ with t_ℓ = 1.
    #[arg(short = 't', long, value_delimiter = ',', value_parser = rational, requires = "probs")]
    pub thresholds: Option<Vec<Rational>>,
    /// Rounding probabilities p_1,…,p_ℓ.
    #[arg(short = 'p', long, value_delimiter = ',', value_parser = rational, requires = "thresholds")]
    pub probs: Option<Vec<Rational>>,
    /// Two-piece linear rounding on ℓ uniform classes through (x, y).
    #[arg(long, num_args = 3, value_names = ["L", "X", "Y"])]
    pub piecewise: Option<Vec<String>>,
    /// t = (δ, 1), p = p*_k + ε.
    #[arg(long, num_args = 2, value_names = ["DELTA", "EPS"], value_parser = rational)]
    pub perturbed: Option<Vec<Rational>>,
    /// Where the piecewise curve is sampled inside each class.
    #[arg(long, value_enum, default_value = "right")]
    pub sample_point: SampleAt,
}

pub struct Resolved {
    pub label: String,
    pub t: BiasPartition,
    pub p: RoundingVector,
}

pub fn parse_piecewise(v: &[String]) -> Result<(usize, Rational, Rational), CliError> {
    let ell = v[0].parse::<usize>().map_err(|_| CliError::Usage(format!("--piecewise: ℓ must be a positive integer, got {:?}", v[0])))?;
    let x = rational(&v[1]).map_err(CliError::Usage)?;
    let y = rational(&v[2]).map_err(CliError::Usage)?;
    Ok((ell, x, y))
}

impl RoundingArgs {
    pub fn is_given(&self) -> bool {
        self.superoblivious || self.thresholds.is_some() || self.piecewise.is_some() || self.perturbed.is_some()
    }

    pub fn resolve(&self, k: usize) -> Result<Resolved, CliError> {
        let forms = [self.superoblivious, self.thresholds.is_some(), self.piecewise.is_some(), self.perturbed.is_some()];
        if forms.iter().filter(|&&f| f).count() != 1 {
            return Err(CliError::Usage("give exactly one of --superoblivious, -t/-p, --piecewise, --perturbed".into()));
        }
        if self.superoblivious {
            let c = constants(k)?;
            return Ok(Resolved { label: "superoblivious".into(), t: BiasPartition::superoblivious(), p: RoundingVector::single(c.p_star)? });
        }
        if let (Some(t), Some(p)) = (&self.thresholds, &self.probs) {
            return Ok(Resolved { label: "explicit".into(), t: BiasPartition::new(t.clone())?, p: RoundingVector::new(p.clone())? });
        }
        if let Some(v) = &self.piecewise {
            let (ell, x, y) = parse_piecewise(v)?;
            let (t, p) = piecewise_linear_params_at(ell, &x, &y, self.sample_point.into())?;
            let label = format!("piecewise({ell},{},{})", format_rational(&x), format_rational(&y));
            return Ok(Resolved { label, t, p });
        }
        let v = self.perturbed.as_ref().expect("one form is present");
        let c = constants(k)?;
        let p = &c.p_star + &v[1];
        if p > int(1) {
            return Err(CliError::Usage("p*_k + ε exceeds 1".into()));
        }
        let label = format!("perturbed({},{})", format_rational(&v[0]), format_rational(&v[1]));
        Ok(Resolved { label, t: BiasPartition::two_class(v[0].clone())?, p: RoundingVector::single(p)? })
    }
}

/// Parses `a:b:step` (inclusive, exact) or a comma-separated list.
pub fn parse_range(s: &str) -> Result<Vec<Rational>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = |m: String| CliError::Usage(m);
    match parts.len() {
        1 => s.split(',').map(|x| rational(x).map_err(bad)).collect(),
        3 => {
            let (a, b, step) = (rational(parts[0]).map_err(bad)?, rational(parts[1]).map_err(bad)?, rational(parts[2]).map_err(bad)?);
            if step <= int(0) || b < a {
                return Err(CliError::Usage(format!("bad range {s:?}: need a <= b and step > 0")));
            }
            let mut out = Vec::new();
            let mut x = a;
            while x <= b {
                out.push(x.clone());
                x += &step;
                if out.len() > 100_000 {
                    return Err(CliError::Usage(format!("range {s:?} has too many points")));
                }
            }
            Ok(out)
        }
        _ => Err(CliError::Usage(format!("bad range {s:?}: expected a:b:step or a list"))),
    }
}

pub fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn solver_name() -> String {
    std::env::var(oblivious_kand::lp::SOLVER_ENV).ok().filter(|s| !s.is_empty()).unwrap_or_else(|| "simplex".into())
}
