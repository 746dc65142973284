//! External LP solvers driven through the text dump format.
//!
//! The program is called with the dump path as its only argument and must
//! print a status line (`optimal`, `infeasible` or `unbounded`), then the
//! objective value, then optionally `x <idx> <value>` lines.

use std::path::PathBuf;
use std::process::Command;

use super::{LpResult, LpSolver, LpStatus, SimplexSolver, StandardFormLP};
use crate::error::{Error, Result};

pub const SOLVER_ENV: &str = "OBLIV_KAND_SOLVER";

#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub program: PathBuf,
}

impl ExternalSolver {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        ExternalSolver { program: program.into() }
    }
}

fn parse_output(text: &str, num_vars: usize) -> Result<LpResult> {
    let bad = |msg: String| Error::Solver(format!("external solver output: {msg}"));
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let status = match lines.next().map(str::to_ascii_lowercase).as_deref() {
        Some("optimal") => LpStatus::Optimal,
        Some("infeasible") => LpStatus::Infeasible,
        Some("unbounded") => LpStatus::Unbounded,
        other => return Err(bad(format!("unknown status {other:?}"))),
    };
    let value = match status {
        LpStatus::Optimal => lines.next().and_then(|l| l.parse::<f64>().ok()).ok_or_else(|| bad("missing objective".into()))?,
        LpStatus::Infeasible => f64::NAN,
        LpStatus::Unbounded => f64::NEG_INFINITY,
    };
    let mut solution = Vec::new();
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["x", j, v] => {
                let j: usize = j.parse().map_err(|_| bad(format!("bad index in {line:?}")))?;
                let v: f64 = v.parse().map_err(|_| bad(format!("bad value in {line:?}")))?;
                if j >= num_vars {
                    return Err(bad(format!("index {j} out of range")));
                }
                solution.resize(num_vars, 0.0);
                solution[j] = v;
            }
            _ => return Err(bad(format!("unexpected line {line:?}"))),
        }
    }
    Ok(LpResult { status, value, solution, duals: Vec::new(), iterations: 0 })
}

impl LpSolver for ExternalSolver {
    fn solve(&self, lp: &StandardFormLP, _tol: f64) -> Result<LpResult> {
        lp.validate()?;
        let path = std::env::temp_dir().join(format!("obliv-kand-lp-{}-{:p}.txt", std::process::id(), lp));
        std::fs::write(&path, lp.to_dump())?;
        let out = Command::new(&self.program).arg(&path).output();
        let _ = std::fs::remove_file(&path);
        let out = out.map_err(|e| Error::Solver(format!("cannot run {}: {e}", self.program.display())))?;
        if !out.status.success() {
            return Err(Error::Solver(format!("{} exited with {}", self.program.display(), out.status)));
        }
        parse_output(&String::from_utf8_lossy(&out.stdout), lp.num_vars)
    }
}

/// `OBLIV_KAND_SOLVER=external:<path>` selects an external program; unset or
/// `simplex` selects the built-in solver.
pub fn solver_from_env() -> Result<Box<dyn LpSolver>> {
    match std::env::var(SOLVER_ENV) {
        Err(_) => Ok(Box::new(SimplexSolver::default())),
        Ok(v) if v.is_empty() || v == "simplex" => Ok(Box::new(SimplexSolver::default())),
        Ok(v) => match v.strip_prefix("external:") {
            Some(path) if !path.is_empty() => Ok(Box::new(ExternalSolver::new(path))),
            _ => Err(Error::InvalidParameter(format!("{SOLVER_ENV} must be `simplex` or `external:<path>`, got {v:?}"))),
        },
    }
}
