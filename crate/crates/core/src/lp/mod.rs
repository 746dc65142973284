//! Standard-form linear programs: `minimize c·x` subject to equality and
//! `<=` rows over `x >= 0`.

mod external;
mod simplex;

use std::fmt::Write as _;

pub use external::{solver_from_env, ExternalSolver, SOLVER_ENV};
pub use simplex::{SimplexOptions, SimplexSolver};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Sparse row `Σ coeffs · x (= or <=) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LpRow {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        LpRow { coeffs, rhs }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardFormLP {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq_rows: Vec<LpRow>,
    pub le_rows: Vec<LpRow>,
}

impl StandardFormLP {
    pub fn new(num_vars: usize) -> Self {
        StandardFormLP { num_vars, objective: vec![0.0; num_vars], eq_rows: Vec::new(), le_rows: Vec::new() }
    }

    pub fn num_rows(&self) -> usize {
        self.eq_rows.len() + self.le_rows.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::Dimension(format!("objective has {} entries for {} variables", self.objective.len(), self.num_vars)));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite objective coefficient".into()));
        }
        for row in self.eq_rows.iter().chain(&self.le_rows) {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidParameter("non-finite right-hand side".into()));
            }
            for &(j, a) in &row.coeffs {
                if j >= self.num_vars {
                    return Err(Error::Dimension(format!("row references variable {j} of {}", self.num_vars)));
                }
                if !a.is_finite() {
                    return Err(Error::InvalidParameter("non-finite row coefficient".into()));
                }
            }
        }
        Ok(())
    }

    /// Plain-text dump: `vars n`, `min idx:coef ...`, then `eq|le rhs idx:coef ...`.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let terms = |coeffs: &mut dyn Iterator<Item = (usize, f64)>| {
            coeffs.map(|(j, a)| format!(" {j}:{a:e}")).collect::<String>()
        };
        writeln!(out, "vars {}", self.num_vars).unwrap();
        let mut obj = self.objective.iter().copied().enumerate().filter(|&(_, c)| c != 0.0);
        writeln!(out, "min{}", terms(&mut obj)).unwrap();
        for (kind, rows) in [("eq", &self.eq_rows), ("le", &self.le_rows)] {
            for row in rows {
                writeln!(out, "{kind} {:e}{}", row.rhs, terms(&mut row.coeffs.iter().copied())).unwrap();
            }
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let mut lp: Option<StandardFormLP> = None;
        for (no, line) in text.lines().enumerate() {
            let err = |msg: &str| Error::Parse { line: no + 1, msg: msg.to_string() };
            let mut parts = line.split_whitespace();
            let Some(head) = parts.next() else { continue };
            if head == "vars" {
                let n = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| err("bad variable count"))?;
                lp = Some(StandardFormLP::new(n));
                continue;
            }
            let lp = lp.as_mut().ok_or_else(|| err("missing `vars` line"))?;
            let rhs = match head {
                "min" => None,
                "eq" | "le" => Some(parts.next().and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| err("bad rhs"))?),
                _ => return Err(err("unknown line kind")),
            };
            let mut coeffs = Vec::new();
            for term in parts {
                let (j, a) = term.split_once(':').ok_or_else(|| err("term must be idx:coef"))?;
                let j: usize = j.parse().map_err(|_| err("bad index"))?;
                let a: f64 = a.parse().map_err(|_| err("bad coefficient"))?;
                if j >= lp.num_vars {
                    return Err(err("index out of range"));
                }
                coeffs.push((j, a));
            }
            match (head, rhs) {
                ("min", _) => coeffs.into_iter().for_each(|(j, a)| lp.objective[j] = a),
                ("eq", Some(r)) => lp.eq_rows.push(LpRow::new(coeffs, r)),
                (_, Some(r)) => lp.le_rows.push(LpRow::new(coeffs, r)),
                _ => unreachable!(),
            }
        }
        lp.ok_or_else(|| Error::Parse { line: 0, msg: "empty dump".into() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub value: f64,
    /// Empty unless `status` is `Optimal`.
    pub solution: Vec<f64>,
    /// Row duals (eq rows first, then le rows); empty when not reported.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpResult {
    pub fn optimal_value(&self) -> Result<f64> {
        match self.status {
            LpStatus::Optimal => Ok(self.value),
            s => Err(Error::LpStatus(format!("{s:?}"))),
        }
    }
}

pub trait LpSolver: Send + Sync {
    fn solve(&self, lp: &StandardFormLP, tol: f64) -> Result<LpResult>;
}

/// Solves with the solver selected by the environment (the built-in simplex by default).
pub fn solve(lp: &StandardFormLP, tol: f64) -> Result<LpResult> {
    solver_from_env()?.solve(lp, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowViolation {
    /// Index into eq rows followed by le rows.
    pub row: usize,
    pub is_eq: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub violations: Vec<RowViolation>,
    /// Largest violation over rows and nonnegativity bounds.
    pub worst: f64,
    pub passed: bool,
}

pub fn check_feasible(lp: &StandardFormLP, x: &[f64], tol: f64) -> Result<FeasibilityReport> {
    if x.len() != lp.num_vars {
        return Err(Error::Dimension(format!("point has {} entries for {} variables", x.len(), lp.num_vars)));
    }
    let mut violations = Vec::new();
    let mut worst: f64 = x.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    if x.iter().any(|v| !v.is_finite()) {
        worst = f64::INFINITY;
    }
    for (r, row) in lp.eq_rows.iter().enumerate() {
        let res = (row.dot(x) - row.rhs).abs();
        worst = worst.max(res);
        if res > tol {
            violations.push(RowViolation { row: r, is_eq: true, residual: res });
        }
    }
    for (r, row) in lp.le_rows.iter().enumerate() {
        let res = (row.dot(x) - row.rhs).max(0.0);
        worst = worst.max(res);
        if res > tol {
            violations.push(RowViolation { row: lp.eq_rows.len() + r, is_eq: false, residual: res });
        }
    }
    Ok(FeasibilityReport { passed: worst <= tol, violations, worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_var(obj: f64) -> StandardFormLP {
        let mut lp = StandardFormLP::new(1);
        lp.objective[0] = obj;
        lp
    }

    #[test]
    fn trivial_examples() {
        let s = SimplexSolver::default();
        let mut lp = one_var(1.0);
        lp.eq_rows.push(LpRow::new(vec![(0, 1.0)], 1.0));
        let r = s.solve(&lp, DEFAULT_TOL).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.value - 1.0).abs() < 1e-12);

        let mut lp = one_var(-1.0);
        lp.le_rows.push(LpRow::new(vec![(0, 1.0)], 5.0));
        assert!((s.solve(&lp, DEFAULT_TOL).unwrap().value + 5.0).abs() < 1e-12);

        let mut lp = one_var(1.0);
        lp.le_rows.push(LpRow::new(vec![(0, 1.0)], -1.0));
        assert_eq!(s.solve(&lp, DEFAULT_TOL).unwrap().status, LpStatus::Infeasible);

        let lp = one_var(-1.0);
        assert_eq!(s.solve(&lp, DEFAULT_TOL).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn feasibility_report() {
        let mut lp = StandardFormLP::new(2);
        lp.eq_rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0)], 1.0));
        lp.le_rows.push(LpRow::new(vec![(0, 1.0)], 0.75));
        let ok = check_feasible(&lp, &[0.5, 0.5], 1e-9).unwrap();
        assert!(ok.passed);
        assert_eq!(ok.worst, 0.0);
        let bad = check_feasible(&lp, &[0.5, 1.0], 1e-9).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.violations, vec![RowViolation { row: 0, is_eq: true, residual: 0.5 }]);
        assert!(check_feasible(&lp, &[0.5], 1e-9).is_err());
        assert!(!check_feasible(&lp, &[1.5, -0.5], 1e-9).unwrap().passed);
    }

    #[test]
    fn dump_round_trip() {
        let mut lp = StandardFormLP::new(3);
        lp.objective = vec![1.0, 0.0, -0.25];
        lp.eq_rows.push(LpRow::new(vec![(0, 1.0), (2, 1.0)], 1.0));
        lp.le_rows.push(LpRow::new(vec![(1, -0.1), (2, 3.0)], 0.0));
        let text = lp.to_dump();
        assert!(text.starts_with("vars 3\nmin 0:1e0 2:-2.5e-1\neq 1e0 0:1e0 2:1e0\n"));
        assert_eq!(StandardFormLP::from_dump(&text).unwrap(), lp);
        assert!(StandardFormLP::from_dump("min 0:1").is_err());
        assert!(StandardFormLP::from_dump("vars 1\nle 1 3:1").is_err());
    }

    #[test]
    fn validation() {
        let mut lp = StandardFormLP::new(1);
        lp.eq_rows.push(LpRow::new(vec![(1, 1.0)], 1.0));
        assert!(lp.validate().is_err());
        let mut lp = StandardFormLP::new(1);
        lp.objective[0] = f64::NAN;
        assert!(lp.validate().is_err());
    }
}
