//! Two-phase revised simplex with a product-form inverse.
//!
//! Rows are sign-normalized so every right-hand side is nonnegative. Each row
//! gets a logical column (its slack when that slack has coefficient +1, an
//! artificial otherwise); the logicals form the starting basis.

use super::{check_feasible, LpResult, LpSolver, LpStatus, StandardFormLP};
use crate::error::{Error, Result};

const NONBASIC: usize = usize::MAX;
const PIVOT_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-14;
const PERTURB: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexOptions {
    /// Degenerate pivots in a row before switching to Bland's rule.
    pub bland_after: usize,
    /// Basis updates between refactorizations.
    pub refactor_every: usize,
    /// `None` means `20 * (rows + columns) + 1000`.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { bland_after: 50, refactor_every: 64, max_iterations: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SimplexSolver {
    pub options: SimplexOptions,
}

impl SimplexSolver {
    pub fn new(options: SimplexOptions) -> Self {
        SimplexSolver { options }
    }
}

impl LpSolver for SimplexSolver {
    fn solve(&self, lp: &StandardFormLP, tol: f64) -> Result<LpResult> {
        lp.validate()?;
        let problem = Problem::build(lp);
        let mut state = State::new(&problem, self.options);
        state.run(lp, tol)
    }
}

/// Equality form `A x = b`, `b >= 0`, columns stored compressed.
struct Problem {
    m: usize,
    n_struct: usize,
    first_art: usize,
    colptr: Vec<usize>,
    rowidx: Vec<usize>,
    val: Vec<f64>,
    b: Vec<f64>,
    sign: Vec<f64>,
    logical: Vec<usize>,
    cost: Vec<f64>,
}

impl Problem {
    fn build(lp: &StandardFormLP) -> Problem {
        let rows: Vec<_> = lp.eq_rows.iter().map(|r| (r, true)).chain(lp.le_rows.iter().map(|r| (r, false))).collect();
        let m = rows.len();
        let n = lp.num_vars;
        let sign: Vec<f64> = rows.iter().map(|(r, _)| if r.rhs < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = rows.iter().map(|(r, _)| r.rhs.abs()).collect();

        let mut count = vec![0usize; n];
        for (row, _) in &rows {
            for &(j, a) in &row.coeffs {
                if a != 0.0 {
                    count[j] += 1;
                }
            }
        }
        let slacks: Vec<usize> = (0..m).filter(|&r| !rows[r].1).collect();
        let arts: Vec<usize> = (0..m).filter(|&r| rows[r].1 || sign[r] < 0.0).collect();
        let ncols = n + slacks.len() + arts.len();
        let mut colptr = vec![0usize; ncols + 1];
        for j in 0..n {
            colptr[j + 1] = colptr[j] + count[j];
        }
        for j in n..ncols {
            colptr[j + 1] = colptr[j] + 1;
        }
        let nnz = colptr[ncols];
        let mut rowidx = vec![0usize; nnz];
        let mut val = vec![0.0; nnz];
        let mut fill = colptr.clone();
        for (r, (row, _)) in rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if a != 0.0 {
                    rowidx[fill[j]] = r;
                    val[fill[j]] = a * sign[r];
                    fill[j] += 1;
                }
            }
        }
        // Duplicate indices within a row stay as separate entries; dot
        // products and FTRAN both sum them, which matches the row semantics.
        let mut logical = vec![NONBASIC; m];
        for (s, &r) in slacks.iter().enumerate() {
            let j = n + s;
            rowidx[colptr[j]] = r;
            val[colptr[j]] = sign[r];
            if sign[r] > 0.0 {
                logical[r] = j;
            }
        }
        let first_art = n + slacks.len();
        for (a, &r) in arts.iter().enumerate() {
            let j = first_art + a;
            rowidx[colptr[j]] = r;
            val[colptr[j]] = 1.0;
            logical[r] = j;
        }
        let mut cost = vec![0.0; ncols];
        cost[..n].copy_from_slice(&lp.objective);
        Problem { m, n_struct: n, first_art, colptr, rowidx, val, b, sign, logical, cost }
    }

    fn ncols(&self) -> usize {
        self.colptr.len() - 1
    }

    fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.colptr[j]..self.colptr[j + 1]).map(move |e| (self.rowidx[e], self.val[e]))
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_art
    }
}

/// Elementary matrix: identity with column `row` replaced.
struct Eta {
    row: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

struct State<'a> {
    p: &'a Problem,
    opts: SimplexOptions,
    basis: Vec<usize>,
    pos: Vec<usize>,
    /// Right-hand side in use; differs from `p.b` while perturbed.
    b: Vec<f64>,
    xb: Vec<f64>,
    etas: Vec<Eta>,
    since_refactor: usize,
    iterations: usize,
    degenerate_streak: usize,
    max_iterations: usize,
}

impl<'a> State<'a> {
    fn new(p: &'a Problem, opts: SimplexOptions) -> Self {
        let mut pos = vec![NONBASIC; p.ncols()];
        for (r, &j) in p.logical.iter().enumerate() {
            pos[j] = r;
        }
        let max_iterations = opts.max_iterations.unwrap_or(20 * (p.m + p.ncols()) + 1000);
        State {
            p,
            opts,
            basis: p.logical.clone(),
            pos,
            b: p.b.clone(),
            xb: p.b.clone(),
            etas: Vec::new(),
            since_refactor: 0,
            iterations: 0,
            degenerate_streak: 0,
            max_iterations,
        }
    }

    fn ftran(&self, x: &mut [f64]) {
        for eta in &self.etas {
            let xr = x[eta.row];
            if xr != 0.0 {
                x[eta.row] = xr * eta.pivot;
                for &(i, v) in &eta.entries {
                    x[i] += v * xr;
                }
            }
        }
    }

    fn btran(&self, y: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut s = y[eta.row] * eta.pivot;
            for &(i, v) in &eta.entries {
                s += y[i] * v;
            }
            y[eta.row] = s;
        }
    }

    fn dense_col(&self, j: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.p.m];
        for (i, a) in self.p.col(j) {
            x[i] += a;
        }
        x
    }

    fn push_eta(&mut self, row: usize, alpha: &[f64]) {
        let ar = alpha[row];
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != row && a.abs() > DROP_TOL)
            .map(|(i, &a)| (i, -a / ar))
            .collect();
        self.etas.push(Eta { row, pivot: 1.0 / ar, entries });
    }

    /// Rebuilds the eta file from scratch for the current basic columns.
    fn refactor(&mut self) {
        let p = self.p;
        let m = p.m;
        self.etas.clear();
        let mut assigned = vec![false; m];
        let mut new_basis = vec![NONBASIC; m];
        let mut cols: Vec<usize> = self.basis.iter().copied().filter(|&j| j != NONBASIC).collect();
        cols.sort_by_key(|&j| (p.colptr[j + 1] - p.colptr[j] != 1, j));
        for &j in &cols {
            self.pos[j] = NONBASIC;
        }
        for j in cols {
            let alpha = {
                let mut a = self.dense_col(j);
                self.ftran(&mut a);
                a
            };
            let mut best: Option<usize> = None;
            for r in 0..m {
                if !assigned[r] && alpha[r].abs() > PIVOT_TOL && best.is_none_or(|b| alpha[r].abs() > alpha[b].abs()) {
                    best = Some(r);
                }
            }
            let Some(r) = best else { continue };
            assigned[r] = true;
            new_basis[r] = j;
            self.pos[j] = r;
            if !(alpha[r] == 1.0 && alpha.iter().enumerate().all(|(i, &a)| i == r || a == 0.0)) {
                self.push_eta(r, &alpha);
            }
        }
        // Singular leftovers are replaced by the row's logical column.
        for r in 0..m {
            if !assigned[r] {
                let j = p.logical[r];
                let mut alpha = self.dense_col(j);
                self.ftran(&mut alpha);
                new_basis[r] = j;
                self.pos[j] = r;
                self.push_eta(r, &alpha);
            }
        }
        self.basis = new_basis;
        let mut xb = self.b.clone();
        self.ftran(&mut xb);
        self.xb = xb;
        self.since_refactor = 0;
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        self.btran(&mut y);
        y
    }

    fn reduced_cost(&self, y: &[f64], cost: &[f64], j: usize) -> f64 {
        cost[j] - self.p.col(j).map(|(i, a)| y[i] * a).sum::<f64>()
    }

    fn choose_entering(&self, y: &[f64], cost: &[f64], tol: f64, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.p.first_art {
            if self.pos[j] != NONBASIC {
                continue;
            }
            let d = self.reduced_cost(y, cost, j);
            if d < -tol {
                if bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn choose_leaving(&self, alpha: &[f64], feas_tol: f64, bland: bool) -> Option<usize> {
        let candidates = || (0..self.p.m).filter(|&i| alpha[i] > PIVOT_TOL);
        if bland {
            let theta = candidates().map(|i| self.xb[i].max(0.0) / alpha[i]).fold(f64::INFINITY, f64::min);
            if !theta.is_finite() {
                return None;
            }
            let slack = 1e-12 * (1.0 + theta);
            return candidates().filter(|&i| self.xb[i].max(0.0) / alpha[i] <= theta + slack).min_by_key(|&i| self.basis[i]);
        }
        // Harris two-pass: relax bounds by `feas_tol`, then take the largest pivot.
        let theta_max = candidates().map(|i| (self.xb[i].max(0.0) + feas_tol) / alpha[i]).fold(f64::INFINITY, f64::min);
        if !theta_max.is_finite() {
            return None;
        }
        let mut best: Option<usize> = None;
        for i in candidates() {
            if self.xb[i].max(0.0) / alpha[i] <= theta_max && best.is_none_or(|b| alpha[i] > alpha[b]) {
                best = Some(i);
            }
        }
        best
    }

    fn pivot(&mut self, q: usize, r: usize, alpha: &[f64]) {
        let theta = (self.xb[r] / alpha[r]).max(0.0);
        for i in 0..self.p.m {
            if alpha[i] != 0.0 {
                self.xb[i] -= theta * alpha[i];
            }
        }
        self.xb[r] = theta;
        self.pos[self.basis[r]] = NONBASIC;
        self.basis[r] = q;
        self.pos[q] = r;
        self.push_eta(r, alpha);
        self.iterations += 1;
        self.since_refactor += 1;
        if theta <= 1e-12 {
            self.degenerate_streak += 1;
        } else {
            self.degenerate_streak = 0;
        }
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor();
        }
    }

    fn step(&mut self, cost: &[f64], tol: f64) -> Step {
        let bland = self.degenerate_streak >= self.opts.bland_after;
        let y = self.duals(cost);
        let Some(q) = self.choose_entering(&y, cost, tol, bland) else {
            return Step::Optimal;
        };
        let mut alpha = self.dense_col(q);
        self.ftran(&mut alpha);
        let Some(r) = self.choose_leaving(&alpha, tol, bland) else {
            return Step::Unbounded;
        };
        self.pivot(q, r, &alpha);
        Step::Pivoted
    }

    fn optimize(&mut self, cost: &[f64], tol: f64) -> Result<Step> {
        self.degenerate_streak = 0;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::Solver(format!("iteration limit {} reached", self.max_iterations)));
            }
            match self.step(cost, tol) {
                Step::Pivoted => {}
                done => {
                    if self.since_refactor == 0 {
                        return Ok(done);
                    }
                    // Confirm on a fresh factorization.
                    self.refactor();
                }
            }
        }
    }

    /// Pivots basic artificials out wherever a structural or slack column allows.
    fn drive_out_artificials(&mut self) {
        let p = self.p;
        for r in 0..p.m {
            if !p.is_artificial(self.basis[r]) {
                continue;
            }
            let mut rho = vec![0.0; p.m];
            rho[r] = 1.0;
            self.btran(&mut rho);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..p.first_art {
                if self.pos[j] != NONBASIC {
                    continue;
                }
                let v: f64 = p.col(j).map(|(i, a)| rho[i] * a).sum();
                if v.abs() > 1e-7 && best.is_none_or(|(_, bv)| v.abs() > bv) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((q, _)) = best {
                let mut alpha = self.dense_col(q);
                self.ftran(&mut alpha);
                let theta = self.xb[r] / alpha[r];
                for i in 0..p.m {
                    self.xb[i] -= theta * alpha[i];
                }
                self.xb[r] = theta;
                self.pos[self.basis[r]] = NONBASIC;
                self.basis[r] = q;
                self.pos[q] = r;
                self.push_eta(r, &alpha);
                self.since_refactor += 1;
            }
        }
        self.refactor();
    }

    /// Shifts every basic value up by a small deterministic amount and moves
    /// the right-hand side to match, so the current basis stays feasible but
    /// ties in the ratio test mostly disappear.
    fn perturb(&mut self) {
        let p = self.p;
        let scale = self.b.iter().copied().fold(1.0, f64::max);
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        for r in 0..p.m {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let xi = PERTURB * scale * (1.0 + u);
            self.xb[r] += xi;
            for (i, a) in p.col(self.basis[r]) {
                self.b[i] += a * xi;
            }
        }
        self.refactor();
    }

    /// Dual simplex on the current basis, which must be dual feasible for
    /// `cost`. Used after the perturbation is removed.
    fn dual_cleanup(&mut self, cost: &[f64], feas_tol: f64) -> Result<()> {
        let p = self.p;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::Solver(format!("iteration limit {} reached", self.max_iterations)));
            }
            let Some(r) = (0..p.m).filter(|&r| self.xb[r] < -feas_tol).min_by(|&a, &b| self.xb[a].total_cmp(&self.xb[b])) else {
                return Ok(());
            };
            let mut rho = vec![0.0; p.m];
            rho[r] = 1.0;
            self.btran(&mut rho);
            let y = self.duals(cost);
            let mut best: Option<(usize, f64, f64)> = None;
            for j in 0..p.first_art {
                if self.pos[j] != NONBASIC {
                    continue;
                }
                let a: f64 = p.col(j).map(|(i, v)| rho[i] * v).sum();
                if a >= -PIVOT_TOL {
                    continue;
                }
                let ratio = self.reduced_cost(&y, cost, j).max(0.0) / -a;
                if best.is_none_or(|(_, br, ba)| ratio < br - 1e-12 || (ratio <= br + 1e-12 && -a > ba)) {
                    best = Some((j, ratio, -a));
                }
            }
            let Some((q, _, _)) = best else {
                return Err(Error::Solver("dual cleanup found no entering column".into()));
            };
            let mut alpha = self.dense_col(q);
            self.ftran(&mut alpha);
            self.pivot(q, r, &alpha);
        }
    }

    fn run(&mut self, lp: &StandardFormLP, tol: f64) -> Result<LpResult> {
        let p = self.p;
        let bmax = p.b.iter().copied().fold(1.0, f64::max);
        self.refactor();
        if p.first_art < p.ncols() {
            let phase1: Vec<f64> = (0..p.ncols()).map(|j| if p.is_artificial(j) { 1.0 } else { 0.0 }).collect();
            if let Step::Unbounded = self.optimize(&phase1, tol)? {
                return Err(Error::Solver("phase one reported unbounded".into()));
            }
            let infeas: f64 = (0..p.m).filter(|&r| p.is_artificial(self.basis[r])).map(|r| self.xb[r].max(0.0)).sum();
            if infeas > 100.0 * tol.max(1e-12) * bmax {
                return Ok(LpResult { status: LpStatus::Infeasible, value: f64::NAN, solution: Vec::new(), duals: Vec::new(), iterations: self.iterations });
            }
            self.drive_out_artificials();
        }
        let cost = p.cost.clone();
        self.perturb();
        let step = self.optimize(&cost, tol)?;
        self.b = p.b.clone();
        self.refactor();
        let step = match step {
            Step::Unbounded => Step::Unbounded,
            _ => {
                self.dual_cleanup(&cost, tol * bmax)?;
                self.optimize(&cost, tol)?
            }
        };
        if let Step::Unbounded = step {
            return Ok(LpResult { status: LpStatus::Unbounded, value: f64::NEG_INFINITY, solution: Vec::new(), duals: Vec::new(), iterations: self.iterations });
        }
        let mut x = vec![0.0; p.n_struct];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < p.n_struct {
                x[j] = if self.xb[r].abs() <= tol { self.xb[r].max(0.0) } else { self.xb[r] };
            }
        }
        let report = check_feasible(lp, &x, tol * bmax)?;
        if !report.passed {
            return Err(Error::Solver(format!("numerical failure: worst residual {:e} after {} iterations", report.worst, self.iterations)));
        }
        let duals = self.duals(&cost).iter().zip(&p.sign).map(|(y, s)| y * s).collect();
        Ok(LpResult { status: LpStatus::Optimal, value: lp.objective_value(&x), solution: x, duals, iterations: self.iterations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LpRow, DEFAULT_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solve(lp: &StandardFormLP) -> LpResult {
        SimplexSolver::default().solve(lp, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
        let mut lp = StandardFormLP::new(2);
        lp.objective = vec![-3.0, -5.0];
        lp.le_rows.push(LpRow::new(vec![(0, 1.0)], 4.0));
        lp.le_rows.push(LpRow::new(vec![(1, 2.0)], 12.0));
        lp.le_rows.push(LpRow::new(vec![(0, 3.0), (1, 2.0)], 18.0));
        let r = solve(&lp);
        assert!((r.value + 36.0).abs() < 1e-9);
        assert!((r.solution[0] - 2.0).abs() < 1e-9 && (r.solution[1] - 6.0).abs() < 1e-9);
        // Duals of the le rows: 0, -3/2, -1.
        assert!((r.duals[1] + 1.5).abs() < 1e-9 && (r.duals[2] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_and_equalities() {
        // min x + y, x + y >= 2 (as -x - y <= -2), x - y = 1 -> (1.5, 0.5).
        let mut lp = StandardFormLP::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.eq_rows.push(LpRow::new(vec![(0, 1.0), (1, -1.0)], 1.0));
        lp.le_rows.push(LpRow::new(vec![(0, -1.0), (1, -1.0)], -2.0));
        let r = solve(&lp);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.value - 2.0).abs() < 1e-9);
        assert!((r.solution[0] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = StandardFormLP::new(3);
        lp.objective = vec![1.0, 2.0, 3.0];
        lp.eq_rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0), (2, 1.0)], 1.0));
        lp.eq_rows.push(LpRow::new(vec![(0, 2.0), (1, 2.0), (2, 2.0)], 2.0));
        lp.eq_rows.push(LpRow::new(vec![(1, 1.0), (2, 1.0)], 0.5));
        let r = solve(&lp);
        assert!((r.value - 1.5).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn infeasible_system() {
        let mut lp = StandardFormLP::new(2);
        lp.eq_rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0)], 1.0));
        lp.eq_rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0)], 2.0));
        assert_eq!(solve(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under the textbook rule without anti-cycling.
        let mut lp = StandardFormLP::new(4);
        lp.objective = vec![-0.75, 150.0, -0.02, 6.0];
        lp.le_rows.push(LpRow::new(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], 0.0));
        lp.le_rows.push(LpRow::new(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], 0.0));
        lp.le_rows.push(LpRow::new(vec![(2, 1.0)], 1.0));
        let r = SimplexSolver::new(SimplexOptions { bland_after: 1, ..Default::default() }).solve(&lp, DEFAULT_TOL).unwrap();
        assert!((r.value + 0.05).abs() < 1e-9, "{r:?}");
        assert!((solve(&lp).value + 0.05).abs() < 1e-9);
    }

    /// Brute-force oracle: enumerate every basis of a small `<=` system with
    /// explicit slacks and keep the best feasible vertex.
    fn vertex_enumeration(lp: &StandardFormLP) -> Option<f64> {
        let m = lp.le_rows.len();
        let n = lp.num_vars;
        let total = n + m;
        let mut a = vec![vec![0.0; total]; m];
        for (r, row) in lp.le_rows.iter().enumerate() {
            for &(j, v) in &row.coeffs {
                a[r][j] += v;
            }
            a[r][n + r] = 1.0;
        }
        let b: Vec<f64> = lp.le_rows.iter().map(|r| r.rhs).collect();
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let cols: Vec<usize> = (0..total).filter(|j| mask >> j & 1 == 1).collect();
            let mut mat: Vec<Vec<f64>> = (0..m).map(|r| cols.iter().map(|&c| a[r][c]).chain([b[r]]).collect()).collect();
            let mut ok = true;
            for c in 0..m {
                let piv = (c..m).max_by(|&x, &y| mat[x][c].abs().total_cmp(&mat[y][c].abs())).unwrap();
                if mat[piv][c].abs() < 1e-9 {
                    ok = false;
                    break;
                }
                mat.swap(c, piv);
                for r in 0..m {
                    if r != c {
                        let f = mat[r][c] / mat[c][c];
                        for k in c..=m {
                            mat[r][k] -= f * mat[c][k];
                        }
                    }
                }
            }
            if !ok {
                continue;
            }
            let xs: Vec<f64> = (0..m).map(|r| mat[r][m] / mat[r][r]).collect();
            if xs.iter().any(|&v| v < -1e-9) {
                continue;
            }
            let mut x = vec![0.0; n];
            for (k, &c) in cols.iter().enumerate() {
                if c < n {
                    x[c] = xs[k];
                }
            }
            let v = lp.objective_value(&x);
            best = Some(best.map_or(v, |bv: f64| bv.min(v)));
        }
        best
    }

    #[test]
    fn matches_vertex_enumeration_on_random_bounded_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=4);
            let mut lp = StandardFormLP::new(n);
            lp.objective = (0..n).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
            for _ in 0..m {
                let coeffs = (0..n).map(|j| (j, rng.gen_range(-2i32..=4) as f64)).collect();
                lp.le_rows.push(LpRow::new(coeffs, rng.gen_range(0i32..=6) as f64));
            }
            // Box keeps every instance bounded.
            lp.le_rows.push(LpRow::new((0..n).map(|j| (j, 1.0)).collect(), 10.0));
            let expected = vertex_enumeration(&lp).unwrap();
            let r = solve(&lp);
            assert_eq!(r.status, LpStatus::Optimal);
            assert!((r.value - expected).abs() < 1e-7, "{} vs {expected}\n{}", r.value, lp.to_dump());
        }
    }

    #[test]
    fn matches_vertex_enumeration_on_degenerate_lps() {
        // Mostly zero right-hand sides, the shape of the bias rows.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(2..=4);
            let m = rng.gen_range(2..=5);
            let mut lp = StandardFormLP::new(n);
            lp.objective = (0..n).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
            for _ in 0..m {
                let coeffs = (0..n).map(|j| (j, rng.gen_range(-2i32..=2) as f64)).collect();
                let rhs = if rng.gen_bool(0.8) { 0.0 } else { 1.0 };
                lp.le_rows.push(LpRow::new(coeffs, rhs));
            }
            lp.le_rows.push(LpRow::new((0..n).map(|j| (j, 1.0)).collect(), 1.0));
            let expected = vertex_enumeration(&lp).unwrap();
            let r = solve(&lp);
            assert!((r.value - expected).abs() < 1e-7, "{} vs {expected}\n{}", r.value, lp.to_dump());
            assert!(check_feasible(&lp, &r.solution, 1e-9).unwrap().passed);
        }
    }

    #[test]
    fn deterministic() {
        let mut lp = StandardFormLP::new(3);
        lp.objective = vec![-1.0, -1.0, -1.0];
        lp.le_rows.push(LpRow::new(vec![(0, 1.0), (1, 1.0)], 1.0));
        lp.le_rows.push(LpRow::new(vec![(1, 1.0), (2, 1.0)], 1.0));
        lp.le_rows.push(LpRow::new(vec![(0, 1.0), (2, 1.0)], 1.0));
        assert_eq!(solve(&lp), solve(&lp));
    }
}
