//! Factor-revealing LPs over clause patterns.
//!
//! The primal has one variable `W(c)` per pattern and minimizes the expected
//! satisfied weight `Σ prob^p(c) W(c)` subject to `Σ_{c positive} W(c) = 1` and,
//! for each class `i`, `t⁻_i (W⁺ + W⁻) <= W⁺ - W⁻ <= t⁺_i (W⁺ + W⁻)` where
//! `W^±(i) = Σ_c c^±_i W(c)`. Its optimum is the approximation ratio of the
//! oblivious algorithm with parameters `(t, p)`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{Clause, Instance};
use crate::lp::{self, LpResult, LpRow, LpSolver, StandardFormLP, DEFAULT_TOL};
use crate::oblivious::{
    pattern_of_clause, piecewise_linear_params, snapshot, variable_classes, BiasPartition, Pattern, PatternSpace, RoundingVector,
};
use crate::rational::{binomial, from_f64, int, powi, ratio, to_f64, Rational};

pub const DEFAULT_CLAUSE_CAP: usize = 1_000_000;
pub const DEFAULT_NICE_EPS: f64 = 1e-6;

fn check_dims(t: &BiasPartition, p: &RoundingVector) -> Result<()> {
    if t.ell() != p.ell() {
        return Err(Error::Dimension(format!("partition has ℓ={} but rounding vector has {} entries", t.ell(), p.ell())));
    }
    Ok(())
}

fn classes(ell: usize) -> impl Iterator<Item = isize> + Clone {
    -(ell as isize)..=ell as isize
}

/// Coefficients of the lower and upper bias rows of class `i` for a pattern
/// with `c⁺_i = cp` and `c⁻_i = cm`.
fn row_coeffs(t: &BiasPartition, i: isize) -> ((f64, f64), (f64, f64)) {
    let lo = to_f64(&t.lower(i));
    let hi = to_f64(&t.upper(i));
    ((lo - 1.0, lo + 1.0), (1.0 - hi, -(1.0 + hi)))
}

pub fn build_primal(k: usize, t: &BiasPartition, p: &RoundingVector) -> Result<StandardFormLP> {
    check_dims(t, p)?;
    let space = PatternSpace::new(k, t.ell())?;
    let patterns = space.patterns();
    let probs = p.probs_f64();
    let mut lp = StandardFormLP::new(patterns.len());
    lp.objective = patterns.iter().map(|c| c.sat_prob(&probs)).collect();
    let eq = patterns.iter().enumerate().filter(|(_, c)| c.is_positive()).map(|(j, _)| (j, 1.0)).collect();
    lp.eq_rows.push(LpRow::new(eq, 1.0));
    for i in classes(t.ell()) {
        let ((lp_plus, lp_minus), (up_plus, up_minus)) = row_coeffs(t, i);
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for (j, c) in patterns.iter().enumerate() {
            let (cp, cm) = (c.c_plus(i) as f64, c.c_minus(i) as f64);
            if cp + cm > 0.0 {
                lower.push((j, lp_plus * cp + lp_minus * cm));
                upper.push((j, up_plus * cp + up_minus * cm));
            }
        }
        lp.le_rows.push(LpRow::new(lower, 0.0));
        lp.le_rows.push(LpRow::new(upper, 0.0));
    }
    Ok(lp)
}

/// Index of `y⁻_i` (`y⁺_i` is the next one) in the dual variable layout
/// `[z⁺, z⁻, y⁻_{-ℓ}, y⁺_{-ℓ}, …, y⁻_ℓ, y⁺_ℓ]`.
pub fn dual_y_index(ell: usize, i: isize) -> usize {
    2 + 2 * (i + ell as isize) as usize
}

/// The dual as a minimization of `-z`; its optimal value is minus the ratio.
pub fn build_dual(k: usize, t: &BiasPartition, p: &RoundingVector) -> Result<StandardFormLP> {
    check_dims(t, p)?;
    let ell = t.ell();
    let space = PatternSpace::new(k, ell)?;
    let probs = p.probs_f64();
    let mut lp = StandardFormLP::new(4 * ell + 4);
    lp.objective[0] = -1.0;
    lp.objective[1] = 1.0;
    let coeffs: Vec<_> = classes(ell).map(|i| row_coeffs(t, i)).collect();
    for c in space.patterns() {
        let mut row = Vec::new();
        if c.is_positive() {
            row.push((0, 1.0));
            row.push((1, -1.0));
        }
        for (idx, i) in classes(ell).enumerate() {
            let (cp, cm) = (c.c_plus(i) as f64, c.c_minus(i) as f64);
            if cp + cm == 0.0 {
                continue;
            }
            let ((lp_plus, lp_minus), (up_plus, up_minus)) = coeffs[idx];
            let y = dual_y_index(ell, i);
            row.push((y, -(lp_plus * cp + lp_minus * cm)));
            row.push((y + 1, -(up_plus * cp + up_minus * cm)));
        }
        lp.le_rows.push(LpRow::new(row, c.sat_prob(&probs)));
    }
    Ok(lp)
}

/// Pattern weights `W(c) >= 0`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleWeights {
    k: usize,
    ell: usize,
    weights: BTreeMap<Pattern, Rational>,
}

/// Slack of the lower and upper bias rows of one class; both are `>= 0` when
/// the class is feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSlack {
    pub class: isize,
    pub mass: Rational,
    pub lower: Rational,
    pub upper: Rational,
}

impl FeasibleWeights {
    pub fn new(k: usize, ell: usize, weights: impl IntoIterator<Item = (Pattern, Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (c, w) in weights {
            if c.ell() != ell || c.total() != k {
                return Err(Error::Dimension(format!("pattern {c} does not belong to k={k}, ℓ={ell}")));
            }
            if w.is_negative() {
                return Err(Error::InvalidParameter(format!("negative weight on {c}")));
            }
            if !w.is_zero() {
                *map.entry(c).or_insert_with(Rational::zero) += w;
            }
        }
        Ok(FeasibleWeights { k, ell, weights: map })
    }

    /// Reads an LP solution vector indexed by pattern rank; tiny negative
    /// entries are clamped to zero.
    pub fn from_lp_solution(k: usize, ell: usize, x: &[f64]) -> Result<Self> {
        let space = PatternSpace::new(k, ell)?;
        if x.len() != space.len() {
            return Err(Error::Dimension(format!("solution has {} entries, expected {}", x.len(), space.len())));
        }
        let mut weights = Vec::new();
        for (c, &v) in space.patterns().into_iter().zip(x) {
            if v > 0.0 {
                weights.push((c, from_f64(v)?));
            }
        }
        FeasibleWeights::new(k, ell, weights)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, c: &Pattern) -> Rational {
        self.weights.get(c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Pattern, &Rational)> {
        self.weights.iter()
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn w_plus(&self, i: isize) -> Rational {
        self.weights.iter().map(|(c, w)| w * int(c.c_plus(i) as i64)).sum()
    }

    pub fn w_minus(&self, i: isize) -> Rational {
        self.weights.iter().map(|(c, w)| w * int(c.c_minus(i) as i64)).sum()
    }

    pub fn positive_mass(&self) -> Rational {
        self.weights.iter().filter(|(c, _)| c.is_positive()).map(|(_, w)| w.clone()).sum()
    }

    pub fn slacks(&self, t: &BiasPartition) -> Vec<ClassSlack> {
        classes(self.ell)
            .map(|i| {
                let (wp, wm) = (self.w_plus(i), self.w_minus(i));
                let mass = &wp + &wm;
                let diff = &wp - &wm;
                ClassSlack { class: i, lower: &diff - t.lower(i) * &mass, upper: t.upper(i) * &mass - &diff, mass }
            })
            .collect()
    }

    /// Exact primal feasibility.
    pub fn is_feasible(&self, t: &BiasPartition) -> bool {
        self.positive_mass().is_one() && self.slacks(t).iter().all(|s| !s.lower.is_negative() && !s.upper.is_negative())
    }

    /// Feasible, with strict bias rows for every nonempty class `i != 0`.
    pub fn is_nice(&self, t: &BiasPartition) -> bool {
        self.is_feasible(t)
            && self.slacks(t).iter().all(|s| s.class == 0 || s.mass.is_zero() || (s.lower.is_positive() && s.upper.is_positive()))
    }

    pub fn objective(&self, p: &RoundingVector) -> Rational {
        self.weights.iter().map(|(c, w)| c.sat_prob_exact(p) * w).sum()
    }

    pub fn objective_f64(&self, p: &[f64]) -> f64 {
        self.weights.iter().map(|(c, w)| c.sat_prob(p) * to_f64(w)).sum()
    }

    /// Dense vector indexed by pattern rank, for use with [`build_primal`].
    pub fn to_vector(&self) -> Result<Vec<f64>> {
        let space = PatternSpace::new(self.k, self.ell)?;
        let mut x = vec![0.0; space.len()];
        for (c, w) in &self.weights {
            x[space.rank(c)] = to_f64(w);
        }
        Ok(x)
    }

    fn add(&mut self, c: Pattern, w: &Rational) {
        *self.weights.entry(c).or_insert_with(Rational::zero) += w;
    }

    fn scale(&mut self, f: &Rational) {
        for w in self.weights.values_mut() {
            *w *= f;
        }
    }
}

#[derive(Debug, Clone)]
pub struct RatioResult {
    pub ratio: f64,
    /// Minimizing pattern distribution.
    pub weights: FeasibleWeights,
    pub lp: LpResult,
}

pub fn approximation_ratio(k: usize, t: &BiasPartition, p: &RoundingVector) -> Result<RatioResult> {
    approximation_ratio_with(lp::solver_from_env()?.as_ref(), k, t, p, DEFAULT_TOL)
}

pub fn approximation_ratio_with(solver: &dyn LpSolver, k: usize, t: &BiasPartition, p: &RoundingVector, tol: f64) -> Result<RatioResult> {
    let primal = build_primal(k, t, p)?;
    let res = solver.solve(&primal, tol)?;
    let ratio = res.optimal_value()?;
    let weights = if res.solution.is_empty() {
        FeasibleWeights::new(k, t.ell(), [])?
    } else {
        FeasibleWeights::from_lp_solution(k, t.ell(), &res.solution)?
    };
    Ok(RatioResult { ratio, weights, lp: res })
}

/// Optimal value of the dual LP (`max z`).
pub fn dual_ratio(solver: &dyn LpSolver, k: usize, t: &BiasPartition, p: &RoundingVector, tol: f64) -> Result<f64> {
    let res = solver.solve(&build_dual(k, t, p)?, tol)?;
    Ok(-res.optimal_value()?)
}

/// Pattern-aggregated weights of `inst` after flipping an optimal assignment
/// to all-`+1` and rescaling the total weight to `1/val`. Returns the weights
/// together with `val`.
pub fn witness_solution_from_instance(inst: &Instance, t: &BiasPartition) -> Result<(FeasibleWeights, Rational)> {
    let (best, val) = inst.brute_force_optimum()?;
    let flipped = inst.flip(&best)?;
    let factor = (&val * flipped.total_weight()).recip();
    let scaled = flipped.rescaled(&factor);
    let classes = variable_classes(&scaled, t);
    let mut weights = Vec::new();
    for (j, clause) in scaled.clauses().iter().enumerate() {
        if clause.weight.is_zero() {
            continue;
        }
        if clause.vars().any(|v| classes[v - 1].is_none()) {
            return Err(Error::IsolatedVariable(j));
        }
        weights.push((pattern_of_clause(&scaled, t, j)?, clause.weight.clone()));
    }
    Ok((FeasibleWeights::new(inst.k(), t.ell(), weights)?, val))
}

/// Repairs round-off violations, makes every nonempty class `i != 0` strictly
/// feasible by adding `eps` mass to a concentrated pattern, then renormalizes.
pub fn nice_solution(w: &FeasibleWeights, t: &BiasPartition, eps: f64) -> Result<FeasibleWeights> {
    if w.ell != t.ell() {
        return Err(Error::Dimension("weights and partition disagree on ℓ".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("niceness ε must be positive".into()));
    }
    let k = w.k;
    let kq = int(k as i64);
    let mut out = w.clone();
    let scale = out.weights.values().fold(Rational::one(), |a, b| if b > &a { b.clone() } else { a });
    let repair_tol = from_f64(1e-9)? * &scale * int(k as i64);

    // Exact repair of floating-point round-off.
    for _ in 0..4 {
        let mut changed = false;
        for s in out.slacks(t) {
            let i = s.class;
            if s.lower.is_negative() {
                if -s.lower.clone() > repair_tol {
                    return Err(Error::Infeasible(format!("lower bias row of class {i} violated by {}", to_f64(&-s.lower))));
                }
                let m = -s.lower / (&kq * (int(1) - t.lower(i)));
                out.add(Pattern::concentrated(w.ell, k, i, true), &m);
                changed = true;
            } else if s.upper.is_negative() {
                if -s.upper.clone() > repair_tol {
                    return Err(Error::Infeasible(format!("upper bias row of class {i} violated by {}", to_f64(&-s.upper))));
                }
                let m = -s.upper / (&kq * (int(1) + t.upper(i)));
                out.add(Pattern::concentrated(w.ell, k, i, false), &m);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if out.slacks(t).iter().any(|s| s.lower.is_negative() || s.upper.is_negative()) {
        return Err(Error::Infeasible("bias rows could not be repaired".into()));
    }

    let mut eps = from_f64(eps)?;
    'outer: for _ in 0..60 {
        let mut trial = out.clone();
        for s in out.slacks(t) {
            let i = s.class;
            if i == 0 || s.mass.is_zero() {
                continue;
            }
            if s.lower.is_zero() {
                trial.add(Pattern::concentrated(w.ell, k, i, true), &eps);
            }
            if s.upper.is_zero() {
                trial.add(Pattern::concentrated(w.ell, k, i, false), &eps);
            }
        }
        for s in trial.slacks(t) {
            if s.class != 0 && !s.mass.is_zero() && !(s.lower.is_positive() && s.upper.is_positive()) {
                eps /= int(2);
                continue 'outer;
            }
        }
        out = trial;
        let pos = out.positive_mass();
        if pos.is_zero() {
            return Err(Error::Infeasible("no weight on positive patterns".into()));
        }
        out.scale(&pos.recip());
        return Ok(out);
    }
    Err(Error::Infeasible("could not make bias rows strict".into()))
}

/// Number of clauses generated for pattern `c` over `k` copies per class.
pub fn clause_count(c: &Pattern, k: usize) -> u128 {
    classes(c.ell())
        .map(|i| {
            let (cp, cm) = (c.c_plus(i) as u64, c.c_minus(i) as u64);
            binomial(k as u64, cp) * binomial(k as u64 - cp, cm)
        })
        .product()
}

/// Variable id of copy `a ∈ 1..=k` of class `i`.
pub fn synthesized_var(ell: usize, k: usize, i: isize, a: usize) -> usize {
    (i + ell as isize) as usize * k + a
}

fn subsets(n: usize, size: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < size - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut Vec::new(), out);
}

/// Builds the `L·k`-variable instance realizing a nice `W`: for each pattern,
/// every choice of disjoint positive and negative copy sets per class, with
/// weight `W(c)/|J_c|`.
pub fn instance_from_solution(w: &FeasibleWeights, t: &BiasPartition, cap: usize) -> Result<Instance> {
    if w.ell != t.ell() {
        return Err(Error::Dimension("weights and partition disagree on ℓ".into()));
    }
    if !w.is_nice(t) {
        return Err(Error::InvalidParameter("weights are not nice".into()));
    }
    let (k, ell) = (w.k, w.ell);
    let needed: u128 = w.weights.keys().map(|c| clause_count(c, k)).sum();
    if needed > cap as u128 {
        return Err(Error::ClauseCap { needed, cap });
    }
    let mut clauses = Vec::with_capacity(needed as usize);
    for (c, weight) in &w.weights {
        let each = weight / Rational::from_integer(clause_count(c, k).into());
        // Per class: all (positive set, negative set) choices of copies.
        let per_class: Vec<(isize, Vec<(Vec<usize>, Vec<usize>)>)> = classes(ell)
            .map(|i| {
                let mut pos_sets = Vec::new();
                subsets(k, c.c_plus(i), &mut pos_sets);
                let mut choices = Vec::new();
                for ps in pos_sets {
                    let rest: Vec<usize> = (0..k).filter(|a| !ps.contains(a)).collect();
                    let mut neg_sets = Vec::new();
                    subsets(rest.len(), c.c_minus(i), &mut neg_sets);
                    for ns in neg_sets {
                        choices.push((ps.clone(), ns.iter().map(|&r| rest[r]).collect()));
                    }
                }
                (i, choices)
            })
            .collect();
        let mut idx = vec![0usize; per_class.len()];
        loop {
            let mut pos = Vec::with_capacity(k);
            let mut neg = Vec::with_capacity(k);
            for ((i, choices), &ix) in per_class.iter().zip(&idx) {
                let (ps, ns) = &choices[ix];
                pos.extend(ps.iter().map(|&a| synthesized_var(ell, k, *i, a + 1)));
                neg.extend(ns.iter().map(|&a| synthesized_var(ell, k, *i, a + 1)));
            }
            clauses.push(Clause::new(pos, neg, each.clone())?);
            // Odometer over the per-class choices.
            let mut d = 0;
            while d < idx.len() {
                idx[d] += 1;
                if idx[d] < per_class[d].1.len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == idx.len() {
                break;
            }
        }
    }
    Instance::new(k, (2 * ell + 1) * k, clauses)
}

/// The explicit sparse worst-case solution for `t = (0, 1)`.
pub fn superoblivious_hard_solution(k: usize) -> Result<FeasibleWeights> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    let ki = k as i64;
    let h = (k / 2) as u8;
    let weights = if k % 2 == 1 {
        let a = Pattern::with_entries(1, &[(-1, h), (1, h + 1)], &[]);
        let b = Pattern::with_entries(1, &[], &[(-1, h + 1), (1, h)]);
        vec![(a, int(1)), (b, ratio(ki - 1, ki + 1))]
    } else {
        let s = ki * ki + (ki + 2) * (ki + 2);
        let gamma_inv = ratio(s, (ki + 1) * (ki + 2));
        let a = Pattern::with_entries(1, &[(-1, h), (1, h)], &[]);
        let b = Pattern::with_entries(1, &[(-1, h - 1), (1, h + 1)], &[]);
        let d = Pattern::with_entries(1, &[], &[(-1, h), (1, h)]);
        vec![
            (a, &gamma_inv * ratio(3 * ki + 2, s)),
            (b, &gamma_inv * ratio(ki * ki, s)),
            (d, &gamma_inv * ratio(ki * ki + ki + 2, s)),
        ]
    };
    FeasibleWeights::new(k, 1, weights)
}

/// `Σ_c prob^p(c) W(c)` for each single-threshold rounding probability `p`.
pub fn objective_curve(w: &FeasibleWeights, p_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if w.ell != 1 {
        return Err(Error::Dimension("objective curves need ℓ = 1".into()));
    }
    Ok(p_grid.iter().map(|&p| (p, w.objective_f64(&[p]))).collect())
}

/// The polynomial whose maximum over `p` is the superoblivious ratio, up to
/// [`r_k_normalizer`].
pub fn r_k(k: usize, p: &Rational) -> Rational {
    let h = k / 2;
    let q = int(1) - p;
    if k % 2 == 1 {
        powi(p, h as i64 + 1) * powi(&q, h as i64)
    } else {
        let ki = k as i64;
        let s = ki * ki + (ki + 2) * (ki + 2);
        let hp = powi(p, h as i64);
        let hq = powi(&q, h as i64 - 1);
        ratio((ki + 2) * (ki + 2), s) * &hp * &hq * &q + ratio(ki * ki, s) * hp * p * hq
    }
}

pub fn r_k_f64(k: usize, p: f64) -> f64 {
    let h = (k / 2) as i32;
    if k % 2 == 1 {
        p.powi(h + 1) * (1.0 - p).powi(h)
    } else {
        let kf = k as f64;
        let s = kf * kf + (kf + 2.0) * (kf + 2.0);
        (kf + 2.0).powi(2) / s * p.powi(h) * (1.0 - p).powi(h) + kf * kf / s * p.powi(h + 1) * (1.0 - p).powi(h - 1)
    }
}

/// `r_k / normalizer` is the objective of [`superoblivious_hard_solution`].
pub fn r_k_normalizer(k: usize) -> Rational {
    let ki = k as i64;
    if k % 2 == 1 {
        ratio(ki + 1, 2 * ki)
    } else {
        ratio((ki + 1) * (ki + 2), ki * ki + (ki + 2) * (ki + 2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub x: f64,
    pub y: f64,
    pub ratio: Option<f64>,
    pub lp_iterations: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub k: usize,
    pub ell: usize,
    pub cells: Vec<GridCell>,
    /// Index into `cells` of the best ratio.
    pub best: Option<usize>,
}

impl GridResult {
    pub fn best_cell(&self) -> Option<&GridCell> {
        self.best.map(|i| &self.cells[i])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,x,y,ratio,lp_iterations,seconds\n");
        for c in &self.cells {
            let ratio = c.ratio.map_or_else(|| "NaN".to_string(), |r| format!("{r:.10}"));
            out.push_str(&format!("{},{},{},{},{},{},{:.3}\n", self.k, self.ell, c.x, c.y, ratio, c.lp_iterations, c.seconds));
        }
        out
    }
}

/// Evaluates the two-piece rounding family on every `(x, y)` in the grid.
/// Cells are solved in parallel; failures are recorded per cell.
pub fn grid_search(k: usize, ell: usize, xs: &[Rational], ys: &[Rational]) -> Result<GridResult> {
    let solver = lp::solver_from_env()?;
    let solver = solver.as_ref();
    let mut pts: Vec<(&Rational, &Rational)> = xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))).collect();
    pts.sort();
    pts.dedup();
    let cells: Vec<GridCell> = pts
        .par_iter()
        .map(|&(x, y)| {
            let start = Instant::now();
            let out = piecewise_linear_params(ell, x, y).and_then(|(t, p)| approximation_ratio_with(solver, k, &t, &p, DEFAULT_TOL));
            let seconds = start.elapsed().as_secs_f64();
            let (x, y) = (to_f64(x), to_f64(y));
            match out {
                Ok(r) => GridCell { x, y, ratio: Some(r.ratio), lp_iterations: r.lp.iterations, seconds, error: None },
                Err(e) => GridCell { x, y, ratio: None, lp_iterations: 0, seconds, error: Some(e.to_string()) },
            }
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, c) in cells.iter().enumerate() {
        if let Some(r) = c.ratio {
            if best.is_none_or(|b| r > cells[b].ratio.unwrap()) {
                best = Some(i);
            }
        }
    }
    Ok(GridResult { k, ell, cells, best })
}

/// Obl/val of `inst` computed by brute force.
pub fn instance_ratio(inst: &Instance, t: &BiasPartition, p: &RoundingVector) -> Result<Rational> {
    let (_, val) = inst.brute_force_optimum()?;
    Ok(crate::oblivious::oblivious_value(inst, t, p)? / val)
}

/// Snapshot-weighted view: `W` equals the instance snapshot scaled by `1/val`.
pub fn snapshot_weights(inst: &Instance, t: &BiasPartition, val: &Rational) -> Result<FeasibleWeights> {
    let snap = snapshot(inst, t)?;
    let space = PatternSpace::new(inst.k(), t.ell())?;
    FeasibleWeights::new(inst.k(), t.ell(), snap.entries(&space).into_iter().map(|(c, w)| (c, w / val)))
}
