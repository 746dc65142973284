//! Oblivious rounding: bias partitions, rounding vectors, clause patterns
//! and snapshot arrays.
//!
//! Bias classes are indexed by `i ∈ -ℓ..=ℓ`. Class `+i` is the interval
//! `(t_{i-1}, t_i]`, class `-i` is `[-t_i, -t_{i-1})` and class 0 is
//! `[-t_0, t_0]`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance};
use crate::rational::{binomial, format_rational, format_sig, int, ratio, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasPartition {
    t: Vec<Rational>,
}

impl BiasPartition {
    /// Requires `0 <= t_0 < t_1 < ... < t_ℓ = 1` with `ℓ >= 1`.
    pub fn new(t: Vec<Rational>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::InvalidParameter("bias partition needs at least (t0, t1)".into()));
        }
        if t[0].is_negative() {
            return Err(Error::InvalidParameter("t0 must be nonnegative".into()));
        }
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("bias partition must be strictly increasing".into()));
        }
        if !t.last().unwrap().is_one() {
            return Err(Error::InvalidParameter("bias partition must end at 1".into()));
        }
        Ok(BiasPartition { t })
    }

    /// `t = (0, 1)`: rounding depends only on the sign of the bias.
    pub fn superoblivious() -> Self {
        BiasPartition { t: vec![int(0), int(1)] }
    }

    /// `t = (δ, 1)`.
    pub fn two_class(delta: Rational) -> Result<Self> {
        BiasPartition::new(vec![delta, int(1)])
    }

    /// `t_i = i/ℓ`.
    pub fn uniform(ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParameter("ℓ must be at least 1".into()));
        }
        BiasPartition::new((0..=ell).map(|i| ratio(i as i64, ell as i64)).collect())
    }

    pub fn ell(&self) -> usize {
        self.t.len() - 1
    }

    /// Number of classes `L = 2ℓ + 1`.
    pub fn classes(&self) -> usize {
        2 * self.ell() + 1
    }

    pub fn thresholds(&self) -> &[Rational] {
        &self.t
    }

    /// `sup Int_i`.
    pub fn upper(&self, i: isize) -> Rational {
        if i >= 0 {
            self.t[i as usize].clone()
        } else {
            -self.t[(-i - 1) as usize].clone()
        }
    }

    /// `inf Int_i`.
    pub fn lower(&self, i: isize) -> Rational {
        if i > 0 {
            self.t[(i - 1) as usize].clone()
        } else {
            -self.t[(-i) as usize].clone()
        }
    }

    /// Class of bias `b ∈ [-1, 1]`, decided exactly.
    pub fn class_of(&self, b: &Rational) -> isize {
        let mag = b.abs();
        if mag <= self.t[0] {
            return 0;
        }
        let i = self.t.iter().position(|ti| &mag <= ti).unwrap_or(self.ell()) as isize;
        if b.is_positive() { i } else { -i }
    }

    pub fn class_of_f64(&self, b: f64) -> isize {
        let t: Vec<f64> = self.t.iter().map(to_f64).collect();
        let mag = b.abs();
        if mag <= t[0] {
            return 0;
        }
        let i = t.iter().position(|&ti| mag <= ti).unwrap_or(self.ell()) as isize;
        if b > 0.0 { i } else { -i }
    }
}

pub fn bias_class(t: &BiasPartition, b: &Rational) -> isize {
    t.class_of(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingVector {
    p: Vec<Rational>,
}

impl RoundingVector {
    pub fn new(p: Vec<Rational>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidParameter("rounding vector is empty".into()));
        }
        if p.iter().any(|x| x.is_negative() || x > &int(1)) {
            return Err(Error::InvalidParameter("rounding probabilities must lie in [0, 1]".into()));
        }
        Ok(RoundingVector { p })
    }

    pub fn single(p: Rational) -> Result<Self> {
        RoundingVector::new(vec![p])
    }

    pub fn ell(&self) -> usize {
        self.p.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.p
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.p.iter().map(to_f64).collect()
    }

    /// Probability of rounding a class-`i` variable to `+1`.
    pub fn prob_positive(&self, i: isize) -> Rational {
        match i {
            0 => ratio(1, 2),
            i if i > 0 => self.p[i as usize - 1].clone(),
            i => int(1) - &self.p[(-i) as usize - 1],
        }
    }

    /// `p_i ↦ 1 - p_i` for every class.
    pub fn complement(&self) -> RoundingVector {
        RoundingVector { p: self.p.iter().map(|x| int(1) - x).collect() }
    }
}

fn check_dims(t: &BiasPartition, p: &RoundingVector) -> Result<()> {
    if t.ell() != p.ell() {
        return Err(Error::Dimension(format!("partition has ℓ={} but rounding vector has {} entries", t.ell(), p.ell())));
    }
    Ok(())
}

/// Per-class literal counts of a clause, stored as
/// `(c⁺_{-ℓ}, …, c⁺_{+ℓ}, c⁻_{-ℓ}, …, c⁻_{+ℓ})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    counts: Vec<u8>,
}

impl Pattern {
    pub fn from_counts(counts: Vec<u8>) -> Result<Self> {
        if counts.is_empty() || !counts.len().is_multiple_of(2) || (counts.len() / 2) % 2 != 1 {
            return Err(Error::Dimension(format!("pattern needs 2L entries with L odd, got {}", counts.len())));
        }
        Ok(Pattern { counts })
    }

    /// All zero counts except `c⁺_i = k` (`positive`) or `c⁻_i = k`.
    pub fn concentrated(ell: usize, k: usize, i: isize, positive: bool) -> Pattern {
        let l = 2 * ell + 1;
        let mut counts = vec![0u8; 2 * l];
        let idx = (i + ell as isize) as usize + if positive { 0 } else { l };
        counts[idx] = k as u8;
        Pattern { counts }
    }

    /// Builds a pattern from `(class, count)` lists for each sign.
    pub fn with_entries(ell: usize, plus: &[(isize, u8)], minus: &[(isize, u8)]) -> Pattern {
        let l = 2 * ell + 1;
        let mut counts = vec![0u8; 2 * l];
        for &(i, c) in plus {
            counts[(i + ell as isize) as usize] += c;
        }
        for &(i, c) in minus {
            counts[l + (i + ell as isize) as usize] += c;
        }
        Pattern { counts }
    }

    pub fn ell(&self) -> usize {
        (self.counts.len() / 2 - 1) / 2
    }

    pub fn counts(&self) -> &[u8] {
        &self.counts
    }

    pub fn c_plus(&self, i: isize) -> usize {
        self.counts[(i + self.ell() as isize) as usize] as usize
    }

    pub fn c_minus(&self, i: isize) -> usize {
        let l = self.counts.len() / 2;
        self.counts[l + (i + self.ell() as isize) as usize] as usize
    }

    pub fn total(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    /// No negated literals.
    pub fn is_positive(&self) -> bool {
        self.counts[self.counts.len() / 2..].iter().all(|&c| c == 0)
    }

    /// Exponents `(a_i, b_i)` with prob = 2^{-zero} Π p_i^{a_i} (1-p_i)^{b_i}.
    fn exponents(&self) -> (usize, Vec<(usize, usize)>) {
        let ell = self.ell() as isize;
        let zero = self.c_plus(0) + self.c_minus(0);
        let ex = (1..=ell).map(|i| (self.c_plus(i) + self.c_minus(-i), self.c_minus(i) + self.c_plus(-i))).collect();
        (zero, ex)
    }

    /// Satisfaction probability under rounding vector `p` (floating point).
    pub fn sat_prob(&self, p: &[f64]) -> f64 {
        let (zero, ex) = self.exponents();
        let mut acc = 0.5f64.powi(zero as i32);
        for (pi, (a, b)) in p.iter().zip(ex) {
            acc *= pi.powi(a as i32) * (1.0 - pi).powi(b as i32);
        }
        acc
    }

    /// Exact satisfaction probability; `0^0 = 1`.
    pub fn sat_prob_exact(&self, p: &RoundingVector) -> Rational {
        let (zero, ex) = self.exponents();
        let mut acc = num_traits::pow(ratio(1, 2), zero);
        for (pi, (a, b)) in p.probs().iter().zip(ex) {
            acc *= num_traits::pow(pi.clone(), a) * num_traits::pow(int(1) - pi, b);
        }
        acc
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.counts.len() / 2;
        let join = |s: &[u8]| s.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":");
        write!(f, "{}|{}", join(&self.counts[..l]), join(&self.counts[l..]))
    }
}

pub fn sat_prob(c: &Pattern, p: &RoundingVector) -> Rational {
    c.sat_prob_exact(p)
}

/// The set `Ptn^L_k` of all patterns for arity `k` and `ℓ` positive classes,
/// ordered lexicographically from `c⁺_{-ℓ} = k` downwards.
#[derive(Debug, Clone)]
pub struct PatternSpace {
    k: usize,
    ell: usize,
    /// `comps[s][r]` = number of `r`-tuples of naturals summing to `s`.
    comps: Vec<Vec<usize>>,
}

impl PatternSpace {
    pub fn new(k: usize, ell: usize) -> Result<Self> {
        if k < 2 || ell < 1 {
            return Err(Error::InvalidParameter(format!("need k >= 2 and ℓ >= 1, got k={k}, ℓ={ell}")));
        }
        if k > u8::MAX as usize {
            return Err(Error::InvalidParameter("k too large".into()));
        }
        let width = 2 * (2 * ell + 1);
        let comps = (0..=k)
            .map(|s| {
                (0..=width)
                    .map(|r| if r == 0 { usize::from(s == 0) } else { binomial((s + r - 1) as u64, (r - 1) as u64) as usize })
                    .collect()
            })
            .collect();
        Ok(PatternSpace { k, ell, comps })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn width(&self) -> usize {
        2 * (2 * self.ell + 1)
    }

    pub fn len(&self) -> usize {
        self.comps[self.k][self.width()]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn patterns(&self) -> Vec<Pattern> {
        let width = self.width();
        let mut out = Vec::with_capacity(self.len());
        let mut cur = vec![0u8; width];
        fn rec(pos: usize, rem: usize, cur: &mut Vec<u8>, out: &mut Vec<Pattern>) {
            if pos + 1 == cur.len() {
                cur[pos] = rem as u8;
                out.push(Pattern { counts: cur.clone() });
                return;
            }
            for v in (0..=rem).rev() {
                cur[pos] = v as u8;
                rec(pos + 1, rem - v, cur, out);
            }
            cur[pos] = 0;
        }
        rec(0, self.k, &mut cur, &mut out);
        out
    }

    /// Position of `c` in [`patterns`](Self::patterns).
    pub fn rank(&self, c: &Pattern) -> usize {
        debug_assert_eq!(c.counts.len(), self.width());
        let width = self.width();
        let mut rem = self.k;
        let mut rank = 0;
        for (pos, &v) in c.counts.iter().enumerate().take(width - 1) {
            let v = v as usize;
            let tail = width - pos - 1;
            rank += (v + 1..=rem).map(|u| self.comps[rem - u][tail]).sum::<usize>();
            rem -= v;
        }
        rank
    }
}

pub fn enumerate_patterns(k: usize, ell: usize) -> Result<Vec<Pattern>> {
    Ok(PatternSpace::new(k, ell)?.patterns())
}

/// Bias class of every variable (`None` when the variable has zero weight).
pub fn variable_classes(inst: &Instance, t: &BiasPartition) -> Vec<Option<isize>> {
    inst.biases().iter().map(|b| b.as_ref().map(|b| t.class_of(b))).collect()
}

fn pattern_with_classes(inst: &Instance, classes: &[Option<isize>], ell: usize, j: usize) -> Result<Pattern> {
    let clause = &inst.clauses()[j];
    let l = 2 * ell + 1;
    let mut counts = vec![0u8; 2 * l];
    let class = |v: usize| classes[v - 1].ok_or(Error::IsolatedVariable(v));
    for &v in &clause.positive_vars {
        counts[(class(v)? + ell as isize) as usize] += 1;
    }
    for &v in &clause.negative_vars {
        counts[l + (class(v)? + ell as isize) as usize] += 1;
    }
    Ok(Pattern { counts })
}

pub fn pattern_of_clause(inst: &Instance, t: &BiasPartition, j: usize) -> Result<Pattern> {
    if j >= inst.m() {
        return Err(Error::InvalidParameter(format!("clause index {j} out of range")));
    }
    pattern_with_classes(inst, &variable_classes(inst, t), t.ell(), j)
}

/// Patterns of all clauses with positive weight, paired with the clause index.
fn weighted_patterns(inst: &Instance, t: &BiasPartition) -> Result<Vec<(usize, Pattern)>> {
    let classes = variable_classes(inst, t);
    (0..inst.m())
        .filter(|&j| !inst.clauses()[j].weight.is_zero())
        .map(|j| Ok((j, pattern_with_classes(inst, &classes, t.ell(), j)?)))
        .collect()
}

/// Expected value of the assignment produced by the oblivious algorithm.
pub fn oblivious_value(inst: &Instance, t: &BiasPartition, p: &RoundingVector) -> Result<Rational> {
    check_dims(t, p)?;
    let mut acc = Rational::zero();
    for (j, c) in weighted_patterns(inst, t)? {
        acc += c.sat_prob_exact(p) * &inst.clauses()[j].weight;
    }
    Ok(acc / inst.total_weight())
}

/// One draw of the oblivious rounding, deterministic in `seed`.
pub fn sample_rounding(inst: &Instance, t: &BiasPartition, p: &RoundingVector, seed: u64) -> Result<Assignment> {
    check_dims(t, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs: Vec<f64> = variable_classes(inst, t)
        .into_iter()
        .map(|c| c.map_or(0.5, |i| to_f64(&p.prob_positive(i))))
        .collect();
    let values = probs.iter().map(|&q| if rng.gen::<f64>() < q { 1 } else { -1 }).collect();
    Assignment::new(values)
}

/// Normalized clause weight per pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotArray {
    k: usize,
    ell: usize,
    entries: BTreeMap<Pattern, Rational>,
}

impl SnapshotArray {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn get(&self, c: &Pattern) -> Rational {
        self.entries.get(c).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero entries in pattern order.
    pub fn entries(&self, space: &PatternSpace) -> Vec<(Pattern, Rational)> {
        let mut v: Vec<_> = self.entries.iter().map(|(c, w)| (c.clone(), w.clone())).collect();
        v.sort_by_key(|(c, _)| space.rank(c));
        v
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    /// Dense floating-point vector indexed by pattern rank.
    pub fn to_dense(&self, space: &PatternSpace) -> Vec<f64> {
        let mut out = vec![0.0; space.len()];
        for (c, w) in &self.entries {
            out[space.rank(c)] = to_f64(w);
        }
        out
    }

    /// `Σ_c prob^p(c) · Snap(c)`, exactly.
    pub fn linear_value(&self, p: &RoundingVector) -> Rational {
        self.entries.iter().map(|(c, w)| c.sat_prob_exact(p) * w).sum()
    }

    /// CSV with header `pattern,weight`; exact `p/q` weights when `exact`.
    pub fn to_csv(&self, space: &PatternSpace, exact: bool) -> String {
        let mut out = String::from("pattern,weight\n");
        for (c, w) in self.entries(space) {
            let w = if exact { format_rational(&w) } else { format_sig(to_f64(&w), 12) };
            out.push_str(&format!("{c},{w}\n"));
        }
        out
    }
}

pub fn snapshot(inst: &Instance, t: &BiasPartition) -> Result<SnapshotArray> {
    let mut entries: BTreeMap<Pattern, Rational> = BTreeMap::new();
    for (j, c) in weighted_patterns(inst, t)? {
        *entries.entry(c).or_insert_with(Rational::zero) += &inst.clauses()[j].weight;
    }
    let total = inst.total_weight();
    for w in entries.values_mut() {
        *w /= &total;
    }
    Ok(SnapshotArray { k: inst.k(), ell: t.ell(), entries })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotEstimate {
    /// `Σ_c prob^p(c) · M̂(c)`.
    pub linear: f64,
    /// `linear - ε`, the value that lower-bounds `val` when `‖M̂ - Snap‖₁ <= ε`.
    pub estimate: f64,
}

/// Value estimate from an approximate snapshot `mhat` (dense by pattern rank).
pub fn snapshot_estimate_value(space: &PatternSpace, mhat: &[f64], p: &RoundingVector, eps: f64) -> Result<SnapshotEstimate> {
    if mhat.len() != space.len() {
        return Err(Error::Dimension(format!("estimate has {} entries, pattern space has {}", mhat.len(), space.len())));
    }
    if p.ell() != space.ell() {
        return Err(Error::Dimension("rounding vector does not match pattern space".into()));
    }
    if mhat.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidParameter("snapshot estimate entries must be finite and nonnegative".into()));
    }
    let probs = p.probs_f64();
    let linear: f64 = space.patterns().iter().zip(mhat).map(|(c, &m)| if m == 0.0 { 0.0 } else { c.sat_prob(&probs) * m }).sum();
    Ok(SnapshotEstimate { linear, estimate: linear - eps })
}

/// Where inside each positive class the rounding curve is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplePoint {
    /// `t_i`, the closed end of `(t_{i-1}, t_i]`.
    #[default]
    RightEndpoint,
    Midpoint,
}

/// Two-piece linear rounding curve through `(0, 1/2)`, `(x, y)`, `(1, 1)`.
pub fn piecewise_linear_value(x: &Rational, y: &Rational, b: &Rational) -> Rational {
    let half = ratio(1, 2);
    if b <= x {
        &half + (y - &half) * b / x
    } else {
        y + (int(1) - y) * (b - x) / (int(1) - x)
    }
}

pub fn piecewise_linear_params(ell: usize, x: &Rational, y: &Rational) -> Result<(BiasPartition, RoundingVector)> {
    piecewise_linear_params_at(ell, x, y, SamplePoint::RightEndpoint)
}

pub fn piecewise_linear_params_at(ell: usize, x: &Rational, y: &Rational, at: SamplePoint) -> Result<(BiasPartition, RoundingVector)> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ℓ must be at least 1".into()));
    }
    if !x.is_positive() || x >= &int(1) {
        return Err(Error::InvalidParameter("x must lie in (0, 1)".into()));
    }
    if y < &ratio(1, 2) || y > &int(1) {
        return Err(Error::InvalidParameter("y must lie in [1/2, 1]".into()));
    }
    let t = BiasPartition::uniform(ell)?;
    let p = (1..=ell)
        .map(|i| {
            let b = match at {
                SamplePoint::RightEndpoint => ratio(i as i64, ell as i64),
                SamplePoint::Midpoint => ratio(2 * i as i64 - 1, 2 * ell as i64),
            };
            piecewise_linear_value(x, y, &b)
        })
        .collect();
    Ok((t, RoundingVector::new(p)?))
}
