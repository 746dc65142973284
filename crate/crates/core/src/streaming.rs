//! Single-pass streaming simulations: clause streams, the random-order and
//! bounded-degree snapshot estimators, and a synthetic instance generator.
//!
//! Space is counted in model units: stored clauses plus tracked variables.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Clause, Instance};
use crate::oblivious::{snapshot, snapshot_estimate_value, BiasPartition, PatternSpace, RoundingVector};
use crate::rational::{int, ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamOrder {
    Given,
    Shuffled(u64),
}

/// Unit-weight clauses in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseStream {
    k: usize,
    n: usize,
    clauses: Vec<Clause>,
    order: StreamOrder,
}

impl ClauseStream {
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        if !inst.is_input_form() {
            return Err(Error::InvalidInstance("streams need unit-weight clauses".into()));
        }
        Ok(ClauseStream { k: inst.k(), n: inst.n(), clauses: inst.clauses().to_vec(), order: StreamOrder::Given })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn order(&self) -> StreamOrder {
        self.order
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn to_instance(&self) -> Result<Instance> {
        Instance::new(self.k, self.n, self.clauses.clone())
    }
}

/// Uniformly random clause order (Fisher–Yates), deterministic in `seed`.
pub fn shuffle_stream(inst: &Instance, seed: u64) -> Result<ClauseStream> {
    let mut s = ClauseStream::from_instance(inst)?;
    s.clauses.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    s.order = StreamOrder::Shuffled(seed);
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutput {
    /// `linear - ε·|Ptn|`.
    pub estimate: f64,
    /// `Σ_c prob^p(c) M̂(c)`.
    pub linear: f64,
    /// Estimated snapshot, dense by pattern rank.
    pub mhat: Vec<f64>,
    /// `X̂_c`: sampled clauses per pattern.
    pub pattern_counts: Vec<u64>,
    /// Sampling rate (`1` on the exact path).
    pub q: f64,
    pub stored_clauses: usize,
    pub tracked_vars: usize,
    pub space_used: usize,
    /// The whole stream was stored and the snapshot computed exactly.
    pub exact: bool,
}

fn validate(stream: &ClauseStream, t: &BiasPartition, p: &RoundingVector, eps: f64, c: f64) -> Result<PatternSpace> {
    if t.ell() != p.ell() {
        return Err(Error::Dimension("partition and rounding vector disagree on ℓ".into()));
    }
    if !(eps > 0.0) || !(c > 0.0) || !eps.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParameter("ε and C must be positive".into()));
    }
    if stream.is_empty() {
        return Err(Error::InvalidInstance("empty stream".into()));
    }
    PatternSpace::new(stream.k, t.ell())
}

/// Tracks `(w⁺, w⁻)` counts for a subset of variables.
struct BiasTracker {
    counts: Vec<(u64, u64)>,
    tracked: Vec<bool>,
    num_tracked: usize,
}

impl BiasTracker {
    fn new(n: usize) -> Self {
        BiasTracker { counts: vec![(0, 0); n + 1], tracked: vec![false; n + 1], num_tracked: 0 }
    }

    fn track(&mut self, v: usize) {
        if !self.tracked[v] {
            self.tracked[v] = true;
            self.num_tracked += 1;
        }
    }

    fn observe(&mut self, c: &Clause) {
        for &v in &c.positive_vars {
            if self.tracked[v] {
                self.counts[v].0 += 1;
            }
        }
        for &v in &c.negative_vars {
            if self.tracked[v] {
                self.counts[v].1 += 1;
            }
        }
    }

    fn class(&self, t: &BiasPartition, v: usize) -> isize {
        let (a, b) = self.counts[v];
        t.class_of(&ratio(a as i64 - b as i64, (a + b) as i64))
    }
}

fn count_patterns(space: &PatternSpace, t: &BiasPartition, tracker: &BiasTracker, stored: &[Clause]) -> Vec<u64> {
    let ell = t.ell();
    let l = 2 * ell + 1;
    let slot: Vec<usize> = (0..tracker.tracked.len())
        .map(|v| if tracker.tracked[v] { (tracker.class(t, v) + ell as isize) as usize } else { usize::MAX })
        .collect();
    let mut counts = vec![0u64; space.len()];
    let mut buf = vec![0u8; 2 * l];
    for c in stored {
        buf.iter_mut().for_each(|x| *x = 0);
        for &v in &c.positive_vars {
            buf[slot[v]] += 1;
        }
        for &v in &c.negative_vars {
            buf[l + slot[v]] += 1;
        }
        let pat = crate::oblivious::Pattern::from_counts(buf.clone()).expect("well-formed pattern");
        counts[space.rank(&pat)] += 1;
    }
    counts
}

fn finish(space: &PatternSpace, p: &RoundingVector, eps: f64, counts: Vec<u64>, norm: f64, q: f64, stored: usize, tracked: usize, exact: bool) -> Result<EstimatorOutput> {
    let mhat: Vec<f64> = counts.iter().map(|&x| x as f64 / norm).collect();
    let est = snapshot_estimate_value(space, &mhat, p, eps * space.len() as f64)?;
    Ok(EstimatorOutput {
        estimate: est.estimate,
        linear: est.linear,
        mhat,
        pattern_counts: counts,
        q,
        stored_clauses: stored,
        tracked_vars: tracked,
        space_used: stored + tracked,
        exact,
    })
}

/// Random-order estimator: keep the first `⌈C/ε²⌉` clauses, track the exact
/// biases of their variables over the whole stream, and estimate the
/// snapshot by the pattern frequencies of the stored prefix.
pub fn random_order_estimate(stream: &ClauseStream, t: &BiasPartition, p: &RoundingVector, eps: f64, c: f64) -> Result<EstimatorOutput> {
    let space = validate(stream, t, p, eps, c)?;
    let q = (eps * eps / c).min(1.0);
    let s = (1.0 / q).ceil() as usize;
    let m = stream.len();
    let mut tracker = BiasTracker::new(stream.n);
    let mut stored = Vec::with_capacity(s.min(m));
    for (j, clause) in stream.clauses.iter().enumerate() {
        if j < s {
            clause.vars().for_each(|v| tracker.track(v));
            stored.push(clause.clone());
        }
        tracker.observe(clause);
    }
    let counts = count_patterns(&space, t, &tracker, &stored);
    let exact = m <= s;
    let (rate, norm) = (if exact { 1.0 } else { stored.len() as f64 / m as f64 }, stored.len() as f64);
    finish(&space, p, eps, counts, norm, rate, stored.len(), tracker.num_tracked, exact)
}

/// Bounded-degree estimator: sample each variable with probability
/// `q = (C·D/(m·ε²))^{1/k}`, store clauses lying entirely in the sample,
/// track the sample's biases, and rescale counts by `1/(q^k m)`.
pub fn bounded_degree_estimate(
    stream: &ClauseStream,
    d: usize,
    m: usize,
    t: &BiasPartition,
    p: &RoundingVector,
    eps: f64,
    c: f64,
    seed: u64,
) -> Result<EstimatorOutput> {
    let space = validate(stream, t, p, eps, c)?;
    if d == 0 || m == 0 {
        return Err(Error::InvalidParameter("D and m must be positive".into()));
    }
    let q = (c * d as f64 / (m as f64 * eps * eps)).powf(1.0 / stream.k as f64);
    let full = q >= 1.0;
    let q = q.min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = BiasTracker::new(stream.n);
    for v in 1..=stream.n {
        if full || rng.gen::<f64>() < q {
            tracker.track(v);
        }
    }
    let mut stored = Vec::new();
    for clause in &stream.clauses {
        tracker.observe(clause);
        if clause.vars().all(|v| tracker.tracked[v]) {
            stored.push(clause.clone());
        }
    }
    let counts = count_patterns(&space, t, &tracker, &stored);
    let norm = q.powi(stream.k as i32) * m as f64;
    finish(&space, p, eps, counts, norm, q, stored.len(), tracker.num_tracked, full)
}

/// `‖M̂ - Snap‖₁` against the exact snapshot of the stream's instance.
pub fn snapshot_l1_error(stream: &ClauseStream, t: &BiasPartition, mhat: &[f64]) -> Result<f64> {
    let inst = stream.to_instance()?;
    let space = PatternSpace::new(stream.k, t.ell())?;
    let exact = snapshot(&inst, t)?.to_dense(&space);
    if exact.len() != mhat.len() {
        return Err(Error::Dimension("snapshot sizes differ".into()));
    }
    Ok(exact.iter().zip(mhat).map(|(a, b)| (a - b).abs()).sum())
}

pub fn max_degree(inst: &Instance) -> usize {
    let mut deg = vec![0usize; inst.n() + 1];
    for c in inst.clauses() {
        for v in c.vars() {
            deg[v] += 1;
        }
    }
    deg.into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiasProfile {
    /// Each literal negated with probability 1/2.
    Uniform,
    /// Each literal negated with probability `q`.
    Skewed(f64),
    /// A hidden assignment is drawn; each literal agrees with it with probability `q`.
    Planted(f64),
}

/// Random unit-weight instance. Every variable occurs at least once (so
/// `m·k >= n` is required); with a degree cap, no variable occurs in more
/// than `cap` clauses.
/// A random permutation covers every variable; the remaining clauses draw
/// `k` distinct variables uniformly.
fn uncapped_slots(k: usize, n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut cover: Vec<usize> = (1..=n).collect();
    cover.shuffle(rng);
    let mut clauses: Vec<Vec<usize>> = cover.chunks(k).map(<[usize]>::to_vec).collect();
    if let Some(last) = clauses.last_mut() {
        while last.len() < k {
            let v = rng.gen_range(1..=n);
            if !last.contains(&v) {
                last.push(v);
            }
        }
    }
    while clauses.len() < m {
        clauses.push(rand::seq::index::sample(rng, n, k).into_iter().map(|v| v + 1).collect());
    }
    clauses.shuffle(rng);
    clauses.concat()
}

/// Configuration model: every variable gets one slot plus a share of a
/// shuffled pool holding `cap - 1` copies of each, then repeated variables
/// are swapped out of clauses (swaps keep every degree fixed).
fn capped_slots(k: usize, n: usize, m: usize, cap: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let slots_needed = m * k;
    let mut slots: Vec<usize> = (1..=n).collect();
    let mut pool: Vec<usize> = (1..=n).flat_map(|v| std::iter::repeat_n(v, cap - 1)).collect();
    pool.shuffle(rng);
    slots.extend_from_slice(&pool[..slots_needed - n]);
    slots.shuffle(rng);
    let has_dup = |slots: &[usize], j: usize| {
        let cl = &slots[j * k..(j + 1) * k];
        (0..k).any(|a| (a + 1..k).any(|b| cl[a] == cl[b]))
    };
    let mut attempts = 0usize;
    loop {
        let bad: Vec<usize> = (0..m).filter(|&j| has_dup(&slots, j)).collect();
        if bad.is_empty() {
            return Ok(slots);
        }
        for j in bad {
            while has_dup(&slots, j) {
                attempts += 1;
                if attempts > 1000 * slots_needed + 10_000 {
                    return Err(Error::InvalidParameter("could not place clauses without repeated variables".into()));
                }
                let a = j * k + rng.gen_range(0..k);
                let b = rng.gen_range(0..slots_needed);
                slots.swap(a, b);
            }
        }
    }
}

pub fn generate_random_instance(k: usize, n: usize, m: usize, profile: BiasProfile, degree_cap: Option<usize>, seed: u64) -> Result<Instance> {
    if k < 2 || n < k || m == 0 {
        return Err(Error::InvalidParameter(format!("need k >= 2, n >= k, m >= 1 (got k={k}, n={n}, m={m})")));
    }
    let prob = match profile {
        BiasProfile::Uniform => 0.5,
        BiasProfile::Skewed(q) | BiasProfile::Planted(q) => q,
    };
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::InvalidParameter("profile probability must lie in [0, 1]".into()));
    }
    let slots_needed = m * k;
    if slots_needed < n {
        return Err(Error::InvalidParameter(format!("m·k = {slots_needed} < n = {n} leaves variables unused")));
    }
    if let Some(cap) = degree_cap {
        if cap == 0 || slots_needed > n * cap {
            return Err(Error::InvalidParameter(format!("degree cap {cap} cannot hold {slots_needed} placements over {n} variables")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = match degree_cap {
        Some(cap) => capped_slots(k, n, m, cap, &mut rng)?,
        None => uncapped_slots(k, n, m, &mut rng),
    };
    let hidden: Vec<bool> = (0..=n).map(|_| rng.gen::<bool>()).collect();
    let mut clauses = Vec::with_capacity(m);
    for j in 0..m {
        let mut pos = Vec::with_capacity(k);
        let mut neg = Vec::with_capacity(k);
        for &v in &slots[j * k..(j + 1) * k] {
            let negated = match profile {
                BiasProfile::Planted(q) => {
                    let agree = rng.gen::<f64>() < q;
                    // hidden[v] = true means the planted value is -1.
                    agree == hidden[v]
                }
                _ => rng.gen::<f64>() < prob,
            };
            if negated { neg.push(v) } else { pos.push(v) }
        }
        clauses.push(Clause::new(pos, neg, int(1))?);
    }
    Instance::new(k, n, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::symmetric_pair_instance;
    use crate::oblivious::oblivious_value;
    use crate::rational::to_f64;

    fn superobl() -> (BiasPartition, RoundingVector) {
        (BiasPartition::superoblivious(), RoundingVector::single(ratio(2, 3)).unwrap())
    }

    #[test]
    fn shuffle_basics() {
        let one = Instance::new(2, 2, vec![Clause::new(vec![1], vec![2], int(1)).unwrap()]).unwrap();
        assert_eq!(shuffle_stream(&one, 5).unwrap().clauses(), one.clauses());
        let inst = generate_random_instance(3, 30, 60, BiasProfile::Uniform, None, 1).unwrap();
        let a = shuffle_stream(&inst, 9).unwrap();
        assert_eq!(a, shuffle_stream(&inst, 9).unwrap());
        assert_ne!(a.clauses(), shuffle_stream(&inst, 10).unwrap().clauses());
        let key = |c: &Clause| (c.positive_vars.clone(), c.negative_vars.clone());
        let mut x: Vec<_> = a.clauses().iter().map(key).collect();
        let mut y: Vec<_> = inst.clauses().iter().map(key).collect();
        x.sort();
        y.sort();
        assert_eq!(x, y);
        let weighted = inst.rescaled(&ratio(1, 2));
        assert!(shuffle_stream(&weighted, 0).is_err());
    }

    #[test]
    fn degrees() {
        assert_eq!(max_degree(&symmetric_pair_instance(4).unwrap()), 2);
        let one = Instance::new(2, 2, vec![Clause::new(vec![1], vec![2], int(1)).unwrap()]).unwrap();
        assert_eq!(max_degree(&one), 1);
        let matching = generate_random_instance(2, 40, 20, BiasProfile::Uniform, Some(1), 3).unwrap();
        assert_eq!(max_degree(&matching), 1);
        let capped = generate_random_instance(3, 100, 200, BiasProfile::Skewed(0.3), Some(7), 4).unwrap();
        assert!(max_degree(&capped) <= 7);
        assert!(generate_random_instance(2, 10, 11, BiasProfile::Uniform, Some(2), 0).is_err());
        assert!(generate_random_instance(2, 10, 3, BiasProfile::Uniform, None, 0).is_err());
    }

    #[test]
    fn generator_is_deterministic_and_unbiased() {
        let a = generate_random_instance(2, 200, 4000, BiasProfile::Uniform, None, 11).unwrap();
        assert_eq!(a, generate_random_instance(2, 200, 4000, BiasProfile::Uniform, None, 11).unwrap());
        let mean_abs: f64 = a.biases().iter().map(|b| to_f64(b.as_ref().unwrap()).abs()).sum::<f64>() / 200.0;
        assert!(mean_abs < 0.2, "{mean_abs}");
        let planted = generate_random_instance(2, 200, 4000, BiasProfile::Planted(0.95), None, 11).unwrap();
        let mean_abs: f64 = planted.biases().iter().map(|b| to_f64(b.as_ref().unwrap()).abs()).sum::<f64>() / 200.0;
        assert!(mean_abs > 0.8, "{mean_abs}");
    }

    #[test]
    fn short_stream_is_exact() {
        let inst = generate_random_instance(2, 20, 30, BiasProfile::Skewed(0.3), None, 2).unwrap();
        let (t, p) = superobl();
        let out = random_order_estimate(&shuffle_stream(&inst, 1).unwrap(), &t, &p, 0.5, 32.0).unwrap();
        assert!(out.exact);
        let obl = to_f64(&oblivious_value(&inst, &t, &p).unwrap());
        assert!((out.linear - obl).abs() < 1e-12);
        assert!((out.estimate - (obl - 0.5 * 21.0)).abs() < 1e-12);
        assert!(snapshot_l1_error(&shuffle_stream(&inst, 1).unwrap(), &t, &out.mhat).unwrap() < 1e-12);
    }

    #[test]
    fn full_rate_bounded_degree_is_exact() {
        let inst = generate_random_instance(2, 50, 100, BiasProfile::Uniform, Some(6), 8).unwrap();
        let (t, p) = superobl();
        let s = ClauseStream::from_instance(&inst).unwrap();
        let out = bounded_degree_estimate(&s, 6, 100, &t, &p, 0.5, 32.0, 0).unwrap();
        assert!(out.exact && out.q == 1.0);
        assert!(snapshot_l1_error(&s, &t, &out.mhat).unwrap() < 1e-12);
        assert_eq!(out.stored_clauses, 100);
    }

    #[test]
    fn raw_estimate_is_a_probability_mix() {
        let inst = generate_random_instance(2, 300, 3000, BiasProfile::Planted(0.8), None, 5).unwrap();
        let (t, p) = superobl();
        for seed in 0..5 {
            let out = random_order_estimate(&shuffle_stream(&inst, seed).unwrap(), &t, &p, 0.2, 32.0).unwrap();
            assert!(!out.exact);
            assert!(out.linear >= 0.0 && out.linear <= 1.0 + 0.2);
            assert_eq!(out.stored_clauses, 800);
            assert_eq!(out.space_used, out.stored_clauses + out.tracked_vars);
        }
    }
}
