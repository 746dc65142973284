//! Closed-form constants, the two-sided Bernoulli check, sparse dual
//! certificates for `t = (δ, 1)`, `p = ((1+γ)/2)`, and the strict core systems
//! used to certify ratios above `α*_k`.
//!
//! Everything here runs in exact rational arithmetic.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::factor_lp::{approximation_ratio, build_dual, dual_y_index, RatioResult};
use crate::lp::{check_feasible, FeasibilityReport};
use crate::oblivious::{BiasPartition, PatternSpace, RoundingVector};
use crate::rational::{int, powi, ratio, to_f64, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct KandConstants {
    pub k: usize,
    pub gamma: Rational,
    pub p_star: Rational,
    pub alpha_star: Rational,
    /// `(1-γ)^{⌊k/2⌋}(1+γ)^{⌊k/2⌋}`, so that `α* = 2^{-(k-1)} β`.
    pub beta: Rational,
}

pub fn gamma_k(k: usize) -> Rational {
    if k % 2 == 1 {
        ratio(1, k as i64)
    } else {
        ratio(1, k as i64 + 1)
    }
}

pub fn constants(k: usize) -> Result<KandConstants> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    let gamma = gamma_k(k);
    let h = (k / 2) as i64;
    let beta = powi(&(int(1) - &gamma), h) * powi(&(int(1) + &gamma), h);
    let alpha_star = &beta * powi(&ratio(1, 2), k as i64 - 1);
    Ok(KandConstants { k, p_star: (int(1) + &gamma) / int(2), gamma, alpha_star, beta })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliReport {
    pub k: usize,
    /// `(i, j, RHS - LHS)` for every `i + j <= k`.
    pub margins: Vec<(usize, usize, Rational)>,
    pub tight: Vec<(usize, usize)>,
    pub holds: bool,
}

/// Checks `1 + (j-i)/k <= (1-γ_k)^{i-⌊k/2⌋} (1+γ_k)^{j-⌊k/2⌋}` for all `i + j <= k`.
pub fn check_bernoulli(k: usize) -> Result<BernoulliReport> {
    let c = constants(k)?;
    let h = (k / 2) as i64;
    let lo = int(1) - &c.gamma;
    let hi = int(1) + &c.gamma;
    let lo_pow: Vec<Rational> = (0..=k as i64).map(|i| powi(&lo, i - h)).collect();
    let hi_pow: Vec<Rational> = (0..=k as i64).map(|j| powi(&hi, j - h)).collect();
    let mut margins = Vec::new();
    for i in 0..=k {
        for j in 0..=k - i {
            let lhs = int(1) + ratio(j as i64 - i as i64, k as i64);
            let rhs = &lo_pow[i] * &hi_pow[j];
            margins.push((i, j, rhs - lhs));
        }
    }
    let tight = margins.iter().filter(|m| m.2.is_zero()).map(|m| (m.0, m.1)).collect();
    let holds = margins.iter().all(|m| !m.2.is_negative());
    Ok(BernoulliReport { k, margins, tight, holds })
}

/// One inequality of the sufficient condition: `family` is 1 for the
/// negated-pattern family and 2 for the positive-pattern family.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffMargin {
    pub family: u8,
    pub i: usize,
    pub j: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl SuffMargin {
    pub fn margin(&self) -> Rational {
        &self.rhs - &self.lhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuffCondReport {
    pub margins: Vec<SuffMargin>,
    pub passed: bool,
    /// Every inequality holds with positive margin.
    pub strict: bool,
    pub worst: SuffMargin,
}

impl SuffCondReport {
    pub fn tight(&self) -> Vec<(u8, usize, usize)> {
        self.margins.iter().filter(|m| m.margin().is_zero()).map(|m| (m.family, m.i, m.j)).collect()
    }

    /// Largest `β'` for which every inequality still holds with `β'` in place of `β`.
    pub fn best_beta(&self, beta: &Rational) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for m in &self.margins {
            if m.lhs.is_positive() {
                let s = &m.rhs / &m.lhs;
                if best.as_ref().is_none_or(|b| &s < b) {
                    best = Some(s);
                }
            } else if m.rhs.is_negative() {
                return None;
            }
        }
        Some(best.map_or_else(|| beta.clone(), |s| s * beta))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,i,j,lhs,rhs,margin\n");
        for m in &self.margins {
            out.push_str(&format!("{},{},{},{:.12e},{:.12e},{:.12e}\n", m.family, m.i, m.j, to_f64(&m.lhs), to_f64(&m.rhs), to_f64(&m.margin())));
        }
        out
    }
}

/// Evaluates both inequality families over all `i + j <= k`:
///
/// 1. `(1+δ)(1-(i+j)/k) Y + (1-δ)(j/k) X <= β⁻¹ (1-γ)^i (1+γ)^j`
/// 2. `2 - (1-δ)(1-(i+j)/k) Y - (1+δ)(i/k) X <= β⁻¹ (1-γ)^i (1+γ)^j`
pub fn check_suff_cond(k: usize, delta: &Rational, gamma: &Rational, beta: &Rational, x: &Rational, y: &Rational) -> Result<SuffCondReport> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    let unit = |v: &Rational| !v.is_negative() && v <= &int(1);
    if !unit(delta) || !unit(gamma) {
        return Err(Error::InvalidParameter("δ and γ must lie in [0, 1]".into()));
    }
    if !beta.is_positive() || x.is_negative() || y.is_negative() {
        return Err(Error::InvalidParameter("need β > 0 and X, Y >= 0".into()));
    }
    let kq = int(k as i64);
    let binv = beta.recip();
    let lo = int(1) - gamma;
    let hi = int(1) + gamma;
    let mut margins = Vec::new();
    for i in 0..=k {
        for j in 0..=k - i {
            let rhs = &binv * powi(&lo, i as i64) * powi(&hi, j as i64);
            let rest = int(1) - int((i + j) as i64) / &kq;
            let f1 = (int(1) + delta) * &rest * y + (int(1) - delta) * int(j as i64) / &kq * x;
            let f2 = int(2) - (int(1) - delta) * &rest * y - (int(1) + delta) * int(i as i64) / &kq * x;
            margins.push(SuffMargin { family: 1, i, j, lhs: f1, rhs: rhs.clone() });
            margins.push(SuffMargin { family: 2, i, j, lhs: f2, rhs });
        }
    }
    let worst = margins.iter().min_by(|a, b| a.margin().cmp(&b.margin())).unwrap().clone();
    let passed = !worst.margin().is_negative();
    let strict = worst.margin().is_positive();
    Ok(SuffCondReport { margins, passed, strict, worst })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub k: usize,
    pub delta: Rational,
    pub gamma: Rational,
    pub beta: Rational,
    pub x: Rational,
    pub y: Rational,
    pub z: Rational,
    /// `y⁺_{-1}`.
    pub y_plus_neg: Rational,
    /// `y⁺_0`.
    pub y_plus_zero: Rational,
    /// Smallest exact slack `prob(c) - LHS(c)` over all patterns.
    pub worst_exact_slack: Rational,
    pub exact_feasible: bool,
    /// Floating-point check against the assembled dual LP.
    pub lp_check: FeasibilityReport,
}

impl DualCertificate {
    /// The certified lower bound `z = 2^{-(k-1)} β`.
    pub fn certified_ratio(&self) -> &Rational {
        &self.z
    }

    /// Dual point in the variable layout of [`build_dual`].
    pub fn dual_point(&self) -> Vec<f64> {
        let mut v = vec![0.0; 8];
        v[0] = to_f64(&self.z);
        v[dual_y_index(1, -1) + 1] = to_f64(&self.y_plus_neg);
        v[dual_y_index(1, 0) + 1] = to_f64(&self.y_plus_zero);
        v
    }
}

/// Builds the sparse dual point `z = 2β/2^k`, `y⁺_{-1} = Xβ/(k 2^k)`,
/// `y⁺_0 = Yβ/(k 2^k)` and checks it against every dual row.
pub fn dual_certificate(k: usize, delta: &Rational, gamma: &Rational, beta: &Rational, x: &Rational, y: &Rational) -> Result<DualCertificate> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    if delta.is_negative() || delta >= &int(1) || gamma.is_negative() || gamma > &int(1) {
        return Err(Error::InvalidParameter("need 0 <= δ < 1 and 0 <= γ <= 1".into()));
    }
    if !beta.is_positive() || x.is_negative() || y.is_negative() {
        return Err(Error::InvalidParameter("need β > 0 and X, Y >= 0".into()));
    }
    let t = BiasPartition::two_class(delta.clone())?;
    let p = RoundingVector::single((int(1) + gamma) / int(2))?;
    let two_k = powi(&int(2), k as i64);
    let kq = int(k as i64);
    let z = int(2) * beta / &two_k;
    let y_plus_neg = x * beta / (&kq * &two_k);
    let y_plus_zero = y * beta / (&kq * &two_k);

    let coef = |i: isize, cp: usize, cm: usize| (t.upper(i) - int(1)) * int(cp as i64) + (int(1) + t.upper(i)) * int(cm as i64);
    let space = PatternSpace::new(k, 1)?;
    let mut worst: Option<Rational> = None;
    for c in space.patterns() {
        let mut lhs = coef(-1, c.c_plus(-1), c.c_minus(-1)) * &y_plus_neg + coef(0, c.c_plus(0), c.c_minus(0)) * &y_plus_zero;
        if c.is_positive() {
            lhs += &z;
        }
        let slack = c.sat_prob_exact(&p) - lhs;
        if worst.as_ref().is_none_or(|w| &slack < w) {
            worst = Some(slack);
        }
    }
    let worst = worst.unwrap();
    let mut cert = DualCertificate {
        k,
        delta: delta.clone(),
        gamma: gamma.clone(),
        beta: beta.clone(),
        x: x.clone(),
        y: y.clone(),
        z,
        y_plus_neg,
        y_plus_zero,
        exact_feasible: !worst.is_negative(),
        worst_exact_slack: worst,
        lp_check: FeasibilityReport { violations: Vec::new(), worst: 0.0, passed: true },
    };
    cert.lp_check = check_feasible(&build_dual(k, &t, &p)?, &cert.dual_point(), 1e-9)?;
    Ok(cert)
}

/// The certificate at `δ = 0`, `γ = γ_k`, `X = 2`, `Y = 1`, `β = (1-γ_k²)^{⌊k/2⌋}`.
pub fn base_certificate(k: usize) -> Result<DualCertificate> {
    let c = constants(k)?;
    dual_certificate(k, &int(0), &c.gamma, &c.beta, &int(2), &int(1))
}

/// `a_x X + a_y Y < rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreInequality {
    pub a_x: Rational,
    pub a_y: Rational,
    pub rhs: Rational,
}

impl CoreInequality {
    fn new(a_x: Rational, a_y: Rational, rhs: Rational) -> Self {
        CoreInequality { a_x, a_y, rhs }
    }

    pub fn slack(&self, x: &Rational, y: &Rational) -> Rational {
        &self.rhs - &self.a_x * x - &self.a_y * y
    }
}

/// The six inequalities that pin down `(X, Y)` near the three tight pairs,
/// for a given `ε`, `δ` and `η`. Constant terms are moved to the right.
pub fn core_system(k: usize, eps: &Rational, delta: &Rational, eta: &Rational) -> Vec<CoreInequality> {
    let kq = int(k as i64);
    let half = ratio(1, 2);
    let one = int(1);
    let om = &one - eta;
    let dm = &one - delta;
    let dp = &one + delta;
    let g = gamma_k(k) + eps;
    let zero = Rational::zero();
    if k.is_multiple_of(2) {
        let r1 = (&one + &g) / (&one - &g);
        let r2 = (&one - &g).recip();
        let a = &half + kq.recip();
        let b = &half - kq.recip();
        vec![
            CoreInequality::new(&half * &dm, zero.clone(), om.clone()),
            CoreInequality::new(-(&half * &dp), zero.clone(), &om - int(2)),
            CoreInequality::new(&a * &dm, zero.clone(), &om * &r1),
            CoreInequality::new(-(&b * &dp), zero.clone(), &om * &r1 - int(2)),
            CoreInequality::new(&half * &dm, &dp / &kq, &om * &r2),
            CoreInequality::new(-(&b * &dp), -(&dm / &kq), &om * &r2 - int(2)),
        ]
    } else {
        let a = &half + (int(2) * &kq).recip();
        let b = &half - (int(2) * &kq).recip();
        let up = &one + &g;
        let down = &one - &g;
        vec![
            CoreInequality::new(&a * &dm, zero.clone(), &om * &up),
            CoreInequality::new(-(&b * &dp), zero.clone(), &om * &up - int(2)),
            CoreInequality::new(&b * &dm, zero.clone(), &om * &down),
            CoreInequality::new(-(&a * &dp), zero.clone(), &om * &down - int(2)),
            CoreInequality::new(&b * &dm, &dp / &kq, om.clone()),
            CoreInequality::new(-(&b * &dp), -(&dm / &kq), &om - int(2)),
        ]
    }
}

/// Open interval `(lo, hi)` of `X`; `None` means unbounded on that side.
#[derive(Debug, Clone)]
struct Interval {
    lo: Option<Rational>,
    hi: Option<Rational>,
    ok: bool,
}

impl Interval {
    fn all() -> Self {
        Interval { lo: None, hi: None, ok: true }
    }

    /// Intersects with `{X : a X < c}`.
    fn constrain(&mut self, a: &Rational, c: &Rational) {
        if a.is_zero() {
            self.ok &= c.is_positive();
        } else if a.is_positive() {
            let b = c / a;
            if self.hi.as_ref().is_none_or(|h| &b < h) {
                self.hi = Some(b);
            }
        } else {
            let b = c / a;
            if self.lo.as_ref().is_none_or(|l| &b > l) {
                self.lo = Some(b);
            }
        }
    }

    fn pick(&self) -> Option<Rational> {
        if !self.ok {
            return None;
        }
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) if l < h => Some((l + h) / int(2)),
            (Some(_), Some(_)) => None,
            (Some(l), None) => Some(l + int(1)),
            (None, Some(h)) => Some(h - int(1)),
            (None, None) => Some(Rational::zero()),
        }
    }
}

/// Picks `(X, Y)` strictly inside the system: `X` at the midpoint of its
/// admissible interval (including the constraint that the `Y` interval is
/// nonempty and reaches above 0), then `Y` at the midpoint of its interval.
fn solve_two_var(system: &[CoreInequality]) -> Option<(Rational, Rational)> {
    let mut xi = Interval::all();
    xi.lo = Some(Rational::zero());
    let (y_free, y_rows): (Vec<_>, Vec<_>) = system.iter().partition(|r| r.a_y.is_zero());
    for r in &y_free {
        xi.constrain(&r.a_x, &r.rhs);
    }
    // Y < (c - a_x X)/a_y for a_y > 0, Y > (c - a_x X)/a_y for a_y < 0: each
    // bound is `u + v X`.
    let bound = |r: &CoreInequality| (&r.rhs / &r.a_y, -(&r.a_x / &r.a_y));
    let uppers: Vec<_> = y_rows.iter().filter(|r| r.a_y.is_positive()).map(|r| bound(r)).collect();
    let lowers: Vec<_> = y_rows.iter().filter(|r| r.a_y.is_negative()).map(|r| bound(r)).collect();
    for (uu, uv) in &uppers {
        // Upper bound must exceed 0 (Y >= 0) and every lower bound.
        xi.constrain(&-uv.clone(), uu);
        for (lu, lv) in &lowers {
            xi.constrain(&(lv - uv), &(uu - lu));
        }
    }
    let x = xi.pick()?;
    let eval = |(u, v): &(Rational, Rational)| u + v * &x;
    let mut yi = Interval { lo: Some(Rational::zero()), hi: None, ok: true };
    for b in &uppers {
        let v = eval(b);
        if yi.hi.as_ref().is_none_or(|h| &v < h) {
            yi.hi = Some(v);
        }
    }
    for b in &lowers {
        let v = eval(b);
        if yi.lo.as_ref().is_none_or(|l| &v > l) {
            yi.lo = Some(v);
        }
    }
    let y = yi.pick()?;
    system.iter().all(|r| r.slack(&x, &y).is_positive()).then_some((x, y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreStrictSolution {
    pub k: usize,
    /// Perturbation actually used after halving.
    pub eps: Rational,
    pub halvings: usize,
    pub delta: Rational,
    pub eta: Rational,
    /// `β_k`, the base constant.
    pub beta: Rational,
    pub x: Rational,
    pub y: Rational,
    /// `γ_k + ε`; the rounding probability is `(1 + γ)/2`.
    pub gamma: Rational,
    /// Slacks of the six core inequalities, all positive.
    pub core_slacks: Vec<Rational>,
    /// Largest `β'` for which the full sufficient condition holds.
    pub beta_prime: Rational,
    /// `2^{-(k-1)} β'`.
    pub certified_lower_bound: Rational,
}

impl CoreStrictSolution {
    pub fn partition(&self) -> Result<BiasPartition> {
        BiasPartition::two_class(self.delta.clone())
    }

    pub fn rounding(&self) -> Result<RoundingVector> {
        RoundingVector::single((int(1) + &self.gamma) / int(2))
    }
}

/// Solves the strict core system, halving `eps` until `(X, Y)` exist and the
/// whole sufficient condition holds strictly at `γ = γ_k + eps` and `β_k`.
pub fn solve_core_strict(k: usize, eps: &Rational) -> Result<CoreStrictSolution> {
    if !eps.is_positive() {
        return Err(Error::InvalidParameter("ε must be positive".into()));
    }
    let c = constants(k)?;
    let h = (k / 2) as i64;
    let mut eps = eps.clone();
    for halvings in 0..=60 {
        let g = &c.gamma + &eps;
        if g < int(1) {
            let eta = int(1) - c.beta.recip() * powi(&(int(1) - &g), h) * powi(&(int(1) + &g), h);
            let delta = if k == 2 {
                eps.clone()
            } else if k.is_multiple_of(2) {
                int(4) * &eta
            } else {
                int(5) * &eta
            };
            if delta < int(1) {
                let system = core_system(k, &eps, &delta, &eta);
                if let Some((x, y)) = solve_two_var(&system) {
                    let report = check_suff_cond(k, &delta, &g, &c.beta, &x, &y)?;
                    if report.strict {
                        let beta_prime = report.best_beta(&c.beta).expect("strict system has a finite β'");
                        let certified_lower_bound = &beta_prime * powi(&ratio(1, 2), k as i64 - 1);
                        let core_slacks = system.iter().map(|r| r.slack(&x, &y)).collect();
                        return Ok(CoreStrictSolution {
                            k,
                            eps,
                            halvings,
                            delta,
                            eta,
                            beta: c.beta,
                            x,
                            y,
                            gamma: g,
                            core_slacks,
                            beta_prime,
                            certified_lower_bound,
                        });
                    }
                }
            }
        }
        eps /= int(2);
    }
    Err(Error::NoCertificate(format!("no strict core solution for k={k} within 60 halvings")))
}

/// `approximation_ratio(k, (δ, 1), (p*_k + ε))`.
pub fn perturbed_ratio(k: usize, delta: &Rational, eps: &Rational) -> Result<RatioResult> {
    let c = constants(k)?;
    let p = &c.p_star + eps;
    if p > int(1) || p.is_negative() {
        return Err(Error::InvalidParameter("p*_k + ε must lie in [0, 1]".into()));
    }
    approximation_ratio(k, &BiasPartition::two_class(delta.clone())?, &RoundingVector::single(p)?)
}
