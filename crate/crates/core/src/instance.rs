//! Weighted Max-kAND instances with exact rational weights.
//!
//! Variables are 1-indexed. An assignment maps every variable to `+1` or
//! `-1`; a clause is satisfied when all of its positive variables are `+1`
//! and all of its negative variables are `-1`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, Rational};

/// Largest `n` accepted by [`Instance::brute_force_optimum`].
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    /// Sorted, duplicate-free.
    pub positive_vars: Vec<usize>,
    /// Sorted, duplicate-free, disjoint from `positive_vars`.
    pub negative_vars: Vec<usize>,
    pub weight: Rational,
}

impl Clause {
    pub fn new(mut positive_vars: Vec<usize>, mut negative_vars: Vec<usize>, weight: Rational) -> Result<Self> {
        positive_vars.sort_unstable();
        negative_vars.sort_unstable();
        let mut all: Vec<usize> = positive_vars.iter().chain(&negative_vars).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInstance("repeated variable in one clause".into()));
        }
        if weight.is_negative() {
            return Err(Error::InvalidInstance("negative clause weight".into()));
        }
        Ok(Clause { positive_vars, negative_vars, weight })
    }

    pub fn arity(&self) -> usize {
        self.positive_vars.len() + self.negative_vars.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.positive_vars.iter().chain(&self.negative_vars).copied()
    }

    pub fn is_satisfied_by(&self, x: &Assignment) -> bool {
        self.positive_vars.iter().all(|&v| x.get(v) == 1) && self.negative_vars.iter().all(|&v| x.get(v) == -1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<i8>,
}

impl Assignment {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter("assignment entries must be +1 or -1".into()));
        }
        Ok(Assignment { values })
    }

    pub fn all_positive(n: usize) -> Self {
        Assignment { values: vec![1; n] }
    }

    /// Bit `n-1-i` of `bits` set means variable `i+1` is `-1`, so increasing
    /// `bits` walks assignments in lexicographic order with `+1 < -1`.
    pub fn from_lex_index(n: usize, bits: u64) -> Self {
        let values = (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { -1 } else { 1 }).collect();
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of 1-indexed variable `v`.
    pub fn get(&self, v: usize) -> i8 {
        self.values[v - 1]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Entrywise product `x ⊙ y`.
    pub fn hadamard(&self, other: &Assignment) -> Assignment {
        Assignment { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    k: usize,
    n: usize,
    clauses: Vec<Clause>,
}

impl Instance {
    /// Validates arity, variable range and total weight. Variables that
    /// appear in no clause are allowed here (they are rejected by [`parse`]).
    ///
    /// [`parse`]: Instance::parse
    pub fn new(k: usize, n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInstance(format!("arity must be at least 2, got {k}")));
        }
        let mut total = Rational::zero();
        for (j, c) in clauses.iter().enumerate() {
            if c.arity() != k {
                return Err(Error::InvalidInstance(format!("clause {} has {} literals, expected {k}", j + 1, c.arity())));
            }
            if let Some(v) = c.vars().find(|&v| v == 0 || v > n) {
                return Err(Error::InvalidInstance(format!("variable {v} out of range 1..={n}")));
            }
            total += &c.weight;
        }
        if !total.is_positive() {
            return Err(Error::InvalidInstance("total weight must be positive".into()));
        }
        Ok(Instance { k, n, clauses })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn total_weight(&self) -> Rational {
        self.clauses.iter().map(|c| &c.weight).sum()
    }

    /// True when every clause has weight exactly 1.
    pub fn is_input_form(&self) -> bool {
        self.clauses.iter().all(|c| c.weight.is_one())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "kand" {
            return Err(perr(hline, "header must be `kand <k> <n> <m>`".into()));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| perr(hline, format!("bad header field {s:?}")));
        let (k, n, m) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
        if k < 2 {
            return Err(perr(hline, "arity must be at least 2".into()));
        }
        let mut clauses = Vec::with_capacity(m);
        for (line, body) in lines.by_ref() {
            if clauses.len() == m {
                return Err(perr(line, format!("more than {m} clause lines")));
            }
            let mut toks = body.split_whitespace();
            let w = toks.next().unwrap_or_default();
            let weight = parse_rational(w).map_err(|_| perr(line, format!("bad weight {w:?}")))?;
            if weight.is_negative() {
                return Err(perr(line, "negative weight".into()));
            }
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            let mut count = 0;
            for tok in toks {
                count += 1;
                let (sign, rest) = tok.split_at(tok.len().min(1));
                let v: usize = rest.parse().map_err(|_| perr(line, format!("bad literal {tok:?}")))?;
                if v == 0 || v > n {
                    return Err(perr(line, format!("variable {v} out of range 1..={n}")));
                }
                match sign {
                    "+" => pos.push(v),
                    "-" => neg.push(v),
                    _ => return Err(perr(line, format!("literal {tok:?} needs a +/- sign"))),
                }
            }
            if count != k {
                return Err(perr(line, format!("expected {k} literals, found {count}")));
            }
            let clause = Clause::new(pos, neg, weight).map_err(|e| perr(line, e.to_string()))?;
            clauses.push(clause);
        }
        if clauses.len() != m {
            return Err(perr(hline, format!("header promises {m} clauses, found {}", clauses.len())));
        }
        let mut seen = vec![false; n + 1];
        for v in clauses.iter().flat_map(|c| c.vars()) {
            seen[v] = true;
        }
        if let Some(v) = (1..=n).find(|&v| !seen[v]) {
            return Err(Error::IsolatedVariable(v));
        }
        Instance::new(k, n, clauses).map_err(|e| perr(hline, e.to_string()))
    }

    /// Canonical text form: clauses in stored order, literals by variable id.
    pub fn to_text(&self) -> String {
        let mut out = format!("kand {} {} {}\n", self.k, self.n, self.m());
        for c in &self.clauses {
            let mut lits: Vec<(usize, char)> =
                c.positive_vars.iter().map(|&v| (v, '+')).chain(c.negative_vars.iter().map(|&v| (v, '-'))).collect();
            lits.sort_unstable();
            out.push_str(&format_rational(&c.weight));
            for (v, s) in lits {
                let _ = write!(out, " {s}{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn assignment_value(&self, x: &Assignment) -> Rational {
        let sat: Rational = self.clauses.iter().filter(|c| c.is_satisfied_by(x)).map(|c| &c.weight).sum();
        sat / self.total_weight()
    }

    pub fn brute_force_optimum(&self) -> Result<(Assignment, Rational)> {
        self.brute_force_optimum_with_cap(DEFAULT_BRUTE_FORCE_CAP)
    }

    /// Exhaustive search over all `2^n` assignments. Ties go to the
    /// lexicographically smallest assignment with `+1 < -1`.
    pub fn brute_force_optimum_with_cap(&self, cap: usize) -> Result<(Assignment, Rational)> {
        if self.n > cap || self.n > 63 {
            return Err(Error::TooManyVariables { n: self.n, cap });
        }
        let n = self.n;
        let bit = |v: usize| 1u64 << (n - v);
        let masks: Vec<(u64, u64)> = self
            .clauses
            .iter()
            .map(|c| {
                (c.positive_vars.iter().map(|&v| bit(v)).fold(0, |a, b| a | b), c.negative_vars.iter().map(|&v| bit(v)).fold(0, |a, b| a | b))
            })
            .collect();
        // Scale to integer weights over a common denominator.
        let lcm = self.clauses.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.weight.denom()));
        let ints: Vec<BigInt> = self.clauses.iter().map(|c| (&c.weight * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let total: BigInt = ints.iter().sum();
        let total_fits = total.to_u128().is_some();
        let count = 1u64 << n;
        let (best_bits, best_sum) = if total_fits {
            let w: Vec<u128> = ints.iter().map(|x| x.to_u128().unwrap_or(0)).collect();
            let eval = |bits: u64| -> u128 {
                masks.iter().zip(&w).filter(|((p, q), _)| bits & p == 0 && bits & q == *q).map(|(_, w)| *w).sum()
            };
            let (b, s) = search(count, &eval);
            (b, BigInt::from(s))
        } else {
            let eval = |bits: u64| -> BigInt {
                masks.iter().zip(&ints).filter(|((p, q), _)| bits & p == 0 && bits & q == *q).map(|(_, w)| w.clone()).sum()
            };
            search(count, &eval)
        };
        Ok((Assignment::from_lex_index(n, best_bits), Rational::new(best_sum, total)))
    }

    /// Returns `(w⁺(v), w⁻(v))` for every variable, indexed by `v - 1`.
    pub fn literal_weights(&self) -> Vec<(Rational, Rational)> {
        let mut out = vec![(Rational::zero(), Rational::zero()); self.n];
        for c in &self.clauses {
            for &v in &c.positive_vars {
                out[v - 1].0 += &c.weight;
            }
            for &v in &c.negative_vars {
                out[v - 1].1 += &c.weight;
            }
        }
        out
    }

    pub fn bias(&self, v: usize) -> Result<Rational> {
        if v == 0 || v > self.n {
            return Err(Error::InvalidParameter(format!("variable {v} out of range")));
        }
        let (mut plus, mut minus) = (Rational::zero(), Rational::zero());
        for c in &self.clauses {
            if c.positive_vars.binary_search(&v).is_ok() {
                plus += &c.weight;
            } else if c.negative_vars.binary_search(&v).is_ok() {
                minus += &c.weight;
            }
        }
        bias_from_weights(&plus, &minus).ok_or(Error::IsolatedVariable(v))
    }

    /// Bias of every variable; `None` for variables with zero total weight.
    pub fn biases(&self) -> Vec<Option<Rational>> {
        self.literal_weights().iter().map(|(p, m)| bias_from_weights(p, m)).collect()
    }

    /// Swaps every variable with `y_v = -1` between the positive and
    /// negative side of each clause.
    pub fn flip(&self, y: &Assignment) -> Result<Instance> {
        if y.len() != self.n {
            return Err(Error::Dimension(format!("assignment has length {}, instance has {} variables", y.len(), self.n)));
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let mut pos = Vec::with_capacity(c.positive_vars.len());
                let mut neg = Vec::with_capacity(c.negative_vars.len());
                for &v in &c.positive_vars {
                    if y.get(v) == 1 { pos.push(v) } else { neg.push(v) }
                }
                for &v in &c.negative_vars {
                    if y.get(v) == 1 { neg.push(v) } else { pos.push(v) }
                }
                pos.sort_unstable();
                neg.sort_unstable();
                Clause { positive_vars: pos, negative_vars: neg, weight: c.weight.clone() }
            })
            .collect();
        Ok(Instance { k: self.k, n: self.n, clauses })
    }

    /// Same clauses with every weight multiplied by `factor > 0`.
    pub fn rescaled(&self, factor: &Rational) -> Instance {
        let clauses = self.clauses.iter().map(|c| Clause { weight: &c.weight * factor, ..c.clone() }).collect();
        Instance { k: self.k, n: self.n, clauses }
    }
}

pub fn bias_from_weights(plus: &Rational, minus: &Rational) -> Option<Rational> {
    let total = plus + minus;
    if total.is_zero() {
        None
    } else {
        Some((plus - minus) / total)
    }
}

/// The two-clause instance on variables `1..=k`: all-positive and
/// all-negative, weight 1 each.
pub fn symmetric_pair_instance(k: usize) -> Result<Instance> {
    let vars: Vec<usize> = (1..=k).collect();
    Instance::new(
        k,
        k,
        vec![Clause::new(vars.clone(), vec![], int(1))?, Clause::new(vec![], vars, int(1))?],
    )
}

fn search<T, F>(count: u64, eval: &F) -> (u64, T)
where
    T: Ord + Send + Clone,
    F: Fn(u64) -> T + Sync,
{
    const CHUNK: u64 = 1 << 12;
    let chunks = count.div_ceil(CHUNK);
    let best_in = |lo: u64, hi: u64| {
        let mut best = (lo, eval(lo));
        for bits in lo + 1..hi {
            let v = eval(bits);
            if v > best.1 {
                best = (bits, v);
            }
        }
        best
    };
    let pick = |a: (u64, T), b: (u64, T)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a }
    };
    if chunks <= 1 {
        return best_in(0, count);
    }
    (0..chunks)
        .into_par_iter()
        .map(|c| best_in(c * CHUNK, ((c + 1) * CHUNK).min(count)))
        .reduce_with(pick)
        .expect("at least one chunk")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn single(pos: Vec<usize>, neg: Vec<usize>, n: usize) -> Instance {
        let k = pos.len() + neg.len();
        Instance::new(k, n, vec![Clause::new(pos, neg, int(1)).unwrap()]).unwrap()
    }

    #[test]
    fn parse_single_clause() {
        let inst = Instance::parse("kand 2 2 1\n1 +1 -2").unwrap();
        assert_eq!(inst.k(), 2);
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.clauses()[0].positive_vars, vec![1]);
        assert_eq!(inst.clauses()[0].negative_vars, vec![2]);
        assert_eq!(inst.clauses()[0].weight, int(1));
    }

    #[test]
    fn parse_symmetric_pair_file() {
        let text = "# pair\nkand 2 2 2\n1 +1 +2\n1 -1 -2\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.m(), 2);
        assert_eq!(inst, symmetric_pair_instance(2).unwrap());
    }

    #[test]
    fn parse_errors() {
        assert!(Instance::parse("kand 2 2 1\n1 +1 +1").is_err());
        assert!(Instance::parse("kand 2 2 1\n1 +1 -1").is_err());
        assert!(Instance::parse("kand 2 2 1\n1 +1").is_err());
        assert!(Instance::parse("kand 2 2 1\n1 +1 -3").is_err());
        assert!(Instance::parse("kand 2 3 1\n1 +1 -2").is_err());
        assert!(Instance::parse("kand x 2 1\n1 +1 -2").is_err());
        assert!(Instance::parse("cnf 2 2 1\n1 +1 -2").is_err());
        assert!(Instance::parse("kand 2 2 2\n1 +1 -2").is_err());
        assert!(Instance::parse("kand 2 2 1\n1 1 -2").is_err());
        assert!(Instance::parse("kand 2 2 1\n-1 +1 -2").is_err());
        assert!(matches!(Instance::parse("kand 2 3 1\n1 +1 -2"), Err(Error::IsolatedVariable(3))));
    }

    #[test]
    fn parse_rational_and_decimal_weights() {
        let inst = Instance::parse("kand 2 3 2\n3/4 +1 -2\n0.25 -2 +3\n").unwrap();
        assert_eq!(inst.clauses()[0].weight, ratio(3, 4));
        assert_eq!(inst.clauses()[1].weight, ratio(1, 4));
        assert_eq!(inst.total_weight(), int(1));
    }

    #[test]
    fn text_round_trip_is_stable() {
        let text = "kand 3 4 2\n2/3 -3 +1 +2\n1 +4 -1 -2\n";
        let once = Instance::parse(text).unwrap().to_text();
        assert_eq!(once, "kand 3 4 2\n2/3 +1 +2 -3\n1 -1 -2 +4\n");
        assert_eq!(Instance::parse(&once).unwrap().to_text(), once);
    }

    #[test]
    fn values_of_simple_instances() {
        let pair = symmetric_pair_instance(2).unwrap();
        let x = Assignment::new(vec![1, 1]).unwrap();
        assert_eq!(pair.assignment_value(&x), ratio(1, 2));
        let y = Assignment::new(vec![1, -1]).unwrap();
        assert_eq!(pair.assignment_value(&y), int(0));
        let one = single(vec![1, 2], vec![], 2);
        assert_eq!(one.assignment_value(&x), int(1));
    }

    #[test]
    fn brute_force_small_cases() {
        for k in 2..=5 {
            let pair = symmetric_pair_instance(k).unwrap();
            let (x, v) = pair.brute_force_optimum().unwrap();
            assert_eq!(v, ratio(1, 2));
            assert_eq!(x, Assignment::all_positive(k));
        }
        let one = single(vec![1, 2, 3], vec![], 3);
        assert_eq!(one.brute_force_optimum().unwrap(), (Assignment::all_positive(3), int(1)));
        let neg = single(vec![2], vec![1], 2);
        let (x, v) = neg.brute_force_optimum().unwrap();
        assert_eq!(v, int(1));
        assert_eq!(x.values(), &[-1, 1]);
    }

    #[test]
    fn brute_force_cap() {
        let clauses = vec![Clause::new((1..=13).collect(), (14..=26).collect(), int(1)).unwrap()];
        let inst = Instance::new(26, 26, clauses).unwrap();
        assert!(matches!(inst.brute_force_optimum(), Err(Error::TooManyVariables { n: 26, cap: 24 })));
    }

    #[test]
    fn biases() {
        let pair = symmetric_pair_instance(3).unwrap();
        for v in 1..=3 {
            assert_eq!(pair.bias(v).unwrap(), int(0));
        }
        let one = single(vec![1, 2], vec![], 2);
        assert_eq!(one.bias(1).unwrap(), int(1));
        let text = "kand 2 3 3\n3 +1 +2\n1 -1 +3\n1 +2 +3\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.bias(1).unwrap(), ratio(1, 2));
        let iso = Instance::new(2, 3, vec![Clause::new(vec![1, 2], vec![], int(1)).unwrap()]).unwrap();
        assert!(matches!(iso.bias(3), Err(Error::IsolatedVariable(3))));
    }

    #[test]
    fn flip_examples() {
        let inst = single(vec![1], vec![2], 2);
        assert_eq!(inst.flip(&Assignment::all_positive(2)).unwrap(), inst);
        let flipped = inst.flip(&Assignment::new(vec![-1, 1]).unwrap()).unwrap();
        assert!(flipped.clauses()[0].positive_vars.is_empty());
        assert_eq!(flipped.clauses()[0].negative_vars, vec![1, 2]);
    }

    #[test]
    fn zero_total_weight_rejected() {
        let c = Clause::new(vec![1, 2], vec![], int(0)).unwrap();
        assert!(Instance::new(2, 2, vec![c]).is_err());
    }
}
