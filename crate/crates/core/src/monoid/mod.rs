//! Partially ordered monoids, test ladders, and finite null-sequence / Cauchy-series tests.
//!
//! A monoid here carries its own partial order. `leq` returning `false` in both directions
//! means the two elements are incomparable; nothing in this crate reads a `false` as "greater".
//!
//! Convergence to the identity is decided with a [`TestLadder`]: a trace is null when it
//! falls and stays strictly below the bottom rung before its budget runs out. Because the
//! rungs descend strictly, staying below the bottom rung means staying below every rung.

mod catalog;
mod instances;

use std::cmp::Ordering;
use std::fmt::Debug;

use rand::Rng;
use thiserror::Error;

use crate::report::ValidationReport;
use crate::rng::DetRng;

pub use catalog::{parse_monoid, CatalogElem, CatalogMonoid};
pub(crate) use catalog::{split_args, split_call};
pub use instances::{ProductMonoid, RealNonneg, RealVector, Relation, RelationMonoid};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("ladder has no rungs")]
    EmptyLadder,
    #[error("trace is empty")]
    EmptyTrace,
    #[error("no samples supplied")]
    EmptySamples,
    #[error("element {index} of the trace lies outside the positive cone: {repr}")]
    OutsidePositiveCone { index: usize, repr: String },
    #[error("relation monoid supports at most 64 points, got {0}")]
    TooManyPoints(usize),
    #[error("unknown monoid `{0}`")]
    UnknownName(String),
}

/// A partially ordered monoid.
pub trait Monoid: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn combine(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// Least upper bound, for monoids with the Riesz property.
    fn sup(&self, _a: &Self::Elem, _b: &Self::Elem) -> Option<Self::Elem> {
        None
    }

    fn has_sup(&self) -> bool {
        false
    }

    /// Whether bounded partial sums force a Cauchy series (declared, not derived).
    fn weierstrass(&self) -> bool {
        false
    }

    fn describe(&self) -> String;

    /// Strict order: `a ≤ b` and `a ≠ b`.
    fn lt(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.leq(a, b) && a != b
    }

    /// `None` when the elements are incomparable.
    fn compare(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Ordering> {
        match (self.leq(a, b), self.leq(b, a)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    fn is_positive(&self, a: &Self::Elem) -> bool {
        self.leq(&self.identity(), a)
    }

    /// Left-to-right fold of `combine`.
    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.identity(), |acc, x| self.combine(&acc, x))
    }

    /// `x + x + … + x` (`n` copies).
    fn repeat(&self, x: &Self::Elem, n: usize) -> Self::Elem {
        let mut acc = self.identity();
        for _ in 0..n {
            acc = self.combine(&acc, x);
        }
        acc
    }
}

pub type Elem<M> = <M as Monoid>::Elem;

/// Random element generation for axiom checks.
pub trait ElemSampler: Monoid {
    fn sample_elem(&self, rng: &mut DetRng) -> Self::Elem;

    fn sample_elems(&self, rng: &mut DetRng, n: usize) -> Vec<Self::Elem> {
        let mut v = vec![self.identity()];
        while v.len() < n {
            v.push(self.sample_elem(rng));
        }
        v
    }
}

/// A finite, strictly descending chain of positive elements standing in for the threshold
/// family of the null-sequence construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TestLadder<E> {
    rungs: Vec<E>,
    halving_witness: Vec<Option<usize>>,
}

impl<E: Clone + PartialEq + Debug> TestLadder<E> {
    /// Builds a ladder without validating it; see [`validate_ladder`].
    pub fn new<M: Monoid<Elem = E>>(monoid: &M, rungs: Vec<E>) -> Result<Self, MonoidError> {
        if rungs.is_empty() {
            return Err(MonoidError::EmptyLadder);
        }
        let halving_witness = rungs
            .iter()
            .map(|eps| rungs.iter().position(|delta| monoid.leq(&monoid.combine(delta, delta), eps)))
            .collect();
        Ok(Self { rungs, halving_witness })
    }

    pub fn rungs(&self) -> &[E] {
        &self.rungs
    }

    pub fn rung(&self, i: usize) -> &E {
        &self.rungs[i]
    }

    pub fn len(&self) -> usize {
        self.rungs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rungs.is_empty()
    }

    pub fn top(&self) -> &E {
        &self.rungs[0]
    }

    pub fn bottom(&self) -> &E {
        &self.rungs[self.rungs.len() - 1]
    }

    pub fn bottom_index(&self) -> usize {
        self.rungs.len() - 1
    }

    /// Index of some rung `δ` with `δ + δ ≤ rung i`.
    pub fn halving_witness(&self, i: usize) -> Option<usize> {
        self.halving_witness[i]
    }

    /// The ladder without its bottom rung. `None` for single-rung ladders.
    pub fn coarser(&self) -> Option<Self> {
        if self.rungs.len() < 2 {
            return None;
        }
        let k = self.rungs.len() - 1;
        Some(Self {
            rungs: self.rungs[..k].to_vec(),
            halving_witness: self.halving_witness[..k].iter().map(|w| w.filter(|&j| j < k)).collect(),
        })
    }

    /// `Some(i)` for the first (largest) rung the element is *not* strictly below.
    pub fn first_rung_not_above<M: Monoid<Elem = E>>(&self, monoid: &M, x: &E) -> Option<usize> {
        self.rungs.iter().position(|eps| !monoid.lt(x, eps))
    }

    pub fn below_bottom<M: Monoid<Elem = E>>(&self, monoid: &M, x: &E) -> bool {
        monoid.lt(x, self.bottom())
    }
}

/// A finite prefix of an `M₊`-valued sequence and the index budget within which it must settle.
#[derive(Debug, Clone, PartialEq)]
pub struct MTrace<E> {
    pub elements: Vec<E>,
    pub budget: usize,
}

impl<E> MTrace<E> {
    /// Budget defaults to half the length: the second half of the prefix is the look-ahead
    /// that confirms the tail really stays down.
    pub fn new(elements: Vec<E>) -> Self {
        let budget = (elements.len() / 2).max(1);
        Self { elements, budget }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Settles below the bottom rung within budget.
    Null,
    /// The prefix covers the budget and the tail is not below the bottom rung.
    NotNullWithin,
    /// The prefix is shorter than the budget and has not settled.
    Indeterminate,
}

impl Decision {
    pub fn is_null(self) -> bool {
        self == Decision::Null
    }

    pub(crate) fn from_onset(onset: Option<usize>, len: usize, budget: usize) -> Self {
        match onset {
            Some(n) if n <= budget => Decision::Null,
            _ if len < budget => Decision::Indeterminate,
            _ => Decision::NotNullWithin,
        }
    }
}

/// Smallest 1-based index `N` such that `pred` holds for every index `≥ N`.
pub(crate) fn tail_onset<T>(items: &[T], mut pred: impl FnMut(&T) -> bool) -> Option<usize> {
    let mut onset = None;
    for (i, x) in items.iter().enumerate().rev() {
        if pred(x) {
            onset = Some(i + 1);
        } else {
            break;
        }
    }
    onset
}

fn check_positive<M: Monoid>(monoid: &M, trace: &MTrace<M::Elem>) -> Result<(), MonoidError> {
    if trace.is_empty() {
        return Err(MonoidError::EmptyTrace);
    }
    match trace.elements.iter().position(|x| !monoid.is_positive(x)) {
        Some(index) => Err(MonoidError::OutsidePositiveCone { index, repr: format!("{:?}", trace.elements[index]) }),
        None => Ok(()),
    }
}

/// 1-based index from which the trace stays strictly below the bottom rung.
pub fn null_onset<M: Monoid>(
    trace: &MTrace<M::Elem>,
    ladder: &TestLadder<M::Elem>,
    monoid: &M,
) -> Result<Option<usize>, MonoidError> {
    check_positive(monoid, trace)?;
    Ok(tail_onset(&trace.elements, |x| ladder.below_bottom(monoid, x)))
}

pub fn is_null_trace<M: Monoid>(
    trace: &MTrace<M::Elem>,
    ladder: &TestLadder<M::Elem>,
    monoid: &M,
) -> Result<Decision, MonoidError> {
    let onset = null_onset(trace, ladder, monoid)?;
    Ok(Decision::from_onset(onset, trace.len(), trace.budget))
}

/// Tail sums `T_n = x_n + x_{n+1} + … + x_L`, folded from the right so the summation
/// order is preserved for non-commutative monoids.
pub fn tail_sums<M: Monoid>(monoid: &M, elements: &[M::Elem]) -> Vec<M::Elem> {
    let mut out = vec![monoid.identity(); elements.len()];
    let mut acc = monoid.identity();
    for (i, x) in elements.iter().enumerate().rev() {
        acc = monoid.combine(x, &acc);
        out[i] = acc.clone();
    }
    out
}

/// 1-based onset of the Cauchy-series condition: every window sum starting at or after it
/// is strictly below the bottom rung.
///
/// In an ordered monoid every window `Σ_{k=n}^{m} x_k` with `N ≤ n ≤ m ≤ L` lies below the
/// tail sum `T_N`, and the tail sums decrease with `N`, so only tail sums need testing.
pub fn series_onset<M: Monoid>(
    trace: &MTrace<M::Elem>,
    ladder: &TestLadder<M::Elem>,
    monoid: &M,
) -> Result<Option<usize>, MonoidError> {
    check_positive(monoid, trace)?;
    let tails = tail_sums(monoid, &trace.elements);
    Ok(tail_onset(&tails, |t| ladder.below_bottom(monoid, t)))
}

pub fn cauchy_series_check<M: Monoid>(
    trace: &MTrace<M::Elem>,
    ladder: &TestLadder<M::Elem>,
    monoid: &M,
) -> Result<Decision, MonoidError> {
    let onset = series_onset(trace, ladder, monoid)?;
    Ok(Decision::from_onset(onset, trace.len(), trace.budget))
}

/// A common upper bound, when one can be constructed.
pub fn is_bounded<M: Monoid>(elements: &[M::Elem], monoid: &M) -> Option<M::Elem> {
    let (first, rest) = elements.split_first()?;
    if monoid.has_sup() {
        let mut acc = first.clone();
        for x in rest {
            acc = monoid.sup(&acc, x)?;
        }
        return Some(acc);
    }
    let mut cand = first;
    for x in rest {
        if monoid.leq(cand, x) {
            cand = x;
        }
    }
    elements.iter().all(|x| monoid.leq(x, cand)).then(|| cand.clone())
}

fn tuples(n: usize, arity: u32, trials: usize, rng: &mut DetRng) -> Vec<Vec<usize>> {
    let total = n.checked_pow(arity).unwrap_or(usize::MAX);
    if total <= trials {
        (0..total)
            .map(|mut t| {
                let mut v = Vec::with_capacity(arity as usize);
                for _ in 0..arity {
                    v.push(t % n);
                    t /= n;
                }
                v.reverse();
                v
            })
            .collect()
    } else {
        (0..trials).map(|_| (0..arity).map(|_| rng.gen_range(0..n)).collect()).collect()
    }
}

/// Checks every monoid and order axiom on tuples drawn from `samples`.
///
/// Small sample sets are enumerated exhaustively; otherwise `trials` random tuples are drawn
/// per axiom. Premise-guarded axioms (transitivity, compatibility, Riesz minimality) also run
/// on tuples built with `sup` when it exists, so the premise is actually exercised.
pub fn validate_monoid<M: Monoid>(
    monoid: &M,
    samples: &[M::Elem],
    trials: usize,
    rng: &mut DetRng,
) -> Result<ValidationReport, MonoidError> {
    if samples.is_empty() {
        return Err(MonoidError::EmptySamples);
    }
    let n = samples.len();
    let s = |i: usize| &samples[i];
    let mut report = ValidationReport::new(monoid.describe());
    let theta = monoid.identity();

    let triples = tuples(n, 3, trials, rng);
    let mut witness = None;
    for t in &triples {
        let (a, b, c) = (s(t[0]), s(t[1]), s(t[2]));
        let left = monoid.combine(&monoid.combine(a, b), c);
        let right = monoid.combine(a, &monoid.combine(b, c));
        if left != right {
            witness = Some(format!("({a:?} + {b:?}) + {c:?} = {left:?} but {a:?} + ({b:?} + {c:?}) = {right:?}"));
            break;
        }
    }
    report.record("associativity", triples.len(), witness);

    let mut witness = None;
    for x in samples {
        let l = monoid.combine(&theta, x);
        let r = monoid.combine(x, &theta);
        if &l != x || &r != x {
            witness = Some(format!("x = {x:?}: θ + x = {l:?}, x + θ = {r:?}"));
            break;
        }
    }
    report.record("identity", n, witness);

    let witness = samples.iter().find(|x| !monoid.leq(x, x)).map(|x| format!("not {x:?} ≤ {x:?}"));
    report.record("reflexivity", n, witness);

    let pairs = tuples(n, 2, trials, rng);
    let witness = pairs.iter().find_map(|p| {
        let (a, b) = (s(p[0]), s(p[1]));
        (monoid.leq(a, b) && monoid.leq(b, a) && a != b).then(|| format!("{a:?} ≤ {b:?} ≤ {a:?} but they differ"))
    });
    report.record("antisymmetry", pairs.len(), witness);

    let mut checked = 0;
    let mut witness = None;
    for t in &triples {
        let (a, b) = (s(t[0]).clone(), s(t[1]).clone());
        let mut candidates = vec![(a.clone(), b.clone(), s(t[2]).clone())];
        if let Some(ab) = monoid.sup(&a, &b) {
            if let Some(abc) = monoid.sup(&ab, s(t[2])) {
                candidates.push((a.clone(), ab, abc));
            }
        }
        for (x, y, z) in candidates {
            if monoid.leq(&x, &y) && monoid.leq(&y, &z) {
                checked += 1;
                if !monoid.leq(&x, &z) {
                    witness = Some(format!("{x:?} ≤ {y:?} ≤ {z:?} but not {x:?} ≤ {z:?}"));
                }
            }
        }
        if witness.is_some() {
            break;
        }
    }
    report.record("transitivity", checked, witness);

    let quads = tuples(n, 4, trials, rng);
    let mut checked = 0;
    let mut witness = None;
    for q in &quads {
        let (x1, y1, x2, y2) = (s(q[0]), s(q[1]), s(q[2]), s(q[3]));
        let mut candidates = vec![(x1.clone(), y1.clone(), x2.clone(), y2.clone())];
        if let (Some(u1), Some(u2)) = (monoid.sup(x1, y1), monoid.sup(x2, y2)) {
            candidates.push((x1.clone(), u1, x2.clone(), u2));
        }
        for (x1, y1, x2, y2) in candidates {
            if monoid.leq(&x1, &y1) && monoid.leq(&x2, &y2) {
                checked += 1;
                let l = monoid.combine(&x1, &x2);
                let r = monoid.combine(&y1, &y2);
                if !monoid.leq(&l, &r) {
                    witness = Some(format!("{x1:?} ≤ {y1:?}, {x2:?} ≤ {y2:?} but {l:?} ≰ {r:?}"));
                }
            }
        }
        if witness.is_some() {
            break;
        }
    }
    report.record("order compatibility", checked, witness);

    if monoid.has_sup() {
        let mut checked = 0;
        let mut witness = None;
        for t in &triples {
            let (a, b, z) = (s(t[0]), s(t[1]), s(t[2]));
            let Some(u) = monoid.sup(a, b) else {
                witness = Some(format!("sup({a:?}, {b:?}) undefined"));
                break;
            };
            checked += 1;
            if !monoid.leq(a, &u) || !monoid.leq(b, &u) {
                witness = Some(format!("sup({a:?}, {b:?}) = {u:?} is not an upper bound"));
                break;
            }
            if monoid.leq(a, z) && monoid.leq(b, z) && !monoid.leq(&u, z) {
                witness = Some(format!("sup({a:?}, {b:?}) = {u:?} exceeds the upper bound {z:?}"));
                break;
            }
        }
        report.record("riesz supremum", checked, witness);
    }

    let witness = (!samples.iter().any(|x| monoid.is_positive(x) && x != &theta))
        .then(|| "no sampled element other than θ lies in M₊".to_string());
    report.record("nontrivial positive cone", n, witness);

    Ok(report)
}

/// Checks positivity, strict descent, and halving of a ladder.
///
/// The bottom rung of a finite ladder is exempt from halving: in `ℝ₊` no finite chain can
/// supply a witness below its own minimum. Whether it has one is reported as a note.
pub fn validate_ladder<M: Monoid>(monoid: &M, ladder: &TestLadder<M::Elem>) -> ValidationReport {
    let mut report = ValidationReport::new(format!("ladder of {} rungs over {}", ladder.len(), monoid.describe()));
    let theta = monoid.identity();
    let witness = ladder
        .rungs()
        .iter()
        .enumerate()
        .find(|(_, e)| !monoid.is_positive(e) || *e == &theta)
        .map(|(i, e)| format!("rung {i} = {e:?} is not strictly positive"));
    report.record("positivity", ladder.len(), witness);

    let witness = ladder.rungs().windows(2).enumerate().find_map(|(i, w)| {
        (!monoid.lt(&w[1], &w[0])).then(|| format!("rung {} = {:?} is not strictly below rung {i} = {:?}", i + 1, w[1], w[0]))
    });
    report.record("strict descent", ladder.len().saturating_sub(1), witness);

    let bottom = ladder.bottom_index();
    let witness = (0..bottom)
        .find(|&i| ladder.halving_witness(i).is_none())
        .map(|i| format!("rung {i} = {:?} has no rung δ with δ + δ ≤ it", ladder.rung(i)));
    report.record("halving", bottom, witness);
    match ladder.halving_witness(bottom) {
        Some(j) => report.note("bottom rung halving", format!("witnessed by rung {j}")),
        None => report.note("bottom rung halving", "no witness inside the ladder (allowed for the bottom rung)"),
    }
    report
}
