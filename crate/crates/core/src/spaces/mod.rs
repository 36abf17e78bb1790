//! Monoid-valued distance spaces, sequence detectors, and triangle-type checks.

mod fw;
mod omega;
mod product;
mod real;
mod uniform;

pub mod catalog;

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::monoid::{cauchy_series_check, is_null_trace, tail_onset, Decision, Elem, MTrace, Monoid, MonoidError, TestLadder};
use crate::report::ValidationReport;
use crate::rng::DetRng;

pub use fw::{
    falsify_frechet_wilson, ChainSampler, Counterexample, FwLevel, IndexChains, OmegaChains, RealChains, SequencePattern, VecChains,
};
pub use omega::{interleaved_sequence, OmegaPoint, OmegaSpace};
pub use product::{CoordinateProduct, GaugeSpace, SumMode, SumProduct};
pub use real::{dyadic_rungs, GridSpace, RealDistance, RealLine};
pub use uniform::{entourage_distance, make_uniform_from_pseudometric, UniformSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("no samples supplied")]
    EmptySamples,
    #[error("trace needs at least {need} points, got {got}")]
    TraceTooShort { need: usize, got: usize },
    #[error("factor {index} uses monoid {found}, expected {expected}")]
    MixedMonoids { index: usize, expected: String, found: String },
    #[error("cannot combine a dislocated factor with a pseudo factor")]
    MixedKinds,
    #[error("factor ladders differ in length ({0} vs {1})")]
    LadderMismatch(usize, usize),
    #[error("the ∨ product needs a monoid with suprema")]
    NoSupremum,
    #[error("product of zero spaces")]
    NoFactors,
    #[error("entourage base is empty")]
    EmptyBase,
    #[error("threshold {index} ({value}) exceeds half of its predecessor")]
    ThresholdsNotHalving { index: usize, value: f64 },
    #[error("invalid pseudometric: {0}")]
    InvalidPseudometric(String),
    #[error("no ladder rung dominates twice the bottom rung; sequence-level falsification needs one")]
    NoCoarseRung,
    #[error("unknown space `{0}`")]
    UnknownName(String),
}

/// Which identity axioms a distance satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// `d(x,y) = θ ⇒ x = y`; self-distance may be positive.
    Dislocated,
    /// `d(x,y) = θ ⇔ x = y`.
    Distance,
    /// `x = y ⇒ d(x,y) = θ`; distinct points may be at distance θ.
    Pseudo,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Dislocated => "dislocated",
            SpaceKind::Distance => "distance",
            SpaceKind::Pseudo => "pseudo",
        }
    }

    /// Weakest kind satisfied by all of `kinds`.
    pub fn weakest(kinds: impl IntoIterator<Item = SpaceKind>) -> Result<SpaceKind, SpaceError> {
        let (mut disl, mut pseudo) = (false, false);
        for k in kinds {
            disl |= k == SpaceKind::Dislocated;
            pseudo |= k == SpaceKind::Pseudo;
        }
        match (disl, pseudo) {
            (true, true) => Err(SpaceError::MixedKinds),
            (true, false) => Ok(SpaceKind::Dislocated),
            (false, true) => Ok(SpaceKind::Pseudo),
            (false, false) => Ok(SpaceKind::Distance),
        }
    }
}

/// A set with a symmetric `M₊`-valued distance.
pub trait DistanceSpace: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;
    type M: Monoid;

    fn monoid(&self) -> &Self::M;
    fn ladder(&self) -> &TestLadder<Elem<Self::M>>;
    fn kind(&self) -> SpaceKind;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Elem<Self::M>;
    fn describe(&self) -> String;

    /// Whether limits of non-decreasing sequences stay below their upper bounds (declared).
    fn order_regular(&self) -> bool {
        false
    }

    /// The dual statement for non-increasing sequences (declared).
    fn order_coregular(&self) -> bool {
        false
    }

    fn below_bottom(&self, e: &Elem<Self::M>) -> bool {
        self.ladder().below_bottom(self.monoid(), e)
    }
}

/// Random points for axiom sampling.
pub trait PointSampler: DistanceSpace {
    fn sample_point(&self, rng: &mut DetRng) -> Self::Point;

    fn sample_points(&self, rng: &mut DetRng, n: usize) -> Vec<Self::Point> {
        (0..n).map(|_| self.sample_point(rng)).collect()
    }
}

type DistFn<P, E> = Arc<dyn Fn(&P, &P) -> E + Send + Sync>;

/// A space defined by a closure.
#[derive(Clone)]
pub struct FnSpace<P, M: Monoid> {
    name: String,
    monoid: M,
    ladder: TestLadder<M::Elem>,
    kind: SpaceKind,
    dist: DistFn<P, M::Elem>,
    regular: (bool, bool),
}

impl<P, M: Monoid> FnSpace<P, M> {
    pub fn new(
        name: impl Into<String>,
        monoid: M,
        ladder: TestLadder<M::Elem>,
        kind: SpaceKind,
        dist: impl Fn(&P, &P) -> M::Elem + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), monoid, ladder, kind, dist: Arc::new(dist), regular: (false, false) }
    }

    /// Declares order regularity and co-regularity of convergence.
    pub fn with_order_regularity(mut self, regular: bool, coregular: bool) -> Self {
        self.regular = (regular, coregular);
        self
    }
}

impl<P, M: Monoid> Debug for FnSpace<P, M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnSpace").field("name", &self.name).field("kind", &self.kind).finish()
    }
}

impl<P, M> DistanceSpace for FnSpace<P, M>
where
    P: Clone + Debug + PartialEq + Send + Sync,
    M: Monoid,
{
    type Point = P;
    type M = M;

    fn monoid(&self) -> &M {
        &self.monoid
    }

    fn ladder(&self) -> &TestLadder<M::Elem> {
        &self.ladder
    }

    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn distance(&self, x: &P, y: &P) -> M::Elem {
        (self.dist)(x, y)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }

    fn order_regular(&self) -> bool {
        self.regular.0
    }

    fn order_coregular(&self) -> bool {
        self.regular.1
    }
}

/// Checks symmetry, range, and the identity axioms of the declared kind.
///
/// Pairs come from all diagonal pairs of `samples` plus `trials` random pairs (or every pair
/// when that is fewer).
pub fn validate_space<D: DistanceSpace>(
    space: &D,
    samples: &[D::Point],
    trials: usize,
    rng: &mut DetRng,
) -> Result<ValidationReport, SpaceError> {
    if samples.is_empty() {
        return Err(SpaceError::EmptySamples);
    }
    let m = space.monoid();
    let theta = m.identity();
    let n = samples.len();
    let pairs: Vec<(usize, usize)> = if n * n <= trials {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    } else {
        (0..n).map(|i| (i, i)).chain((0..trials).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))).collect()
    };
    let mut report = ValidationReport::new(format!("{} (declared {})", space.describe(), space.kind().name()));

    let mut sym = None;
    let mut range = None;
    let mut sep = None;
    let mut refl = None;
    let mut dislocated_at = None;
    for &(i, j) in &pairs {
        let (x, y) = (&samples[i], &samples[j]);
        let dxy = space.distance(x, y);
        if sym.is_none() {
            let dyx = space.distance(y, x);
            if dxy != dyx {
                sym = Some(format!("d({x:?}, {y:?}) = {dxy:?} but d({y:?}, {x:?}) = {dyx:?}"));
            }
        }
        if range.is_none() && !m.is_positive(&dxy) {
            range = Some(format!("d({x:?}, {y:?}) = {dxy:?} is outside M₊"));
        }
        if x != y && dxy == theta && sep.is_none() {
            sep = Some(format!("d({x:?}, {y:?}) = θ for distinct points"));
        }
        if x == y && dxy != theta {
            if refl.is_none() {
                refl = Some(format!("d({x:?}, {x:?}) = {dxy:?} ≠ θ"));
            }
            if dislocated_at.is_none() {
                dislocated_at = Some(format!("d({x:?}, {x:?}) = {dxy:?}"));
            }
        }
    }
    report.record("symmetry", pairs.len(), sym);
    report.record("range in M₊", pairs.len(), range);
    match space.kind() {
        SpaceKind::Dislocated => {
            report.record("θ only on the diagonal", pairs.len(), sep);
            if let Some(d) = dislocated_at {
                report.note("self-distance", format!("expected dislocation: {d}"));
            }
        }
        SpaceKind::Distance => {
            report.record("θ only on the diagonal", pairs.len(), sep);
            report.record("θ on the diagonal", pairs.len(), refl);
        }
        SpaceKind::Pseudo => {
            report.record("θ on the diagonal", pairs.len(), refl);
            if let Some(s) = sep {
                report.note("separation", format!("not separated (allowed): {s}"));
            }
        }
    }
    Ok(report)
}

/// `d(a,c) ≤ d(a,b) + d(b,c)` for each triple `(a, b, c)`.
pub fn check_triangle<D: DistanceSpace>(space: &D, triples: &[(D::Point, D::Point, D::Point)]) -> ValidationReport {
    let m = space.monoid();
    let mut report = ValidationReport::new(space.describe());
    let witness = triples.iter().find_map(|(a, b, c)| {
        let lhs = space.distance(a, c);
        let rhs = m.combine(&space.distance(a, b), &space.distance(b, c));
        (!m.leq(&lhs, &rhs)).then(|| format!("({a:?}, {b:?}, {c:?}): d(a,c) = {lhs:?} ≰ d(a,b) + d(b,c) = {rhs:?}"))
    });
    report.record("triangle inequality", triples.len(), witness);
    report
}

type Unary<E> = Arc<dyn Fn(&E) -> E + Send + Sync>;
type Binary<E> = Arc<dyn Fn(&E, &E) -> E + Send + Sync>;

/// The pair `(φ, ζ)` of a generalized triangle inequality `φ(d(x,y)) ≤ ζ(d(x,z), d(z,y))`.
#[derive(Clone)]
pub struct ZetaSpec<E> {
    pub phi: Unary<E>,
    pub zeta: Binary<E>,
    /// `φ` and `ζ` are only defined away from θ.
    pub domain_excludes_zero: bool,
}

impl<E> Debug for ZetaSpec<E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZetaSpec").field("domain_excludes_zero", &self.domain_excludes_zero).finish()
    }
}

impl<E: Clone + 'static> ZetaSpec<E> {
    pub fn new(
        phi: impl Fn(&E) -> E + Send + Sync + 'static,
        zeta: impl Fn(&E, &E) -> E + Send + Sync + 'static,
        domain_excludes_zero: bool,
    ) -> Self {
        Self { phi: Arc::new(phi), zeta: Arc::new(zeta), domain_excludes_zero }
    }

    /// `φ = id`, `ζ = ⊕`: the ordinary triangle inequality.
    pub fn triangle<M: Monoid<Elem = E> + 'static>(m: M) -> Self {
        Self::new(|a: &E| a.clone(), move |a: &E, b: &E| m.combine(a, b), false)
    }

    /// `φ = id` with the given `ζ`.
    pub fn identity_phi(zeta: impl Fn(&E, &E) -> E + Send + Sync + 'static) -> Self {
        Self::new(|a: &E| a.clone(), zeta, false)
    }

    /// Checks `ζ` maps null pairs to null traces and `φ` reflects nullity, on a battery of
    /// traces. Pairs are formed from every two traces of the battery.
    pub fn audit<M: Monoid<Elem = E>>(
        &self,
        monoid: &M,
        ladder: &TestLadder<E>,
        battery: &[MTrace<E>],
    ) -> Result<ValidationReport, MonoidError> {
        let mut report = ValidationReport::new("ζ/φ null-sequence conditions");
        let mut null = Vec::with_capacity(battery.len());
        for t in battery {
            null.push(is_null_trace(t, ladder, monoid)?.is_null());
        }
        let mut checked = 0;
        let mut witness = None;
        'outer: for (i, a) in battery.iter().enumerate() {
            for (j, b) in battery.iter().enumerate() {
                if !(null[i] && null[j]) {
                    continue;
                }
                let n = a.len().min(b.len());
                let z = MTrace {
                    elements: (0..n).map(|k| (self.zeta)(&a.elements[k], &b.elements[k])).collect(),
                    budget: a.budget.max(b.budget),
                };
                checked += 1;
                if !is_null_trace(&z, ladder, monoid)?.is_null() {
                    witness = Some(format!("ζ of battery traces {i} and {j} is not null"));
                    break 'outer;
                }
            }
        }
        report.record("ζ preserves null pairs", checked, witness);
        let mut witness = None;
        for (i, t) in battery.iter().enumerate() {
            let p = MTrace { elements: t.elements.iter().map(|e| (self.phi)(e)).collect(), budget: t.budget };
            if is_null_trace(&p, ladder, monoid)?.is_null() && !null[i] {
                witness = Some(format!("φ of battery trace {i} is null but the trace is not"));
                break;
            }
        }
        report.record("φ reflects null traces", battery.len(), witness);
        Ok(report)
    }
}

/// `φ(d(a,c)) ≤ ζ(d(a,b), d(b,c))` for each triple.
pub fn check_zeta_triangle<D: DistanceSpace>(
    space: &D,
    zspec: &ZetaSpec<Elem<D::M>>,
    triples: &[(D::Point, D::Point, D::Point)],
) -> ValidationReport {
    let m = space.monoid();
    let theta = m.identity();
    let mut report = ValidationReport::new(space.describe());
    let mut skipped = 0;
    let mut checked = 0;
    let mut witness = None;
    for (a, b, c) in triples {
        let (dac, dab, dbc) = (space.distance(a, c), space.distance(a, b), space.distance(b, c));
        if zspec.domain_excludes_zero && (dac == theta || dab == theta || dbc == theta) {
            skipped += 1;
            continue;
        }
        checked += 1;
        let lhs = (zspec.phi)(&dac);
        let rhs = (zspec.zeta)(&dab, &dbc);
        if !m.leq(&lhs, &rhs) {
            witness = Some(format!("({a:?}, {b:?}, {c:?}): φ(d(a,c)) = {lhs:?} ≰ ζ(d(a,b), d(b,c)) = {rhs:?}"));
            break;
        }
    }
    report.record("ζ-triangle inequality", checked, witness);
    if zspec.domain_excludes_zero {
        report.note("skipped", format!("{skipped} triples with a θ distance"));
    }
    report
}

/// A finite prefix of a point sequence with the index budget for settling.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTrace<P> {
    pub points: Vec<P>,
    pub budget: usize,
}

impl<P> PointTrace<P> {
    /// Budget defaults to half the length, as for [`MTrace::new`].
    pub fn new(points: Vec<P>) -> Self {
        let budget = (points.len() / 2).max(1);
        Self { points, budget }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `d(x_k, x_{k+1})` for consecutive points, with the same budget.
    pub fn consecutive<D: DistanceSpace<Point = P>>(&self, space: &D) -> MTrace<Elem<D::M>> {
        MTrace {
            elements: self.points.windows(2).map(|w| space.distance(&w[0], &w[1])).collect(),
            budget: self.budget,
        }
    }
}

fn need_two<P>(trace: &PointTrace<P>) -> Result<(), SpaceError> {
    if trace.len() < 2 {
        return Err(SpaceError::TraceTooShort { need: 2, got: trace.len() });
    }
    Ok(())
}

/// 1-based index from which every pair `d(x_n, x_m)`, `m ≥ n`, is below the bottom rung.
pub fn cauchy_onset<D: DistanceSpace>(space: &D, trace: &PointTrace<D::Point>) -> Option<usize> {
    let pts = &trace.points;
    let mut onset = None;
    for n in (0..pts.len()).rev() {
        if (n..pts.len()).all(|m| space.below_bottom(&space.distance(&pts[n], &pts[m]))) {
            onset = Some(n + 1);
        } else {
            break;
        }
    }
    onset
}

pub fn is_cauchy_sequence<D: DistanceSpace>(space: &D, trace: &PointTrace<D::Point>) -> Result<Decision, SpaceError> {
    need_two(trace)?;
    Ok(Decision::from_onset(cauchy_onset(space, trace), trace.len(), trace.budget))
}

/// Cauchy-series test on the consecutive distances.
pub fn is_cw_sequence<D: DistanceSpace>(space: &D, trace: &PointTrace<D::Point>) -> Result<Decision, SpaceError> {
    need_two(trace)?;
    Ok(cauchy_series_check(&trace.consecutive(space), space.ladder(), space.monoid())?)
}

/// Null test on `d(x_n, limit)`.
pub fn converges_to<D: DistanceSpace>(
    space: &D,
    trace: &PointTrace<D::Point>,
    limit: &D::Point,
) -> Result<Decision, SpaceError> {
    if trace.is_empty() {
        return Err(SpaceError::TraceTooShort { need: 1, got: 0 });
    }
    let t = MTrace { elements: trace.points.iter().map(|x| space.distance(x, limit)).collect(), budget: trace.budget };
    Ok(is_null_trace(&t, space.ladder(), space.monoid())?)
}

/// 1-based index from which `d(x_n, limit)` stays below the bottom rung.
pub fn convergence_onset<D: DistanceSpace>(space: &D, trace: &PointTrace<D::Point>, limit: &D::Point) -> Option<usize> {
    let d: Vec<_> = trace.points.iter().map(|x| space.distance(x, limit)).collect();
    tail_onset(&d, |e| space.below_bottom(e))
}

/// Every ordered triple of `points` (for exhaustive checks on finite carriers).
pub fn all_triples<P: Clone>(points: &[P]) -> Vec<(P, P, P)> {
    let mut out = Vec::with_capacity(points.len().pow(3));
    for a in points {
        for b in points {
            for c in points {
                out.push((a.clone(), b.clone(), c.clone()));
            }
        }
    }
    out
}

/// `count` random triples from `points`.
pub fn random_triples<P: Clone>(points: &[P], count: usize, rng: &mut DetRng) -> Vec<(P, P, P)> {
    let n = points.len();
    (0..count)
        .map(|_| {
            (
                points[rng.gen_range(0..n)].clone(),
                points[rng.gen_range(0..n)].clone(),
                points[rng.gen_range(0..n)].clone(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests;
