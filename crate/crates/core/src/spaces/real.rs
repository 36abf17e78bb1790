use rand::Rng;

use super::{DistanceSpace, PointSampler, SpaceKind};
use crate::monoid::{MonoidError, RealNonneg, RealVector, TestLadder};
use crate::rng::DetRng;
use crate::scalar::Scalar;

/// Distances on the real line with values in `ℝ₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealDistance {
    /// `|x - y|`.
    Abs,
    /// `|x - y|` up to 1, `(x - y)²` beyond.
    Snowflake,
    /// `(x - y)²`.
    Squared,
    /// `max(x, y)` on `ℝ₊`; positive on the diagonal.
    DislocatedMax,
}

impl RealDistance {
    pub fn name(self) -> &'static str {
        match self {
            RealDistance::Abs => "real_abs",
            RealDistance::Snowflake => "snowflake",
            RealDistance::Squared => "squared",
            RealDistance::DislocatedMax => "dislocated_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealLine<S> {
    variant: RealDistance,
    monoid: RealNonneg<S>,
    ladder: TestLadder<S>,
}

/// `{1, 1/2, …, 2^-(k-1)}`.
pub fn dyadic_rungs<S: Scalar>(k: u32) -> Vec<S> {
    (0..k).map(S::dyadic).collect()
}

impl<S: Scalar> RealLine<S> {
    /// Uses the ladder `{1, 1/2, 1/4, 1/8, 1/16}`.
    pub fn new(variant: RealDistance) -> Self {
        let monoid = RealNonneg::new();
        let ladder = TestLadder::new(&monoid, dyadic_rungs(5)).expect("non-empty");
        Self { variant, monoid, ladder }
    }

    pub fn with_ladder(mut self, rungs: Vec<S>) -> Result<Self, crate::monoid::MonoidError> {
        self.ladder = TestLadder::new(&self.monoid, rungs)?;
        Ok(self)
    }

    pub fn variant(&self) -> RealDistance {
        self.variant
    }
}

impl<S: Scalar> DistanceSpace for RealLine<S> {
    type Point = S;
    type M = RealNonneg<S>;

    fn monoid(&self) -> &RealNonneg<S> {
        &self.monoid
    }

    fn ladder(&self) -> &TestLadder<S> {
        &self.ladder
    }

    fn kind(&self) -> SpaceKind {
        match self.variant {
            RealDistance::DislocatedMax => SpaceKind::Dislocated,
            _ => SpaceKind::Distance,
        }
    }

    fn distance(&self, x: &S, y: &S) -> S {
        let diff = (x.clone() - y.clone()).abs();
        match self.variant {
            RealDistance::Abs => diff,
            RealDistance::Snowflake if diff <= S::one() => diff,
            RealDistance::Snowflake | RealDistance::Squared => diff.clone() * diff,
            RealDistance::DislocatedMax => S::max_of(x, y),
        }
    }

    fn describe(&self) -> String {
        self.variant.name().into()
    }

    fn order_regular(&self) -> bool {
        true
    }

    fn order_coregular(&self) -> bool {
        true
    }
}

impl<S: Scalar> PointSampler for RealLine<S> {
    /// Dyadic points `k/256` in `[-8, 8]` (`[0, 8]` for the max distance), so distances are exact.
    fn sample_point(&self, rng: &mut DetRng) -> S {
        let lo = if self.variant == RealDistance::DislocatedMax { 0 } else { -2048 };
        S::ratio(rng.gen_range(lo..=2048), 256)
    }
}

/// Functions on an `n`-point grid with the pointwise distance `|x(t) - y(t)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpace<S> {
    monoid: RealVector<S>,
    ladder: TestLadder<Vec<S>>,
}

impl<S: Scalar> GridSpace<S> {
    /// Ladder of constant functions at heights `2^-1, …, 2^-20`.
    pub fn new(n: usize) -> Self {
        Self::with_heights(n, (1..=20).map(S::dyadic).collect()).expect("non-empty ladder")
    }

    /// Ladder of constant functions at the given heights.
    pub fn with_heights(n: usize, heights: Vec<S>) -> Result<Self, MonoidError> {
        let monoid = RealVector::grid(n);
        let rungs = heights.into_iter().map(|h| monoid.constant(h)).collect();
        let ladder = TestLadder::new(&monoid, rungs)?;
        Ok(Self { monoid, ladder })
    }

    pub fn nodes(&self) -> usize {
        self.monoid.dim()
    }
}

impl<S: Scalar> DistanceSpace for GridSpace<S> {
    type Point = Vec<S>;
    type M = RealVector<S>;

    fn monoid(&self) -> &RealVector<S> {
        &self.monoid
    }

    fn ladder(&self) -> &TestLadder<Vec<S>> {
        &self.ladder
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Distance
    }

    fn distance(&self, x: &Vec<S>, y: &Vec<S>) -> Vec<S> {
        x.iter().zip(y).map(|(a, b)| (a.clone() - b.clone()).abs()).collect()
    }

    fn describe(&self) -> String {
        format!("grid{{{}}}", self.monoid.dim())
    }

    fn order_regular(&self) -> bool {
        true
    }

    fn order_coregular(&self) -> bool {
        true
    }
}

impl<S: Scalar> PointSampler for GridSpace<S> {
    fn sample_point(&self, rng: &mut DetRng) -> Vec<S> {
        (0..self.monoid.dim()).map(|_| S::ratio(rng.gen_range(-2048..=2048), 256)).collect()
    }
}

