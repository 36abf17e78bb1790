use std::fmt;

use rand::Rng;

use super::{DistanceSpace, PointSampler, SpaceKind};
use crate::monoid::{RealNonneg, TestLadder};
use crate::rng::DetRng;
use crate::spaces::real::dyadic_rungs;

/// A point of `ℕ ∪ Ω ∪ {∞}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OmegaPoint {
    Nat(u32),
    Omega(u32),
    Infinity,
}

impl fmt::Debug for OmegaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaPoint::Nat(n) => write!(f, "{n}"),
            OmegaPoint::Omega(j) => write!(f, "ω{j}"),
            OmegaPoint::Infinity => write!(f, "∞"),
        }
    }
}

impl fmt::Display for OmegaPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A real-valued distance space with convergent sequences that are not Cauchy, truncated to
/// indices `1..=N`.
///
/// `d(x, y)` is 0 on the diagonal, 1 between distinct naturals or distinct omegas, `1/n²`
/// between `n` and any omega or `∞`, and `1/j²` between `ω_j` and `∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSpace {
    n_max: u32,
    monoid: RealNonneg<f64>,
    ladder: TestLadder<f64>,
}

impl OmegaSpace {
    pub fn new(n_max: u32) -> Self {
        let monoid = RealNonneg::new();
        let ladder = TestLadder::new(&monoid, dyadic_rungs(5)).expect("non-empty");
        Self { n_max, monoid, ladder }
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }
}

fn inv_sq(n: u32) -> f64 {
    let n = n as f64;
    1.0 / (n * n)
}

impl DistanceSpace for OmegaSpace {
    type Point = OmegaPoint;
    type M = RealNonneg<f64>;

    fn monoid(&self) -> &RealNonneg<f64> {
        &self.monoid
    }

    fn ladder(&self) -> &TestLadder<f64> {
        &self.ladder
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Distance
    }

    fn distance(&self, x: &OmegaPoint, y: &OmegaPoint) -> f64 {
        use OmegaPoint::*;
        if x == y {
            return 0.0;
        }
        match (*x, *y) {
            (Nat(_), Nat(_)) | (Omega(_), Omega(_)) => 1.0,
            (Nat(n), _) | (_, Nat(n)) => inv_sq(n),
            (Omega(j), Infinity) | (Infinity, Omega(j)) => inv_sq(j),
            (Infinity, Infinity) => 0.0,
        }
    }

    fn describe(&self) -> String {
        format!("omega_counterexample{{{}}}", self.n_max)
    }
}

impl PointSampler for OmegaSpace {
    fn sample_point(&self, rng: &mut DetRng) -> OmegaPoint {
        let k = rng.gen_range(1..=self.n_max.max(1));
        match rng.gen_range(0..5) {
            0 | 1 => OmegaPoint::Nat(k),
            2 | 3 => OmegaPoint::Omega(k),
            _ => OmegaPoint::Infinity,
        }
    }
}

/// `1, ω_1, 2, ω_2, …` truncated to `len` points.
pub fn interleaved_sequence(len: usize) -> Vec<OmegaPoint> {
    (0..len)
        .map(|k| {
            let i = (k / 2 + 1) as u32;
            if k % 2 == 0 {
                OmegaPoint::Nat(i)
            } else {
                OmegaPoint::Omega(i)
            }
        })
        .collect()
}
