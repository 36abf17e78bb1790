use rand::Rng;

use super::{DistanceSpace, PointSampler, SpaceError, SpaceKind};
use crate::monoid::{Relation, RelationMonoid, TestLadder};
use crate::rng::DetRng;

/// Intersection of the base relations that contain `(x, y)`; the full relation when none does.
pub fn entourage_distance(base: &[Relation], x: usize, y: usize) -> Result<Relation, SpaceError> {
    let first = base.first().ok_or(SpaceError::EmptyBase)?;
    let n = first.size();
    Ok(base
        .iter()
        .filter(|e| e.contains(x, y))
        .fold(Relation::full(n), |acc, e| acc.intersection(e)))
}

/// A finite set with the relation-valued distance induced by an entourage base.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSpace {
    n: usize,
    monoid: RelationMonoid,
    ladder: TestLadder<Relation>,
    kind: SpaceKind,
    thresholds: Vec<f64>,
    table: Vec<Relation>,
}

impl UniformSpace {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// The base relations, coarsest first.
    pub fn base(&self) -> &[Relation] {
        self.ladder.rungs()
    }
}

/// Builds the base `ε_r = {(x, y) : ρ(x, y) ≤ r}` for each threshold and the induced
/// relation-valued distance. Points at ρ-distance 0 get distance `Δ`, so a non-separating ρ
/// yields a pseudo space.
pub fn make_uniform_from_pseudometric<P>(
    points: &[P],
    rho: impl Fn(&P, &P) -> f64,
    thresholds: &[f64],
) -> Result<UniformSpace, SpaceError> {
    let n = points.len();
    let monoid = RelationMonoid::new(n)?;
    if thresholds.is_empty() {
        return Err(SpaceError::EmptyBase);
    }
    if n == 0 {
        return Err(SpaceError::InvalidPseudometric("no points".into()));
    }
    for (index, w) in thresholds.windows(2).enumerate() {
        if !(w[1] > 0.0 && w[1] < w[0] && w[1] <= w[0] / 2.0) {
            return Err(SpaceError::ThresholdsNotHalving { index: index + 1, value: w[1] });
        }
    }
    if !(thresholds[0] > 0.0) {
        return Err(SpaceError::ThresholdsNotHalving { index: 0, value: thresholds[0] });
    }
    let mut r = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = rho(&points[i], &points[j]);
            if !v.is_finite() || v < 0.0 {
                return Err(SpaceError::InvalidPseudometric(format!("ρ({i},{j}) = {v}")));
            }
            r[i * n + j] = v;
        }
    }
    for i in 0..n {
        if r[i * n + i] != 0.0 {
            return Err(SpaceError::InvalidPseudometric(format!("ρ({i},{i}) = {} ≠ 0", r[i * n + i])));
        }
        for j in 0..i {
            if r[i * n + j] != r[j * n + i] {
                return Err(SpaceError::InvalidPseudometric(format!("ρ({i},{j}) ≠ ρ({j},{i})")));
            }
        }
    }
    let base: Vec<Relation> = thresholds
        .iter()
        .map(|&t| {
            Relation::from_pairs(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| r[i * n + j] <= t).collect::<Vec<_>>())
        })
        .collect();
    let mut table = Vec::with_capacity(n * n);
    let mut separated = true;
    for i in 0..n {
        for j in 0..n {
            if r[i * n + j] == 0.0 {
                separated &= i == j;
                table.push(Relation::diagonal(n));
            } else {
                table.push(entourage_distance(&base, i, j)?);
            }
        }
    }
    let ladder = TestLadder::new(&monoid, base)?;
    Ok(UniformSpace {
        n,
        monoid,
        ladder,
        kind: if separated { SpaceKind::Distance } else { SpaceKind::Pseudo },
        thresholds: thresholds.to_vec(),
        table,
    })
}

impl DistanceSpace for UniformSpace {
    type Point = usize;
    type M = RelationMonoid;

    fn monoid(&self) -> &RelationMonoid {
        &self.monoid
    }

    fn ladder(&self) -> &TestLadder<Relation> {
        &self.ladder
    }

    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn distance(&self, x: &usize, y: &usize) -> Relation {
        self.table[x * self.n + y].clone()
    }

    fn describe(&self) -> String {
        format!("uniform_pseudometric{{{}}}", self.n)
    }
}

impl PointSampler for UniformSpace {
    fn sample_point(&self, rng: &mut DetRng) -> usize {
        rng.gen_range(0..self.n)
    }
}
