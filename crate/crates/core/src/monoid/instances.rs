use std::fmt;
use std::marker::PhantomData;

use rand::Rng;

use super::{ElemSampler, Monoid, MonoidError};
use crate::rng::DetRng;
use crate::scalar::Scalar;

/// Random dyadic value `k/256` with `k ≤ 4096`; sums of these are exact in binary floating point.
pub(crate) fn sample_dyadic<S: Scalar>(rng: &mut DetRng) -> S {
    S::ratio(rng.gen_range(0..=4096), 256)
}

/// `(ℝ₊, +, 0, ≤)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RealNonneg<S>(PhantomData<S>);

impl<S> RealNonneg<S> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<S: Scalar> Monoid for RealNonneg<S> {
    type Elem = S;

    fn identity(&self) -> S {
        S::zero()
    }

    fn combine(&self, a: &S, b: &S) -> S {
        a.clone() + b.clone()
    }

    fn leq(&self, a: &S, b: &S) -> bool {
        a <= b
    }

    fn sup(&self, a: &S, b: &S) -> Option<S> {
        Some(S::max_of(a, b))
    }

    fn has_sup(&self) -> bool {
        true
    }

    fn weierstrass(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        "real_nonneg".into()
    }
}

impl<S: Scalar> ElemSampler for RealNonneg<S> {
    fn sample_elem(&self, rng: &mut DetRng) -> S {
        sample_dyadic(rng)
    }
}

/// `ℝ^d` with coordinatewise addition and order. Also used for functions on a fixed grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealVector<S> {
    dim: usize,
    grid: bool,
    _s: PhantomData<S>,
}

impl<S> RealVector<S> {
    pub fn new(dim: usize) -> Self {
        Self { dim, grid: false, _s: PhantomData }
    }

    /// Functions on an `n`-point grid, ordered pointwise.
    pub fn grid(n: usize) -> Self {
        Self { dim: n, grid: true, _s: PhantomData }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The constant vector `c`.
    pub fn constant(&self, c: S) -> Vec<S>
    where
        S: Clone,
    {
        vec![c; self.dim]
    }
}

impl<S: Scalar> Monoid for RealVector<S> {
    type Elem = Vec<S>;

    fn identity(&self) -> Vec<S> {
        vec![S::zero(); self.dim]
    }

    fn combine(&self, a: &Vec<S>, b: &Vec<S>) -> Vec<S> {
        a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
    }

    fn leq(&self, a: &Vec<S>, b: &Vec<S>) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
    }

    fn sup(&self, a: &Vec<S>, b: &Vec<S>) -> Option<Vec<S>> {
        Some(a.iter().zip(b).map(|(x, y)| S::max_of(x, y)).collect())
    }

    fn has_sup(&self) -> bool {
        true
    }

    fn weierstrass(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        if self.grid {
            format!("grid_function{{{}}}", self.dim)
        } else {
            format!("real_vector{{{}}}", self.dim)
        }
    }
}

impl<S: Scalar> ElemSampler for RealVector<S> {
    fn sample_elem(&self, rng: &mut DetRng) -> Vec<S> {
        // Mix in signed and comparable samples so both the cone and the order are exercised.
        (0..self.dim)
            .map(|_| {
                let v: S = sample_dyadic(rng);
                if rng.gen_bool(0.2) {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }
}

/// A binary relation on `{0, …, n-1}`, stored as one bit row per point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Self { n, rows: vec![0; n] }
    }

    pub fn diagonal(n: usize) -> Self {
        Self { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn full(n: usize) -> Self {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self { n, rows: vec![mask; n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i] |= 1u64 << j;
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.contains(i, j)).map(move |j| (i, j)))
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect() }
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        Relation { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect() }
    }

    pub fn inverse(&self) -> Relation {
        Relation::from_pairs(self.n, self.pairs().map(|(i, j)| (j, i)).collect::<Vec<_>>())
    }

    /// `self` followed by `other`: `(x, z)` whenever `(x, y) ∈ self` and `(y, z) ∈ other`.
    pub fn then(&self, other: &Relation) -> Relation {
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut out = 0u64;
                let mut bits = row;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    out |= other.rows[j];
                    bits &= bits - 1;
                }
                out
            })
            .collect();
        Relation { n: self.n, rows }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Relation::diagonal(self.n) {
            return write!(f, "Δ{}", self.n);
        }
        write!(f, "{{")?;
        for (k, (i, j)) in self.pairs().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({i},{j})")?;
        }
        write!(f, "}}")
    }
}

/// Relations on an `n`-point set under composition, ordered by inclusion. The positive cone
/// is the reflexive relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationMonoid {
    n: usize,
}

impl RelationMonoid {
    pub fn new(n: usize) -> Result<Self, MonoidError> {
        if n > 64 {
            return Err(MonoidError::TooManyPoints(n));
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

impl Monoid for RelationMonoid {
    type Elem = Relation;

    fn identity(&self) -> Relation {
        Relation::diagonal(self.n)
    }

    fn combine(&self, a: &Relation, b: &Relation) -> Relation {
        a.then(b)
    }

    fn leq(&self, a: &Relation, b: &Relation) -> bool {
        a.is_subset(b)
    }

    fn describe(&self) -> String {
        format!("relation{{{}}}", self.n)
    }
}

impl ElemSampler for RelationMonoid {
    fn sample_elem(&self, rng: &mut DetRng) -> Relation {
        let mut r = if rng.gen_bool(0.8) { Relation::diagonal(self.n) } else { Relation::empty(self.n) };
        let density = rng.gen_range(0.0..0.3);
        for i in 0..self.n {
            for j in 0..self.n {
                if rng.gen_bool(density) {
                    r.insert(i, j);
                }
            }
        }
        r
    }
}

/// Coordinatewise product of monoids.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMonoid<M> {
    pub factors: Vec<M>,
}

impl<M> ProductMonoid<M> {
    pub fn new(factors: Vec<M>) -> Self {
        Self { factors }
    }

    /// `k` copies of one factor.
    pub fn power(factor: M, k: usize) -> Self
    where
        M: Clone,
    {
        Self { factors: vec![factor; k] }
    }
}

impl<M: Monoid> Monoid for ProductMonoid<M> {
    type Elem = Vec<M::Elem>;

    fn identity(&self) -> Self::Elem {
        self.factors.iter().map(|m| m.identity()).collect()
    }

    fn combine(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.factors.iter().zip(a.iter().zip(b)).map(|(m, (x, y))| m.combine(x, y)).collect()
    }

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a.len() == self.factors.len()
            && b.len() == self.factors.len()
            && self.factors.iter().zip(a.iter().zip(b)).all(|(m, (x, y))| m.leq(x, y))
    }

    fn sup(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.factors.iter().zip(a.iter().zip(b)).map(|(m, (x, y))| m.sup(x, y)).collect()
    }

    fn has_sup(&self) -> bool {
        self.factors.iter().all(|m| m.has_sup())
    }

    fn weierstrass(&self) -> bool {
        self.factors.iter().all(|m| m.weierstrass())
    }

    fn describe(&self) -> String {
        let inner: Vec<String> = self.factors.iter().map(|m| m.describe()).collect();
        format!("product{{{}}}", inner.join(","))
    }
}

impl<M: ElemSampler> ElemSampler for ProductMonoid<M> {
    fn sample_elem(&self, rng: &mut DetRng) -> Self::Elem {
        self.factors.iter().map(|m| m.sample_elem(rng)).collect()
    }
}
