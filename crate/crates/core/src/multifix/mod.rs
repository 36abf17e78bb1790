//! σ-multiple fixed points of maps `Y^A → Y` under the mixed order `≼_P`, with coupled
//! fixed points as the two-index swap case.

use std::fmt::Debug;
use std::sync::Arc;

use thiserror::Error;

use crate::engine::{solve_monotone, EngineError, IterateOptions, LambdaSequence, MapSpec, SequentialMode, SolveReport};
use crate::monoid::Elem;
use crate::spaces::{CoordinateProduct, DistanceSpace, SpaceError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultifixError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("σ({alpha}, {beta}) = {value} lies outside the index set of size {size}")]
    SigmaOutOfRange { alpha: usize, beta: usize, value: usize, size: usize },
    #[error("P has {got} entries for {size} indices")]
    PLength { got: usize, size: usize },
    #[error("profile has {got} coordinates for {size} indices")]
    ProfileLength { got: usize, size: usize },
    #[error("convergence in `{0}` must be declared order-regular and co-regular")]
    NotRegular(String),
}

/// Finite index set `A = {0, …, n-1}`, reindexing `σ: A × A → A`, and sign pattern `P: A → {0,1}`.
#[derive(Clone)]
pub struct SigmaSpec {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    p: Vec<bool>,
}

impl Debug for SigmaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SigmaSpec").field("labels", &self.labels).field("sigma", &self.table).field("p", &self.p).finish()
    }
}

impl SigmaSpec {
    /// Tabulates `sigma` on `A × A`; `p[α] = true` reverses the order in coordinate `α`.
    pub fn new(labels: Vec<String>, sigma: impl Fn(usize, usize) -> usize, p: Vec<bool>) -> Result<Self, MultifixError> {
        let size = labels.len();
        if size == 0 {
            return Err(MultifixError::EmptyIndexSet);
        }
        if p.len() != size {
            return Err(MultifixError::PLength { got: p.len(), size });
        }
        let mut table = vec![vec![0; size]; size];
        for (alpha, row) in table.iter_mut().enumerate() {
            for (beta, cell) in row.iter_mut().enumerate() {
                let value = sigma(alpha, beta);
                if value >= size {
                    return Err(MultifixError::SigmaOutOfRange { alpha, beta, value, size });
                }
                *cell = value;
            }
        }
        Ok(Self { labels, table, p })
    }

    /// `A = {1, 2}`, `σ(1, ·) = id`, `σ(2, ·) = swap`, `P = (0, 1)`: the coupled case.
    pub fn swap() -> Self {
        Self::new(vec!["1".into(), "2".into()], |a, b| if a == 0 { b } else { 1 - b }, vec![false, true]).expect("valid")
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn sigma(&self, alpha: usize, beta: usize) -> usize {
        self.table[alpha][beta]
    }

    pub fn p(&self, alpha: usize) -> bool {
        self.p[alpha]
    }

    fn check_profile<Y>(&self, x: &[Y]) -> Result<(), MultifixError> {
        if x.len() != self.size() {
            return Err(MultifixError::ProfileLength { got: x.len(), size: self.size() });
        }
        Ok(())
    }

    /// `x ∘ σ(α, ·)`.
    pub fn reindex<Y: Clone>(&self, x: &[Y], alpha: usize) -> Vec<Y> {
        self.table[alpha].iter().map(|&b| x[b].clone()).collect()
    }
}

/// `(σf)(x)(α) = f(β ↦ x(σ(α, β)))`.
pub fn sigma_lift<Y, F>(s: &SigmaSpec, f: F) -> impl Fn(&Vec<Y>) -> Vec<Y> + Send + Sync + Clone
where
    Y: Clone,
    F: Fn(&[Y]) -> Y + Send + Sync,
{
    let s = s.clone();
    let f = Arc::new(f);
    move |x: &Vec<Y>| (0..s.size()).map(|alpha| f(&s.reindex(x, alpha))).collect()
}

/// `x ≼_P y`: `x(α) ≤ y(α)` where `P(α) = 0` and `y(α) ≤ x(α)` where `P(α) = 1`.
pub fn p_order_leq<Y>(s: &SigmaSpec, x: &[Y], y: &[Y], base_leq: impl Fn(&Y, &Y) -> bool) -> bool {
    x.len() == s.size()
        && y.len() == s.size()
        && (0..s.size()).all(|a| if s.p(a) { base_leq(&y[a], &x[a]) } else { base_leq(&x[a], &y[a]) })
}

type Profile<D> = Vec<<D as DistanceSpace>::Point>;
type ProfileReport<D> = SolveReport<Profile<D>, Vec<Elem<<D as DistanceSpace>::M>>>;

/// Iterates `σf` on `Y^A` with the coordinatewise product distance, ordered by `≼_P`,
/// through the monotone driver.
#[allow(clippy::too_many_arguments)]
pub fn solve_multiple_fixed_point<D, F, L>(
    space_y: &D,
    s: &SigmaSpec,
    f: F,
    base_leq: L,
    x0: Profile<D>,
    lam: &LambdaSequence<Vec<Elem<D::M>>>,
    opts: &IterateOptions,
) -> Result<ProfileReport<D>, MultifixError>
where
    D: DistanceSpace + Clone,
    D::Point: 'static,
    F: Fn(&[D::Point]) -> D::Point + Send + Sync + 'static,
    L: Fn(&D::Point, &D::Point) -> bool + Send + Sync + 'static,
{
    s.check_profile(&x0)?;
    if !(space_y.order_regular() && space_y.order_coregular()) {
        return Err(MultifixError::NotRegular(space_y.describe()));
    }
    let product = CoordinateProduct::power(space_y.clone(), s.size())?;
    let order = s.clone();
    let map = MapSpec::new(format!("σ-lift over {} indices", s.size()), sigma_lift(s, f))
        .with_order(move |x: &Profile<D>, y: &Profile<D>| p_order_leq(&order, x, y, &base_leq));
    Ok(solve_monotone(&product, &map, lam, x0, SequentialMode::Series, opts)?)
}

/// Coupled fixed point `(x, y) = (f(x, y), f(y, x))` from the seed `(x0, y0)`.
pub fn coupled_fixed_point<D, F, L>(
    space_y: &D,
    f: F,
    base_leq: L,
    x0: D::Point,
    y0: D::Point,
    lam: &LambdaSequence<Vec<Elem<D::M>>>,
    opts: &IterateOptions,
) -> Result<ProfileReport<D>, MultifixError>
where
    D: DistanceSpace + Clone,
    D::Point: 'static,
    F: Fn(&D::Point, &D::Point) -> D::Point + Send + Sync + 'static,
    L: Fn(&D::Point, &D::Point) -> bool + Send + Sync + 'static,
{
    solve_multiple_fixed_point(space_y, &SigmaSpec::swap(), move |v: &[D::Point]| f(&v[0], &v[1]), base_leq, vec![x0, y0], lam, opts)
}
