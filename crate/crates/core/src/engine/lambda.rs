use std::fmt::Debug;
use std::sync::Arc;

use rayon::prelude::*;

use crate::monoid::{MTrace, Monoid};
use crate::report::ValidationReport;

type OpFn<E> = Arc<dyn Fn(usize, &E) -> E + Send + Sync>;

/// Operators `λ_1, λ_2, …` on `M₊`, indexed from 1.
#[derive(Clone)]
pub struct LambdaSequence<E> {
    op: OpFn<E>,
    stationary: bool,
    pub description: String,
}

impl<E> Debug for LambdaSequence<E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LambdaSequence({})", self.description)
    }
}

impl<E> LambdaSequence<E> {
    pub fn new(description: impl Into<String>, op: impl Fn(usize, &E) -> E + Send + Sync + 'static) -> Self {
        Self { op: Arc::new(op), stationary: false, description: description.into() }
    }

    /// Every `λ_n` is the same operator.
    pub fn constant(description: impl Into<String>, op: impl Fn(&E) -> E + Send + Sync + 'static) -> Self {
        Self { op: Arc::new(move |_, e| op(e)), stationary: true, description: description.into() }
    }

    pub fn apply(&self, n: usize, e: &E) -> E {
        (self.op)(n, e)
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// Checks `a ≤ b ⇒ λ_n(a) ≤ λ_n(b)` on every ordered pair of `samples` for `n ≤ n_max`.
    pub fn audit_monotone<M: Monoid<Elem = E>>(&self, monoid: &M, samples: &[E], n_max: usize) -> ValidationReport
    where
        E: Debug,
    {
        let mut report = ValidationReport::new(format!("λ monotonicity ({})", self.description));
        let mut checked = 0;
        let mut witness = None;
        'outer: for n in 1..=n_max {
            for a in samples {
                for b in samples {
                    if !monoid.leq(a, b) {
                        continue;
                    }
                    checked += 1;
                    if !monoid.leq(&self.apply(n, a), &self.apply(n, b)) {
                        witness = Some(format!("n={n}, a={a:?}, b={b:?}"));
                        break 'outer;
                    }
                }
            }
        }
        report.record("order-preserving", checked, witness);
        report
    }
}

/// `n ↦ (λ_1 ∘ λ_2 ∘ … ∘ λ_n)(α)` for `n = 1..=n_max`; `λ_1` is applied last.
pub fn lambda_product_trace<E: Clone + Send + Sync>(lam: &LambdaSequence<E>, alpha: &E, n_max: usize) -> MTrace<E> {
    if lam.stationary {
        let mut out = Vec::with_capacity(n_max);
        let mut acc = alpha.clone();
        for _ in 0..n_max {
            acc = lam.apply(1, &acc);
            out.push(acc.clone());
        }
        return MTrace::new(out);
    }
    let out = (1..=n_max)
        .into_par_iter()
        .map(|n| (1..=n).rev().fold(alpha.clone(), |acc, i| lam.apply(i, &acc)))
        .collect();
    MTrace::new(out)
}
