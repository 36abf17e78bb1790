use std::sync::Arc;

use rayon::prelude::*;

use super::{EngineError, MapSpec, SolveReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRow<W, X, E> {
    pub omega: W,
    pub outcome: Result<SolveReport<X, E>, EngineError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamTable<W, X, E> {
    pub rows: Vec<ParamRow<W, X, E>>,
    /// Verdict of the admissibility predicate on the assembled `ω ↦ x̄(ω)`, when one was given.
    pub admissible: Option<bool>,
}

impl<W, X, E> ParamTable<W, X, E> {
    pub fn fixed_points(&self) -> Vec<(&W, Option<&X>)> {
        self.rows
            .iter()
            .map(|r| (&r.omega, r.outcome.as_ref().ok().and_then(|rep| rep.fixed_point.as_ref())))
            .collect()
    }

    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.outcome.as_ref().is_ok_and(SolveReport::is_certified))
    }
}

type Predicate<'a, W, X> = &'a (dyn Fn(&[(&W, Option<&X>)]) -> bool + Sync);

/// Solves `x = F(ω, x)` for each `ω`, one independent solve per parameter.
///
/// `solve` receives the map `F(ω, ·)` and picks the driver. A failing row does not affect
/// the others.
pub fn solve_parametrized<W, X, E, F, S>(
    omegas: &[W],
    family: F,
    solve: S,
    admissible: Option<Predicate<'_, W, X>>,
) -> ParamTable<W, X, E>
where
    W: Clone + Send + Sync + std::fmt::Debug + 'static,
    X: Send + Sync + 'static,
    E: Send,
    F: Fn(&W, &X) -> X + Send + Sync + 'static,
    S: Fn(&W, MapSpec<X>) -> Result<SolveReport<X, E>, EngineError> + Sync,
{
    let family = Arc::new(family);
    let rows: Vec<ParamRow<W, X, E>> = omegas
        .par_iter()
        .map(|w| {
            let (fam, omega) = (Arc::clone(&family), w.clone());
            let map = MapSpec::new(format!("F({w:?}, ·)"), move |x| fam(&omega, x));
            ParamRow { omega: w.clone(), outcome: solve(w, map) }
        })
        .collect();
    let mut table = ParamTable { rows, admissible: None };
    if let Some(pred) = admissible {
        table.admissible = Some(pred(&table.fixed_points()));
    }
    table
}
