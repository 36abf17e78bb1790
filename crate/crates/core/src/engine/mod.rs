//! Picard iteration drivers that audit their hypotheses along the orbit and
//! certify the limit by its residual.

mod drivers;
mod export;
mod lambda;
mod param;

use std::fmt::Debug;
use std::sync::Arc;

use thiserror::Error;

use crate::monoid::{Elem, MTrace, Monoid, MonoidError};
use crate::spaces::{DistanceSpace, SpaceError};

pub use drivers::{
    monotone_uniqueness_probe, sequential_uniqueness_probe, solve_caristi, solve_meir_keeler, solve_monotone,
    solve_sequential, CaristiData, MeirKeelerData, SequentialMode,
};
pub use export::write_trace_csv;
pub use lambda::{lambda_product_trace, LambdaSequence};
pub use param::{solve_parametrized, ParamRow, ParamTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("iteration budget must be at least 1")]
    ZeroBudget,
    #[error("confirmation window must be at least 1")]
    ZeroWindow,
    #[error("map failed at step {step}: {message}")]
    Apply { step: usize, message: String },
    #[error("the map carries no order relation")]
    NoOrder,
    #[error("convergence in `{0}` is not declared order-regular")]
    NotRegular(String),
    #[error("monoid `{0}` lacks the Weierstrass property")]
    NotWeierstrass(String),
}

type ApplyFn<X> = Arc<dyn Fn(&X) -> Result<X, String> + Send + Sync>;
type OrderFn<X> = Arc<dyn Fn(&X, &X) -> bool + Send + Sync>;

/// A self-map, optionally with an order on its carrier.
#[derive(Clone)]
pub struct MapSpec<X> {
    apply: ApplyFn<X>,
    order: Option<OrderFn<X>>,
    pub description: String,
}

impl<X> Debug for MapSpec<X> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MapSpec").field("description", &self.description).field("ordered", &self.order.is_some()).finish()
    }
}

impl<X> MapSpec<X> {
    pub fn new(description: impl Into<String>, f: impl Fn(&X) -> X + Send + Sync + 'static) -> Self {
        Self { apply: Arc::new(move |x| Ok(f(x))), order: None, description: description.into() }
    }

    /// A map whose evaluation can fail; the failure aborts the solve.
    pub fn fallible(description: impl Into<String>, f: impl Fn(&X) -> Result<X, String> + Send + Sync + 'static) -> Self {
        Self { apply: Arc::new(f), order: None, description: description.into() }
    }

    pub fn with_order(mut self, leq: impl Fn(&X, &X) -> bool + Send + Sync + 'static) -> Self {
        self.order = Some(Arc::new(leq));
        self
    }

    pub fn apply(&self, x: &X) -> Result<X, String> {
        (self.apply)(x)
    }

    pub fn is_ordered(&self) -> bool {
        self.order.is_some()
    }

    pub fn leq(&self, a: &X, b: &X) -> Option<bool> {
        self.order.as_ref().map(|o| o(a, b))
    }

    pub(crate) fn apply_at(&self, x: &X, step: usize) -> Result<X, EngineError> {
        self.apply(x).map_err(|message| EngineError::Apply { step, message })
    }
}

/// Outcome of one hypothesis check at one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFlag {
    pub name: &'static str,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `f(x) = x` exactly.
    Exact,
    /// Consecutive distances stayed below the bottom rung for the whole window.
    Window,
    Budget,
    Violation,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Exact => "exact",
            StopReason::Window => "window",
            StopReason::Budget => "budget",
            StopReason::Violation => "violation",
        }
    }
}

/// Orbit `x_0, …, x_n` with consecutive distances and the per-step check results.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<X, E> {
    pub points: Vec<X>,
    pub consec: MTrace<E>,
    pub flags: Vec<Vec<StepFlag>>,
    pub stop: StopReason,
}

impl<X, E> IterationTrace<X, E> {
    pub fn last(&self) -> &X {
        self.points.last().expect("trace holds the seed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterateOptions {
    pub budget: usize,
    /// Number of consecutive below-bottom steps required before stopping.
    pub window: usize,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self { budget: 10_000, window: 3 }
    }
}

impl IterateOptions {
    pub fn with_budget(budget: usize) -> Self {
        Self { budget, ..Self::default() }
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.budget == 0 {
            return Err(EngineError::ZeroBudget);
        }
        if self.window == 0 {
            return Err(EngineError::ZeroWindow);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Certified,
    HypothesisViolated { step: usize, which: String, witness: String },
    BudgetExhausted { detail: String },
}

impl Status {
    pub fn is_certified(&self) -> bool {
        matches!(self, Status::Certified)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Certified => "Certified",
            Status::HypothesisViolated { .. } => "HypothesisViolated",
            Status::BudgetExhausted { .. } => "BudgetExhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<X, E> {
    pub driver: &'static str,
    pub status: Status,
    /// Present only when certified.
    pub fixed_point: Option<X>,
    /// `d(x̄, f(x̄))` at the last orbit point.
    pub residual: E,
    pub iterations: usize,
    pub diagnostics: Vec<String>,
    pub trace: IterationTrace<X, E>,
}

impl<X, E> SolveReport<X, E> {
    pub fn is_certified(&self) -> bool {
        self.status.is_certified()
    }
}

pub(crate) struct Check {
    pub name: &'static str,
    pub failure: Option<String>,
}

impl Check {
    pub fn pass(name: &'static str) -> Self {
        Self { name, failure: None }
    }

    pub fn test(name: &'static str, ok: bool, witness: impl FnOnce() -> String) -> Self {
        Self { name, failure: (!ok).then(witness) }
    }
}

pub(crate) struct Violation {
    pub step: usize,
    pub which: String,
    pub witness: String,
}

impl From<Violation> for Status {
    fn from(v: Violation) -> Self {
        Status::HypothesisViolated { step: v.step, which: v.which, witness: v.witness }
    }
}

/// Iterates `f`, running `check(k, points, consec)` after `x_{k+1}` and `d(x_k, x_{k+1})` are
/// appended. The first failed check ends the run.
pub(crate) fn run_orbit<D, C>(
    space: &D,
    f: &MapSpec<D::Point>,
    x0: D::Point,
    opts: &IterateOptions,
    mut check: C,
) -> Result<(IterationTrace<D::Point, Elem<D::M>>, Option<Violation>), EngineError>
where
    D: DistanceSpace,
    C: FnMut(usize, &[D::Point], &[Elem<D::M>]) -> Result<Vec<Check>, EngineError>,
{
    opts.validate()?;
    let mut points = vec![x0];
    let mut consec = Vec::new();
    let mut flags = Vec::new();
    let mut run = 0;
    let mut stop = StopReason::Budget;
    let mut violation = None;
    for k in 0..opts.budget {
        let next = f.apply_at(&points[k], k)?;
        consec.push(space.distance(&points[k], &next));
        let exact = next == points[k];
        points.push(next);
        let checks = check(k, &points, &consec)?;
        flags.push(checks.iter().map(|c| StepFlag { name: c.name, ok: c.failure.is_none() }).collect());
        if let Some(c) = checks.into_iter().find(|c| c.failure.is_some()) {
            violation = Some(Violation { step: k, which: c.name.to_string(), witness: c.failure.unwrap_or_default() });
            stop = StopReason::Violation;
            break;
        }
        if exact {
            stop = StopReason::Exact;
            break;
        }
        run = if space.below_bottom(&consec[k]) { run + 1 } else { 0 };
        if run >= opts.window {
            stop = StopReason::Window;
            break;
        }
    }
    let trace = IterationTrace { points, consec: MTrace::new(consec), flags, stop };
    Ok((trace, violation))
}

/// Plain Picard iteration with the stop rule and no hypothesis checks.
pub fn picard_iterate<D: DistanceSpace>(
    space: &D,
    f: &MapSpec<D::Point>,
    x0: D::Point,
    opts: &IterateOptions,
) -> Result<IterationTrace<D::Point, Elem<D::M>>, EngineError> {
    Ok(run_orbit(space, f, x0, opts, |_, _, _| Ok(Vec::new()))?.0)
}

/// `d(x, f(x))` and whether it lies strictly below the bottom rung.
pub fn verify_fixed_point<D: DistanceSpace>(
    space: &D,
    f: &MapSpec<D::Point>,
    candidate: &D::Point,
) -> Result<(Elem<D::M>, bool), EngineError> {
    let image = f.apply_at(candidate, 0)?;
    let residual = space.distance(candidate, &image);
    let below = space.below_bottom(&residual);
    Ok((residual, below))
}

/// Turns a finished orbit into a report.
pub(crate) fn finish<D: DistanceSpace>(
    driver: &'static str,
    space: &D,
    f: &MapSpec<D::Point>,
    trace: IterationTrace<D::Point, Elem<D::M>>,
    violation: Option<Violation>,
    mut diagnostics: Vec<String>,
) -> Result<SolveReport<D::Point, Elem<D::M>>, EngineError> {
    let (residual, below) = verify_fixed_point(space, f, trace.last())?;
    let steps = trace.consec.len();
    let iterations = if trace.stop == StopReason::Exact { steps - 1 } else { steps };
    let status = match (violation, trace.stop) {
        (Some(v), _) => v.into(),
        (None, StopReason::Exact | StopReason::Window) if below => Status::Certified,
        (None, StopReason::Exact | StopReason::Window) => Status::BudgetExhausted {
            detail: format!("orbit settled but the residual {residual:?} is not below the bottom rung"),
        },
        (None, _) => Status::BudgetExhausted { detail: format!("no stop within {steps} steps") },
    };
    if status.is_certified() {
        diagnostics.push("hypotheses verified on the computed orbit and sampled pairs only".into());
    }
    let fixed_point = status.is_certified().then(|| trace.last().clone());
    Ok(SolveReport { driver, status, fixed_point, residual, iterations, diagnostics, trace })
}

/// A report for a run that was refused before iterating.
pub(crate) fn refuse<D: DistanceSpace>(
    driver: &'static str,
    space: &D,
    f: &MapSpec<D::Point>,
    x0: D::Point,
    status: Status,
    diagnostics: Vec<String>,
) -> Result<SolveReport<D::Point, Elem<D::M>>, EngineError> {
    let (residual, _) = verify_fixed_point(space, f, &x0)?;
    let trace = IterationTrace { points: vec![x0], consec: MTrace::new(Vec::new()), flags: Vec::new(), stop: StopReason::Violation };
    Ok(SolveReport { driver, status, fixed_point: None, residual, iterations: 0, diagnostics, trace })
}

pub(crate) fn monoid_name<D: DistanceSpace>(space: &D) -> String {
    space.monoid().describe()
}

#[cfg(test)]
mod tests;
