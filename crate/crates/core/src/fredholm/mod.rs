//! Nyström discretization of `x(t) = f(t) + ∫ g(t, s, x(s)) dμ(s)` on an interval, with a
//! convergence certificate built from iterated kernel majorants.

mod expr;

use std::fmt::{self, Debug, Write as _};
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use thiserror::Error;

use crate::engine::{
    refuse, solve_sequential, EngineError, IterateOptions, LambdaSequence, MapSpec, SequentialMode, SolveReport, Status,
};
use crate::monoid::{cauchy_series_check, series_onset, tail_sums, Decision, MTrace, MonoidError, RealVector, TestLadder};
use crate::rng::{stream, streams};
use crate::spaces::{DistanceSpace, GridSpace};

pub use expr::{Expr, ExprError, Var};

/// Every solution and distance on the grid is a vector of nodal values.
pub type GridFunction = Vec<f64>;

/// Relative inflation of `λ` so floating-point round-off cannot break an exact contraction.
pub const LAMBDA_INFLATION: f64 = 1e-6;

/// Relative slack, in units of machine epsilon, allowed by the majorant audit.
pub const MAJORANT_ULPS: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FredholmError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("grid needs at least {0} nodes")]
    TooFewNodes(usize),
    #[error("interval [{a}, {b}] is empty or not finite")]
    BadInterval { a: f64, b: f64 },
    #[error("nodes are not strictly increasing at index {0}")]
    NodesNotIncreasing(usize),
    #[error("weight {index} is negative or not finite ({value})")]
    BadWeight { index: usize, value: f64 },
    #[error("{nodes} nodes but {weights} weights")]
    LengthMismatch { nodes: usize, weights: usize },
    #[error("function has {got} values on a {expected}-node grid")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kernel iteration order must be at least 1")]
    ZeroOrder,
    #[error("in `{field}`: {source}")]
    Expression { field: &'static str, source: ExprError },
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error("convergence not certified within {} terms; pass the force flag to solve anyway", .0.terms)]
    Refused(Box<ConvergenceCertificate>),
}

/// Quadrature nodes and non-negative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: String,
}

impl Grid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self, FredholmError> {
        if nodes.len() != weights.len() {
            return Err(FredholmError::LengthMismatch { nodes: nodes.len(), weights: weights.len() });
        }
        if nodes.is_empty() {
            return Err(FredholmError::TooFewNodes(1));
        }
        if let Some(i) = (1..nodes.len()).find(|&i| !(nodes[i] > nodes[i - 1]) || !nodes[i].is_finite()) {
            return Err(FredholmError::NodesNotIncreasing(i));
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
            return Err(FredholmError::BadWeight { index, value });
        }
        Ok(Self { nodes, weights, rule: "explicit".into() })
    }

    /// Composite trapezoid rule with `m` equally spaced nodes on `[a, b]`.
    pub fn trapezoid(a: f64, b: f64, m: usize) -> Result<Self, FredholmError> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(FredholmError::BadInterval { a, b });
        }
        if m < 2 {
            return Err(FredholmError::TooFewNodes(2));
        }
        let h = (b - a) / (m - 1) as f64;
        let nodes = (0..m).map(|i| if i == m - 1 { b } else { a + h * i as f64 }).collect();
        let weights = (0..m).map(|i| if i == 0 || i == m - 1 { h / 2.0 } else { h }).collect();
        Ok(Self { nodes, weights, rule: "trapezoid".into() })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule(&self) -> &str {
        &self.rule
    }

    /// `Σ w_i`.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        self.nodes.iter().map(|&t| f(t)).collect()
    }

    fn check(&self, x: &[f64]) -> Result<(), FredholmError> {
        if x.len() != self.len() {
            return Err(FredholmError::DimensionMismatch { expected: self.len(), got: x.len() });
        }
        Ok(())
    }
}

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Integrand `g`, its Lipschitz majorant `Q ≥ 0`, and the inhomogeneity `f`.
#[derive(Clone)]
pub struct KernelSpec {
    q: Fn2,
    g: Fn3,
    f: Fn1,
    pub description: String,
}

impl Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KernelSpec({})", self.description)
    }
}

impl KernelSpec {
    pub fn new(
        description: impl Into<String>,
        q: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { q: Arc::new(q), g: Arc::new(g), f: Arc::new(f), description: description.into() }
    }

    /// `g = c·x`, `Q = |c|`.
    pub fn constant(c: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(format!("constant{{{c}}}"), move |_, _| c.abs(), move |_, _, x| c * x, f)
    }

    /// `g = t·s·x`, `Q = |t·s|`.
    pub fn product_ts(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new("product_ts", |t, s| (t * s).abs(), |t, s, x| t * s * x, f)
    }

    /// Kernel from expressions: `g` over `t, s, x`, `Q` over `t, s`, `f` over `t`.
    pub fn from_expressions(g: &str, q: &str, f: &str) -> Result<Self, FredholmError> {
        let ge = Expr::parse_in(g, &[Var::T, Var::S, Var::X]).map_err(|source| FredholmError::Expression { field: "g", source })?;
        let qe = Expr::parse_in(q, &[Var::T, Var::S]).map_err(|source| FredholmError::Expression { field: "q", source })?;
        let fe = parse_f(f)?;
        let description = format!("user_expression{{g={g}; q={q}}}");
        Ok(Self::new(description, move |t, s| qe.eval(t, s, 0.0), move |t, s, x| ge.eval(t, s, x), move |t| fe.eval(t, 0.0, 0.0)))
    }

    /// A named built-in (`constant{c}` or `product_ts`) with `f` given as an expression in `t`.
    pub fn named(name: &str, f: &str) -> Result<Self, FredholmError> {
        let fe = parse_f(f)?;
        let fun = move |t: f64| fe.eval(t, 0.0, 0.0);
        let name = name.trim();
        if name == "product_ts" {
            return Ok(Self::product_ts(fun));
        }
        if let Some(c) = name.strip_prefix("constant{").and_then(|r| r.strip_suffix('}')) {
            let c: f64 = c.trim().parse().map_err(|_| FredholmError::UnknownKernel(name.into()))?;
            return Ok(Self::constant(c, fun));
        }
        Err(FredholmError::UnknownKernel(name.into()))
    }

    pub fn q(&self, t: f64, s: f64) -> f64 {
        (self.q)(t, s)
    }

    pub fn g(&self, t: f64, s: f64, x: f64) -> f64 {
        (self.g)(t, s, x)
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

fn parse_f(f: &str) -> Result<Expr, FredholmError> {
    Expr::parse_in(f, &[Var::T]).map_err(|source| FredholmError::Expression { field: "f", source })
}

/// `[Q(t_i, s_j)]` on the grid.
fn q_matrix(k: &KernelSpec, grid: &Grid) -> DMatrix<f64> {
    let n = grid.nodes();
    DMatrix::from_fn(n.len(), n.len(), |i, j| k.q(n[i], n[j]))
}

/// `[Q(t_i, s_j) · w_j]`: the discretized `λ`.
fn qw_matrix(k: &KernelSpec, grid: &Grid) -> DMatrix<f64> {
    let n = grid.nodes();
    let w = grid.weights();
    DMatrix::from_fn(n.len(), n.len(), |i, j| k.q(n[i], n[j]) * w[j])
}

/// Iterated kernel `Q_n` on the grid: `Q_1 = Q`, `Q_n = Q_{n-1} · diag(w) · Q_1`.
pub fn iterate_kernel(k: &KernelSpec, grid: &Grid, n: usize) -> Result<DMatrix<f64>, FredholmError> {
    if n == 0 {
        return Err(FredholmError::ZeroOrder);
    }
    let q1 = q_matrix(k, grid);
    let w = grid.weights();
    let wq = DMatrix::from_fn(q1.nrows(), q1.ncols(), |i, j| w[i] * q1[(i, j)]);
    let mut qn = q1;
    for _ in 1..n {
        qn = &qn * &wq;
    }
    Ok(qn)
}

/// `λ(x)(t_i) = Σ_j w_j Q(t_i, s_j) x(s_j)`.
pub fn lambda_apply(k: &KernelSpec, grid: &Grid, x: &[f64]) -> Result<GridFunction, FredholmError> {
    grid.check(x)?;
    Ok(matvec(&qw_matrix(k, grid), x))
}

fn matvec(m: &DMatrix<f64>, x: &[f64]) -> GridFunction {
    (m * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// One application of the Nyström operator `(Ax)(t_i) = f(t_i) + Σ_j w_j g(t_i, s_j, x(s_j))`.
pub fn apply_operator(k: &KernelSpec, grid: &Grid, x: &[f64]) -> Result<GridFunction, FredholmError> {
    grid.check(x)?;
    Ok(operator(k, grid, x))
}

fn operator(k: &KernelSpec, grid: &Grid, x: &[f64]) -> GridFunction {
    let (n, w) = (grid.nodes(), grid.weights());
    n.iter().map(|&t| k.f(t) + n.iter().zip(w).zip(x).map(|((&s, &wj), &xj)| wj * k.g(t, s, xj)).sum::<f64>()).collect()
}

/// `sup_i |x(t_i) − (Ax)(t_i)|`.
pub fn residual(k: &KernelSpec, grid: &Grid, x: &[f64]) -> Result<f64, FredholmError> {
    let ax = apply_operator(k, grid, x)?;
    Ok(x.iter().zip(&ax).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    NotCertifiedWithin,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Certified => "Certified",
            Verdict::NotCertifiedWithin => "NotCertifiedWithin",
        }
    }
}

/// Evidence that `Σ_n ∫ Q_n(t, s) dμ(s)` is a Cauchy series on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCertificate {
    /// Final partial sums `S_N(t_i)`.
    pub partial_sums: GridFunction,
    /// `sup_i` of the `n`-th increment `Σ_j w_j Q_n(t_i, s_j)`, for `n = 1..=terms`.
    pub increment_sup: Vec<f64>,
    /// `sup_i S_n(t_i)` for `n = 1..=terms`.
    pub partial_sup: Vec<f64>,
    /// Sup norm of the tail window starting at the trace budget.
    pub tail_window_max: f64,
    /// Largest eigenvalue modulus of `[Q(t_i, s_j) w_j]`.
    pub spectral_radius: f64,
    pub verdict: Verdict,
    /// First term from which all windows lie below the bottom rung.
    pub onset: Option<usize>,
    pub terms: usize,
    pub overflow: bool,
}

impl ConvergenceCertificate {
    /// Columns `n,sup_increment,sup_partial_sum`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "sup_increment", "sup_partial_sum"])?;
        for (n, (inc, part)) in self.increment_sup.iter().zip(&self.partial_sup).enumerate() {
            w.write_record([(n + 1).to_string(), inc.to_string(), part.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "certificate: {}", self.verdict.name());
        let _ = writeln!(s, "terms: {}", self.terms);
        let _ = writeln!(s, "onset: {}", self.onset.map_or("none".into(), |o| o.to_string()));
        let _ = writeln!(s, "tail_window_max: {:e}", self.tail_window_max);
        let _ = writeln!(s, "spectral_radius: {}", self.spectral_radius);
        let _ = writeln!(s, "overflow: {}", self.overflow);
        s
    }
}

/// Largest eigenvalue modulus of a square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Builds the increment trace `n ↦ (t_i ↦ Σ_j w_j Q_n(t_i, s_j))` for `n ≤ n_max` and runs the
/// Cauchy-series check on it in the grid-function monoid.
///
/// The verdict comes from the series check alone; the spectral radius is recorded as an
/// independent cross-check.
pub fn certify_convergence(
    k: &KernelSpec,
    grid: &Grid,
    ladder: &TestLadder<GridFunction>,
    n_max: usize,
) -> Result<ConvergenceCertificate, FredholmError> {
    if n_max == 0 {
        return Err(FredholmError::ZeroOrder);
    }
    let monoid = &RealVector::<f64>::grid(grid.len());
    let qw = qw_matrix(k, grid);
    let mut increments = Vec::with_capacity(n_max);
    let mut inc = vec![1.0; grid.len()];
    let mut partial = vec![0.0; grid.len()];
    let (mut increment_sup, mut partial_sup) = (Vec::new(), Vec::new());
    let mut overflow = false;
    for _ in 0..n_max {
        inc = matvec(&qw, &inc);
        partial.iter_mut().zip(&inc).for_each(|(p, i)| *p += i);
        increment_sup.push(sup(&inc));
        partial_sup.push(sup(&partial));
        if !inc.iter().chain(&partial).all(|v| v.is_finite()) {
            overflow = true;
            break;
        }
        increments.push(inc.clone());
    }
    let spectral = spectral_radius(&qw);
    let terms = increment_sup.len();
    if overflow {
        return Ok(ConvergenceCertificate {
            partial_sums: partial,
            increment_sup,
            partial_sup,
            tail_window_max: f64::INFINITY,
            spectral_radius: spectral,
            verdict: Verdict::NotCertifiedWithin,
            onset: None,
            terms,
            overflow,
        });
    }
    let trace = MTrace::new(increments);
    let decision = cauchy_series_check(&trace, ladder, monoid)?;
    let onset = series_onset(&trace, ladder, monoid)?;
    let tails = tail_sums(monoid, &trace.elements);
    let tail_window_max = sup(&tails[trace.budget.min(tails.len()) - 1]);
    Ok(ConvergenceCertificate {
        partial_sums: partial,
        increment_sup,
        partial_sup,
        tail_window_max,
        spectral_radius: spectral,
        verdict: if decision == Decision::Null { Verdict::Certified } else { Verdict::NotCertifiedWithin },
        onset,
        terms,
        overflow,
    })
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| if b.is_nan() { f64::NAN } else { a.max(b.abs()) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FredholmOptions {
    pub iterate: IterateOptions,
    /// Terms in the certificate's increment trace.
    pub n_max: usize,
    /// Solve even when the certificate fails; recorded in the report.
    pub force: bool,
    /// Sampled `(t, s, x, y)` quadruples for the majorant audit.
    pub majorant_trials: usize,
    pub seed: u64,
    /// Ladder heights for the constant-function rungs.
    pub heights: Vec<f64>,
}

impl Default for FredholmOptions {
    fn default() -> Self {
        Self {
            iterate: IterateOptions::with_budget(1_000),
            n_max: 1_000,
            force: false,
            majorant_trials: 10_000,
            seed: 0,
            heights: (1..=20).map(|k| 0.5f64.powi(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FredholmSolution {
    pub solution: GridFunction,
    pub report: SolveReport<GridFunction, GridFunction>,
    pub certificate: ConvergenceCertificate,
    /// Sup-norm defect of the returned grid function.
    pub residual: f64,
}

impl FredholmSolution {
    /// Columns `node,value`.
    pub fn write_solution_csv<W: Write>(&self, grid: &Grid, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "value"])?;
        for (t, x) in grid.nodes().iter().zip(&self.solution) {
            w.write_record([t.to_string(), x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Samples `|g(t,s,x) − g(t,s,y)| ≤ Q(t,s)·|x − y|` on random nodes and values.
///
/// Values range over `[-R, R]` with `R = 4(1 + sup|f|)`. Returns the first violation.
pub fn audit_majorant(k: &KernelSpec, grid: &Grid, trials: usize, seed: u64) -> Option<String> {
    let mut rng = stream(seed, streams::MAJORANT_AUDIT);
    let n = grid.nodes();
    let r = 4.0 * (1.0 + n.iter().map(|&t| k.f(t).abs()).fold(0.0, f64::max));
    let tol = MAJORANT_ULPS * f64::EPSILON;
    for _ in 0..trials {
        let (t, s) = (n[rng.gen_range(0..n.len())], n[rng.gen_range(0..n.len())]);
        let (x, y) = (rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        let (gx, gy) = (k.g(t, s, x), k.g(t, s, y));
        let q = k.q(t, s);
        let lhs = (gx - gy).abs();
        let rhs = q * (x - y).abs();
        if !(q >= 0.0) || lhs > rhs * (1.0 + tol) + tol * (gx.abs() + gy.abs()) {
            return Some(format!("t={t}, s={s}, x={x}, y={y}: |g(x)-g(y)|={lhs} > Q·|x-y|={rhs}"));
        }
    }
    None
}

/// Absolute error allowed per node in one operator application.
///
/// Evaluating `A` at a point of size `B` loses about `m·u·B`; `B` bounds the solution by
/// `(sup|f| + sup Σ_j w_j |g(t, s_j, 0)|)·(1 + sup S_N)`. The floor sits many orders below any
/// sensible ladder bottom, so it cannot hide a genuine failure to contract.
fn roundoff_floor(k: &KernelSpec, grid: &Grid, cert: &ConvergenceCertificate) -> f64 {
    let (n, w) = (grid.nodes(), grid.weights());
    let f_sup = n.iter().map(|&t| k.f(t).abs()).fold(0.0, f64::max);
    let g0 = n.iter().map(|&t| n.iter().zip(w).map(|(&s, &wj)| wj * k.g(t, s, 0.0).abs()).sum::<f64>()).fold(0.0, f64::max);
    let partial = cert.partial_sums.iter().fold(0.0, |a: f64, &b| a.max(b));
    let bound = (f_sup + g0) * (1.0 + partial);
    16.0 * grid.len() as f64 * f64::EPSILON * (1.0 + if bound.is_finite() { bound } else { 0.0 })
}

/// Certifies, audits the majorant, then runs the sequential driver with the constant
/// operator `λ = (1 + η)·[Q w] + τ` from the zero function, where `τ` is the round-off floor.
pub fn solve_fredholm(k: &KernelSpec, grid: &Grid, opts: &FredholmOptions) -> Result<FredholmSolution, FredholmError> {
    let space = GridSpace::with_heights(grid.len(), opts.heights.clone())?;
    let certificate = certify_convergence(k, grid, space.ladder(), opts.n_max)?;
    let mut diagnostics = vec![format!("certificate: {}; spectral radius {}", certificate.verdict.name(), certificate.spectral_radius)];
    if certificate.verdict != Verdict::Certified {
        if !opts.force {
            return Err(FredholmError::Refused(Box::new(certificate)));
        }
        diagnostics.push("solved despite an uncertified series (force flag)".into());
    }

    let (kk, gg) = (k.clone(), grid.clone());
    let map = MapSpec::new(format!("Nyström operator for {}", k.description), move |x: &GridFunction| operator(&kk, &gg, x));
    let x0 = vec![0.0; grid.len()];

    if let Some(w) = audit_majorant(k, grid, opts.majorant_trials, opts.seed) {
        let status = Status::HypothesisViolated { step: 0, which: "kernel majorant".into(), witness: w };
        let report = refuse("fredholm", &space, &map, x0.clone(), status, diagnostics)?;
        return Ok(FredholmSolution { residual: residual(k, grid, &x0)?, solution: x0, report, certificate });
    }
    diagnostics.push(format!("kernel majorant held on {} sampled quadruples", opts.majorant_trials));

    let floor = roundoff_floor(k, grid, &certificate);
    diagnostics.push(format!("λ round-off floor {floor:e}"));
    let qw = qw_matrix(k, grid);
    let lam = LambdaSequence::constant("(1+η)·Σ_j w_j Q(·, s_j) d(s_j) + τ", move |d: &GridFunction| {
        matvec(&qw, d).into_iter().map(|v| v * (1.0 + LAMBDA_INFLATION) + floor).collect()
    });
    let mut report = solve_sequential(&space, &map, &lam, x0, SequentialMode::Series, &opts.iterate)?;
    report.driver = "fredholm";
    diagnostics.append(&mut report.diagnostics);
    report.diagnostics = diagnostics;
    let solution = report.trace.last().clone();
    let res = residual(k, grid, &solution)?;
    Ok(FredholmSolution { solution, report, certificate, residual: res })
}
