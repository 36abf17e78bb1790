use std::fmt::Debug;
use std::sync::Arc;

use super::lambda::{lambda_product_trace, LambdaSequence};
use super::{
    finish, monoid_name, picard_iterate, refuse, run_orbit, Check, EngineError, IterateOptions, MapSpec, SolveReport, Status,
};
use crate::monoid::{cauchy_series_check, is_bounded, is_null_trace, series_onset, tail_sums, Decision, Elem, Monoid};
use crate::report::Outcome;
use crate::spaces::{all_triples, check_zeta_triangle, DistanceSpace, ZetaSpec};

type UnaryFn<E> = Arc<dyn Fn(&E) -> E + Send + Sync>;
type BinaryFn<E> = Arc<dyn Fn(&E, &E) -> E + Send + Sync>;
type MidpointFn<X, E> = Arc<dyn Fn(&X, &X, &E, &E) -> Option<X> + Send + Sync>;
type PotentialFn<X, E> = Arc<dyn Fn(&X) -> E + Send + Sync>;

type Report<D> = SolveReport<<D as DistanceSpace>::Point, Elem<<D as DistanceSpace>::M>>;

/// Rung map `ε ↦ δ(ε)` and combiner `ζ` for the ε–δ contraction condition.
#[derive(Clone)]
pub struct MeirKeelerData<X, E> {
    delta_of: UnaryFn<E>,
    zeta: BinaryFn<E>,
    midpoint: Option<MidpointFn<X, E>>,
}

impl<X, E> Debug for MeirKeelerData<X, E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeirKeelerData").field("midpoint", &self.midpoint.is_some()).finish()
    }
}

impl<X, E> MeirKeelerData<X, E> {
    /// `delta_of` may return any positive element, not only a rung.
    pub fn new(
        delta_of: impl Fn(&E) -> E + Send + Sync + 'static,
        zeta: impl Fn(&E, &E) -> E + Send + Sync + 'static,
    ) -> Self {
        Self { delta_of: Arc::new(delta_of), zeta: Arc::new(zeta), midpoint: None }
    }

    /// Oracle returning `z` with `d(x,z) < α` and `d(z,y) < β` whenever `d(x,y) < α + β`.
    pub fn with_midpoint(mut self, oracle: impl Fn(&X, &X, &E, &E) -> Option<X> + Send + Sync + 'static) -> Self {
        self.midpoint = Some(Arc::new(oracle));
        self
    }
}

/// Potential `φ: X → M₊` and gauge `η: M₊ → M₊` for the descent inequality
/// `η(d(x, f(x))) + φ(f(x)) ≤ φ(x)`.
#[derive(Clone)]
pub struct CaristiData<X, E> {
    potential: PotentialFn<X, E>,
    eta: UnaryFn<E>,
}

impl<X, E> Debug for CaristiData<X, E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("CaristiData")
    }
}

impl<X, E> CaristiData<X, E> {
    pub fn new(potential: impl Fn(&X) -> E + Send + Sync + 'static, eta: impl Fn(&E) -> E + Send + Sync + 'static) -> Self {
        Self { potential: Arc::new(potential), eta: Arc::new(eta) }
    }
}

/// Which hypothesis set the sequential driver audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequentialMode {
    /// Bounded orbit, null product trace, and graduated contraction on orbit tails.
    OrbitBounded,
    /// Step contraction `d(x_n, x_{n+1}) ≤ λ_n(d(x_{n-1}, x_n))` and a Cauchy-series product trace.
    Series,
}

impl SequentialMode {
    pub fn name(self) -> &'static str {
        match self {
            SequentialMode::OrbitBounded => "orbit_bounded",
            SequentialMode::Series => "series",
        }
    }
}

const MK_TRIANGLE_POINTS: usize = 24;
const MK_ORBIT_LAG: usize = 4;
const ARCHIMEDEAN_DOUBLINGS: u32 = 24;
const GRADUATED_LAG: usize = 4;
const BOUND_SAMPLE: usize = 64;

fn distinct_points<P: Clone + PartialEq>(pairs: &[(P, P)], cap: usize) -> Vec<P> {
    let mut pts: Vec<P> = Vec::new();
    for (x, y) in pairs {
        for p in [x, y] {
            if pts.len() < cap && !pts.contains(p) {
                pts.push(p.clone());
            }
        }
    }
    pts
}

/// Meir–Keeler type driver.
///
/// Before iterating it checks the rung inequalities for `ζ`, the `ζ`-triangle on triples of
/// sampled points, and the ε–δ condition on every sampled pair; during iteration it repeats
/// the ε–δ check on nearby orbit pairs. Uniqueness conditions are sampled afterwards and
/// reported as diagnostics.
pub fn solve_meir_keeler<D>(
    space: &D,
    f: &MapSpec<D::Point>,
    mk: &MeirKeelerData<D::Point, Elem<D::M>>,
    x0: D::Point,
    pairs: &[(D::Point, D::Point)],
    opts: &IterateOptions,
) -> Result<Report<D>, EngineError>
where
    D: DistanceSpace,
    Elem<D::M>: 'static,
{
    const DRIVER: &str = "meir-keeler";
    let m = space.monoid();
    let rungs = space.ladder().rungs();
    let violated = |which: &str, witness: String| Status::HypothesisViolated { step: 0, which: which.into(), witness };

    for a in rungs {
        for b in rungs {
            let z = (mk.zeta)(a, b);
            if !(m.leq(a, &z) && m.leq(b, &z)) {
                let w = format!("ζ({a:?}, {b:?}) = {z:?}");
                return refuse(DRIVER, space, f, x0, violated("ζ dominates its arguments on rungs", w), Vec::new());
            }
        }
    }
    let mut zs = Vec::with_capacity(rungs.len());
    for eps in rungs {
        let delta = (mk.delta_of)(eps);
        let z = (mk.zeta)(&delta, eps);
        if delta == m.identity() || !m.is_positive(&delta) || !(m.leq(eps, &z) && m.leq(&delta, &z)) {
            let w = format!("ε={eps:?}, δ={delta:?}, ζ(δ,ε)={z:?}");
            return refuse(DRIVER, space, f, x0, violated("δ(ε) positive with ζ(δ,ε) ≥ ε, δ", w), Vec::new());
        }
        zs.push(z);
    }

    let pts = distinct_points(pairs, MK_TRIANGLE_POINTS);
    let zeta = Arc::clone(&mk.zeta);
    let zspec = ZetaSpec::identity_phi(move |a: &Elem<D::M>, b: &Elem<D::M>| zeta(a, b));
    let tri = check_zeta_triangle(space, &zspec, &all_triples(&pts));
    if let Some(fail) = tri.failures().next() {
        let w = match &fail.outcome {
            Outcome::Fail { witness } => witness.clone(),
            other => format!("{other:?}"),
        };
        return refuse(DRIVER, space, f, x0, violated("ζ-triangle", w), Vec::new());
    }

    let mut images = Vec::with_capacity(pairs.len());
    for (x, y) in pairs {
        images.push((f.apply_at(x, 0)?, f.apply_at(y, 0)?));
    }
    let mut checked = 0;
    for (eps, z) in rungs.iter().zip(&zs) {
        for ((x, y), (fx, fy)) in pairs.iter().zip(&images) {
            let d = space.distance(x, y);
            if !m.leq(&d, z) {
                continue;
            }
            checked += 1;
            let dd = space.distance(fx, fy);
            if !m.lt(&dd, eps) {
                let w = format!("ε={eps:?}, x={x:?}, y={y:?}, d(x,y)={d:?}, d(f(x),f(y))={dd:?}");
                return refuse(DRIVER, space, f, x0, violated("ε-δ contraction", w), Vec::new());
            }
        }
    }
    let mut diagnostics = vec![format!("ε-δ contraction held on {checked} sampled pair/rung cases")];

    let (trace, violation) = run_orbit(space, f, x0, opts, |k, pts, _| {
        let mut ok = true;
        let mut witness = String::new();
        'pairs: for j in k.saturating_sub(MK_ORBIT_LAG)..k {
            let d = space.distance(&pts[j], &pts[k]);
            let dd = space.distance(&pts[j + 1], &pts[k + 1]);
            for (eps, z) in rungs.iter().zip(&zs) {
                if m.leq(&d, z) && !m.lt(&dd, eps) {
                    ok = false;
                    witness = format!("orbit pair ({j},{k}), ε={eps:?}, d={d:?}, image distance {dd:?}");
                    break 'pairs;
                }
            }
        }
        Ok(vec![Check::test("ε-δ contraction on orbit", ok, || witness)])
    })?;

    diagnostics.extend(uniqueness_samples(space, mk, pairs));
    finish(DRIVER, space, f, trace, violation, diagnostics)
}

fn uniqueness_samples<D: DistanceSpace>(
    space: &D,
    mk: &MeirKeelerData<D::Point, Elem<D::M>>,
    pairs: &[(D::Point, D::Point)],
) -> Vec<String> {
    let m = space.monoid();
    let rungs = space.ladder().rungs();
    let mut out = Vec::new();
    let mut archimedean = None;
    'outer: for (x, y) in pairs {
        let d = space.distance(x, y);
        for eps in rungs {
            let mut acc = eps.clone();
            let mut found = m.lt(&d, &acc);
            for _ in 0..ARCHIMEDEAN_DOUBLINGS {
                if found {
                    break;
                }
                acc = m.combine(&acc, &acc);
                found = m.lt(&d, &acc);
            }
            if !found {
                archimedean = Some(format!("d({x:?},{y:?}) = {d:?} not below 2^{ARCHIMEDEAN_DOUBLINGS}·{eps:?}"));
                break 'outer;
            }
        }
    }
    match &archimedean {
        None => out.push(format!("archimedean rung bound held on {} sampled pairs", pairs.len())),
        Some(w) => out.push(format!("archimedean rung bound failed: {w}")),
    }
    let Some(mid) = &mk.midpoint else {
        out.push("midpoint splitting not sampled (no oracle); uniqueness not assessed".into());
        return out;
    };
    let mut split = None;
    let mut cases = 0;
    'outer: for (x, y) in pairs {
        let d = space.distance(x, y);
        for a in rungs {
            for b in rungs {
                if !m.lt(&d, &m.combine(a, b)) {
                    continue;
                }
                cases += 1;
                let ok = mid(x, y, a, b).is_some_and(|z| m.lt(&space.distance(x, &z), a) && m.lt(&space.distance(&z, y), b));
                if !ok {
                    split = Some(format!("x={x:?}, y={y:?}, α={a:?}, β={b:?}"));
                    break 'outer;
                }
            }
        }
    }
    match split {
        None => {
            out.push(format!("midpoint splitting held on {cases} sampled cases"));
            if archimedean.is_none() {
                out.push("uniqueness conditions hold on samples".into());
            }
        }
        Some(w) => out.push(format!("midpoint splitting failed: {w}")),
    }
    out
}

/// Caristi type driver: audits the descent inequality, semi-additivity of `η` on orbit
/// sums, and the bound `η(Σ_{i≤k} d(x_i, x_{i+1})) ≤ φ(x_0)` at every step.
pub fn solve_caristi<D: DistanceSpace>(
    space: &D,
    f: &MapSpec<D::Point>,
    cd: &CaristiData<D::Point, Elem<D::M>>,
    x0: D::Point,
    opts: &IterateOptions,
) -> Result<Report<D>, EngineError> {
    let m = space.monoid();
    if !m.weierstrass() {
        return Err(EngineError::NotWeierstrass(monoid_name(space)));
    }
    let phi0 = (cd.potential)(&x0);
    let mut partial = m.identity();
    let mut partials = Vec::new();
    let (trace, violation) = run_orbit(space, f, x0, opts, |k, pts, consec| {
        let (x, fx, dk) = (&pts[k], &pts[k + 1], &consec[k]);
        let eta_d = (cd.eta)(dk);
        let (phi_x, phi_fx) = ((cd.potential)(x), (cd.potential)(fx));
        let lhs = m.combine(&eta_d, &phi_fx);
        let descent = Check::test("potential descent", m.leq(&lhs, &phi_x), || {
            format!("x={x:?}: η(d(x,f(x))) + φ(f(x)) = {lhs:?} exceeds φ(x) = {phi_x:?}")
        });
        let next = m.combine(&partial, dk);
        let eta_next = (cd.eta)(&next);
        let sub = m.combine(&(cd.eta)(&partial), &eta_d);
        let semi = Check::test("η semi-additive", m.leq(&eta_next, &sub), || format!("η({next:?}) = {eta_next:?} > {sub:?}"));
        let bound = Check::test("partial-sum bound", m.leq(&eta_next, &phi0), || {
            format!("η of the first {} distances = {eta_next:?} exceeds φ(x0) = {phi0:?}", k + 1)
        });
        partial = next;
        partials.push(partial.clone());
        Ok(vec![descent, semi, bound])
    })?;
    let mut diagnostics = Vec::new();
    if violation.is_none() {
        match is_bounded(&partials, m) {
            Some(b) => diagnostics.push(format!("orbit partial sums bounded by {b:?}")),
            None => diagnostics.push("orbit partial sums have no constructible bound".into()),
        }
    }
    finish("caristi", space, f, trace, violation, diagnostics)
}

/// Sequential contraction driver.
pub fn solve_sequential<D: DistanceSpace>(
    space: &D,
    f: &MapSpec<D::Point>,
    lam: &LambdaSequence<Elem<D::M>>,
    x0: D::Point,
    mode: SequentialMode,
    opts: &IterateOptions,
) -> Result<Report<D>, EngineError> {
    sequential_core("sequential", space, f, lam, x0, mode, opts, |_, _| None)
}

/// Order-preserving variant: additionally requires `x_0 ≤ f(x_0)` and a non-decreasing orbit.
pub fn solve_monotone<D: DistanceSpace>(
    space: &D,
    f: &MapSpec<D::Point>,
    lam: &LambdaSequence<Elem<D::M>>,
    x0: D::Point,
    mode: SequentialMode,
    opts: &IterateOptions,
) -> Result<Report<D>, EngineError> {
    if !f.is_ordered() {
        return Err(EngineError::NoOrder);
    }
    if !space.order_regular() {
        return Err(EngineError::NotRegular(space.describe()));
    }
    sequential_core("monotone", space, f, lam, x0, mode, opts, |k, pts| {
        let ok = f.leq(&pts[k], &pts[k + 1]).unwrap_or(false);
        let name = if k == 0 { "seed below image" } else { "non-decreasing orbit" };
        Some(Check::test(name, ok, || format!("x_{k}={:?} is not below x_{}={:?}", pts[k], k + 1, pts[k + 1])))
    })
}

#[allow(clippy::too_many_arguments)]
fn sequential_core<D: DistanceSpace>(
    driver: &'static str,
    space: &D,
    f: &MapSpec<D::Point>,
    lam: &LambdaSequence<Elem<D::M>>,
    x0: D::Point,
    mode: SequentialMode,
    opts: &IterateOptions,
    mut extra: impl FnMut(usize, &[D::Point]) -> Option<Check>,
) -> Result<Report<D>, EngineError> {
    let m = space.monoid();
    let ladder = space.ladder();
    let mut diagnostics = vec![format!("mode: {}; λ: {}", mode.name(), lam.description)];

    if mode == SequentialMode::Series {
        let x1 = f.apply_at(&x0, 0)?;
        let alpha = space.distance(&x0, &x1);
        let product = lambda_product_trace(lam, &alpha, opts.budget);
        if cauchy_series_check(&product, ladder, m)? != Decision::Null {
            let tails = tail_sums(m, &product.elements);
            let from = product.budget.min(tails.len());
            let detail = format!(
                "product trace from d(x0, f(x0)) is not a Cauchy series within {} terms: the window from term {from} sums to {:?}",
                product.len(),
                tails[from - 1]
            );
            return refuse(driver, space, f, x0, Status::BudgetExhausted { detail }, diagnostics);
        }
        let onset = series_onset(&product, ladder, m)?.unwrap_or(1);
        diagnostics.push(format!("product trace windows below the bottom rung from term {onset}"));
    }

    let mut samples = Vec::new();
    let (trace, violation) = run_orbit(space, f, x0, opts, |k, pts, consec| {
        let mut checks: Vec<Check> = extra(k, pts).into_iter().collect();
        if samples.len() < 6 {
            samples.push(consec[k].clone());
        }
        match mode {
            SequentialMode::Series if k >= 1 => {
                let bound = lam.apply(k, &consec[k - 1]);
                checks.push(Check::test("step contraction", m.leq(&consec[k], &bound), || {
                    format!("d(x_{k}, x_{}) = {:?} exceeds λ_{k}(d(x_{}, x_{k})) = {bound:?}", k + 1, consec[k], k - 1)
                }));
            }
            SequentialMode::OrbitBounded => checks.push(graduated_check(space, lam, pts)),
            _ => {}
        }
        Ok(checks)
    })?;
    diagnostics.push(match lam.audit_monotone(m, &samples, 3).is_pass() {
        true => "λ order-preserving on sampled orbit distances".into(),
        false => "λ failed to preserve order on sampled orbit distances".into(),
    });

    let mut report = finish(driver, space, f, trace, violation, diagnostics)?;
    if mode == SequentialMode::OrbitBounded && report.is_certified() {
        let pts = &report.trace.points;
        let idx = spread_indices(pts.len(), BOUND_SAMPLE);
        let dists: Vec<_> = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| space.distance(&pts[i], &pts[j])).collect();
        let failure = match is_bounded(&dists, m) {
            None => Some(Status::HypothesisViolated {
                step: report.iterations,
                which: "bounded orbit".into(),
                witness: "no common upper bound for sampled orbit distances".into(),
            }),
            Some(alpha) => {
                let product = lambda_product_trace(lam, &alpha, opts.budget);
                if is_null_trace(&product, ladder, m)?.is_null() {
                    report.diagnostics.push(format!("orbit bound {alpha:?}; its product trace is null"));
                    None
                } else {
                    Some(Status::BudgetExhausted {
                        detail: format!("product trace from the orbit bound {alpha:?} is not null within {} terms", product.len()),
                    })
                }
            }
        };
        if let Some(status) = failure {
            report.status = status;
            report.fixed_point = None;
        }
    }
    Ok(report)
}

/// For the newest point `x_m`, each pair `(x_i, x_m)` with `i` close to `m` must satisfy
/// `d(x_i, x_m) ≤ λ_i(d(x', y'))` for some `x', y'` in the tail starting at `i-1`.
fn graduated_check<D: DistanceSpace>(space: &D, lam: &LambdaSequence<Elem<D::M>>, pts: &[D::Point]) -> Check {
    let m = space.monoid();
    let last = pts.len() - 1;
    for i in last.saturating_sub(GRADUATED_LAG).max(1)..last {
        let d = space.distance(&pts[i], &pts[last]);
        let natural = space.distance(&pts[i - 1], &pts[last - 1]);
        if m.leq(&d, &lam.apply(i, &natural)) {
            continue;
        }
        let found = (i - 1..=last)
            .flat_map(|a| (a..=last).map(move |b| (a, b)))
            .any(|(a, b)| m.leq(&d, &lam.apply(i, &space.distance(&pts[a], &pts[b]))));
        if !found {
            return Check::test("graduated contraction", false, || {
                format!("d(x_{i}, x_{last}) = {d:?} has no witness pair in the tail from {}", i - 1)
            });
        }
    }
    Check::pass("graduated contraction")
}

fn spread_indices(len: usize, cap: usize) -> Vec<usize> {
    if len <= cap {
        return (0..len).collect();
    }
    let mut v: Vec<usize> = (0..cap).map(|k| k * (len - 1) / (cap - 1)).collect();
    v.dedup();
    v
}

/// Runs orbits from `x0` and `y0` and samples the uniqueness conditions for the sequential
/// driver: bounded cross distances, the contraction across orbits, and agreement of limits.
pub fn sequential_uniqueness_probe<D: DistanceSpace>(
    space: &D,
    f: &MapSpec<D::Point>,
    lam: &LambdaSequence<Elem<D::M>>,
    x0: D::Point,
    y0: D::Point,
    opts: &IterateOptions,
) -> Result<Vec<String>, EngineError> {
    let m = space.monoid();
    let tx = picard_iterate(space, f, x0, opts)?;
    let ty = picard_iterate(space, f, y0, opts)?;
    let mut out = Vec::new();
    let n = tx.points.len().min(ty.points.len());
    let mut bad = None;
    for k in 1..n {
        let d = space.distance(&tx.points[k], &ty.points[k]);
        let prev = space.distance(&tx.points[k - 1], &ty.points[k - 1]);
        if !m.leq(&d, &lam.apply(k, &prev)) {
            bad = Some(k);
            break;
        }
    }
    out.push(match bad {
        None => format!("cross-orbit contraction held for {} steps", n.saturating_sub(1)),
        Some(k) => format!("cross-orbit contraction failed at step {k}"),
    });
    let ix = spread_indices(tx.points.len(), BOUND_SAMPLE);
    let iy = spread_indices(ty.points.len(), BOUND_SAMPLE);
    let cross: Vec<_> = ix.iter().flat_map(|&i| iy.iter().map(move |&j| (i, j))).map(|(i, j)| space.distance(&tx.points[i], &ty.points[j])).collect();
    match is_bounded(&cross, m) {
        Some(beta) => {
            let null = is_null_trace(&lambda_product_trace(lam, &beta, opts.budget), space.ladder(), m)?.is_null();
            out.push(format!("cross-orbit distances bounded by {beta:?}; product trace null: {null}"));
        }
        None => out.push("cross-orbit distances have no constructible bound".into()),
    }
    let gap = space.distance(tx.last(), ty.last());
    out.push(format!("distance between orbit limits {gap:?}; below bottom rung: {}", space.below_bottom(&gap)));
    Ok(out)
}

/// Iterates the monotone driver from `x̄ ∨ ȳ` and compares its limit with both fixed points.
#[allow(clippy::too_many_arguments)]
pub fn monotone_uniqueness_probe<D: DistanceSpace>(
    space: &D,
    f: &MapSpec<D::Point>,
    lam: &LambdaSequence<Elem<D::M>>,
    mode: SequentialMode,
    join: impl Fn(&D::Point, &D::Point) -> D::Point,
    xbar: &D::Point,
    ybar: &D::Point,
    opts: &IterateOptions,
) -> Result<Vec<String>, EngineError> {
    let z = join(xbar, ybar);
    let rep = solve_monotone(space, f, lam, z, mode, opts)?;
    let Some(limit) = rep.fixed_point else {
        return Ok(vec![format!("orbit from the join not certified: {}", rep.status.label())]);
    };
    let (dx, dy) = (space.distance(xbar, &limit), space.distance(ybar, &limit));
    let same = space.below_bottom(&dx) && space.below_bottom(&dy);
    Ok(vec![format!("limit from the join is within the bottom rung of both fixed points: {same}")])
}
