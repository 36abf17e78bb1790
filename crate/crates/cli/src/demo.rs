//! Built-in demonstrations. Each writes a report and CSV data and succeeds when the computed
//! flags match the analytically known answer.

use std::fmt::Write as _;

use mdist::engine::{lambda_product_trace, IterateOptions, LambdaSequence};
use mdist::fredholm::{FredholmOptions, Grid, KernelSpec};
use mdist::monoid::{cauchy_series_check, is_null_trace, Decision, RealNonneg, TestLadder};
use mdist::spaces::{converges_to, dyadic_rungs, interleaved_sequence, is_cauchy_sequence, is_cw_sequence, DistanceSpace, OmegaPoint, OmegaSpace, PointTrace};

use crate::config::{CoupledMap, CoupledProblem, CoupledStart, FredholmProblem};
use crate::error::CliError;
use crate::maps;
use crate::run::{solve_coupled_problem, solve_fredholm_problem, solve_named_map, Artifacts, Driver, Outcome};

pub const NAMES: &str = "omega_counterexample, fredholm_ts, fredholm_constant, coupled, driver_agreement, lambda_sequences";

/// Length of the interleaved sequence and of the omega space.
pub const OMEGA_LEN: usize = 200;

pub fn run(name: &str, out: &Artifacts, seed: u64, budget: Option<usize>) -> Result<Outcome, CliError> {
    match name {
        "omega_counterexample" => omega(out),
        "fredholm_ts" => fredholm(out, KernelSpec::product_ts(|t| t), 401, seed, budget, |t| 1.5 * t, 1e-4),
        "fredholm_constant" => fredholm(out, KernelSpec::constant(0.5, |_| 1.0), 101, seed, budget, |_| 2.0, 1e-6),
        "coupled" => coupled(out, budget),
        "driver_agreement" => drivers(out, seed, budget),
        "lambda_sequences" => lambdas(out),
        _ => Err(CliError::Unknown { what: "demo", name: name.to_string(), expected: NAMES.to_string() }),
    }
}

fn flag(d: Decision) -> bool {
    d == Decision::Null
}

fn omega(out: &Artifacts) -> Result<Outcome, CliError> {
    let space = OmegaSpace::new(OMEGA_LEN as u32);
    let seq = interleaved_sequence(OMEGA_LEN);
    let trace = PointTrace::new(seq.clone());
    let lib = CliError::library;
    let cw = flag(is_cw_sequence(&space, &trace).map_err(lib)?);
    let cauchy = flag(is_cauchy_sequence(&space, &trace).map_err(lib)?);
    let conv = flag(converges_to(&space, &trace, &OmegaPoint::Infinity).map_err(lib)?);

    let mut csv = String::from("index,point,d_next,d_infinity\n");
    for (i, p) in seq.iter().enumerate() {
        let next = seq.get(i + 1).map_or(String::new(), |q| space.distance(p, q).to_string());
        let _ = writeln!(csv, "{i},{p},{next},{}", space.distance(p, &OmegaPoint::Infinity));
    }
    out.write("sequence.csv", csv)?;
    let ok = cw && !cauchy && conv;
    let report = format!(
        "demo: omega_counterexample\nspace: {}\nprefix: {OMEGA_LEN}\nCW: {cw}\nCauchy: {cauchy}\nconverges_to_infinity: {conv}\nverdict: {}\n",
        space.describe(),
        if ok { "PASS" } else { "FAIL" }
    );
    out.write("report.txt", report)?;
    Ok(Outcome::from_bool(ok))
}

fn fredholm(
    out: &Artifacts,
    kernel: KernelSpec,
    nodes: usize,
    seed: u64,
    budget: Option<usize>,
    exact: impl Fn(f64) -> f64,
    tol: f64,
) -> Result<Outcome, CliError> {
    let grid = Grid::trapezoid(0.0, 1.0, nodes).map_err(CliError::library)?;
    let mut options = FredholmOptions { seed, ..FredholmOptions::default() };
    if let Some(b) = budget {
        options.iterate = IterateOptions::with_budget(b);
    }
    let problem = FredholmProblem { grid, kernel, options };
    let (outcome, sol) = solve_fredholm_problem(out, &problem)?;
    let Some(sol) = sol else { return Ok(outcome) };
    let err = sol.solution.iter().zip(problem.grid.nodes()).map(|(x, &t)| (x - exact(t)).abs()).fold(0.0, f64::max);
    let ok = outcome == Outcome::Success && err <= tol;
    let mut text = std::fs::read_to_string(out.path("report.txt")).unwrap_or_default();
    let _ = writeln!(text, "analytic_sup_error: {err:e}\ntolerance: {tol:e}\nverdict: {}", if ok { "PASS" } else { "FAIL" });
    out.write("report.txt", text)?;
    Ok(Outcome::from_bool(ok))
}

fn coupled(out: &Artifacts, budget: Option<usize>) -> Result<Outcome, CliError> {
    let p = CoupledProblem {
        map: CoupledMap { a: 0.3, b: 0.2, c: 1.0 },
        start: CoupledStart { x0: 0.0, y0: 2.0 },
        rungs: dyadic_rungs(24),
        iterate: IterateOptions::with_budget(budget.unwrap_or(10_000)),
    };
    let (outcome, report) = solve_coupled_problem(out, &p)?;
    let exact = 10.0 / 9.0;
    let err = report.fixed_point.as_ref().map_or(f64::INFINITY, |x| x.iter().map(|v| (v - exact).abs()).fold(0.0, f64::max));
    let ok = outcome == Outcome::Success && err <= 1e-6;
    let mut text = report.to_text();
    let _ = writeln!(text, "oracle: (10/9, 10/9)\noracle_sup_error: {err:e}\nverdict: {}", if ok { "PASS" } else { "FAIL" });
    out.write("report.txt", text)?;
    Ok(Outcome::from_bool(ok))
}

fn drivers(out: &Artifacts, seed: u64, budget: Option<usize>) -> Result<Outcome, CliError> {
    let map = maps::lookup("halve")?;
    let opts = IterateOptions::with_budget(budget.unwrap_or(10_000));
    let bottom = 0.5f64.powi(20);
    let mut csv = String::from("driver,x0,status,fixed_point,residual,iterations\n");
    let mut ok = true;
    for (driver, x0) in [(Driver::MeirKeeler, 8.0), (Driver::Caristi, 8.0), (Driver::Sequential, 8.0), (Driver::Monotone, -8.0)] {
        let r = solve_named_map(&map, driver, x0, seed, &opts)?;
        let fp = r.fixed_point.map_or(String::new(), |x| x.to_string());
        ok &= r.is_certified() && r.fixed_point.is_some_and(|x| x.abs() <= bottom) && r.residual < bottom;
        let _ = writeln!(csv, "{},{x0},{},{fp},{},{}", r.driver, r.status.label(), r.residual, r.iterations);
    }
    out.write("drivers.csv", &csv)?;
    out.write("report.txt", format!("demo: driver_agreement\nmap: x/2\n{csv}verdict: {}\n", if ok { "PASS" } else { "FAIL" }))?;
    Ok(Outcome::from_bool(ok))
}

/// Trace length for the λ-sequence demo; the series check's budget is half of it.
pub const LAMBDA_TERMS: usize = 20_000;

fn lambdas(out: &Artifacts) -> Result<Outcome, CliError> {
    let m = RealNonneg::<f64>::new();
    let ladder = TestLadder::new(&m, dyadic_rungs(10)).map_err(CliError::library)?;
    let harmonic = LambdaSequence::new("n/(n+1)·t", |n, t: &f64| n as f64 / (n + 1) as f64 * t);
    let squared = LambdaSequence::new("(n/(n+1))²·t", |n, t: &f64| (n as f64 / (n + 1) as f64).powi(2) * t);
    let h = lambda_product_trace(&harmonic, &1.0, LAMBDA_TERMS);
    let s = lambda_product_trace(&squared, &1.0, LAMBDA_TERMS);
    let lib = CliError::library;
    let flags = [
        flag(is_null_trace(&h, &ladder, &m).map_err(lib)?),
        flag(cauchy_series_check(&h, &ladder, &m).map_err(lib)?),
        flag(is_null_trace(&s, &ladder, &m).map_err(lib)?),
        flag(cauchy_series_check(&s, &ladder, &m).map_err(lib)?),
    ];
    let mut csv = String::from("n,harmonic,squared\n");
    for (n, (a, b)) in h.elements.iter().zip(&s.elements).enumerate() {
        let _ = writeln!(csv, "{},{a},{b}", n + 1);
    }
    out.write("products.csv", csv)?;
    let ok = flags == [true, false, true, true];
    let report = format!(
        "demo: lambda_sequences\nterms: {LAMBDA_TERMS}\nbudget: {}\nharmonic_null: {}\nharmonic_series: {}\nsquared_null: {}\nsquared_series: {}\nverdict: {}\n",
        h.budget,
        flags[0],
        flags[1],
        flags[2],
        flags[3],
        if ok { "PASS" } else { "FAIL" }
    );
    out.write("report.txt", report)?;
    Ok(Outcome::from_bool(ok))
}
