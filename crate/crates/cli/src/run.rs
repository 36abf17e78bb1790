//! Subcommand bodies. Each returns whether the run succeeded; artifacts are written either way.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mdist::engine::{
    solve_caristi, solve_meir_keeler, solve_monotone, solve_sequential, write_trace_csv, IterateOptions, LambdaSequence,
    SequentialMode, SolveReport, Status,
};
use mdist::fredholm::{solve_fredholm, FredholmError, FredholmSolution, Grid};
use mdist::multifix::coupled_fixed_point;
use mdist::repr::Repr;
use mdist::spaces::catalog::{check_named_space, FwResult, SpaceCheckOptions};
use mdist::spaces::{dyadic_rungs, FwLevel, RealDistance, RealLine};

use crate::config::{CoupledProblem, FredholmProblem};
use crate::error::CliError;
use crate::maps::{self, NamedMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Failure,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::Failure
        }
    }
}

/// Output directory; created on first write.
pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::create_dir_all(&self.dir).map_err(|source| CliError::Write { path: self.dir.clone(), source })?;
        fs::write(&path, contents).map_err(|source| CliError::Write { path: path.clone(), source })?;
        Ok(path)
    }

    fn write_with(&self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<(), String>) -> Result<PathBuf, CliError> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::Write { path: self.dir.join(name), source: std::io::Error::other(e) })?;
        self.write(name, buf)
    }
}

/// Machine-readable record for a non-certified solve.
pub fn status_record<X, E>(report: &SolveReport<X, E>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "driver: {}", report.driver);
    match &report.status {
        Status::Certified => {
            let _ = writeln!(s, "kind: certified");
        }
        Status::HypothesisViolated { step, which, witness } => {
            let _ = writeln!(s, "kind: hypothesis_violation\nstep: {step}\nhypothesis: {which}\nwitness: {witness}");
        }
        Status::BudgetExhausted { detail } => {
            let _ = writeln!(s, "kind: budget_exhausted\ndetail: {detail}");
        }
    }
    let _ = writeln!(s, "iterations: {}", report.iterations);
    s
}

fn finish_solve<X: Repr, E: Repr>(out: &Artifacts, report: &SolveReport<X, E>) -> Result<Outcome, CliError> {
    out.write("report.txt", report.to_text())?;
    out.write_with("trace.csv", |b| write_trace_csv(&report.trace, b).map_err(|e| e.to_string()))?;
    if !report.is_certified() {
        out.write("violation.txt", status_record(report))?;
    }
    Ok(Outcome::from_bool(report.is_certified()))
}

pub fn fine_line() -> RealLine<f64> {
    RealLine::new(RealDistance::Abs).with_ladder(dyadic_rungs(21)).expect("dyadic rungs are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Driver {
    MeirKeeler,
    Caristi,
    Sequential,
    Monotone,
}

pub const MK_PAIRS: usize = 4_096;

pub fn solve_named_map(map: &NamedMap, driver: Driver, x0: f64, seed: u64, opts: &IterateOptions) -> Result<SolveReport<f64, f64>, CliError> {
    let space = fine_line();
    let f = map.spec();
    let lam = map.lambda(x0);
    let r = match driver {
        Driver::MeirKeeler => solve_meir_keeler(&space, &f, &map.meir_keeler(), x0, &maps::sample_pairs(seed, MK_PAIRS), opts),
        Driver::Caristi => solve_caristi(&space, &f, &map.caristi(), x0, opts),
        Driver::Sequential => solve_sequential(&space, &f, &lam, x0, SequentialMode::Series, opts),
        Driver::Monotone => solve_monotone(&space, &f, &lam, x0, SequentialMode::Series, opts),
    };
    r.map_err(CliError::library)
}

pub fn solve_map(out: &Artifacts, map: &str, driver: Driver, x0: f64, seed: u64, budget: usize) -> Result<Outcome, CliError> {
    if !x0.is_finite() {
        return Err(CliError::field("--x0", "must be finite"));
    }
    let map = maps::lookup(map)?;
    let report = solve_named_map(&map, driver, x0, seed, &IterateOptions::with_budget(budget))?;
    finish_solve(out, &report)
}

fn write_fredholm(out: &Artifacts, grid: &Grid, s: &FredholmSolution) -> Result<(), CliError> {
    let mut text = s.report.to_text();
    let _ = writeln!(text, "residual_sup: {:e}", s.residual);
    text.push_str(&s.certificate.to_text());
    out.write("report.txt", text)?;
    out.write_with("solution.csv", |b| s.write_solution_csv(grid, b).map_err(|e| e.to_string()))?;
    out.write_with("certificate.csv", |b| s.certificate.write_csv(b).map_err(|e| e.to_string()))?;
    if !s.report.is_certified() {
        out.write("violation.txt", status_record(&s.report))?;
    }
    Ok(())
}

pub fn solve_fredholm_problem(out: &Artifacts, p: &FredholmProblem) -> Result<(Outcome, Option<FredholmSolution>), CliError> {
    match solve_fredholm(&p.kernel, &p.grid, &p.options) {
        Ok(s) => {
            write_fredholm(out, &p.grid, &s)?;
            Ok((Outcome::from_bool(s.report.is_certified()), Some(s)))
        }
        Err(FredholmError::Refused(cert)) => {
            let mut record = String::from("driver: fredholm\nkind: certificate_refused\n");
            record.push_str(&cert.to_text());
            out.write("report.txt", &record)?;
            out.write("violation.txt", &record)?;
            out.write_with("certificate.csv", |b| cert.write_csv(b).map_err(|e| e.to_string()))?;
            Ok((Outcome::Failure, None))
        }
        Err(e) => Err(CliError::library(e)),
    }
}

/// Lipschitz bound of `f(u, v) = a·u − b·v + c` lifted through the swap, inflated against
/// round-off, with an absolute floor scaled to the orbit.
fn coupled_lambda(a: f64, b: f64, scale: f64) -> LambdaSequence<Vec<f64>> {
    let k = 1.0 + 1e-9;
    let floor = 16.0 * f64::EPSILON * (1.0 + scale);
    LambdaSequence::constant(format!("[[{a},{b}],[{b},{a}]]"), move |d: &Vec<f64>| {
        vec![k * (a * d[0] + b * d[1]) + floor, k * (b * d[0] + a * d[1]) + floor]
    })
}

pub fn solve_coupled_problem(out: &Artifacts, p: &CoupledProblem) -> Result<(Outcome, SolveReport<Vec<f64>, Vec<f64>>), CliError> {
    let space = RealLine::new(RealDistance::Abs).with_ladder(p.rungs.clone()).map_err(|e| CliError::field("ladder", e.to_string()))?;
    let (a, b, c) = (p.map.a, p.map.b, p.map.c);
    let (x0, y0) = (p.start.x0, p.start.y0);
    let scale = x0.abs().max(y0.abs()) + if a + b < 1.0 { c.abs() / (1.0 - a - b) } else { 0.0 };
    let lam = coupled_lambda(a, b, scale);
    let report = coupled_fixed_point(&space, move |u: &f64, v: &f64| a * u - b * v + c, |u: &f64, v: &f64| u <= v, x0, y0, &lam, &p.iterate)
        .map_err(CliError::library)?;
    let outcome = finish_solve(out, &report)?;
    Ok((outcome, report))
}

pub struct CheckSpaceArgs {
    pub name: String,
    pub axioms: bool,
    pub fw: Option<FwLevel>,
    pub trials: usize,
    pub seed: u64,
}

pub fn check_space(out: &Artifacts, args: &CheckSpaceArgs) -> Result<Outcome, CliError> {
    let axioms = args.axioms || args.fw.is_none();
    let opts = SpaceCheckOptions { axioms, fw: args.fw, trials: args.trials, seed: args.seed };
    let r = check_named_space(&args.name, &opts).map_err(|e| match e {
        mdist::spaces::SpaceError::UnknownName(n) => CliError::Unknown {
            what: "space",
            name: n,
            expected: "real_abs, snowflake, squared, dislocated_max, omega_counterexample{N}, product{MODE,...}, gauge{D[,K]}, uniform_pseudometric{N[,line]}".into(),
        },
        other => CliError::library(other),
    })?;
    let mut text = String::new();
    let _ = writeln!(text, "space: {}", r.space);
    let _ = writeln!(text, "kind: {}", r.kind.name());
    let _ = writeln!(text, "seed: {}", args.seed);
    let _ = writeln!(text, "trials: {}", args.trials);
    if let Some(a) = &r.axioms {
        let _ = writeln!(text, "\n[axioms]\n{a}");
    }
    if let Some(t) = &r.triangle {
        let _ = writeln!(text, "\n[triangle, informational]\n{t}");
    }
    match &r.fw {
        Some((level, FwResult::NotFalsified { trials })) => {
            let _ = writeln!(text, "\n[frechet-wilson]\nlevel: {}\nresult: NOT FALSIFIED over {trials} trials", level.name());
        }
        Some((level, FwResult::Falsified(c))) => {
            let _ = writeln!(text, "\n[frechet-wilson]\nlevel: {}\nresult: FALSIFIED\n{c}", level.name());
        }
        None => {}
    }
    out.write("report.txt", &text)?;
    if let Some(c) = r.counterexample() {
        out.write("counterexample.txt", c.to_record())?;
    }
    if let Some(a) = r.axioms.as_ref().filter(|a| !a.is_pass()) {
        let mut rec = format!("kind: axiom_violation\nsubject: {}\n", a.subject);
        for f in a.failures() {
            if let mdist::Outcome::Fail { witness } = &f.outcome {
                let _ = writeln!(rec, "axiom: {}\nwitness: {witness}", f.axiom);
            }
        }
        out.write("violation.txt", rec)?;
    }
    Ok(Outcome::from_bool(r.is_success()))
}
