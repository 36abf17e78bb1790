//! Spaces addressable by name, and the combined axiom / triangle / Fréchet–Wilson check
//! behind the `check-space` command.
//!
//! Names: `real_abs`, `snowflake`, `squared`, `dislocated_max`, `omega_counterexample{N}`,
//! `product{MODE,F1,F2,…}` with `MODE` one of `sigma`, `vee`, `coord` and real-line factors,
//! `gauge{D}` or `gauge{D,K}` (the first `K` coordinate pseudometrics on `ℝ^D`), and
//! `uniform_pseudometric{N}` (ultrametric layout) or `uniform_pseudometric{N,line}`
//! (equally spaced points on `[0, 1]`).

use rand::Rng;

use super::fw::{IndexChains, OmegaChains, RealChains, VecChains};
use super::{
    all_triples, check_triangle, falsify_frechet_wilson, make_uniform_from_pseudometric, random_triples, validate_space,
    ChainSampler, CoordinateProduct, Counterexample, DistanceSpace, FnSpace, FwLevel, GaugeSpace, OmegaSpace, RealDistance,
    RealLine, SpaceError, SpaceKind, SumMode, SumProduct, UniformSpace,
};
use crate::monoid::{split_args, split_call};
use crate::monoid::{RealNonneg, TestLadder};
use crate::report::ValidationReport;
use crate::rng::{stream, streams, DetRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceCheckOptions {
    pub axioms: bool,
    pub fw: Option<FwLevel>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FwResult {
    NotFalsified { trials: usize },
    Falsified(Counterexample),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceCheckResult {
    pub space: String,
    pub kind: SpaceKind,
    /// Axioms of the declared kind; decides the exit status.
    pub axioms: Option<ValidationReport>,
    /// Informational: many built-in spaces are deliberately not metric.
    pub triangle: Option<ValidationReport>,
    pub fw: Option<(FwLevel, FwResult)>,
}

impl SpaceCheckResult {
    /// No axiom failure and no counterexample.
    pub fn is_success(&self) -> bool {
        self.axioms.as_ref().is_none_or(|r| r.is_pass()) && !matches!(self.fw, Some((_, FwResult::Falsified(_))))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.fw {
            Some((_, FwResult::Falsified(c))) => Some(c),
            _ => None,
        }
    }
}

/// The real-line distance named `name`, if any.
pub fn real_distance(name: &str) -> Option<RealDistance> {
    match name.trim() {
        "real_abs" => Some(RealDistance::Abs),
        "snowflake" => Some(RealDistance::Snowflake),
        "squared" => Some(RealDistance::Squared),
        "dislocated_max" => Some(RealDistance::DislocatedMax),
        _ => None,
    }
}

/// Ultrametric on `n` points: `ρ(i, j) = f(max(i, j))` with `f` non-decreasing through
/// `1/8, 1/4, 1/2, 1`, so every sublevel relation is an equivalence relation.
pub fn ultrametric_layout(n: usize) -> impl Fn(&usize, &usize) -> f64 {
    move |&i, &j| {
        if i == j {
            return 0.0;
        }
        let level = (4 * (i.max(j) - 1)) / (n - 1).max(1);
        [0.125, 0.25, 0.5, 1.0][level.min(3)]
    }
}

pub const UNIFORM_THRESHOLDS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

pub fn uniform_catalog(n: usize, line: bool) -> Result<UniformSpace, SpaceError> {
    let pts: Vec<usize> = (0..n).collect();
    if line {
        let h = 1.0 / (n.max(2) - 1) as f64;
        make_uniform_from_pseudometric(&pts, |&i, &j| (i as f64 - j as f64).abs() * h, &UNIFORM_THRESHOLDS)
    } else {
        make_uniform_from_pseudometric(&pts, ultrametric_layout(n), &UNIFORM_THRESHOLDS)
    }
}

/// Coordinate pseudometrics `|x_i - y_i|`, `i < k`, on `ℝ^d`.
pub fn coordinate_gauge(d: usize, k: usize, samples: &[Vec<f64>]) -> Result<GaugeSpace<FnSpace<Vec<f64>, RealNonneg<f64>>>, SpaceError> {
    let monoid = RealNonneg::new();
    let ladder = TestLadder::new(&monoid, super::dyadic_rungs(5))?;
    let factors = (0..k.min(d))
        .map(|i| {
            FnSpace::new(format!("coord{i}"), monoid, ladder.clone(), SpaceKind::Pseudo, move |x: &Vec<f64>, y: &Vec<f64>| {
                (x[i] - y[i]).abs()
            })
        })
        .collect();
    GaugeSpace::new(factors, samples)
}

fn bad(name: &str) -> SpaceError {
    SpaceError::UnknownName(name.to_string())
}

fn parse_num<T: std::str::FromStr>(name: &str, s: Option<&str>) -> Result<T, SpaceError> {
    s.and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad(name))
}

const SAMPLE_POINTS: usize = 256;

fn run<D, C>(
    space: &D,
    sampler: &C,
    sample: impl Fn(&mut DetRng) -> D::Point,
    exhaustive: Option<Vec<D::Point>>,
    opts: &SpaceCheckOptions,
) -> Result<SpaceCheckResult, SpaceError>
where
    D: DistanceSpace,
    C: ChainSampler<D::Point>,
{
    let mut axioms = None;
    let mut triangle = None;
    if opts.axioms {
        let mut rng = stream(opts.seed, streams::SPACE_SAMPLES);
        let points: Vec<D::Point> = match &exhaustive {
            Some(p) => p.clone(),
            None => (0..SAMPLE_POINTS).map(|_| sample(&mut rng)).collect(),
        };
        let mut trial_rng = stream(opts.seed, streams::SPACE_TRIALS);
        let mut report = validate_space(space, &points, opts.trials, &mut trial_rng)?;
        report.merge(crate::monoid::validate_ladder(space.monoid(), space.ladder()));
        axioms = Some(report);
        let triples = match &exhaustive {
            Some(p) => all_triples(p),
            None => random_triples(&points, opts.trials, &mut trial_rng),
        };
        triangle = Some(check_triangle(space, &triples));
    }
    let fw = match opts.fw {
        Some(level) => {
            let found = falsify_frechet_wilson(space, level, sampler, opts.trials, opts.seed)?;
            Some((level, found.map_or(FwResult::NotFalsified { trials: opts.trials }, FwResult::Falsified)))
        }
        None => None,
    };
    Ok(SpaceCheckResult { space: space.describe(), kind: space.kind(), axioms, triangle, fw })
}

fn real_point(nonneg: bool) -> impl Fn(&mut DetRng) -> f64 {
    move |rng| {
        let lo = if nonneg { 0 } else { -2048 };
        rng.gen_range(lo..=2048) as f64 / 256.0
    }
}

/// Parses `name` and runs the requested checks.
pub fn check_named_space(name: &str, opts: &SpaceCheckOptions) -> Result<SpaceCheckResult, SpaceError> {
    let (head, arg) = split_call(name).map_err(|_| bad(name))?;
    if let Some(v) = real_distance(head).filter(|_| arg.is_none()) {
        let space = RealLine::<f64>::new(v);
        let nonneg = v == RealDistance::DislocatedMax;
        return run(&space, &RealChains { nonneg }, real_point(nonneg), None, opts);
    }
    match head {
        "omega_counterexample" => {
            let n: u32 = parse_num(name, arg)?;
            if n == 0 {
                return Err(bad(name));
            }
            let space = OmegaSpace::new(n);
            let mut pts: Vec<_> = (1..=n).flat_map(|k| [super::OmegaPoint::Nat(k), super::OmegaPoint::Omega(k)]).collect();
            pts.push(super::OmegaPoint::Infinity);
            let exhaustive = (pts.len() <= 41).then_some(pts);
            let sp = space.clone();
            run(&space, &OmegaChains { n_max: n }, move |rng| super::PointSampler::sample_point(&sp, rng), exhaustive, opts)
        }
        "uniform_pseudometric" => {
            let args = split_args(arg.ok_or_else(|| bad(name))?);
            let n: usize = parse_num(name, args.first().copied())?;
            let line = match args.get(1).map(|s| s.trim()) {
                None | Some("ultra") => false,
                Some("line") => true,
                _ => return Err(bad(name)),
            };
            if n == 0 || args.len() > 2 {
                return Err(bad(name));
            }
            let space = uniform_catalog(n, line)?;
            run(&space, &IndexChains { n }, move |rng| rng.gen_range(0..n), Some((0..n).collect()), opts)
        }
        "gauge" => {
            let args = split_args(arg.ok_or_else(|| bad(name))?);
            let d: usize = parse_num(name, args.first().copied())?;
            let k: usize = match args.get(1) {
                Some(s) => parse_num(name, Some(s))?,
                None => d,
            };
            if d == 0 || k == 0 || k > d || args.len() > 2 {
                return Err(bad(name));
            }
            let point = move |rng: &mut DetRng| (0..d).map(|_| rng.gen_range(-8..=8) as f64 / 4.0).collect::<Vec<f64>>();
            let mut rng = stream(opts.seed, streams::SPACE_SAMPLES);
            let samples: Vec<Vec<f64>> = (0..SAMPLE_POINTS).map(|_| point(&mut rng)).collect();
            let space = coordinate_gauge(d, k, &samples)?;
            run(&space, &VecChains { inner: RealChains::default(), dim: d }, point, None, opts)
        }
        "product" => {
            let args = split_args(arg.ok_or_else(|| bad(name))?);
            let (mode, factors) = args.split_first().ok_or_else(|| bad(name))?;
            let factors: Vec<RealLine<f64>> = factors
                .iter()
                .map(|f| real_distance(f).map(RealLine::new).ok_or_else(|| bad(f)))
                .collect::<Result<_, _>>()?;
            if factors.is_empty() {
                return Err(SpaceError::NoFactors);
            }
            let nonneg = factors.iter().any(|f| f.variant() == RealDistance::DislocatedMax);
            let dim = factors.len();
            let sampler = VecChains { inner: RealChains { nonneg }, dim };
            let point = move |rng: &mut DetRng| (0..dim).map(|_| real_point(nonneg)(rng)).collect::<Vec<f64>>();
            match mode.trim() {
                "sigma" => run(&SumProduct::new(factors, SumMode::Sigma)?, &sampler, point, None, opts),
                "vee" => run(&SumProduct::new(factors, SumMode::Vee)?, &sampler, point, None, opts),
                "coord" => run(&CoordinateProduct::new(factors)?, &sampler, point, None, opts),
                _ => Err(bad(name)),
            }
        }
        _ => Err(bad(name)),
    }
}
