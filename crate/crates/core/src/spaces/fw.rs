//! Sampling-based falsifiers for the Fréchet–Wilson family of triangle substitutes.
//!
//! They are one-sided: a returned [`Counterexample`] is a concrete violation under the
//! space's ladder; `None` only means none was found.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use super::{DistanceSpace, OmegaPoint, SpaceError};
use crate::monoid::{is_null_trace, Decision, Elem, MTrace, Monoid, TestLadder};
use crate::rng::{stream, streams, DetRng};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FwLevel {
    Weak,
    Standard,
    Strong,
}

impl FwLevel {
    pub fn name(self) -> &'static str {
        match self {
            FwLevel::Weak => "weak",
            FwLevel::Standard => "standard",
            FwLevel::Strong => "strong",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "weak" => Some(FwLevel::Weak),
            "standard" => Some(FwLevel::Standard),
            "strong" => Some(FwLevel::Strong),
            _ => None,
        }
    }
}

/// Three sequences of equal length. At the weak level only `z[0]` is used.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePattern<P> {
    pub x: Vec<P>,
    pub y: Vec<P>,
    pub z: Vec<P>,
}

/// Generates candidate chains and sequence patterns.
pub trait ChainSampler<P>: Sync {
    fn chain(&self, rng: &mut DetRng, len: usize) -> Vec<P>;
    fn pattern(&self, rng: &mut DetRng, len: usize, level: FwLevel) -> SequencePattern<P>;
}

/// A concrete violation, serializable as a plain-text record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub level: FwLevel,
    pub trial: usize,
    pub points: Vec<String>,
    pub distances: Vec<String>,
    pub rung_index: usize,
    pub rung: String,
    pub detail: String,
}

impl Counterexample {
    pub fn to_record(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: frechet_wilson_counterexample")?;
        writeln!(f, "level: {}", self.level.name())?;
        writeln!(f, "trial: {}", self.trial)?;
        writeln!(f, "rung_index: {}", self.rung_index)?;
        writeln!(f, "rung: {}", self.rung)?;
        writeln!(f, "detail: {}", self.detail)?;
        writeln!(f, "points: {}", self.points.join(" ; "))?;
        writeln!(f, "distances: {}", self.distances.join(" ; "))
    }
}

const CHUNK: usize = 512;
const MAX_CHAIN: usize = 128;
const PATTERN_LEN: usize = 64;

/// Searches `trials` sampled chains or sequence patterns for a violation.
///
/// Strong level: a chain whose consecutive distances sum below the bottom rung while the
/// endpoint distance is not below some rung; the coarsest violated rung is reported. Every
/// prefix of each sampled chain is examined.
///
/// Weak and standard levels: premise traces null under the full ladder (below the bottom rung
/// within budget), conclusion not even eventually below the top rung.
///
/// Trials run in parallel chunks with independent streams of `seed`; the earliest chunk with a
/// violation wins, so the result does not depend on scheduling.
pub fn falsify_frechet_wilson<D, C>(
    space: &D,
    level: FwLevel,
    sampler: &C,
    trials: usize,
    seed: u64,
) -> Result<Option<Counterexample>, SpaceError>
where
    D: DistanceSpace,
    C: ChainSampler<D::Point> + ?Sized,
{
    let ladder = space.ladder();
    if level != FwLevel::Strong && ladder.len() < 2 {
        return Err(SpaceError::NoCoarseRung);
    }
    let top = TestLadder::new(space.monoid(), vec![ladder.top().clone()])?;
    let chunks = trials.div_ceil(CHUNK);
    let found = (0..chunks).into_par_iter().find_map_first(|c| {
        let mut rng = stream(seed, streams::FALSIFIER_BASE + c as u64);
        let count = CHUNK.min(trials - c * CHUNK);
        (0..count).find_map(|i| {
            let trial = c * CHUNK + i;
            match level {
                FwLevel::Strong => {
                    let len = rng.gen_range(2..=MAX_CHAIN);
                    strong_trial(space, &sampler.chain(&mut rng, len), trial)
                }
                _ => pattern_trial(space, &top, &sampler.pattern(&mut rng, PATTERN_LEN, level), level, trial),
            }
        })
    });
    Ok(found)
}

fn strong_trial<D: DistanceSpace>(space: &D, chain: &[D::Point], trial: usize) -> Option<Counterexample> {
    let m = space.monoid();
    let ladder = space.ladder();
    let mut sum = m.identity();
    let mut steps = Vec::new();
    for k in 1..chain.len() {
        let step = space.distance(&chain[k - 1], &chain[k]);
        sum = m.combine(&sum, &step);
        steps.push(step);
        if !ladder.below_bottom(m, &sum) {
            return None;
        }
        let end = space.distance(&chain[0], &chain[k]);
        if let Some(i) = ladder.first_rung_not_above(m, &end) {
            return Some(Counterexample {
                level: FwLevel::Strong,
                trial,
                points: chain[..=k].iter().map(|p| format!("{p:?}")).collect(),
                distances: steps.iter().map(|d| format!("{d:?}")).collect(),
                rung_index: i,
                rung: format!("{:?}", ladder.rung(i)),
                detail: format!(
                    "sum of consecutive distances {sum:?} < bottom rung {:?} but d(x_1, x_{}) = {end:?} is not below rung {i}",
                    ladder.bottom(),
                    k + 1
                ),
            });
        }
    }
    None
}

fn pattern_trial<D: DistanceSpace>(
    space: &D,
    top: &TestLadder<Elem<D::M>>,
    pat: &SequencePattern<D::Point>,
    level: FwLevel,
    trial: usize,
) -> Option<Counterexample> {
    let n = pat.x.len().min(pat.y.len()).min(pat.z.len());
    if n == 0 {
        return None;
    }
    let z = |k: usize| if level == FwLevel::Weak { &pat.z[0] } else { &pat.z[k] };
    let trace = |f: &dyn Fn(usize) -> Elem<D::M>| MTrace::new((0..n).map(f).collect());
    let (p1, p2, concl) = match level {
        FwLevel::Weak => (
            trace(&|k| space.distance(&pat.x[k], &pat.y[k])),
            trace(&|k| space.distance(&pat.y[k], z(k))),
            trace(&|k| space.distance(&pat.x[k], z(k))),
        ),
        _ => (
            trace(&|k| space.distance(&pat.x[k], z(k))),
            trace(&|k| space.distance(z(k), &pat.y[k])),
            trace(&|k| space.distance(&pat.x[k], &pat.y[k])),
        ),
    };
    let (m, ladder) = (space.monoid(), space.ladder());
    let null = |t: &MTrace<Elem<D::M>>, l: &TestLadder<Elem<D::M>>| is_null_trace(t, l, m).ok();
    if null(&p1, ladder) != Some(Decision::Null) || null(&p2, ladder) != Some(Decision::Null) {
        return None;
    }
    if null(&concl, top) != Some(Decision::NotNullWithin) {
        return None;
    }
    let show = |v: &[D::Point]| v.iter().map(|p| format!("{p:?}")).collect::<Vec<_>>().join(",");
    let (names, detail) = match level {
        FwLevel::Weak => (
            ["x", "y", "z"],
            "d(x_n, y_n) and d(y_n, z) are null but d(x_n, z) stays above the top rung",
        ),
        _ => (
            ["x", "y", "z"],
            "d(x_n, z_n) and d(z_n, y_n) are null but d(x_n, y_n) stays above the top rung",
        ),
    };
    let zs: Vec<D::Point> = if level == FwLevel::Weak { vec![pat.z[0].clone()] } else { pat.z[..n].to_vec() };
    Some(Counterexample {
        level,
        trial,
        points: vec![
            format!("{}=[{}]", names[0], show(&pat.x[..n])),
            format!("{}=[{}]", names[1], show(&pat.y[..n])),
            format!("{}=[{}]", names[2], show(&zs)),
        ],
        distances: concl.elements.iter().map(|d| format!("{d:?}")).collect(),
        rung_index: 0,
        rung: format!("{:?}", top.top()),
        detail: detail.into(),
    })
}

/// Chains and patterns on the real line built from dyadic numbers, so every distance the
/// built-in real spaces compute is exact.
#[derive(Debug, Clone, Copy, Default)]
pub struct RealChains {
    /// Keep points in `[0, ∞)`.
    pub nonneg: bool,
}

impl RealChains {
    fn fix<S: Scalar>(&self, v: S) -> S {
        if self.nonneg {
            v.abs()
        } else {
            v
        }
    }

    /// A null-looking offset sequence `s·c·2^{-⌊k/r⌋}`, or a constant one with small probability.
    fn offsets<S: Scalar>(&self, rng: &mut DetRng, len: usize) -> Vec<S> {
        let c = S::ratio(rng.gen_range(1..=64), 16);
        let c = if rng.gen_bool(0.5) { -c } else { c };
        let rate = [1usize, 2, 4, 8][rng.gen_range(0..4)];
        let constant = rng.gen_bool(0.1);
        (0..len)
            .map(|k| if constant { c.clone() } else { c.clone() * S::dyadic((k / rate).min(40) as u32) })
            .collect()
    }
}

impl<S: Scalar> ChainSampler<S> for RealChains {
    fn chain(&self, rng: &mut DetRng, len: usize) -> Vec<S> {
        let start = if self.nonneg { rng.gen_range(0..=32768) } else { rng.gen_range(-32768..=32768) };
        let scale = 1i64 << rng.gen_range(0..=8);
        let monotone = rng.gen_bool(0.5);
        let dir = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut k: i64 = start;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.fix(S::ratio(k, 4096)));
            let step = rng.gen_range(0..=scale);
            k += if monotone { dir * step } else if rng.gen_bool(0.5) { step } else { -step };
        }
        out
    }

    fn pattern(&self, rng: &mut DetRng, len: usize, _level: FwLevel) -> SequencePattern<S> {
        let z0: S = S::ratio(rng.gen_range(-2048..=2048), 256);
        let drift = rng.gen_bool(0.5);
        let z: Vec<S> = (0..len)
            .map(|k| {
                let shift = if drift { S::ratio(k as i64, 16) } else { S::zero() };
                self.fix(z0.clone() + shift)
            })
            .collect();
        let a: Vec<S> = self.offsets(rng, len);
        let b: Vec<S> = self.offsets(rng, len);
        let y: Vec<S> = z.iter().zip(&a).map(|(z, a)| self.fix(z.clone() + a.clone())).collect();
        let x: Vec<S> = y.iter().zip(&b).map(|(y, b)| self.fix(y.clone() + b.clone())).collect();
        SequencePattern { x, y, z }
    }
}

/// Coordinatewise chains for product carriers `P^d`.
#[derive(Debug, Clone, Copy)]
pub struct VecChains<C> {
    pub inner: C,
    pub dim: usize,
}

fn transpose<P: Clone>(cols: Vec<Vec<P>>, len: usize) -> Vec<Vec<P>> {
    (0..len).map(|k| cols.iter().map(|c| c[k].clone()).collect()).collect()
}

impl<P: Clone, C: ChainSampler<P>> ChainSampler<Vec<P>> for VecChains<C> {
    fn chain(&self, rng: &mut DetRng, len: usize) -> Vec<Vec<P>> {
        let cols = (0..self.dim).map(|_| self.inner.chain(rng, len)).collect();
        transpose(cols, len)
    }

    fn pattern(&self, rng: &mut DetRng, len: usize, level: FwLevel) -> SequencePattern<Vec<P>> {
        let pats: Vec<SequencePattern<P>> = (0..self.dim).map(|_| self.inner.pattern(rng, len, level)).collect();
        SequencePattern {
            x: transpose(pats.iter().map(|p| p.x.clone()).collect(), len),
            y: transpose(pats.iter().map(|p| p.y.clone()).collect(), len),
            z: transpose(pats.iter().map(|p| p.z.clone()).collect(), len),
        }
    }
}

/// Chains and patterns over `ℕ ∪ Ω ∪ {∞}`.
#[derive(Debug, Clone, Copy)]
pub struct OmegaChains {
    pub n_max: u32,
}

impl OmegaChains {
    fn point(&self, rng: &mut DetRng) -> OmegaPoint {
        let k = rng.gen_range(1..=self.n_max.max(1));
        match rng.gen_range(0..3) {
            0 => OmegaPoint::Nat(k),
            1 => OmegaPoint::Omega(k),
            _ => OmegaPoint::Infinity,
        }
    }

    fn sequence(&self, rng: &mut DetRng, len: usize, constant_ok: bool) -> Vec<OmegaPoint> {
        let off = rng.gen_range(0..=8u32);
        let cap = self.n_max.max(1);
        let idx = move |k: usize| (k as u32 + 1 + off).min(cap);
        let shape = rng.gen_range(0..if constant_ok { 5 } else { 4 });
        let fixed = self.point(rng);
        (0..len)
            .map(|k| match shape {
                0 => OmegaPoint::Nat(idx(k)),
                1 => OmegaPoint::Nat(idx(k + 1)),
                2 => OmegaPoint::Omega(idx(k)),
                3 => OmegaPoint::Infinity,
                _ => fixed,
            })
            .collect()
    }
}

impl ChainSampler<OmegaPoint> for OmegaChains {
    fn chain(&self, rng: &mut DetRng, len: usize) -> Vec<OmegaPoint> {
        (0..len).map(|_| self.point(rng)).collect()
    }

    fn pattern(&self, rng: &mut DetRng, len: usize, _level: FwLevel) -> SequencePattern<OmegaPoint> {
        SequencePattern {
            x: self.sequence(rng, len, true),
            y: self.sequence(rng, len, true),
            z: self.sequence(rng, len, true),
        }
    }
}

/// Uniformly random chains and patterns over a finite index set `0..n`.
#[derive(Debug, Clone, Copy)]
pub struct IndexChains {
    pub n: usize,
}

impl ChainSampler<usize> for IndexChains {
    fn chain(&self, rng: &mut DetRng, len: usize) -> Vec<usize> {
        (0..len).map(|_| rng.gen_range(0..self.n)).collect()
    }

    fn pattern(&self, rng: &mut DetRng, len: usize, _level: FwLevel) -> SequencePattern<usize> {
        // Eventually constant sequences are the only candidates for null premises here.
        let seq = |rng: &mut DetRng| {
            let (a, b, switch) = (rng.gen_range(0..self.n), rng.gen_range(0..self.n), rng.gen_range(0..len));
            (0..len).map(|k| if k < switch { a } else { b }).collect::<Vec<_>>()
        };
        SequencePattern { x: seq(rng), y: seq(rng), z: seq(rng) }
    }
}

