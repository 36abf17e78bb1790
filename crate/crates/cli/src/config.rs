//! TOML problem files for `solve-fredholm` and `solve-coupled`.

use std::path::Path;

use mdist::engine::IterateOptions;
use mdist::fredholm::{FredholmOptions, Grid, KernelSpec};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    toml::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string().trim_end().to_string() })
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LadderConfig {
    /// Rung heights, strictly decreasing and positive.
    pub heights: Option<Vec<f64>>,
    /// Shorthand for heights `2^-1, …, 2^-levels`.
    pub levels: Option<u32>,
}

impl LadderConfig {
    /// Heights starting at `2^-first`.
    fn heights(&self, first: i32, default_levels: u32) -> Result<Vec<f64>, CliError> {
        match (&self.heights, self.levels) {
            (Some(_), Some(_)) => Err(CliError::field("ladder", "give either `heights` or `levels`, not both")),
            (Some(h), None) => {
                if h.is_empty() || h.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(CliError::field("ladder.heights", "must be a non-empty list of positive finite numbers"));
                }
                if h.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(CliError::field("ladder.heights", "must be strictly decreasing"));
                }
                Ok(h.clone())
            }
            (None, levels) => {
                let k = levels.unwrap_or(default_levels);
                if k == 0 || k > 60 {
                    return Err(CliError::field("ladder.levels", "must lie in 1..=60"));
                }
                Ok((0..k as i32).map(|i| 0.5f64.powi(first + i)).collect())
            }
        }
    }

    /// Constant-function rungs at `2^-1, …` (twenty levels unless configured).
    pub fn grid_heights(&self) -> Result<Vec<f64>, CliError> {
        self.heights(1, 20)
    }

    /// Real-line rungs at `2^0, …` (`levels` of them; 24 unless configured).
    pub fn line_rungs(&self) -> Result<Vec<f64>, CliError> {
        self.heights(0, 24)
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub budget: Option<usize>,
    pub window: Option<usize>,
    /// Terms in the convergence certificate.
    pub terms: Option<usize>,
    #[serde(default)]
    pub force: bool,
    pub majorant_trials: Option<usize>,
}

impl SolveConfig {
    fn iterate(&self, budget_flag: Option<usize>, default_budget: usize) -> Result<IterateOptions, CliError> {
        let budget = budget_flag.or(self.budget).unwrap_or(default_budget);
        if budget == 0 {
            return Err(CliError::field("solve.budget", "must be positive"));
        }
        let window = self.window.unwrap_or(IterateOptions::default().window);
        if window == 0 {
            return Err(CliError::field("solve.window", "must be positive"));
        }
        Ok(IterateOptions { budget, window })
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Node count for the composite trapezoid rule on `[a, b]`.
    pub nodes: Option<usize>,
    /// Explicit nodes; requires `weights`.
    pub points: Option<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid, CliError> {
        let err = |e: mdist::fredholm::FredholmError| CliError::field("grid", e.to_string());
        match (&self.points, &self.weights, self.nodes) {
            (Some(p), Some(w), None) if self.a.is_none() && self.b.is_none() => Grid::new(p.clone(), w.clone()).map_err(err),
            (None, None, Some(m)) => Grid::trapezoid(self.a.unwrap_or(0.0), self.b.unwrap_or(1.0), m).map_err(err),
            _ => Err(CliError::field("grid", "give `nodes` (with optional `a`, `b`) or both `points` and `weights`")),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// `constant{c}`, `product_ts` or `user_expression`.
    pub name: String,
    /// Inhomogeneity, an expression in `t`.
    pub f: String,
    /// Integrand over `t, s, x`; `user_expression` only.
    pub g: Option<String>,
    /// Majorant over `t, s`; `user_expression` only.
    pub q: Option<String>,
}

impl KernelConfig {
    pub fn build(&self) -> Result<KernelSpec, CliError> {
        let err = |e: mdist::fredholm::FredholmError| CliError::field("kernel", e.to_string());
        if self.name.trim() == "user_expression" {
            let g = self.g.as_deref().ok_or_else(|| CliError::field("kernel.g", "required for user_expression"))?;
            let q = self.q.as_deref().ok_or_else(|| CliError::field("kernel.q", "required for user_expression"))?;
            return KernelSpec::from_expressions(g, q, &self.f).map_err(err);
        }
        if self.g.is_some() || self.q.is_some() {
            return Err(CliError::field("kernel", "`g` and `q` are only read for user_expression"));
        }
        KernelSpec::named(&self.name, &self.f).map_err(err)
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FredholmConfig {
    pub seed: Option<u64>,
    pub grid: GridConfig,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub ladder: LadderConfig,
    #[serde(default)]
    pub solve: SolveConfig,
}

pub struct FredholmProblem {
    pub grid: Grid,
    pub kernel: KernelSpec,
    pub options: FredholmOptions,
}

impl FredholmConfig {
    pub fn build(&self, seed_flag: Option<u64>, budget_flag: Option<usize>) -> Result<FredholmProblem, CliError> {
        let defaults = FredholmOptions::default();
        let n_max = self.solve.terms.unwrap_or(defaults.n_max);
        if n_max == 0 {
            return Err(CliError::field("solve.terms", "must be positive"));
        }
        let options = FredholmOptions {
            iterate: self.solve.iterate(budget_flag, defaults.iterate.budget)?,
            n_max,
            force: self.solve.force,
            majorant_trials: self.solve.majorant_trials.unwrap_or(defaults.majorant_trials),
            seed: seed_flag.or(self.seed).unwrap_or(0),
            heights: self.ladder.grid_heights()?,
        };
        Ok(FredholmProblem { grid: self.grid.build()?, kernel: self.kernel.build()?, options })
    }
}

/// `f(u, v) = a·u − b·v + c` with `a, b ≥ 0`: non-decreasing in `u`, non-increasing in `v`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoupledMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoupledStart {
    pub x0: f64,
    pub y0: f64,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoupledConfig {
    pub seed: Option<u64>,
    pub map: CoupledMap,
    pub start: CoupledStart,
    #[serde(default)]
    pub ladder: LadderConfig,
    #[serde(default)]
    pub solve: SolveConfig,
}

pub struct CoupledProblem {
    pub map: CoupledMap,
    pub start: CoupledStart,
    pub rungs: Vec<f64>,
    pub iterate: IterateOptions,
}

impl CoupledConfig {
    pub fn build(&self, budget_flag: Option<usize>) -> Result<CoupledProblem, CliError> {
        let m = &self.map;
        for (name, v) in [("map.a", m.a), ("map.b", m.b)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(CliError::field(name, "must be a non-negative finite number"));
            }
        }
        if !m.c.is_finite() || !self.start.x0.is_finite() || !self.start.y0.is_finite() {
            return Err(CliError::field("map", "values must be finite"));
        }
        if self.solve.terms.is_some() || self.solve.majorant_trials.is_some() || self.solve.force {
            return Err(CliError::field("solve", "only `budget` and `window` apply to coupled problems"));
        }
        Ok(CoupledProblem {
            map: m.clone(),
            start: self.start.clone(),
            rungs: self.ladder.line_rungs()?,
            iterate: self.solve.iterate(budget_flag, 10_000)?,
        })
    }
}
