//! Named real maps for `solve-map`, each with a Lipschitz constant used to build the
//! driver data.

use std::sync::Arc;

use mdist::engine::{CaristiData, LambdaSequence, MapSpec, MeirKeelerData};
use mdist::rng::{stream, streams};
use rand::Rng;

use crate::error::CliError;

pub const NAMES: &str = "halve, affine{c,b}, half_cosine, identity, shift, triple";

#[derive(Clone)]
pub struct NamedMap {
    pub name: String,
    /// Global Lipschitz constant of the map on the line.
    pub lipschitz: f64,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl NamedMap {
    fn new(name: impl Into<String>, lipschitz: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), lipschitz, f: Arc::new(f) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn spec(&self) -> MapSpec<f64> {
        let f = self.f.clone();
        MapSpec::new(self.name.clone(), move |x: &f64| f(*x)).with_order(|a: &f64, b: &f64| a <= b)
    }

    fn contracts(&self) -> bool {
        self.lipschitz < 1.0
    }

    /// `δ(ε)` such that `ε ≤ d < ε + δ` forces `L·d < ε` when `L < 1`.
    pub fn meir_keeler(&self) -> MeirKeelerData<f64, f64> {
        let l = self.lipschitz;
        let delta = move |e: &f64| if l <= 0.0 { *e } else if l < 1.0 { e * (1.0 - l) / (2.0 * l) } else { e / 2.0 };
        MeirKeelerData::new(delta, |a: &f64, b: &f64| a + b)
    }

    /// Potential `φ(x) = |x − f(x)| / (1 − L)`.
    pub fn caristi(&self) -> CaristiData<f64, f64> {
        let f = self.f.clone();
        let scale = if self.contracts() { 1.0 / (1.0 - self.lipschitz) } else { 1.0 };
        CaristiData::new(move |x: &f64| (x - f(*x)).abs() * scale, |e: &f64| *e)
    }

    /// `λ(t) = L·(1 + 10⁻⁹)·t + τ` with a round-off floor `τ` scaled to the orbit bound.
    pub fn lambda(&self, x0: f64) -> LambdaSequence<f64> {
        let l = self.lipschitz;
        let floor = if self.contracts() {
            let d0 = (x0 - self.eval(x0)).abs();
            16.0 * f64::EPSILON * (1.0 + x0.abs() + d0 / (1.0 - l))
        } else {
            0.0
        };
        LambdaSequence::constant(format!("{l}·t"), move |t: &f64| l * (1.0 + 1e-9) * t + floor)
    }
}

pub fn lookup(name: &str) -> Result<NamedMap, CliError> {
    let unknown = || CliError::Unknown { what: "map", name: name.to_string(), expected: NAMES.to_string() };
    let name = name.trim();
    Ok(match name {
        "halve" => NamedMap::new("x/2", 0.5, |x| x / 2.0),
        "half_cosine" => NamedMap::new("cos(x)/2", 0.5, |x| x.cos() / 2.0),
        "identity" => NamedMap::new("x", 1.0, |x| x),
        "shift" => NamedMap::new("x+1", 1.0, |x| x + 1.0),
        "triple" => NamedMap::new("3x", 3.0, |x| 3.0 * x),
        _ => {
            let args = name.strip_prefix("affine{").and_then(|r| r.strip_suffix('}')).ok_or_else(unknown)?;
            let parts: Vec<f64> = args.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| unknown())?;
            match parts[..] {
                [c, b] if c.is_finite() && b.is_finite() => NamedMap::new(format!("{c}x+{b}"), c.abs(), move |x| c * x + b),
                _ => return Err(unknown()),
            }
        }
    })
}

/// Pairs at every dyadic scale from `2^0` down to `2^-22`, for the Meir–Keeler condition.
pub fn sample_pairs(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = stream(seed, streams::DRIVER_PAIRS);
    (0..count)
        .map(|_| {
            let x = rng.gen_range(-2048..=2048) as f64 / 256.0;
            let gap = rng.gen_range(1..=255) as f64 / 128.0 * 0.5f64.powi(rng.gen_range(0..=22));
            (x, x + gap)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_names() {
        assert_eq!(lookup("affine{0.5,1}").unwrap().eval(2.0), 2.0);
        assert_eq!(lookup("affine{-0.25, 1}").unwrap().lipschitz, 0.25);
        for bad in ["affine{1}", "affine{a,b}", "cube", "affine{0.5,1"] {
            assert!(lookup(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pairs_are_deterministic_and_ordered() {
        let a = sample_pairs(5, 100);
        assert_eq!(a, sample_pairs(5, 100));
        assert_ne!(a, sample_pairs(6, 100));
        assert!(a.iter().all(|(x, y)| y > x));
    }
}
