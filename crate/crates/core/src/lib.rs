//! Monoid-valued distance spaces and fixed-point iteration with hypothesis auditing.

pub mod engine;
pub mod fredholm;
pub mod monoid;
pub mod multifix;
pub mod spaces;
pub mod report;
pub mod repr;
pub mod rng;
pub mod scalar;

pub use report::{Outcome, ValidationReport};
pub use scalar::{Exact, Real, Scalar};

pub type RealLine64 = spaces::RealLine<f64>;
pub type RealLine32 = spaces::RealLine<f32>;
pub type RealLineExact = spaces::RealLine<Exact>;
pub type GridSpace64 = spaces::GridSpace<f64>;
pub type GridSpace32 = spaces::GridSpace<f32>;
pub type GridSpaceExact = spaces::GridSpace<Exact>;
pub type RealNonneg64 = monoid::RealNonneg<f64>;
pub type RealNonneg32 = monoid::RealNonneg<f32>;
pub type RealNonnegExact = monoid::RealNonneg<Exact>;
pub type RealVector64 = monoid::RealVector<f64>;
pub type RealVectorExact = monoid::RealVector<Exact>;
