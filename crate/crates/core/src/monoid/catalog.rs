//! Name-addressable monoids for configuration files and the command line.

use super::{ElemSampler, Monoid, MonoidError, ProductMonoid, RealNonneg, RealVector, Relation, RelationMonoid};
use crate::rng::DetRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogMonoid {
    Real(RealNonneg<f64>),
    Vector(RealVector<f64>),
    Relation(RelationMonoid),
    Product(ProductMonoid<CatalogMonoid>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogElem {
    Real(f64),
    Vector(Vec<f64>),
    Relation(Relation),
    Tuple(Vec<CatalogElem>),
}

fn mismatch(m: &CatalogMonoid) -> ! {
    panic!("element does not belong to {}", m.describe())
}

impl Monoid for CatalogMonoid {
    type Elem = CatalogElem;

    fn identity(&self) -> CatalogElem {
        match self {
            Self::Real(m) => CatalogElem::Real(m.identity()),
            Self::Vector(m) => CatalogElem::Vector(m.identity()),
            Self::Relation(m) => CatalogElem::Relation(m.identity()),
            Self::Product(m) => CatalogElem::Tuple(m.identity()),
        }
    }

    fn combine(&self, a: &CatalogElem, b: &CatalogElem) -> CatalogElem {
        match (self, a, b) {
            (Self::Real(m), CatalogElem::Real(x), CatalogElem::Real(y)) => CatalogElem::Real(m.combine(x, y)),
            (Self::Vector(m), CatalogElem::Vector(x), CatalogElem::Vector(y)) => CatalogElem::Vector(m.combine(x, y)),
            (Self::Relation(m), CatalogElem::Relation(x), CatalogElem::Relation(y)) => {
                CatalogElem::Relation(m.combine(x, y))
            }
            (Self::Product(m), CatalogElem::Tuple(x), CatalogElem::Tuple(y)) => CatalogElem::Tuple(m.combine(x, y)),
            _ => mismatch(self),
        }
    }

    fn leq(&self, a: &CatalogElem, b: &CatalogElem) -> bool {
        match (self, a, b) {
            (Self::Real(m), CatalogElem::Real(x), CatalogElem::Real(y)) => m.leq(x, y),
            (Self::Vector(m), CatalogElem::Vector(x), CatalogElem::Vector(y)) => m.leq(x, y),
            (Self::Relation(m), CatalogElem::Relation(x), CatalogElem::Relation(y)) => m.leq(x, y),
            (Self::Product(m), CatalogElem::Tuple(x), CatalogElem::Tuple(y)) => m.leq(x, y),
            _ => false,
        }
    }

    fn sup(&self, a: &CatalogElem, b: &CatalogElem) -> Option<CatalogElem> {
        match (self, a, b) {
            (Self::Real(m), CatalogElem::Real(x), CatalogElem::Real(y)) => m.sup(x, y).map(CatalogElem::Real),
            (Self::Vector(m), CatalogElem::Vector(x), CatalogElem::Vector(y)) => m.sup(x, y).map(CatalogElem::Vector),
            (Self::Product(m), CatalogElem::Tuple(x), CatalogElem::Tuple(y)) => m.sup(x, y).map(CatalogElem::Tuple),
            _ => None,
        }
    }

    fn has_sup(&self) -> bool {
        match self {
            Self::Real(m) => m.has_sup(),
            Self::Vector(m) => m.has_sup(),
            Self::Relation(m) => m.has_sup(),
            Self::Product(m) => m.has_sup(),
        }
    }

    fn weierstrass(&self) -> bool {
        match self {
            Self::Real(m) => m.weierstrass(),
            Self::Vector(m) => m.weierstrass(),
            Self::Relation(m) => m.weierstrass(),
            Self::Product(m) => m.weierstrass(),
        }
    }

    fn describe(&self) -> String {
        match self {
            Self::Real(m) => m.describe(),
            Self::Vector(m) => m.describe(),
            Self::Relation(m) => m.describe(),
            Self::Product(m) => m.describe(),
        }
    }
}

impl ElemSampler for CatalogMonoid {
    fn sample_elem(&self, rng: &mut DetRng) -> CatalogElem {
        match self {
            Self::Real(m) => CatalogElem::Real(m.sample_elem(rng)),
            Self::Vector(m) => CatalogElem::Vector(m.sample_elem(rng)),
            Self::Relation(m) => CatalogElem::Relation(m.sample_elem(rng)),
            Self::Product(m) => CatalogElem::Tuple(m.sample_elem(rng)),
        }
    }
}

impl CatalogMonoid {
    /// Dyadic ladder `{1, 1/2, …, 2^-(k-1)}` lifted to the monoid. Relations have no
    /// canonical ladder; theirs comes from a pseudometric.
    pub fn dyadic_ladder(&self, k: u32) -> Option<Vec<CatalogElem>> {
        match self {
            Self::Real(_) => Some((0..k).map(|e| CatalogElem::Real(f64::dyadic(e))).collect()),
            Self::Vector(m) => Some((0..k).map(|e| CatalogElem::Vector(m.constant(f64::dyadic(e)))).collect()),
            Self::Relation(_) => None,
            Self::Product(p) => {
                let per: Option<Vec<Vec<CatalogElem>>> = p.factors.iter().map(|f| f.dyadic_ladder(k)).collect();
                let per = per?;
                Some((0..k as usize).map(|i| CatalogElem::Tuple(per.iter().map(|l| l[i].clone()).collect())).collect())
            }
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// Splits `name{args}` into `("name", Some("args"))`.
pub(crate) fn split_call(s: &str) -> Result<(&str, Option<&str>), MonoidError> {
    let s = s.trim();
    match s.find('{') {
        None => Ok((s, None)),
        Some(i) if s.ends_with('}') => Ok((&s[..i], Some(&s[i + 1..s.len() - 1]))),
        Some(_) => Err(MonoidError::UnknownName(s.to_string())),
    }
}

pub(crate) fn split_args(s: &str) -> Vec<&str> {
    split_top_level(s)
}

fn parse_usize(name: &str, arg: Option<&str>) -> Result<usize, MonoidError> {
    arg.and_then(|a| a.trim().parse().ok()).ok_or_else(|| MonoidError::UnknownName(name.to_string()))
}

/// Parses `real_nonneg`, `real_vector{d}`, `grid_function{n}`, `relation{n}` and
/// `product{a,b,…}`.
pub fn parse_monoid(name: &str) -> Result<CatalogMonoid, MonoidError> {
    let (head, arg) = split_call(name)?;
    match head {
        "real_nonneg" if arg.is_none() => Ok(CatalogMonoid::Real(RealNonneg::new())),
        "real_vector" => Ok(CatalogMonoid::Vector(RealVector::new(parse_usize(name, arg)?))),
        "grid_function" => Ok(CatalogMonoid::Vector(RealVector::grid(parse_usize(name, arg)?))),
        "relation" => Ok(CatalogMonoid::Relation(RelationMonoid::new(parse_usize(name, arg)?)?)),
        "product" => {
            let inner = arg.filter(|a| !a.trim().is_empty()).ok_or_else(|| MonoidError::UnknownName(name.to_string()))?;
            let factors = split_top_level(inner).into_iter().map(parse_monoid).collect::<Result<Vec<_>, _>>()?;
            Ok(CatalogMonoid::Product(ProductMonoid::new(factors)))
        }
        _ => Err(MonoidError::UnknownName(name.to_string())),
    }
}
