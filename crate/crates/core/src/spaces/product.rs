use super::{DistanceSpace, PointSampler, SpaceError, SpaceKind};
use crate::monoid::{Elem, Monoid, ProductMonoid, TestLadder};
use crate::rng::DetRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// `Σ_k d(x_k, y_k)`.
    Sigma,
    /// `∨_k d(x_k, y_k)`; needs suprema.
    Vee,
}

/// `X_1 × … × X_m` with a shared monoid, combining coordinate distances by `+` or `∨`.
#[derive(Debug, Clone)]
pub struct SumProduct<D: DistanceSpace> {
    factors: Vec<D>,
    mode: SumMode,
    kind: SpaceKind,
}

fn shared_monoid<D: DistanceSpace>(factors: &[D]) -> Result<(), SpaceError> {
    let first = factors.first().ok_or(SpaceError::NoFactors)?.monoid();
    for (index, f) in factors.iter().enumerate().skip(1) {
        if f.monoid() != first {
            return Err(SpaceError::MixedMonoids { index, expected: first.describe(), found: f.monoid().describe() });
        }
    }
    Ok(())
}

impl<D: DistanceSpace> SumProduct<D> {
    /// The ladder is the first factor's.
    pub fn new(factors: Vec<D>, mode: SumMode) -> Result<Self, SpaceError> {
        shared_monoid(&factors)?;
        if mode == SumMode::Vee && !factors[0].monoid().has_sup() {
            return Err(SpaceError::NoSupremum);
        }
        let kind = SpaceKind::weakest(factors.iter().map(|f| f.kind()))?;
        Ok(Self { factors, mode, kind })
    }

    pub fn factors(&self) -> &[D] {
        &self.factors
    }
}

impl<D: DistanceSpace> DistanceSpace for SumProduct<D> {
    type Point = Vec<D::Point>;
    type M = D::M;

    fn monoid(&self) -> &D::M {
        self.factors[0].monoid()
    }

    fn ladder(&self) -> &TestLadder<Elem<D::M>> {
        self.factors[0].ladder()
    }

    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Elem<D::M> {
        let m = self.monoid();
        let mut parts = self.factors.iter().zip(x.iter().zip(y)).map(|(f, (a, b))| f.distance(a, b));
        match self.mode {
            SumMode::Sigma => parts.fold(m.identity(), |acc, d| m.combine(&acc, &d)),
            SumMode::Vee => {
                let first = parts.next().unwrap_or_else(|| m.identity());
                parts.fold(first, |acc, d| m.sup(&acc, &d).expect("checked at construction"))
            }
        }
    }

    fn describe(&self) -> String {
        let mode = match self.mode {
            SumMode::Sigma => "sigma",
            SumMode::Vee => "vee",
        };
        let inner: Vec<String> = self.factors.iter().map(|f| f.describe()).collect();
        format!("product{{{mode},{}}}", inner.join(","))
    }

    fn order_regular(&self) -> bool {
        self.factors.iter().all(|f| f.order_regular())
    }

    fn order_coregular(&self) -> bool {
        self.factors.iter().all(|f| f.order_coregular())
    }
}

impl<D: PointSampler> PointSampler for SumProduct<D> {
    fn sample_point(&self, rng: &mut DetRng) -> Self::Point {
        self.factors.iter().map(|f| f.sample_point(rng)).collect()
    }
}

fn product_ladder<M: Monoid>(monoid: &ProductMonoid<M>, ladders: &[&TestLadder<M::Elem>]) -> Result<TestLadder<Vec<M::Elem>>, SpaceError> {
    let k = ladders[0].len();
    if let Some(l) = ladders.iter().find(|l| l.len() != k) {
        return Err(SpaceError::LadderMismatch(k, l.len()));
    }
    let rungs = (0..k).map(|i| ladders.iter().map(|l| l.rung(i).clone()).collect()).collect();
    Ok(TestLadder::new(monoid, rungs)?)
}

/// `X_1 × … × X_m` with the tuple of coordinate distances in the product monoid.
#[derive(Debug, Clone)]
pub struct CoordinateProduct<D: DistanceSpace> {
    factors: Vec<D>,
    monoid: ProductMonoid<D::M>,
    ladder: TestLadder<Vec<Elem<D::M>>>,
    kind: SpaceKind,
}

impl<D: DistanceSpace> CoordinateProduct<D> {
    /// Rung `i` of the product ladder is the tuple of the factors' rungs `i`.
    pub fn new(factors: Vec<D>) -> Result<Self, SpaceError> {
        if factors.is_empty() {
            return Err(SpaceError::NoFactors);
        }
        let monoid = ProductMonoid::new(factors.iter().map(|f| f.monoid().clone()).collect());
        let ladders: Vec<_> = factors.iter().map(|f| f.ladder()).collect();
        let ladder = product_ladder(&monoid, &ladders)?;
        let kind = SpaceKind::weakest(factors.iter().map(|f| f.kind()))?;
        Ok(Self { factors, monoid, ladder, kind })
    }

    /// `k` copies of one space.
    pub fn power(space: D, k: usize) -> Result<Self, SpaceError>
    where
        D: Clone,
    {
        Self::new(vec![space; k])
    }

    pub fn factors(&self) -> &[D] {
        &self.factors
    }
}

impl<D: DistanceSpace> DistanceSpace for CoordinateProduct<D> {
    type Point = Vec<D::Point>;
    type M = ProductMonoid<D::M>;

    fn monoid(&self) -> &ProductMonoid<D::M> {
        &self.monoid
    }

    fn ladder(&self) -> &TestLadder<Vec<Elem<D::M>>> {
        &self.ladder
    }

    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Vec<Elem<D::M>> {
        self.factors.iter().zip(x.iter().zip(y)).map(|(f, (a, b))| f.distance(a, b)).collect()
    }

    fn describe(&self) -> String {
        let inner: Vec<String> = self.factors.iter().map(|f| f.describe()).collect();
        format!("product{{coord,{}}}", inner.join(","))
    }

    fn order_regular(&self) -> bool {
        self.factors.iter().all(|f| f.order_regular())
    }

    fn order_coregular(&self) -> bool {
        self.factors.iter().all(|f| f.order_coregular())
    }
}

impl<D: PointSampler> PointSampler for CoordinateProduct<D> {
    fn sample_point(&self, rng: &mut DetRng) -> Self::Point {
        self.factors.iter().map(|f| f.sample_point(rng)).collect()
    }
}

/// A family of pseudo-distances on one carrier, read together as a product-valued distance.
#[derive(Debug, Clone)]
pub struct GaugeSpace<D: DistanceSpace> {
    factors: Vec<D>,
    monoid: ProductMonoid<D::M>,
    ladder: TestLadder<Vec<Elem<D::M>>>,
    kind: SpaceKind,
}

impl<D: DistanceSpace> GaugeSpace<D> {
    /// The kind is `distance` when every pair of distinct `samples` is separated by some
    /// factor, `pseudo` otherwise.
    pub fn new(factors: Vec<D>, samples: &[D::Point]) -> Result<Self, SpaceError> {
        if factors.is_empty() {
            return Err(SpaceError::NoFactors);
        }
        let monoid = ProductMonoid::new(factors.iter().map(|f| f.monoid().clone()).collect());
        let ladders: Vec<_> = factors.iter().map(|f| f.ladder()).collect();
        let ladder = product_ladder(&monoid, &ladders)?;
        let separated = samples.iter().enumerate().all(|(i, x)| {
            samples[..i].iter().all(|y| {
                x == y || factors.iter().any(|f| f.distance(x, y) != f.monoid().identity())
            })
        });
        let kind = if separated { SpaceKind::Distance } else { SpaceKind::Pseudo };
        Ok(Self { factors, monoid, ladder, kind })
    }
}

impl<D: DistanceSpace> DistanceSpace for GaugeSpace<D> {
    type Point = D::Point;
    type M = ProductMonoid<D::M>;

    fn monoid(&self) -> &ProductMonoid<D::M> {
        &self.monoid
    }

    fn ladder(&self) -> &TestLadder<Vec<Elem<D::M>>> {
        &self.ladder
    }

    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn distance(&self, x: &D::Point, y: &D::Point) -> Vec<Elem<D::M>> {
        self.factors.iter().map(|f| f.distance(x, y)).collect()
    }

    fn describe(&self) -> String {
        let inner: Vec<String> = self.factors.iter().map(|f| f.describe()).collect();
        format!("gauge{{{}}}", inner.join(","))
    }
}

impl<D: PointSampler> PointSampler for GaugeSpace<D> {
    fn sample_point(&self, rng: &mut DetRng) -> D::Point {
        self.factors[0].sample_point(rng)
    }
}
