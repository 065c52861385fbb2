//! Metric spaces: finite ones with an explicit distance matrix, countable
//! ones given by an enumerator, and the max-product of two spaces.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{AxiomViolation, Error};
use crate::COMPARE_TOL;

/// Index of a point in the enumeration of its space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Subsets of a space are kept ordered by id so every sweep is deterministic.
pub type PointSet = BTreeSet<PointId>;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub id: PointId,
    pub label: String,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub coords: Option<Vec<f64>>,
}

/// A finite or countable metric space whose points are enumerated by
/// [`PointId`]s `0, 1, 2, …`.
pub trait MetricSpace {
    /// Number of points, or `None` for a countably infinite space.
    fn cardinality(&self) -> Option<usize>;

    fn point(&self, id: PointId) -> Result<Point, Error>;

    /// Distance between two enumerated points. Callers guarantee both ids are
    /// valid; use [`MetricSpace::distance`] for checked access.
    fn raw_distance(&self, a: PointId, b: PointId) -> f64;

    fn contains(&self, id: PointId) -> bool {
        self.cardinality().is_none_or(|n| id.0 < n)
    }

    fn distance(&self, a: PointId, b: PointId) -> Result<f64, Error> {
        for id in [a, b] {
            if !self.contains(id) {
                return Err(Error::UnknownPoint(id));
            }
        }
        Ok(self.raw_distance(a, b))
    }

    /// Number of points scanned by region operations: the whole space when it
    /// is finite (capped by `budget` if given), else exactly `budget`.
    fn horizon(&self, budget: Option<usize>) -> Result<usize, Error> {
        match (self.cardinality(), budget) {
            (Some(n), None) => Ok(n),
            (Some(n), Some(b)) => Ok(n.min(b)),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(Error::MissingBudget),
        }
    }
}

impl<S: MetricSpace + ?Sized> MetricSpace for &S {
    fn cardinality(&self) -> Option<usize> {
        (**self).cardinality()
    }
    fn point(&self, id: PointId) -> Result<Point, Error> {
        (**self).point(id)
    }
    fn raw_distance(&self, a: PointId, b: PointId) -> f64 {
        (**self).raw_distance(a, b)
    }
}

/// Checks the metric axioms on the first `horizon` points. Triangle and
/// symmetry comparisons allow a relative slack of `tol`.
pub fn validate_metric(space: &dyn MetricSpace, horizon: usize, tol: f64) -> Result<(), AxiomViolation> {
    let d = |i: usize, j: usize| space.raw_distance(PointId(i), PointId(j));
    for a in 0..horizon {
        let v = d(a, a);
        if v != 0.0 {
            return Err(AxiomViolation::NonZeroDiagonal { a: PointId(a), value: v });
        }
        for b in 0..horizon {
            if a == b {
                continue;
            }
            let (ab, ba) = (d(a, b), d(b, a));
            if !(ab.is_finite() && ab >= 0.0) {
                return Err(AxiomViolation::InvalidDistance { a: PointId(a), b: PointId(b), value: ab });
            }
            if ab == 0.0 {
                return Err(AxiomViolation::Coincident { a: PointId(a), b: PointId(b) });
            }
            if (ab - ba).abs() > tol * (1.0 + ab.abs()) {
                return Err(AxiomViolation::Asymmetric { a: PointId(a), b: PointId(b), ab, ba });
            }
        }
    }
    for a in 0..horizon {
        for b in 0..horizon {
            let ab = d(a, b);
            for c in 0..horizon {
                let via = ab + d(b, c);
                if d(a, c) > via + tol * (1.0 + via) {
                    return Err(AxiomViolation::Triangle { a: PointId(a), b: PointId(b), c: PointId(c) });
                }
            }
        }
    }
    Ok(())
}

/// How a [`FiniteSpace`] obtained its distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum MetricKind {
    Euclidean,
    Matrix,
}

/// A finite metric space stored as an explicit distance matrix.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(try_from = "RawFiniteSpace"))]
pub struct FiniteSpace {
    kind: MetricKind,
    points: Vec<Point>,
    /// Row-major `n × n`.
    matrix: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct RawFiniteSpace {
    kind: MetricKind,
    points: Vec<Point>,
    matrix: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawFiniteSpace> for FiniteSpace {
    type Error = Error;

    fn try_from(raw: RawFiniteSpace) -> Result<Self, Error> {
        let n = raw.points.len();
        if raw.matrix.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: raw.matrix.len() });
        }
        let rows = raw.matrix.chunks(n.max(1)).map(<[f64]>::to_vec).take(n).collect();
        let labels = raw.points.iter().map(|p| p.label.clone()).collect();
        let mut space = FiniteSpace::from_matrix(labels, rows)?;
        space.kind = raw.kind;
        for (dst, src) in space.points.iter_mut().zip(raw.points) {
            dst.coords = src.coords;
        }
        Ok(space)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

impl FiniteSpace {
    /// Builds a space from a full distance matrix, rejecting anything that is
    /// not a metric up to [`COMPARE_TOL`].
    pub fn from_matrix(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, Error> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: labels.len() });
        }
        let mut matrix = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            matrix.extend_from_slice(row);
        }
        let points =
            labels.into_iter().enumerate().map(|(i, label)| Point { id: PointId(i), label, coords: None }).collect();
        let space = FiniteSpace { kind: MetricKind::Matrix, points, matrix };
        validate_metric(&space, n, COMPARE_TOL)?;
        Ok(space)
    }

    pub fn from_matrix_unlabeled(rows: Vec<Vec<f64>>) -> Result<Self, Error> {
        Self::from_matrix(default_labels(rows.len()), rows)
    }

    /// Points of `ℝⁿ` under the Euclidean norm.
    pub fn euclidean(points: Vec<(String, Vec<f64>)>) -> Result<Self, Error> {
        let n = points.len();
        let dim = points.first().map_or(0, |(_, c)| c.len());
        for (i, (_, c)) in points.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::NoCoordinates(PointId(i)));
            }
        }
        let mut matrix = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean_norm(&points[i].1, &points[j].1);
                matrix[i * n + j] = d;
                matrix[j * n + i] = d;
            }
        }
        let points = points
            .into_iter()
            .enumerate()
            .map(|(i, (label, c))| Point { id: PointId(i), label, coords: Some(c) })
            .collect();
        let space = FiniteSpace { kind: MetricKind::Euclidean, points, matrix };
        validate_metric(&space, n, COMPARE_TOL)?;
        Ok(space)
    }

    pub fn euclidean_unlabeled(coords: Vec<Vec<f64>>) -> Result<Self, Error> {
        let labels = default_labels(coords.len());
        Self::euclidean(labels.into_iter().zip(coords).collect())
    }

    /// Points on the real line, labelled `p0, p1, …`.
    pub fn line(xs: &[f64]) -> Result<Self, Error> {
        Self::euclidean_unlabeled(xs.iter().map(|&x| alloc::vec![x]).collect())
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn label(&self, id: PointId) -> &str {
        &self.points[id.0].label
    }

    pub fn coords(&self, id: PointId) -> Option<&[f64]> {
        self.points.get(id.0).and_then(|p| p.coords.as_deref())
    }

    pub fn find(&self, label: &str) -> Result<PointId, Error> {
        self.points.iter().position(|p| p.label == label).map(PointId).ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    pub fn row(&self, id: PointId) -> &[f64] {
        let n = self.len();
        &self.matrix[id.0 * n..(id.0 + 1) * n]
    }

    pub fn diameter(&self) -> f64 {
        self.matrix.iter().copied().fold(0.0, f64::max)
    }
}

impl MetricSpace for FiniteSpace {
    fn cardinality(&self) -> Option<usize> {
        Some(self.points.len())
    }

    fn point(&self, id: PointId) -> Result<Point, Error> {
        self.points.get(id.0).cloned().ok_or(Error::UnknownPoint(id))
    }

    fn raw_distance(&self, a: PointId, b: PointId) -> f64 {
        self.matrix[a.0 * self.points.len() + b.0]
    }
}

pub fn euclidean_norm(a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::sqrt(sq)
}

type Enumerator = Box<dyn Fn(usize) -> Vec<f64> + Send + Sync>;
type CoordMetric = Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A countably infinite space: an enumerator producing the coordinates of the
/// `k`-th point and a metric on coordinates. Every region operation over it
/// needs an explicit enumeration budget.
pub struct LazySpace {
    enumerate: Enumerator,
    metric: CoordMetric,
}

impl LazySpace {
    pub fn new(
        enumerate: impl Fn(usize) -> Vec<f64> + Send + Sync + 'static,
        metric: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        LazySpace { enumerate: Box::new(enumerate), metric: Box::new(metric) }
    }

    /// The dyadic rationals of `[0, 1]` in the order `0, 1, 1/2, 1/4, 3/4,
    /// 1/8, …` under `|·|`; dense in the unit interval.
    pub fn dyadic_unit_interval() -> Self {
        LazySpace::new(|k| alloc::vec![dyadic(k)], euclidean_norm)
    }

    pub fn coords(&self, id: PointId) -> Vec<f64> {
        (self.enumerate)(id.0)
    }
}

fn dyadic(k: usize) -> f64 {
    match k {
        0 => 0.0,
        1 => 1.0,
        _ => {
            let k = k - 1;
            let j = usize::BITS - 1 - k.leading_zeros();
            let offset = k - (1usize << j);
            (2 * offset + 1) as f64 / (1u64 << (j + 1)) as f64
        }
    }
}

impl fmt::Debug for LazySpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazySpace").finish_non_exhaustive()
    }
}

impl MetricSpace for LazySpace {
    fn cardinality(&self) -> Option<usize> {
        None
    }

    fn point(&self, id: PointId) -> Result<Point, Error> {
        Ok(Point { id, label: format!("q{}", id.0), coords: Some(self.coords(id)) })
    }

    fn raw_distance(&self, a: PointId, b: PointId) -> f64 {
        if a == b {
            return 0.0;
        }
        (self.metric)(&self.coords(a), &self.coords(b))
    }
}

/// `X₁ × X₂` with `d((x, y), (x', y')) = max(d₁(x, x'), d₂(y, y'))`.
///
/// Pairs are numbered row-major when both factors are finite and by the
/// Cantor pairing otherwise.
#[derive(Clone, Copy)]
pub struct ProductSpace<'a> {
    pub left: &'a dyn MetricSpace,
    pub right: &'a dyn MetricSpace,
}

impl<'a> ProductSpace<'a> {
    pub fn new(left: &'a dyn MetricSpace, right: &'a dyn MetricSpace) -> Self {
        ProductSpace { left, right }
    }

    pub fn split(&self, id: PointId) -> (PointId, PointId) {
        match (self.left.cardinality(), self.right.cardinality()) {
            (Some(_), Some(n2)) => (PointId(id.0 / n2), PointId(id.0 % n2)),
            _ => {
                let (a, b) = cantor_unpair(id.0);
                (PointId(a), PointId(b))
            }
        }
    }

    pub fn join(&self, x: PointId, y: PointId) -> PointId {
        match (self.left.cardinality(), self.right.cardinality()) {
            (Some(_), Some(n2)) => PointId(x.0 * n2 + y.0),
            _ => PointId((x.0 + y.0) * (x.0 + y.0 + 1) / 2 + y.0),
        }
    }
}

fn cantor_unpair(z: usize) -> (usize, usize) {
    let mut w = ((libm::sqrt(8.0 * z as f64 + 1.0) - 1.0) / 2.0) as usize;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

impl MetricSpace for ProductSpace<'_> {
    fn cardinality(&self) -> Option<usize> {
        Some(self.left.cardinality()? * self.right.cardinality()?)
    }

    fn contains(&self, id: PointId) -> bool {
        match self.cardinality() {
            Some(n) => id.0 < n,
            None => {
                let (x, y) = self.split(id);
                self.left.contains(x) && self.right.contains(y)
            }
        }
    }

    fn point(&self, id: PointId) -> Result<Point, Error> {
        if !self.contains(id) {
            return Err(Error::UnknownPoint(id));
        }
        let (x, y) = self.split(id);
        let (px, py) = (self.left.point(x)?, self.right.point(y)?);
        let coords = match (px.coords, py.coords) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            _ => None,
        };
        Ok(Point { id, label: format!("({},{})", px.label, py.label), coords })
    }

    fn raw_distance(&self, a: PointId, b: PointId) -> f64 {
        let (x1, y1) = self.split(a);
        let (x2, y2) = self.split(b);
        self.left.raw_distance(x1, x2).max(self.right.raw_distance(y1, y2))
    }
}
