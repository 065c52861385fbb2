//! Regions `G(z) ⊆ Xˡ` and the point sets they are built from: open balls,
//! punctured balls, tori `T(x, r, s) = {u : r < d(x, u) < s}` and ball pairs.
//!
//! Point sets are returned sorted by id. On countable spaces only the first
//! `budget` points are scanned.

use alloc::vec::Vec;

use crate::error::Error;
use crate::metric::{MetricSpace, PointId};

/// A finite set of `arity`-tuples of points, stored flat in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    arity: usize,
    tuples: Vec<PointId>,
}

impl Region {
    pub fn new(arity: usize) -> Self {
        assert!(arity > 0, "region arity must be positive");
        Region { arity, tuples: Vec::new() }
    }

    pub fn singletons(points: &[PointId]) -> Self {
        Region { arity: 1, tuples: points.to_vec() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len() / self.arity.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn push(&mut self, tuple: &[PointId]) {
        assert_eq!(tuple.len(), self.arity, "tuple arity mismatch");
        self.tuples.extend_from_slice(tuple);
    }

    pub fn iter(&self) -> core::slice::ChunksExact<'_, PointId> {
        self.tuples.chunks_exact(self.arity.max(1))
    }

    pub fn contains(&self, tuple: &[PointId]) -> bool {
        self.iter().any(|t| t == tuple)
    }

    /// Keeps only tuples whose every component satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(PointId) -> bool) -> Region {
        let mut out = Region::new(self.arity);
        for t in self.iter() {
            if t.iter().all(|&u| keep(u)) {
                out.push(t);
            }
        }
        out
    }
}

fn check_radius(r: f64) -> Result<(), Error> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

fn scan(
    space: &dyn MetricSpace,
    x: PointId,
    budget: Option<usize>,
    mut keep: impl FnMut(PointId, f64) -> bool,
) -> Result<Vec<PointId>, Error> {
    if !space.contains(x) {
        return Err(Error::UnknownPoint(x));
    }
    let horizon = space.horizon(budget)?;
    Ok((0..horizon).map(PointId).filter(|&u| keep(u, space.raw_distance(x, u))).collect())
}

/// `B(x, r) = {u : d(x, u) < r}`.
pub fn ball_points(space: &dyn MetricSpace, x: PointId, r: f64, budget: Option<usize>) -> Result<Vec<PointId>, Error> {
    check_radius(r)?;
    scan(space, x, budget, |_, d| d < r)
}

/// `B(x, r) \ {x}`.
pub fn punctured_ball_points(
    space: &dyn MetricSpace,
    x: PointId,
    r: f64,
    budget: Option<usize>,
) -> Result<Vec<PointId>, Error> {
    check_radius(r)?;
    scan(space, x, budget, |u, d| u != x && d < r)
}

/// `T(x, r, s) = {u : r < d(x, u) < s}`; never contains `x`.
pub fn torus_points(
    space: &dyn MetricSpace,
    x: PointId,
    r: f64,
    s: f64,
    budget: Option<usize>,
) -> Result<Vec<PointId>, Error> {
    if !(r > 0.0 && r < s) {
        return Err(Error::BadShell { inner: r, outer: s });
    }
    scan(space, x, budget, |_, d| r < d && d < s)
}

/// Ordered pairs `(u₁, u₂)` of distinct points of `B(x, r)`.
pub fn ball_pairs(space: &dyn MetricSpace, x: PointId, r: f64, budget: Option<usize>) -> Result<Region, Error> {
    let ball = ball_points(space, x, r, budget)?;
    Ok(pairs_of(&ball))
}

pub(crate) fn pairs_of(points: &[PointId]) -> Region {
    let mut region = Region::new(2);
    for &a in points {
        for &b in points {
            if a != b {
                region.push(&[a, b]);
            }
        }
    }
    region
}
