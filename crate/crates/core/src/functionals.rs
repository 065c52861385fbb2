//! Variational quantities on a finite (or horizon-truncated) space and their
//! restrictions to a subset `Y`.
//!
//! Every point of a finite space is isolated, so limits are replaced by
//! formulas over explicit grids of radii and shells. With the realized grids
//! of [`ScaleGrid::realized`] every distinct ball and torus around `x`
//! appears, and the restricted value equals the full value exactly whenever
//! `Y` is closed under the matching witness problem.

use alloc::vec::Vec;

use crate::error::Error;
use crate::ext_real::ExtReal;
use crate::families::torus_score;
use crate::function::{FunctionOracle, ProductFunction};
use crate::metric::{MetricSpace, PointId, PointSet};
use crate::scheme::realized_scales;
use crate::COMPARE_TOL;

/// The points a functional may look at: the first `horizon` points of
/// `space`, optionally intersected with `subset`.
#[derive(Clone, Copy)]
pub struct Domain<'a> {
    pub space: &'a dyn MetricSpace,
    pub horizon: usize,
    pub subset: Option<&'a PointSet>,
}

impl<'a> Domain<'a> {
    pub fn full(space: &'a dyn MetricSpace, horizon: usize) -> Self {
        Domain { space, horizon, subset: None }
    }

    pub fn restricted(space: &'a dyn MetricSpace, horizon: usize, subset: &'a PointSet) -> Self {
        Domain { space, horizon, subset: Some(subset) }
    }

    pub fn includes(&self, u: PointId) -> bool {
        u.0 < self.horizon && self.subset.is_none_or(|y| y.contains(&u))
    }

    fn members(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.horizon).map(PointId).filter(|&u| self.includes(u))
    }

    fn check_center(&self, x: PointId) -> Result<(), Error> {
        if x.0 >= self.horizon || !self.space.contains(x) {
            Err(Error::UnknownPoint(x))
        } else if !self.includes(x) {
            Err(Error::NotInSubspace(x))
        } else {
            Ok(())
        }
    }

    fn punctured_ball(&self, x: PointId, r: f64) -> Result<Vec<PointId>, Error> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        Ok(self.members().filter(|&u| u != x && self.space.raw_distance(x, u) < r).collect())
    }
}

/// Radii, shells `(r, s)` and levels `t` over which limits are discretized.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaleGrid {
    pub radii: Vec<f64>,
    pub shells: Vec<(f64, f64)>,
    pub levels: Vec<ExtReal>,
}

impl ScaleGrid {
    pub fn new(radii: Vec<f64>, shells: Vec<(f64, f64)>, levels: Vec<ExtReal>) -> Result<Self, Error> {
        if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0)) {
            return Err(Error::NonPositiveRadius(r));
        }
        if let Some(&(inner, outer)) = shells.iter().find(|&&(r, s)| !(r > 0.0 && r < s)) {
            return Err(Error::BadShell { inner, outer });
        }
        Ok(ScaleGrid { radii, shells, levels })
    }

    /// Midpoints between consecutive distances from `x` (plus one beyond the
    /// largest) as radii, and every pair of them as shells.
    pub fn realized(space: &dyn MetricSpace, horizon: usize, x: PointId) -> Self {
        let radii = realized_scales(space, horizon, x);
        let mut shells = Vec::new();
        for (a, &r) in radii.iter().enumerate() {
            for &s in &radii[a + 1..] {
                shells.push((r, s));
            }
        }
        ScaleGrid { radii, shells, levels: Vec::new() }
    }

    /// A single shell strictly inside the nearest distance from `x`, so
    /// every torus of the grid is empty.
    pub fn below_spectrum(space: &dyn MetricSpace, horizon: usize, x: PointId) -> Self {
        let e1 = (0..horizon)
            .map(PointId)
            .filter(|&u| u != x)
            .map(|u| space.raw_distance(x, u))
            .fold(f64::INFINITY, f64::min);
        let e1 = if e1.is_finite() { e1 } else { 1.0 };
        ScaleGrid { radii: alloc::vec![e1 / 2.0], shells: alloc::vec![(e1 / 4.0, e1 / 2.0)], levels: Vec::new() }
    }
}

/// `sup_r inf{f(u) : u ∈ B(x, r) \ {x}}` over the grid radii whose
/// punctured ball is nonempty.
pub fn liminf_at(f: &impl FunctionOracle, dom: Domain<'_>, x: PointId, radii: &[f64]) -> Result<ExtReal, Error> {
    dom.check_center(x)?;
    let mut best: Option<ExtReal> = None;
    for &r in radii {
        let ball = dom.punctured_ball(x, r)?;
        if let Some(inf) = ball.iter().map(|&u| f.eval(u)).min() {
            best = Some(best.map_or(inf, |b| b.max(inf)));
        }
    }
    best.ok_or(Error::IsolatedPoint(x))
}

/// `inf_r sup{f(u) : u ∈ B(x, r) \ {x}}` over the grid radii whose
/// punctured ball is nonempty.
pub fn limsup_at(f: &impl FunctionOracle, dom: Domain<'_>, x: PointId, radii: &[f64]) -> Result<ExtReal, Error> {
    dom.check_center(x)?;
    let mut best: Option<ExtReal> = None;
    for &r in radii {
        let ball = dom.punctured_ball(x, r)?;
        if let Some(sup) = ball.iter().map(|&u| f.eval(u)).max() {
            best = Some(best.map_or(sup, |b| b.min(sup)));
        }
    }
    best.ok_or(Error::IsolatedPoint(x))
}

fn within(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    (a - b).abs() <= ExtReal::Finite(tol)
}

/// Whether both grid limits of `f` at `x` equal `f(x)` up to `tol`.
pub fn continuity_check(
    f: &impl FunctionOracle,
    dom: Domain<'_>,
    x: PointId,
    radii: &[f64],
    tol: f64,
) -> Result<bool, Error> {
    let fx = f.eval(x);
    let lo = liminf_at(f, dom, x, radii)?;
    let hi = limsup_at(f, dom, x, radii)?;
    Ok(within(lo, fx, tol) && within(hi, fx, tol))
}

/// Supremum of difference quotients over a ball.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LocalLipschitz {
    /// `0` when the ball has fewer than two points.
    pub value: ExtReal,
    /// Number of ordered pairs scanned.
    pub pairs: usize,
}

impl LocalLipschitz {
    pub fn no_pairs(&self) -> bool {
        self.pairs == 0
    }
}

/// `sup{|f(u₁) − f(u₂)| / d(u₁, u₂) : u₁ ≠ u₂ ∈ B(x, r)}`.
pub fn lip_local_sup(f: &impl FunctionOracle, dom: Domain<'_>, x: PointId, r: f64) -> Result<LocalLipschitz, Error> {
    dom.check_center(x)?;
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    let ball: Vec<PointId> = dom.members().filter(|&u| dom.space.raw_distance(x, u) < r).collect();
    let mut value = ExtReal::NegInf;
    let mut pairs = 0;
    for &a in &ball {
        for &b in &ball {
            if a != b {
                pairs += 1;
                let q = (f.eval(a) - f.eval(b)).abs().div_positive(dom.space.raw_distance(a, b));
                value = value.max(q);
            }
        }
    }
    if pairs == 0 {
        value = ExtReal::ZERO;
    }
    Ok(LocalLipschitz { value, pairs })
}

/// `min_r lip_local_sup(f, x, r)` over the grid radii whose ball holds a pair;
/// `0` if there is none.
pub fn lip_modulus(f: &impl FunctionOracle, dom: Domain<'_>, x: PointId, radii: &[f64]) -> Result<ExtReal, Error> {
    let mut best: Option<ExtReal> = None;
    for &r in radii {
        let local = lip_local_sup(f, dom, x, r)?;
        if !local.no_pairs() {
            best = Some(best.map_or(local.value, |b| b.min(local.value)));
        }
    }
    Ok(best.unwrap_or(ExtReal::ZERO))
}

/// `sup{(t − f(u))⁺ / d(x, u) : u ∈ T(x, r, s)}`.
pub fn torus_sup(
    f: &impl FunctionOracle,
    dom: Domain<'_>,
    x: PointId,
    t: ExtReal,
    r: f64,
    s: f64,
) -> Result<ExtReal, Error> {
    dom.check_center(x)?;
    if !(r > 0.0 && r < s) {
        return Err(Error::BadShell { inner: r, outer: s });
    }
    dom.members()
        .filter_map(|u| {
            let d = dom.space.raw_distance(x, u);
            (r < d && d < s).then(|| torus_score(t, f.eval(u), d))
        })
        .max()
        .ok_or(Error::EmptyRegion { x })
}

/// `inf_s sup_{r < s} torus_sup(f, x, f(x), r, s)` over the grid shells,
/// skipping empty tori.
pub fn slope_at(f: &impl FunctionOracle, dom: Domain<'_>, x: PointId, shells: &[(f64, f64)]) -> Result<ExtReal, Error> {
    dom.check_center(x)?;
    let t = f.eval(x);
    if t == ExtReal::NegInf {
        return Err(Error::ImproperFunction("takes the value -inf"));
    }
    if let Some(&(inner, outer)) = shells.iter().find(|&&(r, s)| !(r > 0.0 && r < s)) {
        return Err(Error::BadShell { inner, outer });
    }
    let mut sorted: Vec<(f64, f64)> = shells.to_vec();
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let mut result: Option<ExtReal> = None;
    for group in sorted.chunk_by(|a, b| a.1 == b.1) {
        // Tori with a common outer radius grow as the inner one shrinks, so
        // the supremum over the group is the one over its smallest inner
        // radius, and that torus is empty only if all of them are.
        let (r, s) = group[0];
        match torus_sup(f, dom, x, t, r, s) {
            Ok(v) => result = Some(result.map_or(v, |b| b.min(v))),
            Err(Error::EmptyRegion { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    result.ok_or(Error::IsolatedPoint(x))
}

/// Outcome of [`verify_lipschitz_second`].
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LipschitzVerdict {
    pub holds: bool,
    /// First violating `(x, y′, y″)`.
    pub witness: Option<(PointId, PointId, PointId)>,
    pub checked: usize,
}

/// Checks `|f(x, y′) − f(x, y″)| ≤ k·d₂(y′, y″)` on all triples (or on the
/// first `budget` of them in lexicographic order).
pub fn verify_lipschitz_second(
    f: &ProductFunction,
    right: &dyn MetricSpace,
    k: f64,
    budget: Option<usize>,
) -> LipschitzVerdict {
    let limit = budget.unwrap_or(usize::MAX);
    let mut checked = 0;
    for x in (0..f.left_len()).map(PointId) {
        for y1 in (0..f.right_len()).map(PointId) {
            for y2 in (y1.0 + 1..f.right_len()).map(PointId) {
                if checked >= limit {
                    return LipschitzVerdict { holds: true, witness: None, checked };
                }
                checked += 1;
                let bound = k * right.raw_distance(y1, y2);
                let diff = (f.get(x, y1) - f.get(x, y2)).abs();
                if diff > ExtReal::Finite(bound + COMPARE_TOL * (1.0 + bound)) {
                    return LipschitzVerdict { holds: false, witness: Some((x, y1, y2)), checked };
                }
            }
        }
    }
    LipschitzVerdict { holds: true, witness: None, checked }
}

/// Both factors of a product, each optionally restricted.
#[derive(Clone, Copy)]
pub struct ProductDomain<'a> {
    pub left: &'a dyn MetricSpace,
    pub right: &'a dyn MetricSpace,
    pub left_subset: Option<&'a PointSet>,
    pub right_subset: Option<&'a PointSet>,
}

/// The slope of the partial function `f(·, y)` at `x`, on `X₁` or on `Y₁`.
/// With `lipschitz = Some(k)` the second-variable bound is verified first.
pub fn partial_slope(
    f: &ProductFunction,
    dom: ProductDomain<'_>,
    x: PointId,
    y: PointId,
    shells: &[(f64, f64)],
    lipschitz: Option<f64>,
) -> Result<ExtReal, Error> {
    if y.0 >= f.right_len() {
        return Err(Error::UnknownPoint(y));
    }
    if dom.right_subset.is_some_and(|s| !s.contains(&y)) {
        return Err(Error::NotInSubspace(y));
    }
    if let Some(k) = lipschitz {
        if let Some((x, y1, y2)) = verify_lipschitz_second(f, dom.right, k, None).witness {
            return Err(Error::LipschitzViolation { x, y1, y2 });
        }
    }
    let left = Domain { space: dom.left, horizon: f.left_len(), subset: dom.left_subset };
    slope_at(&f.slice(y), left, x, shells)
}
