//! The shipped witness problems.
//!
//! | label            | `G(x, p)`                               | `Φ`                          | arity |
//! |------------------|-----------------------------------------|------------------------------|-------|
//! | `ball-pairs`     | distinct ordered pairs of `B(x, r)`     | `|f(u₁) − f(u₂)| / d(u₁, u₂)` | 2     |
//! | `punctured-ball` | `B(x, r) \ {x}`                         | `f(u)`                       | 1     |
//! | `torus-slope`    | `T(x, r, s)`                            | `(t − f(u))⁺ / d(x, u)`       | 1     |

use alloc::borrow::Cow;
use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::Error;
use crate::ext_real::ExtReal;
use crate::function::{FunctionOracle, ProductFunction, Slice};
use crate::functionals::verify_lipschitz_second;
use crate::metric::{MetricSpace, PointId, PointSet};
use crate::region::{self, Region};
use crate::scheme::product::ProductWitnessProblem;
use crate::scheme::{improve, Best, Mode, Param, ParamSpace, Truncation, WitnessProblem};

/// Sorted distances from `x` to the other points of the horizon.
fn spectrum(space: &dyn MetricSpace, horizon: usize, x: PointId) -> Vec<f64> {
    let mut d: Vec<f64> = (0..horizon).map(PointId).filter(|&u| u != x).map(|u| space.raw_distance(x, u)).collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Whether some other point lies at distance in `(r, s)`.
fn hits(spectrum: &[f64], r: f64, s: f64) -> bool {
    let i = spectrum.partition_point(|&d| d <= r);
    i < spectrum.len() && spectrum[i] < s
}

/// Points of the horizon (within `within`, if given) sorted by distance from
/// `x`, ties by id.
fn by_distance(space: &dyn MetricSpace, horizon: usize, x: PointId, within: Option<&PointSet>) -> Vec<(f64, PointId)> {
    let mut pts: Vec<(f64, PointId)> = (0..horizon)
        .map(PointId)
        .filter(|u| within.is_none_or(|y| y.contains(u)))
        .map(|u| (space.raw_distance(x, u), u))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    pts
}

fn radius_of(p: &Param) -> Result<f64, Error> {
    match p {
        Param::Radius { r } => Ok(*r),
        _ => Err(Error::ForeignParam),
    }
}

/// Difference quotients of `f` over pairs of a ball.
pub struct BallPairQuotient<'a, F> {
    space: &'a dyn MetricSpace,
    horizon: usize,
    f: F,
    mode: Mode,
    params: ParamSpace,
}

impl<'a, F: FunctionOracle> BallPairQuotient<'a, F> {
    pub fn new(space: &'a dyn MetricSpace, horizon: usize, f: F, mode: Mode) -> Self {
        BallPairQuotient { space, horizon, f, mode, params: ParamSpace::radii(Truncation::Realized) }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.params.truncation = truncation;
        self
    }

    pub fn quotient(&self, u1: PointId, u2: PointId) -> ExtReal {
        (self.f.eval(u1) - self.f.eval(u2)).abs().div_positive(self.space.raw_distance(u1, u2))
    }
}

impl<F: FunctionOracle> WitnessProblem for BallPairQuotient<'_, F> {
    fn label(&self) -> &str {
        "ball-pairs"
    }
    fn space(&self) -> &dyn MetricSpace {
        self.space
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn arity(&self) -> usize {
        2
    }
    fn mode(&self) -> Mode {
        self.mode
    }

    fn params(&self, x: PointId) -> Vec<Param> {
        let spec = spectrum(self.space, self.horizon, x);
        let mut out = self.params.truncation_at(self.space, self.horizon, x);
        out.retain(|p| matches!(p, Param::Radius { r } if spec.first().is_some_and(|&d| d < *r)));
        out
    }

    fn probes(&self, x: PointId) -> Vec<Param> {
        self.params.probes_at(self.space, self.horizon, x)
    }

    fn region(&self, x: PointId, p: &Param) -> Result<Region, Error> {
        region::ball_pairs(self.space, x, radius_of(p)?, Some(self.horizon))
    }

    fn in_region(&self, x: PointId, p: &Param, u: &[PointId]) -> bool {
        let Ok(r) = radius_of(p) else { return false };
        u.len() == 2 && u[0] != u[1] && u.iter().all(|&c| c.0 < self.horizon && self.space.raw_distance(x, c) < r)
    }

    fn score(&self, _x: PointId, _p: &Param, u: &[PointId]) -> ExtReal {
        self.quotient(u[0], u[1])
    }

    /// Balls are nested in `r` and the score does not depend on `r`, so one
    /// sweep adding points by distance serves every radius.
    fn optimize_batch(&self, x: PointId, params: &[Param], within: Option<&PointSet>) -> Option<Vec<Option<Best>>> {
        let radii: Vec<f64> = params.iter().map(radius_of).collect::<Result<_, _>>().ok()?;
        if radii.iter().any(|&r| !(r > 0.0)) {
            return None;
        }
        let pts = by_distance(self.space, self.horizon, x, within);
        let mut order: Vec<usize> = (0..radii.len()).collect();
        order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
        let mut out = alloc::vec![None; radii.len()];
        let mut best = None;
        let mut added = 0;
        for i in order {
            while added < pts.len() && pts[added].0 < radii[i] {
                let v = pts[added].1;
                for &(_, u) in &pts[..added] {
                    for pair in [[u, v], [v, u]] {
                        improve(&mut best, self.mode, self.quotient(pair[0], pair[1]), &pair);
                    }
                }
                added += 1;
            }
            out[i] = best.clone();
        }
        Some(out)
    }
}

/// Values of `f` on punctured balls; sup mode gives upper limits, inf mode
/// lower limits.
pub struct PuncturedBall<'a, F> {
    space: &'a dyn MetricSpace,
    horizon: usize,
    f: F,
    mode: Mode,
    params: ParamSpace,
}

impl<'a, F: FunctionOracle> PuncturedBall<'a, F> {
    pub fn new(space: &'a dyn MetricSpace, horizon: usize, f: F, mode: Mode) -> Self {
        PuncturedBall { space, horizon, f, mode, params: ParamSpace::radii(Truncation::Realized) }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.params.truncation = truncation;
        self
    }
}

impl<F: FunctionOracle> WitnessProblem for PuncturedBall<'_, F> {
    fn label(&self) -> &str {
        "punctured-ball"
    }
    fn space(&self) -> &dyn MetricSpace {
        self.space
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn arity(&self) -> usize {
        1
    }
    fn mode(&self) -> Mode {
        self.mode
    }

    fn params(&self, x: PointId) -> Vec<Param> {
        let spec = spectrum(self.space, self.horizon, x);
        let mut out = self.params.truncation_at(self.space, self.horizon, x);
        out.retain(|p| matches!(p, Param::Radius { r } if spec.first().is_some_and(|&d| d < *r)));
        out
    }

    fn probes(&self, x: PointId) -> Vec<Param> {
        self.params.probes_at(self.space, self.horizon, x)
    }

    fn region(&self, x: PointId, p: &Param) -> Result<Region, Error> {
        let pts = region::punctured_ball_points(self.space, x, radius_of(p)?, Some(self.horizon))?;
        Ok(Region::singletons(&pts))
    }

    fn in_region(&self, x: PointId, p: &Param, u: &[PointId]) -> bool {
        let Ok(r) = radius_of(p) else { return false };
        u.len() == 1 && u[0] != x && u[0].0 < self.horizon && self.space.raw_distance(x, u[0]) < r
    }

    fn score(&self, _x: PointId, _p: &Param, u: &[PointId]) -> ExtReal {
        self.f.eval(u[0])
    }
}

/// `(t − f(u))⁺ / d(x, u)` over tori `T(x, r, s)`.
pub struct TorusSlope<'a, F> {
    space: &'a dyn MetricSpace,
    horizon: usize,
    f: F,
    mode: Mode,
    params: ParamSpace,
    at_point: bool,
}

impl<'a, F: FunctionOracle> TorusSlope<'a, F> {
    pub fn new(space: &'a dyn MetricSpace, horizon: usize, f: F, levels: Vec<ExtReal>, mode: Mode) -> Self {
        TorusSlope {
            space,
            horizon,
            f,
            mode,
            params: ParamSpace::shells(Truncation::Realized, levels),
            at_point: false,
        }
    }

    /// Uses the single level `t = f(x)` around each `x`. Every distinct torus
    /// region still appears, and the slope at `x` only reads this level.
    pub fn at_point_level(space: &'a dyn MetricSpace, horizon: usize, f: F, mode: Mode) -> Self {
        TorusSlope { at_point: true, ..Self::new(space, horizon, f, Vec::new(), mode) }
    }

    /// Uses the distinct values of `f` on the horizon as levels, so that
    /// `t = f(x)` is available at every `x`.
    pub fn with_function_levels(space: &'a dyn MetricSpace, horizon: usize, f: F, mode: Mode) -> Self {
        let levels = function_levels(&f, horizon);
        Self::new(space, horizon, f, levels, mode)
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.params.truncation = truncation;
        self
    }

    /// The fixed levels (empty with [`TorusSlope::at_point_level`]).
    pub fn levels(&self) -> &[ExtReal] {
        &self.params.levels
    }

    fn params_at(&self, x: PointId) -> Cow<'_, ParamSpace> {
        if self.at_point {
            let mut local = self.params.clone();
            local.levels = alloc::vec![self.f.eval(x)];
            Cow::Owned(local)
        } else {
            Cow::Borrowed(&self.params)
        }
    }
}

/// Distinct values of `f` on the first `horizon` points, ascending.
pub fn function_levels(f: &impl FunctionOracle, horizon: usize) -> Vec<ExtReal> {
    let mut levels: Vec<ExtReal> = (0..horizon).map(|i| f.eval(PointId(i))).collect();
    levels.sort();
    levels.dedup();
    levels
}

/// The torus score `(t − f(u))⁺ / d(x, u)` with `+∞ − ∞ = 0`.
pub fn torus_score(t: ExtReal, fu: ExtReal, d: f64) -> ExtReal {
    (t - fu).positive_part().div_positive(d)
}

impl<F: FunctionOracle> WitnessProblem for TorusSlope<'_, F> {
    fn label(&self) -> &str {
        "torus-slope"
    }
    fn space(&self) -> &dyn MetricSpace {
        self.space
    }
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn arity(&self) -> usize {
        1
    }
    fn mode(&self) -> Mode {
        self.mode
    }

    fn params(&self, x: PointId) -> Vec<Param> {
        let mut out = self.params_at(x).truncation_at(self.space, self.horizon, x);
        if self.params.truncation != Truncation::Realized {
            let spec = spectrum(self.space, self.horizon, x);
            out.retain(|p| matches!(p, Param::Shell { r, s, .. } if hits(&spec, *r, *s)));
        }
        out
    }

    fn probes(&self, x: PointId) -> Vec<Param> {
        self.params_at(x).probes_at(self.space, self.horizon, x)
    }

    fn region(&self, x: PointId, p: &Param) -> Result<Region, Error> {
        let Param::Shell { r, s, .. } = p else { return Err(Error::ForeignParam) };
        let pts = region::torus_points(self.space, x, *r, *s, Some(self.horizon))?;
        Ok(Region::singletons(&pts))
    }

    fn in_region(&self, x: PointId, p: &Param, u: &[PointId]) -> bool {
        let Param::Shell { r, s, .. } = p else { return false };
        if u.len() != 1 || u[0].0 >= self.horizon {
            return false;
        }
        let d = self.space.raw_distance(x, u[0]);
        *r < d && d < *s
    }

    fn score(&self, x: PointId, p: &Param, u: &[PointId]) -> ExtReal {
        let Param::Shell { t, .. } = p else { return self.mode.empty_value() };
        torus_score(*t, self.f.eval(u[0]), self.space.raw_distance(x, u[0]))
    }

    /// A torus is a contiguous run of the points sorted by distance, so
    /// shells sharing `(t, r)` are served by one sweep over increasing `s`.
    fn optimize_batch(&self, x: PointId, params: &[Param], within: Option<&PointSet>) -> Option<Vec<Option<Best>>> {
        let pts = by_distance(self.space, self.horizon, x, within);
        let mut keys = Vec::with_capacity(params.len());
        for p in params {
            let Param::Shell { t, r, s } = *p else { return None };
            if !(r > 0.0 && r < s) {
                return None;
            }
            keys.push((t, pts.partition_point(|e| e.0 <= r), pts.partition_point(|e| e.0 < s)));
        }
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by_key(|&i| keys[i]);
        let mut out = alloc::vec![None; keys.len()];
        let mut group = None;
        let mut best = None;
        let mut pos = 0;
        for i in order {
            let (t, lo, hi) = keys[i];
            if group != Some((t, lo)) {
                group = Some((t, lo));
                best = None;
                pos = lo;
            }
            while pos < hi {
                let (d, u) = pts[pos];
                improve(&mut best, self.mode, torus_score(t, self.f.eval(u), d), &[u]);
                pos += 1;
            }
            out[i] = if lo < hi { best.clone() } else { None };
        }
        Some(out)
    }
}

/// Torus scores of the partial functions `f(·, y)` of a tabulated function on
/// `X₁ × X₂`. The slice at `y` uses the level `t = f(x, y)` around each `x`.
pub struct ProductTorusSlope<'a> {
    left: &'a dyn MetricSpace,
    right: &'a dyn MetricSpace,
    f: &'a ProductFunction,
    lipschitz: Option<f64>,
    truncation: Truncation,
}

impl<'a> ProductTorusSlope<'a> {
    pub fn new(left: &'a dyn MetricSpace, right: &'a dyn MetricSpace, f: &'a ProductFunction) -> Self {
        ProductTorusSlope { left, right, f, lipschitz: None, truncation: Truncation::Realized }
    }

    /// Declares `|f(x, y′) − f(x, y″)| ≤ k·d₂(y′, y″)`; checked by
    /// [`ProductWitnessProblem::check_second_variable`].
    pub fn with_lipschitz(mut self, k: f64) -> Self {
        self.lipschitz = Some(k);
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn slice_problem(&self, y: PointId) -> TorusSlope<'a, Slice<'a>> {
        let n = self.f.left_len();
        TorusSlope::at_point_level(self.left, n, self.f.slice(y), Mode::Sup).with_truncation(self.truncation)
    }
}

impl ProductWitnessProblem for ProductTorusSlope<'_> {
    fn left(&self) -> &dyn MetricSpace {
        self.left
    }

    fn right(&self) -> &dyn MetricSpace {
        self.right
    }

    fn right_horizon(&self) -> usize {
        self.f.right_len()
    }

    fn slice(&self, y: PointId) -> Box<dyn WitnessProblem + '_> {
        Box::new(self.slice_problem(y))
    }

    fn check_second_variable(&self) -> Result<(), Error> {
        let Some(k) = self.lipschitz else { return Ok(()) };
        match verify_lipschitz_second(self.f, self.right, k, None).witness {
            None => Ok(()),
            Some((x, y1, y2)) => Err(Error::LipschitzViolation { x, y1, y2 }),
        }
    }
}
