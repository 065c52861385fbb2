//! Witness problems and the closure construction.
//!
//! A [`WitnessProblem`] packages a region map `G(x, p) ⊆ Xˡ`, a score
//! `Φ((x, p), u)` and an optimisation [`Mode`]. Starting from a seed `C₀`,
//! [`closure_iterate`] builds
//!
//! ```text
//! C_{i+1} = C_i ∪ { π_k(D(x, p)) : x ∈ C_i, p ∈ Q, k = 1..l }
//! ```
//!
//! where `D(x, p) ⊆ G(x, p)` is a finite set of optimal witnesses chosen by
//! [`witness_select`] and `Q` is a finite truncation of a countable dense set
//! of parameters. Once the chain stops growing, its last level `Y` satisfies
//! `opt{Φ(z, u) : u ∈ G(z)} = opt{Φ(z, u) : u ∈ Yˡ ∩ G(z)}` for every
//! `x ∈ Y` and every truncated parameter, which [`check_reduction`] verifies
//! by direct enumeration.

mod params;
pub mod product;
pub mod span;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::Error;
use crate::ext_real::ExtReal;
use crate::metric::{MetricSpace, PointId, PointSet};
use crate::region::Region;

pub use params::{
    dyadic_scales, positive_rational, realized_scales, signed_rational, Param, ParamKind, ParamSpace, Truncation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Mode {
    Sup,
    Inf,
}

impl Mode {
    /// Optimum over the empty set: `−∞` for sup, `+∞` for inf.
    pub fn empty_value(self) -> ExtReal {
        match self {
            Mode::Sup => ExtReal::NegInf,
            Mode::Inf => ExtReal::PosInf,
        }
    }

    pub fn pick(self, a: ExtReal, b: ExtReal) -> ExtReal {
        match self {
            Mode::Sup => a.max(b),
            Mode::Inf => a.min(b),
        }
    }

    /// How far `value` falls short of `best`, always `≥ 0` when `best` is
    /// the optimum.
    pub fn shortfall(self, best: ExtReal, value: ExtReal) -> ExtReal {
        match self {
            Mode::Sup => best - value,
            Mode::Inf => value - best,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Sup => "sup",
            Mode::Inf => "inf",
        }
    }
}

/// The data `(G, Φ, l, mode)` over a space `X` and parameter set `P`.
///
/// Implementations must be deterministic: `region` lists tuples in
/// lexicographic order and `params` returns the same list on every call.
pub trait WitnessProblem {
    fn label(&self) -> &str;

    fn space(&self) -> &dyn MetricSpace;

    /// Number of enumerated points the problem ranges over.
    fn horizon(&self) -> usize;

    fn arity(&self) -> usize;

    fn mode(&self) -> Mode;

    /// The truncated parameter set used around `x`, restricted to parameters
    /// whose region is nonempty.
    fn params(&self, x: PointId) -> Vec<Param>;

    /// Parameters below the distance spectrum of `x` whose regions are empty;
    /// used to exercise the skipped branch of the checks.
    fn probes(&self, _x: PointId) -> Vec<Param> {
        Vec::new()
    }

    fn region(&self, x: PointId, p: &Param) -> Result<Region, Error>;

    /// Membership test for `G(x, p)`, used by brute-force oracles that scan
    /// all of `Xˡ` instead of enumerating the region.
    fn in_region(&self, x: PointId, p: &Param, u: &[PointId]) -> bool;

    fn score(&self, x: PointId, p: &Param, u: &[PointId]) -> ExtReal;

    /// For each of `params`, the optimum over the tuples of `G(x, p)` whose
    /// components lie in `within` (all tuples if `None`) together with the
    /// lexicographically first tuple attaining it; `None` for an empty region.
    ///
    /// Problems with a sweep faster than one region scan per parameter
    /// override this. The default returns `None` and callers fall back to
    /// scanning.
    fn optimize_batch(&self, _x: PointId, _params: &[Param], _within: Option<&PointSet>) -> Option<Vec<Option<Best>>> {
        None
    }
}

/// An optimum and the lexicographically first tuple attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct Best {
    pub value: ExtReal,
    pub witness: Vec<PointId>,
}

impl Best {
    /// Whether `(value, witness)` should replace `self` under `mode`, with ties
    /// going to the lexicographically smaller tuple.
    pub fn beaten_by(&self, mode: Mode, value: ExtReal, witness: &[PointId]) -> bool {
        let better = match mode {
            Mode::Sup => value > self.value,
            Mode::Inf => value < self.value,
        };
        better || (value == self.value && witness < self.witness.as_slice())
    }
}

/// Keeps the better of `current` and `(value, witness)`.
pub fn improve(current: &mut Option<Best>, mode: Mode, value: ExtReal, witness: &[PointId]) {
    match current {
        Some(best) if !best.beaten_by(mode, value, witness) => {}
        _ => *current = Some(Best { value, witness: witness.to_vec() }),
    }
}

/// [`witness_select`] for each of `params`, through
/// [`WitnessProblem::optimize_batch`] when `eps = 0` and `cap = 1`.
pub fn select_all(
    problem: &dyn WitnessProblem,
    x: PointId,
    params: &[Param],
    eps: f64,
    cap: usize,
) -> Result<Vec<Region>, Error> {
    if eps <= 0.0 && cap <= 1 {
        if let Some(batch) = problem.optimize_batch(x, params, None) {
            return batch
                .into_iter()
                .map(|best| {
                    let best = best.ok_or(Error::EmptyRegion { x })?;
                    let mut region = Region::new(best.witness.len());
                    region.push(&best.witness);
                    Ok(region)
                })
                .collect();
        }
    }
    params.iter().map(|p| witness_select(problem, x, p, eps, cap)).collect()
}

/// Knobs of the witness selector and the closure loop.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClosureConfig {
    /// Witnesses may fall short of the optimum by at most `eps`.
    pub eps: f64,
    /// At most `cap` witnesses per `(x, p)`.
    pub cap: usize,
    /// At most `max_depth` closure rounds.
    pub max_depth: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig { eps: 0.0, cap: 1, max_depth: 10_000 }
    }
}

/// `D(z)`: the lexicographically first `cap` tuples of `G(z)` whose score is
/// within `eps` of the optimum.
pub fn witness_select(
    problem: &dyn WitnessProblem,
    x: PointId,
    p: &Param,
    eps: f64,
    cap: usize,
) -> Result<Region, Error> {
    let region = problem.region(x, p)?;
    if region.is_empty() {
        return Err(Error::EmptyRegion { x });
    }
    let mode = problem.mode();
    let scored: Vec<(&[PointId], ExtReal)> = region.iter().map(|u| (u, problem.score(x, p, u))).collect();
    let best = scored.iter().fold(mode.empty_value(), |acc, &(_, s)| mode.pick(acc, s));
    let slack = ExtReal::Finite(eps.max(0.0));
    let mut chosen: Vec<&[PointId]> =
        scored.into_iter().filter(|&(_, s)| mode.shortfall(best, s) <= slack).map(|(u, _)| u).collect();
    chosen.sort_unstable();
    let mut out = Region::new(region.arity());
    for u in chosen.into_iter().take(cap.max(1)) {
        out.push(u);
    }
    Ok(out)
}

/// Why a point entered the closure.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub problem: usize,
    pub source: PointId,
    pub param: Param,
    pub witness: Vec<PointId>,
    /// Index of the point inside `witness`.
    pub component: usize,
}

/// The chain `C₀ ⊆ C₁ ⊆ … ⊆ C_N` produced by [`closure_iterate`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeneratedSubspace {
    pub levels: Vec<Vec<PointId>>,
    pub fixed_point: bool,
    pub provenance: BTreeMap<PointId, Provenance>,
}

impl GeneratedSubspace {
    /// The last level `Y`.
    pub fn points(&self) -> &[PointId] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn to_set(&self) -> PointSet {
        self.points().iter().copied().collect()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Number of closure rounds that were run.
    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn depth_exceeded(&self) -> bool {
        !self.fixed_point
    }
}

/// Closes `seed` under the witness operator of `problem`.
pub fn closure_iterate(
    problem: &dyn WitnessProblem,
    seed: &[PointId],
    config: &ClosureConfig,
) -> Result<GeneratedSubspace, Error> {
    close_under(&[problem], seed, config)
}

/// Closes `seed` under the union of the witness operators of all `problems`,
/// which must share one space. The result is closed under each operator
/// separately.
pub fn intersect_problems(
    problems: &[&dyn WitnessProblem],
    seed: &[PointId],
    config: &ClosureConfig,
) -> Result<GeneratedSubspace, Error> {
    close_under(problems, seed, config)
}

pub(crate) fn same_space(a: &dyn MetricSpace, b: &dyn MetricSpace) -> bool {
    core::ptr::addr_eq(a as *const dyn MetricSpace, b as *const dyn MetricSpace)
}

pub(crate) fn check_shared_space(problems: &[&dyn WitnessProblem]) -> Result<(), Error> {
    let first = problems.first().ok_or(Error::EmptyFamily)?;
    for p in &problems[1..] {
        if !same_space(first.space(), p.space()) || first.horizon() != p.horizon() {
            return Err(Error::SpaceMismatch);
        }
    }
    Ok(())
}

fn close_under(
    problems: &[&dyn WitnessProblem],
    seed: &[PointId],
    config: &ClosureConfig,
) -> Result<GeneratedSubspace, Error> {
    check_shared_space(problems)?;
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    let horizon = problems[0].horizon();
    if let Some(&bad) = seed.iter().find(|u| u.0 >= horizon) {
        return Err(Error::UnknownPoint(bad));
    }

    let mut current: PointSet = seed.iter().copied().collect();
    let mut levels = alloc::vec![current.iter().copied().collect::<Vec<_>>()];
    let mut provenance = BTreeMap::new();
    // Witnesses of points already processed are already in `current`, so
    // each round only needs to visit the points added by the previous one.
    let mut frontier = levels[0].clone();
    let mut fixed_point = false;

    for _ in 0..config.max_depth {
        let mut added = BTreeSet::new();
        for &x in &frontier {
            for (index, problem) in problems.iter().enumerate() {
                let params = problem.params(x);
                let selected = select_all(*problem, x, &params, config.eps, config.cap)?;
                for (p, witnesses) in params.iter().zip(&selected) {
                    for tuple in witnesses.iter() {
                        for (k, &u) in tuple.iter().enumerate() {
                            if !current.contains(&u) && added.insert(u) {
                                provenance.insert(
                                    u,
                                    Provenance {
                                        problem: index,
                                        source: x,
                                        param: p.clone(),
                                        witness: tuple.to_vec(),
                                        component: k,
                                    },
                                );
                            }
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            levels.push(levels.last().cloned().unwrap_or_default());
            fixed_point = true;
            break;
        }
        current.extend(added.iter().copied());
        levels.push(current.iter().copied().collect());
        frontier = added.into_iter().collect();
    }

    Ok(GeneratedSubspace { levels, fixed_point, provenance })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum Verdict {
    Pass,
    Fail,
    SkippedEmptyRegion,
}

/// One instance of the reduction equality at `z = (x, p)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeterminacyCheck {
    pub x: PointId,
    pub param: Param,
    pub mode: Mode,
    /// Optimum over `G(z)`.
    pub lhs: ExtReal,
    /// Optimum over `Yˡ ∩ G(z)`.
    pub rhs: ExtReal,
    pub region_hit: bool,
    /// `rhs ≤ lhs` in sup mode, `rhs ≥ lhs` in inf mode.
    pub monotone: bool,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl DeterminacyCheck {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Compares the optimum of `Φ(z, ·)` over `G(z)` with the optimum over the
/// tuples of `G(z)` whose components all lie in `y`.
pub fn check_reduction(
    problem: &dyn WitnessProblem,
    y: &PointSet,
    x: PointId,
    p: &Param,
    tolerance: f64,
) -> Result<DeterminacyCheck, Error> {
    if !y.contains(&x) {
        return Err(Error::NotInSubspace(x));
    }
    let mode = problem.mode();
    let region = problem.region(x, p)?;
    let mut lhs = mode.empty_value();
    let mut rhs = mode.empty_value();
    let mut region_hit = false;
    for u in region.iter() {
        let s = problem.score(x, p, u);
        lhs = mode.pick(lhs, s);
        if u.iter().all(|c| y.contains(c)) {
            region_hit = true;
            rhs = mode.pick(rhs, s);
        }
    }
    Ok(judge(x, p, mode, !region.is_empty(), region_hit, lhs, rhs, tolerance))
}

#[allow(clippy::too_many_arguments)]
fn judge(
    x: PointId,
    p: &Param,
    mode: Mode,
    nonempty: bool,
    region_hit: bool,
    lhs: ExtReal,
    rhs: ExtReal,
    tolerance: f64,
) -> DeterminacyCheck {
    let monotone = match mode {
        Mode::Sup => rhs <= lhs,
        Mode::Inf => rhs >= lhs,
    };
    debug_assert!(monotone, "restricted optimum beats the full optimum");
    let verdict = if !nonempty {
        Verdict::SkippedEmptyRegion
    } else if region_hit && monotone && mode.shortfall(lhs, rhs) <= ExtReal::Finite(tolerance) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    DeterminacyCheck { x, param: p.clone(), mode, lhs, rhs, region_hit, monotone, tolerance, verdict }
}

pub fn check_sup_reduction(
    problem: &dyn WitnessProblem,
    y: &PointSet,
    x: PointId,
    p: &Param,
    tolerance: f64,
) -> Result<DeterminacyCheck, Error> {
    if problem.mode() != Mode::Sup {
        return Err(Error::ModeMismatch { expected: "sup" });
    }
    check_reduction(problem, y, x, p, tolerance)
}

pub fn check_inf_reduction(
    problem: &dyn WitnessProblem,
    y: &PointSet,
    x: PointId,
    p: &Param,
    tolerance: f64,
) -> Result<DeterminacyCheck, Error> {
    if problem.mode() != Mode::Inf {
        return Err(Error::ModeMismatch { expected: "inf" });
    }
    check_reduction(problem, y, x, p, tolerance)
}

/// Runs [`check_reduction`] for every `x ∈ y` and every truncated parameter
/// and probe, sweeping all parameters of a point at once when the problem
/// supports it.
pub fn check_all(problem: &dyn WitnessProblem, y: &PointSet, tolerance: f64) -> Result<Vec<DeterminacyCheck>, Error> {
    let mut out = Vec::new();
    for &x in y {
        let params: Vec<Param> = problem.params(x).into_iter().chain(problem.probes(x)).collect();
        out.extend(check_point(problem, y, x, &params, tolerance)?);
    }
    Ok(out)
}

/// [`check_reduction`] at `x` for each of `params`.
pub fn check_point(
    problem: &dyn WitnessProblem,
    y: &PointSet,
    x: PointId,
    params: &[Param],
    tolerance: f64,
) -> Result<Vec<DeterminacyCheck>, Error> {
    if !y.contains(&x) {
        return Err(Error::NotInSubspace(x));
    }
    let full = problem.optimize_batch(x, params, None);
    let restricted = problem.optimize_batch(x, params, Some(y));
    let (Some(full), Some(restricted)) = (full, restricted) else {
        return params.iter().map(|p| check_reduction(problem, y, x, p, tolerance)).collect();
    };
    let mode = problem.mode();
    Ok(params
        .iter()
        .zip(full.iter().zip(&restricted))
        .map(|(p, (a, b))| {
            let lhs = a.as_ref().map_or(mode.empty_value(), |a| a.value);
            let rhs = b.as_ref().map_or(mode.empty_value(), |b| b.value);
            judge(x, p, mode, a.is_some(), b.is_some(), lhs, rhs, tolerance)
        })
        .collect())
}
