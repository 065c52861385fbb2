//! Reduction on a product `X₁ × X₂`: the score depends on a second-factor
//! point `y`, and the subspace is a rectangle `Y₁ × Y₂`.
//!
//! `Y₂` is the given finite seed, which is its own dense subset `C`. `Y₁` is
//! closed under the witness operators of `Φ(·, ·, y)` for every `y ∈ C` at
//! once, i.e. it is a member of the intersection of the families `R_y`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::Error;
use crate::metric::{MetricSpace, PointId, PointSet};
use crate::scheme::{
    check_point, intersect_problems, ClosureConfig, DeterminacyCheck, GeneratedSubspace, WitnessProblem,
};

pub trait ProductWitnessProblem {
    fn left(&self) -> &dyn MetricSpace;

    fn right(&self) -> &dyn MetricSpace;

    fn right_horizon(&self) -> usize;

    /// The problem `Φ(·, ·, y)` on the first factor.
    fn slice(&self, y: PointId) -> Box<dyn WitnessProblem + '_>;

    /// Spot check of the regularity in `y` the reduction relies on.
    fn check_second_variable(&self) -> Result<(), Error> {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProductClosure {
    pub left: GeneratedSubspace,
    pub right: Vec<PointId>,
}

pub fn product_closure(
    problem: &dyn ProductWitnessProblem,
    left_seed: &[PointId],
    right_seed: &[PointId],
    config: &ClosureConfig,
) -> Result<ProductClosure, Error> {
    problem.check_second_variable()?;
    if right_seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    if let Some(&bad) = right_seed.iter().find(|y| y.0 >= problem.right_horizon()) {
        return Err(Error::UnknownPoint(bad));
    }
    let right: PointSet = right_seed.iter().copied().collect();
    let slices: Vec<Box<dyn WitnessProblem + '_>> = right.iter().map(|&y| problem.slice(y)).collect();
    let refs: Vec<&dyn WitnessProblem> = slices.iter().map(|b| &**b).collect();
    let left = intersect_problems(&refs, left_seed, config)?;
    Ok(ProductClosure { left, right: right.into_iter().collect() })
}

/// A reduction check at `(x, y)` with parameter `p`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProductCheck {
    pub y: PointId,
    pub check: DeterminacyCheck,
}

/// Checks the reduction for every `(x, y) ∈ Y₁ × Y₂` and every truncated
/// parameter of the slice at `y`.
pub fn check_product_reduction(
    problem: &dyn ProductWitnessProblem,
    closure: &ProductClosure,
    tolerance: f64,
) -> Result<Vec<ProductCheck>, Error> {
    let y1 = closure.left.to_set();
    let mut out = Vec::new();
    for &y in &closure.right {
        let slice = problem.slice(y);
        for &x in &y1 {
            let params = slice.params(x);
            for check in check_point(&*slice, &y1, x, &params, tolerance)? {
                out.push(ProductCheck { y, check });
            }
        }
    }
    Ok(out)
}
