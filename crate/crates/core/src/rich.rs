//! Families of subsets closed under a list of witness operators.
//!
//! A family is represented by its operators: a set `Z` belongs to the family
//! when one closure round starting from `Z` adds nothing. Cofinality,
//! closure under increasing unions and closure under finite intersections of
//! families are then checked directly on finite data.

use alloc::vec::Vec;

use crate::error::Error;
use crate::metric::{MetricSpace, PointId, PointSet};
use crate::scheme::{check_shared_space, intersect_problems, same_space, select_all, ClosureConfig, WitnessProblem};

/// The family of subsets closed under every operator in `operators`.
pub struct FamilyHandle<'a> {
    operators: Vec<&'a dyn WitnessProblem>,
    config: ClosureConfig,
}

impl<'a> FamilyHandle<'a> {
    pub fn new(operators: Vec<&'a dyn WitnessProblem>, config: ClosureConfig) -> Result<Self, Error> {
        check_shared_space(&operators)?;
        Ok(FamilyHandle { operators, config })
    }

    pub fn operators(&self) -> &[&'a dyn WitnessProblem] {
        &self.operators
    }

    pub fn space(&self) -> &dyn MetricSpace {
        self.operators[0].space()
    }

    pub fn horizon(&self) -> usize {
        self.operators[0].horizon()
    }

    pub fn config(&self) -> &ClosureConfig {
        &self.config
    }

    /// Whether every selected witness of every point of `z` lies in `z`.
    pub fn is_member(&self, z: &PointSet) -> Result<bool, Error> {
        for &x in z {
            for problem in &self.operators {
                let params = problem.params(x);
                for witnesses in select_all(*problem, x, &params, self.config.eps, self.config.cap)? {
                    if witnesses.iter().flatten().any(|u| !z.contains(u)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The smallest member containing `a`.
    pub fn cofinal_extend(&self, a: &[PointId]) -> Result<PointSet, Error> {
        let closed = intersect_problems(&self.operators, a, &self.config)?;
        if !closed.fixed_point {
            return Err(Error::DepthExceeded(self.config.max_depth));
        }
        Ok(closed.to_set())
    }

    /// The union of an increasing chain of sets; errors with the index of the
    /// first link that is not an inclusion.
    pub fn sigma_union(&self, chain: &[PointSet]) -> Result<PointSet, Error> {
        for (i, pair) in chain.windows(2).enumerate() {
            if !pair[0].is_subset(&pair[1]) {
                return Err(Error::NotAChain(i));
            }
        }
        Ok(chain.iter().flatten().copied().collect())
    }

    /// The family of sets belonging to both `self` and `other`.
    pub fn intersect(&self, other: &FamilyHandle<'a>) -> Result<FamilyHandle<'a>, Error> {
        if !same_space(self.space(), other.space()) || self.horizon() != other.horizon() {
            return Err(Error::SpaceMismatch);
        }
        let mut operators = self.operators.clone();
        operators.extend(other.operators.iter().copied());
        Ok(FamilyHandle { operators, config: self.config })
    }
}
