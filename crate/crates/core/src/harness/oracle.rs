//! Exhaustive ground truth for witness problems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::ext_real::ExtReal;
use crate::metric::{PointId, PointSet};
use crate::scheme::{Param, WitnessProblem};

/// The optimum of `Φ(z, ·)` over every tuple of `X^l` (or `Y^l`) accepted by
/// `in_region`, found by scanning all of them. Independent of
/// [`WitnessProblem::region`].
pub fn brute_force_optimum(
    problem: &dyn WitnessProblem,
    x: PointId,
    p: &Param,
    restrict: Option<&PointSet>,
) -> Result<ExtReal, Error> {
    let pool: Vec<PointId> = match restrict {
        Some(y) => y.iter().copied().filter(|u| u.0 < problem.horizon()).collect(),
        None => (0..problem.horizon()).map(PointId).collect(),
    };
    let arity = problem.arity();
    let mode = problem.mode();
    let mut best: Option<ExtReal> = None;
    if pool.is_empty() || arity == 0 {
        return Err(Error::EmptyRegion { x });
    }
    let mut digits = vec![0usize; arity];
    let mut tuple = vec![pool[0]; arity];
    loop {
        for (slot, &d) in tuple.iter_mut().zip(&digits) {
            *slot = pool[d];
        }
        if problem.in_region(x, p, &tuple) {
            let s = problem.score(x, p, &tuple);
            best = Some(best.map_or(s, |b| mode.pick(b, s)));
        }
        let mut k = arity;
        loop {
            if k == 0 {
                return best.ok_or(Error::EmptyRegion { x });
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < pool.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}
