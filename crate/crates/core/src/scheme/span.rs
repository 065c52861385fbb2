//! Closure of a set of rational vectors under rational linear combinations.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::metric::Point;

/// An exact vector of `ℚⁿ`.
pub type RationalVector = Vec<BigRational>;

pub fn to_rational(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Converts point coordinates exactly (every finite `f64` is a dyadic rational).
pub fn rational_coords(points: &[Point]) -> Result<Vec<RationalVector>, Error> {
    let mut out = Vec::with_capacity(points.len());
    let mut dim = None;
    for p in points {
        let coords = p.coords.as_ref().ok_or(Error::NoCoordinates(p.id))?;
        let expected = *dim.get_or_insert(coords.len());
        if coords.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coords.len() });
        }
        let v =
            coords.iter().map(|&c| to_rational(c).ok_or(Error::NoCoordinates(p.id))).collect::<Result<Vec<_>, _>>()?;
        out.push(v);
    }
    Ok(out)
}

/// Enlarges `points` by rational linear combinations with coefficients from
/// `grid`, up to `budget` vectors in total.
///
/// Each round first adds the multiples `c · v` (`c ∈ grid`) and then the
/// sums `v + w` of distinct members; rounds repeat until nothing new appears
/// or the budget is reached. New vectors enter in increasing order within
/// each phase, so the output is deterministic, and it is a fixed point of
/// this function for the same grid and budget.
pub fn rational_span_close(
    points: &[RationalVector],
    grid: &[BigRational],
    budget: usize,
) -> Result<Vec<RationalVector>, Error> {
    if let Some(first) = points.first() {
        if let Some(bad) = points.iter().find(|v| v.len() != first.len()) {
            return Err(Error::DimensionMismatch { expected: first.len(), found: bad.len() });
        }
    }
    let mut out: Vec<RationalVector> = Vec::new();
    let mut seen: BTreeSet<RationalVector> = BTreeSet::new();
    for v in points {
        if seen.insert(v.clone()) {
            out.push(v.clone());
        }
    }
    loop {
        let before = out.len();
        let multiples: BTreeSet<RationalVector> = out
            .iter()
            .flat_map(|v| grid.iter().map(move |c| v.iter().map(|x| x * c).collect::<RationalVector>()))
            .filter(|w| !seen.contains(w))
            .collect();
        if !absorb(&mut out, &mut seen, multiples, budget) {
            break;
        }
        let mut sums = BTreeSet::new();
        for (i, v) in out.iter().enumerate() {
            for w in &out[i + 1..] {
                let s: RationalVector = v.iter().zip(w).map(|(a, b)| a + b).collect();
                if !seen.contains(&s) {
                    sums.insert(s);
                }
            }
        }
        if !absorb(&mut out, &mut seen, sums, budget) || out.len() == before {
            break;
        }
    }
    Ok(out)
}

/// Adds candidates until the budget is hit; false once it is.
fn absorb(
    out: &mut Vec<RationalVector>,
    seen: &mut BTreeSet<RationalVector>,
    candidates: BTreeSet<RationalVector>,
    budget: usize,
) -> bool {
    for c in candidates {
        if out.len() >= budget {
            return false;
        }
        seen.insert(c.clone());
        out.push(c);
    }
    out.len() < budget
}

pub fn is_zero_vector(v: &RationalVector) -> bool {
    v.iter().all(Zero::is_zero)
}
