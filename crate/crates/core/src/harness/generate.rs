//! Deterministic random instances: finite metric spaces and proper functions.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ext_real::ExtReal;
use crate::function::{ClosedForm, ProductFunction, Shape, Tabulated};
use crate::metric::{FiniteSpace, MetricSpace, PointId};

/// How [`random_finite_metric`] builds distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum MetricMethod {
    /// Distinct points of the plane with coordinates in `ℤ/8`.
    Euclidean,
    /// Shortest paths in a random connected graph with integer weights.
    ShortestPath,
}

/// Structured families of random functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum FunctionKind {
    /// Independent values `k/4` in `[−10, 10]`.
    Table,
    Linear,
    Quadratic,
    Abs,
    Step,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 5] =
        [FunctionKind::Table, FunctionKind::Linear, FunctionKind::Quadratic, FunctionKind::Abs, FunctionKind::Step];
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th instance of a run seeded with `seed`.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A random `n`-point space. Panics if `n == 0`.
pub fn random_finite_metric(n: usize, seed: u64, method: MetricMethod) -> FiniteSpace {
    assert!(n > 0, "a space needs at least one point");
    let mut rng = rng(seed);
    match method {
        MetricMethod::Euclidean => {
            let side = 8 * (2 + libm::sqrt(n as f64) as i64);
            let mut seen = alloc::collections::BTreeSet::new();
            let mut coords = Vec::with_capacity(n);
            while coords.len() < n {
                let a = rng.gen_range(0..=side);
                let b = rng.gen_range(0..=side);
                if seen.insert((a, b)) {
                    coords.push(alloc::vec![a as f64 / 8.0, b as f64 / 8.0]);
                }
            }
            FiniteSpace::euclidean_unlabeled(coords).expect("distinct planar points form a metric")
        }
        MetricMethod::ShortestPath => {
            let mut d = alloc::vec![alloc::vec![f64::INFINITY; n]; n];
            for (i, row) in d.iter_mut().enumerate() {
                row[i] = 0.0;
            }
            let connect = |d: &mut Vec<Vec<f64>>, a: usize, b: usize, w: f64| {
                if w < d[a][b] {
                    d[a][b] = w;
                    d[b][a] = w;
                }
            };
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for i in 1..n {
                let parent = order[rng.gen_range(0..i)];
                let w = rng.gen_range(1..=20) as f64;
                connect(&mut d, order[i], parent, w);
            }
            for _ in 0..n {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    let w = rng.gen_range(1..=20) as f64;
                    connect(&mut d, a, b, w);
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let via = d[i][k] + d[k][j];
                        if via < d[i][j] {
                            d[i][j] = via;
                        }
                    }
                }
            }
            FiniteSpace::from_matrix_unlabeled(d).expect("shortest-path completion is a metric")
        }
    }
}

/// A dyadic rational `k/4` in `[lo, hi]`.
pub fn dyadic(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range((lo * 4.0) as i64..=(hi * 4.0) as i64) as f64 / 4.0
}

/// A random real-valued function of the given kind. Closed forms read the
/// first coordinate and fall back to tables on spaces without coordinates.
pub fn random_function(space: &FiniteSpace, kind: FunctionKind, rng: &mut impl Rng) -> Tabulated {
    let n = space.len();
    let shape = match kind {
        FunctionKind::Table => None,
        FunctionKind::Linear => {
            Some(Shape::Linear { slope: dyadic(rng, -4.0, 4.0), intercept: dyadic(rng, -4.0, 4.0) })
        }
        FunctionKind::Quadratic => Some(Shape::Quadratic { scale: dyadic(rng, -2.0, 2.0) }),
        FunctionKind::Abs => Some(Shape::Abs { scale: dyadic(rng, -4.0, 4.0) }),
        FunctionKind::Step => {
            let threshold = space.coords(PointId(rng.gen_range(0..n))).map_or(0.0, |c| c[0]);
            Some(Shape::Step { threshold, below: dyadic(rng, -10.0, 10.0), above: dyadic(rng, -10.0, 10.0) })
        }
    };
    match shape {
        Some(shape) if space.coords(PointId(0)).is_some() => {
            ClosedForm::new(shape).tabulate(space, n).expect("closed forms are proper on finite spaces")
        }
        _ => {
            let values: Vec<f64> = (0..n).map(|_| dyadic(rng, -10.0, 10.0)).collect();
            Tabulated::from_reals(&values).expect("finite tables are proper")
        }
    }
}

/// Replaces the values on a random subset by `+∞`, keeping at least one
/// finite value.
pub fn with_infinite_subset(f: &Tabulated, rng: &mut impl Rng) -> Tabulated {
    let n = f.len();
    let keep = rng.gen_range(0..n);
    let values: Vec<ExtReal> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if i != keep && rng.gen_bool(0.4) { ExtReal::PosInf } else { v })
        .collect();
    Tabulated::new(values).expect("one finite value is kept")
}

/// `size` distinct random points of `0..n`, ascending.
pub fn random_subset(n: usize, size: usize, rng: &mut impl Rng) -> Vec<PointId> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut out: Vec<PointId> = all.into_iter().take(size.clamp(1, n)).map(PointId).collect();
    out.sort();
    out
}

/// `f(x, y) = g(x) + c_x·d₂(y, a)` with `|c_x| ≤ k/2`, so that `f` is
/// `k`-Lipschitz in `y`. Some rows are identically `+∞`.
pub fn lipschitz_product(left: &FiniteSpace, right: &FiniteSpace, k: f64, rng: &mut impl Rng) -> ProductFunction {
    let anchor = PointId(rng.gen_range(0..right.len()));
    let finite_row = rng.gen_range(0..left.len());
    let rows: Vec<(ExtReal, f64)> = (0..left.len())
        .map(|i| {
            let g = if i != finite_row && rng.gen_bool(0.15) {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(dyadic(rng, -10.0, 10.0))
            };
            (g, dyadic(rng, -k / 2.0, k / 2.0))
        })
        .collect();
    ProductFunction::from_fn(left.len(), right.len(), |x, y| {
        let (g, c) = rows[x.0];
        match g {
            ExtReal::Finite(g) => ExtReal::Finite(g + c * right.raw_distance(y, anchor)),
            other => other,
        }
    })
}

/// Overwrites `f(x*, y″)` with `f(x*, y′) + 2k·d₂(y′, y″) + 1` on a finite row,
/// returning `(x*, y′, y″)`. Needs at least two right points.
pub fn plant_violation(
    f: &mut ProductFunction,
    right: &FiniteSpace,
    k: f64,
    rng: &mut impl Rng,
) -> Option<(PointId, PointId, PointId)> {
    let rows: Vec<PointId> = (0..f.left_len()).map(PointId).filter(|&x| f.get(x, PointId(0)).is_finite()).collect();
    let x = *rows.choose(rng)?;
    let pair = random_subset(f.right_len(), 2, rng);
    if pair.len() < 2 {
        return None;
    }
    let (y1, y2) = (pair[0], pair[1]);
    let base = f.get(x, y1).finite()?;
    f.set(x, y2, ExtReal::Finite(base + 2.0 * k * right.raw_distance(y1, y2) + 1.0));
    Some((x, y1, y2))
}
