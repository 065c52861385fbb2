#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use sepdet_core::harness::generate::{dyadic, random_finite_metric, rng, MetricMethod};
use sepdet_core::{ExtReal, FiniteSpace, PointId, Tabulated};

pub fn method() -> impl Strategy<Value = MetricMethod> {
    prop_oneof![Just(MetricMethod::Euclidean), Just(MetricMethod::ShortestPath)]
}

/// A random finite space with `lo..=hi` points.
pub fn space(lo: usize, hi: usize) -> impl Strategy<Value = FiniteSpace> {
    (lo..=hi, any::<u64>(), method()).prop_map(|(n, seed, m)| random_finite_metric(n, seed, m))
}

/// A random dyadic table on `n` points; with `infinite`, about a third of the
/// values are `+∞` (one value always stays finite).
pub fn table(n: usize, seed: u64, infinite: bool) -> Tabulated {
    let mut r = rng(seed);
    let values: Vec<ExtReal> = (0..n)
        .map(|i| {
            if infinite && i > 0 && r.gen_bool(0.35) {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(dyadic(&mut r, -10.0, 10.0))
            }
        })
        .collect();
    Tabulated::new(values).unwrap()
}

pub fn ids(n: usize) -> impl Iterator<Item = PointId> {
    (0..n).map(PointId)
}

pub fn line(xs: &[f64]) -> FiniteSpace {
    FiniteSpace::line(xs).unwrap()
}
