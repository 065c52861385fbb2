//! Parameter spaces `P`, their countable dense subsets `Q`, and the finite
//! truncations of `Q` a run actually uses.

use alloc::vec::Vec;

use crate::ext_real::ExtReal;
use crate::metric::{MetricSpace, PointId};

/// A point of a parameter space.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "lowercase")
)]
pub enum Param {
    /// A radius `r > 0`.
    Radius { r: f64 },
    /// A level `t` and a shell `0 < r < s`.
    Shell { t: ExtReal, r: f64, s: f64 },
}

impl Param {
    pub fn radius(r: f64) -> Self {
        Param::Radius { r }
    }

    pub fn shell(t: ExtReal, r: f64, s: f64) -> Self {
        Param::Shell { t, r, s }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "kebab-case"))]
pub enum ParamKind {
    /// `P = (0, ∞)`, `Q` = positive rationals.
    PositiveScalars,
    /// `P = {(t, r, s) : 0 < r < s}`, `Q` = its rational points.
    ShellTriples,
}

/// Which finite part of `Q` a run uses.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "rule", rename_all = "lowercase")
)]
pub enum Truncation {
    /// Around each `x`, one scale strictly between each pair of consecutive
    /// distances from `x` (and one beyond the largest), so every distinct
    /// ball or torus around `x` is realized.
    Realized,
    /// The dyadic rationals `k / 2^exponent` in `(lo, hi]`.
    Dyadic { lo: f64, hi: f64, exponent: u32 },
    /// The first `count` elements of the enumeration of `Q`.
    Prefix { count: usize },
}

/// `(P, ρ)` with its dense subset `Q` and a truncation rule.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamSpace {
    pub kind: ParamKind,
    pub truncation: Truncation,
    /// Levels `t` paired with every shell (shell triples only; ignored by
    /// the prefix rule, whose triples carry their own level).
    pub levels: Vec<ExtReal>,
}

impl ParamSpace {
    pub fn radii(truncation: Truncation) -> Self {
        ParamSpace { kind: ParamKind::PositiveScalars, truncation, levels: Vec::new() }
    }

    pub fn shells(truncation: Truncation, levels: Vec<ExtReal>) -> Self {
        ParamSpace { kind: ParamKind::ShellTriples, truncation, levels }
    }

    /// Whether `p` is a point of `P`.
    pub fn contains(&self, p: &Param) -> bool {
        match (self.kind, p) {
            (ParamKind::PositiveScalars, Param::Radius { r }) => *r > 0.0 && r.is_finite(),
            (ParamKind::ShellTriples, Param::Shell { t, r, s }) => {
                *t != ExtReal::NegInf && *r > 0.0 && r < s && s.is_finite()
            }
            _ => false,
        }
    }

    /// The metric `ρ` of `P` (Euclidean in the coordinates; equal infinite
    /// levels are at distance zero).
    pub fn rho(&self, a: &Param, b: &Param) -> f64 {
        match (a, b) {
            (Param::Radius { r: r1 }, Param::Radius { r: r2 }) => (r1 - r2).abs(),
            (Param::Shell { t: t1, r: r1, s: s1 }, Param::Shell { t: t2, r: r2, s: s2 }) => {
                let dt = (*t1 - *t2).abs().to_f64();
                libm::sqrt(dt * dt + (r1 - r2) * (r1 - r2) + (s1 - s2) * (s1 - s2))
            }
            _ => f64::INFINITY,
        }
    }

    /// The `k`-th element of `Q`.
    pub fn dense_element(&self, k: usize) -> Param {
        match self.kind {
            ParamKind::PositiveScalars => Param::radius(positive_rational(k)),
            ParamKind::ShellTriples => {
                let (i, j) = unpair(k);
                let (a, b) = unpair(j);
                let r = positive_rational(a);
                Param::shell(ExtReal::Finite(signed_rational(i)), r, r + positive_rational(b))
            }
        }
    }

    /// The truncation of `Q` used around `x`.
    pub fn truncation_at(&self, space: &dyn MetricSpace, horizon: usize, x: PointId) -> Vec<Param> {
        if let Truncation::Prefix { count } = self.truncation {
            return (0..count).map(|k| self.dense_element(k)).collect();
        }
        let scales = match self.truncation {
            Truncation::Realized => realized_scales(space, horizon, x),
            Truncation::Dyadic { lo, hi, exponent } => dyadic_scales(lo, hi, exponent),
            Truncation::Prefix { .. } => unreachable!(),
        };
        match self.kind {
            ParamKind::PositiveScalars => scales.into_iter().map(Param::radius).collect(),
            ParamKind::ShellTriples => {
                let mut out = Vec::new();
                for &t in &self.levels {
                    for (a, &r) in scales.iter().enumerate() {
                        for &s in &scales[a + 1..] {
                            out.push(Param::shell(t, r, s));
                        }
                    }
                }
                out
            }
        }
    }

    /// Parameters strictly below the distance spectrum of `x`: the ball of
    /// radius `e₁/2` is `{x}` and the shell `(e₁/4, e₁/2)` is empty, where
    /// `e₁` is the smallest positive distance from `x`.
    pub fn probes_at(&self, space: &dyn MetricSpace, horizon: usize, x: PointId) -> Vec<Param> {
        let nearest = (0..horizon)
            .map(PointId)
            .filter(|&u| u != x)
            .map(|u| space.raw_distance(x, u))
            .fold(f64::INFINITY, f64::min);
        let e1 = if nearest.is_finite() { nearest } else { 1.0 };
        match self.kind {
            ParamKind::PositiveScalars => alloc::vec![Param::radius(e1 / 2.0)],
            ParamKind::ShellTriples => self.levels.iter().map(|&t| Param::shell(t, e1 / 4.0, e1 / 2.0)).collect(),
        }
    }
}

/// Scales realizing every distinct ball around `x`: with `0 = e₀ < e₁ < … <
/// e_m` the distances from `x`, the midpoints `(e_i + e_{i+1}) / 2` followed
/// by `e_m + 1`.
pub fn realized_scales(space: &dyn MetricSpace, horizon: usize, x: PointId) -> Vec<f64> {
    let mut d: Vec<f64> = (0..horizon).map(|u| space.raw_distance(x, PointId(u))).collect();
    d.push(0.0);
    d.sort_by(f64::total_cmp);
    d.dedup();
    let mut scales: Vec<f64> = d.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    scales.push(d[d.len() - 1] + 1.0);
    scales.dedup();
    scales
}

/// The dyadic rationals `k / 2^exponent` in `(lo, hi]`, positive only.
pub fn dyadic_scales(lo: f64, hi: f64, exponent: u32) -> Vec<f64> {
    let scale = libm::ldexp(1.0, exponent as i32);
    let first = libm::floor(lo.max(0.0) * scale) as i64 + 1;
    let last = libm::floor(hi * scale) as i64;
    (first..=last).map(|k| k as f64 / scale).filter(|&v| v > lo && v > 0.0).collect()
}

/// The Calkin–Wilf enumeration of the positive rationals: `1, 1/2, 2, 1/3,
/// 3/2, 2/3, 3, …`.
pub fn positive_rational(k: usize) -> f64 {
    let n = k as u64 + 1;
    let (mut a, mut b) = (1u64, 1u64);
    let top = 63 - n.leading_zeros();
    for bit in (0..top).rev() {
        if n >> bit & 1 == 0 {
            b += a;
        } else {
            a += b;
        }
    }
    a as f64 / b as f64
}

/// `0, q₀, −q₀, q₁, −q₁, …` over the Calkin–Wilf sequence.
pub fn signed_rational(k: usize) -> f64 {
    if k == 0 {
        0.0
    } else if k % 2 == 1 {
        positive_rational(k.div_ceil(2) - 1)
    } else {
        -positive_rational(k / 2 - 1)
    }
}

fn unpair(z: usize) -> (usize, usize) {
    let mut w = ((libm::sqrt(8.0 * z as f64 + 1.0) - 1.0) / 2.0) as usize;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}
