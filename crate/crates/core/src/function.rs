//! Extended-real-valued functions on the points of a space.

use alloc::vec::Vec;

use crate::error::Error;
use crate::ext_real::ExtReal;
use crate::metric::{MetricSpace, PointId};

pub trait FunctionOracle {
    fn eval(&self, x: PointId) -> ExtReal;
}

impl<F: FunctionOracle + ?Sized> FunctionOracle for &F {
    fn eval(&self, x: PointId) -> ExtReal {
        (**self).eval(x)
    }
}

/// A function given by its value at each enumerated point.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct Tabulated {
    values: Vec<ExtReal>,
}

impl Tabulated {
    /// Accepts only proper tables: no `−∞` and at least one finite value.
    pub fn new(values: Vec<ExtReal>) -> Result<Self, Error> {
        if values.contains(&ExtReal::NegInf) {
            return Err(Error::ImproperFunction("takes the value -inf"));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::ImproperFunction("finite nowhere"));
        }
        Ok(Tabulated { values })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self, Error> {
        Self::new(values.iter().map(|&v| ExtReal::from(v)).collect())
    }

    /// Tabulates an arbitrary oracle without the properness check.
    pub fn from_fn(horizon: usize, f: impl Fn(PointId) -> ExtReal) -> Self {
        Tabulated { values: (0..horizon).map(|i| f(PointId(i))).collect() }
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_real_valued(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Distinct values in increasing order.
    pub fn distinct_values(&self) -> Vec<ExtReal> {
        let mut v = self.values.clone();
        v.sort();
        v.dedup();
        v
    }

    pub fn negated(&self) -> Tabulated {
        Tabulated { values: self.values.iter().map(|&v| -v).collect() }
    }

    pub fn scaled(&self, c: f64) -> Tabulated {
        Tabulated { values: self.values.iter().map(|&v| v.scale(c)).collect() }
    }
}

impl FunctionOracle for Tabulated {
    fn eval(&self, x: PointId) -> ExtReal {
        self.values[x.0]
    }
}

/// Named closed forms over one coordinate axis.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "shape", rename_all = "lowercase")
)]
pub enum Shape {
    /// `slope · c + intercept`
    Linear { slope: f64, intercept: f64 },
    /// `scale · c²`
    Quadratic { scale: f64 },
    /// `scale · |c|`
    Abs { scale: f64 },
    /// `below` for `c < threshold`, else `above`.
    Step { threshold: f64, below: f64, above: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClosedForm {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub shape: Shape,
    #[cfg_attr(feature = "serde", serde(default))]
    pub axis: usize,
}

impl ClosedForm {
    /// The coordinate function `x ↦ x[0]`.
    pub const COORD: ClosedForm = ClosedForm { shape: Shape::Linear { slope: 1.0, intercept: 0.0 }, axis: 0 };

    pub fn new(shape: Shape) -> Self {
        ClosedForm { shape, axis: 0 }
    }

    pub fn eval_coord(&self, c: f64) -> f64 {
        match self.shape {
            Shape::Linear { slope, intercept } => slope * c + intercept,
            Shape::Quadratic { scale } => scale * c * c,
            Shape::Abs { scale } => scale * c.abs(),
            Shape::Step { threshold, below, above } => {
                if c < threshold {
                    below
                } else {
                    above
                }
            }
        }
    }

    /// Evaluates on the first `horizon` points; every point needs coordinates.
    pub fn tabulate(&self, space: &dyn MetricSpace, horizon: usize) -> Result<Tabulated, Error> {
        let mut values = Vec::with_capacity(horizon);
        for i in 0..horizon {
            let p = space.point(PointId(i))?;
            let coords = p.coords.ok_or(Error::NoCoordinates(p.id))?;
            let c = *coords
                .get(self.axis)
                .ok_or(Error::DimensionMismatch { expected: self.axis + 1, found: coords.len() })?;
            values.push(ExtReal::from(self.eval_coord(c)));
        }
        Tabulated::new(values)
    }
}

/// A tabulated function on a product `X₁ × X₂` of finite spaces.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProductFunction {
    left: usize,
    right: usize,
    /// Row-major: `values[x * right + y]`.
    values: Vec<ExtReal>,
}

impl ProductFunction {
    pub fn new(left: usize, right: usize, values: Vec<ExtReal>) -> Result<Self, Error> {
        if values.len() != left * right {
            return Err(Error::TableSize { expected: left * right, found: values.len() });
        }
        Ok(ProductFunction { left, right, values })
    }

    pub fn from_fn(left: usize, right: usize, f: impl Fn(PointId, PointId) -> ExtReal) -> Self {
        let mut values = Vec::with_capacity(left * right);
        for x in 0..left {
            for y in 0..right {
                values.push(f(PointId(x), PointId(y)));
            }
        }
        ProductFunction { left, right, values }
    }

    pub fn left_len(&self) -> usize {
        self.left
    }

    pub fn right_len(&self) -> usize {
        self.right
    }

    pub fn get(&self, x: PointId, y: PointId) -> ExtReal {
        self.values[x.0 * self.right + y.0]
    }

    pub fn set(&mut self, x: PointId, y: PointId, v: ExtReal) {
        self.values[x.0 * self.right + y.0] = v;
    }

    /// The partial function `f(·, y)`.
    pub fn slice(&self, y: PointId) -> Slice<'_> {
        Slice { f: self, y }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Slice<'a> {
    f: &'a ProductFunction,
    y: PointId,
}

impl FunctionOracle for Slice<'_> {
    fn eval(&self, x: PointId) -> ExtReal {
        self.f.get(x, self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::FiniteSpace;

    #[test]
    fn properness_is_enforced() {
        assert!(Tabulated::new(alloc::vec![ExtReal::PosInf]).is_err());
        assert!(Tabulated::new(alloc::vec![ExtReal::ZERO, ExtReal::NegInf]).is_err());
        assert!(Tabulated::new(alloc::vec![ExtReal::ZERO, ExtReal::PosInf]).is_ok());
    }

    #[test]
    fn closed_forms_on_a_line() {
        let s = FiniteSpace::line(&[-2.0, 0.0, 3.0]).unwrap();
        let f = ClosedForm::COORD.tabulate(&s, 3).unwrap();
        assert_eq!(f.values(), &[ExtReal::from(-2.0), ExtReal::ZERO, ExtReal::from(3.0)]);
        let q = ClosedForm::new(Shape::Quadratic { scale: 1.0 }).tabulate(&s, 3).unwrap();
        assert_eq!(q.eval(PointId(0)), ExtReal::from(4.0));
        let step = ClosedForm::new(Shape::Step { threshold: 0.0, below: 0.0, above: 1.0 });
        assert_eq!(step.eval_coord(0.0), 1.0);
        let abstract_space = FiniteSpace::from_matrix_unlabeled(alloc::vec![alloc::vec![0.0]]).unwrap();
        assert_eq!(ClosedForm::COORD.tabulate(&abstract_space, 1), Err(Error::NoCoordinates(PointId(0))));
    }

    #[test]
    fn product_slices() {
        let f = ProductFunction::from_fn(2, 3, |x, y| ExtReal::from((10 * x.0 + y.0) as f64));
        assert_eq!(f.slice(PointId(2)).eval(PointId(1)), ExtReal::from(12.0));
        assert!(ProductFunction::new(2, 2, alloc::vec![ExtReal::ZERO]).is_err());
    }
}
