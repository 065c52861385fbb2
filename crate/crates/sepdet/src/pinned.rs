//! A witness problem restricted to one parameter, for `--param`.

use std::str::FromStr;

use sepdet_core::scheme::Best;
use sepdet_core::{
    Error, ExtReal, FunctionOracle, MetricSpace, Mode, Param, PointId, PointSet, Region, WitnessProblem,
};

/// `r`, `r,s` or `t,r,s`; a shell without `t` uses `t = f(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamArg {
    Radius(f64),
    Shell { t: Option<ExtReal>, r: f64, s: f64 },
}

impl FromStr for ParamArg {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("{s:?} is not a number"));
        let ext = |s: &str| match s {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            _ => num(s).map(ExtReal::Finite),
        };
        match parts[..] {
            [r] => Ok(ParamArg::Radius(num(r)?)),
            [r, s] => Ok(ParamArg::Shell { t: None, r: num(r)?, s: num(s)? }),
            [t, r, s] => Ok(ParamArg::Shell { t: Some(ext(t)?), r: num(r)?, s: num(s)? }),
            _ => Err("expected r, r,s or t,r,s".into()),
        }
    }
}

impl ParamArg {
    pub fn at(&self, f: &dyn FunctionOracle, x: PointId) -> Param {
        match *self {
            ParamArg::Radius(r) => Param::radius(r),
            ParamArg::Shell { t, r, s } => Param::shell(t.unwrap_or_else(|| f.eval(x)), r, s),
        }
    }

    pub fn is_shell(&self) -> bool {
        matches!(self, ParamArg::Shell { .. })
    }
}

pub struct Pinned<'a> {
    pub inner: &'a dyn WitnessProblem,
    pub param: ParamArg,
    pub f: &'a dyn FunctionOracle,
}

impl WitnessProblem for Pinned<'_> {
    fn label(&self) -> &str {
        self.inner.label()
    }
    fn space(&self) -> &dyn MetricSpace {
        self.inner.space()
    }
    fn horizon(&self) -> usize {
        self.inner.horizon()
    }
    fn arity(&self) -> usize {
        self.inner.arity()
    }
    fn mode(&self) -> Mode {
        self.inner.mode()
    }
    fn params(&self, x: PointId) -> Vec<Param> {
        let p = self.param.at(self.f, x);
        match self.inner.region(x, &p) {
            Ok(region) if !region.is_empty() => vec![p],
            _ => Vec::new(),
        }
    }
    fn region(&self, x: PointId, p: &Param) -> Result<Region, Error> {
        self.inner.region(x, p)
    }
    fn in_region(&self, x: PointId, p: &Param, u: &[PointId]) -> bool {
        self.inner.in_region(x, p, u)
    }
    fn score(&self, x: PointId, p: &Param, u: &[PointId]) -> ExtReal {
        self.inner.score(x, p, u)
    }
    fn optimize_batch(&self, x: PointId, params: &[Param], within: Option<&PointSet>) -> Option<Vec<Option<Best>>> {
        self.inner.optimize_batch(x, params, within)
    }
}

impl std::fmt::Display for ParamArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamArg::Radius(r) => write!(f, "{r}"),
            ParamArg::Shell { t: None, r, s } => write!(f, "{r},{s}"),
            ParamArg::Shell { t: Some(t), r, s } => write!(f, "{t:?},{r},{s}"),
        }
    }
}
