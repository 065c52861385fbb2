//! JSON descriptors for spaces, functions and witness problems.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sepdet_core::families::{BallPairQuotient, PuncturedBall, TorusSlope};
use sepdet_core::{
    AxiomViolation, ClosedForm, Error as CoreError, ExtReal, FiniteSpace, Mode, PointId, Shape, Tabulated, Truncation,
    WitnessProblem,
};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{what}: malformed JSON at `{field}`: {message}")]
    Json { what: &'static str, field: String, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

impl FormatError {
    pub fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        FormatError::Invalid { field: field.into(), message: message.to_string() }
    }
}

/// Reads and parses a JSON file, reporting the path of the offending field.
pub fn read_json<T: DeserializeOwned>(what: &'static str, path: &Path) -> Result<T, FormatError> {
    let text =
        fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    parse_json(what, &text)
}

pub fn parse_json<T: DeserializeOwned>(what: &'static str, text: &str) -> Result<T, FormatError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        FormatError::Json { what, field, message: e.into_inner().to_string() }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Finite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricName {
    Euclidean,
    Matrix,
}

/// A point given by its label, its coordinates, or both.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDescriptor {
    Label(String),
    Coords(Vec<f64>),
    Full {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        coords: Option<Vec<f64>>,
    },
}

impl PointDescriptor {
    fn label(&self) -> Option<&str> {
        match self {
            PointDescriptor::Label(l) | PointDescriptor::Full { label: Some(l), .. } => Some(l),
            _ => None,
        }
    }

    fn coords(&self) -> Option<&[f64]> {
        match self {
            PointDescriptor::Coords(c) | PointDescriptor::Full { coords: Some(c), .. } => Some(c),
            _ => None,
        }
    }
}

/// `{ "kind": "finite", "metric": "euclidean" | "matrix", "points": [...], "matrix": [[...]] }`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    pub metric: MetricName,
    #[serde(default)]
    pub points: Vec<PointDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl SpaceDescriptor {
    pub fn from_space(space: &FiniteSpace) -> Self {
        let ids = (0..space.len()).map(PointId);
        match space.kind() {
            sepdet_core::metric::MetricKind::Euclidean => SpaceDescriptor {
                kind: SpaceKind::Finite,
                metric: MetricName::Euclidean,
                points: ids
                    .map(|id| PointDescriptor::Full {
                        label: Some(space.label(id).to_string()),
                        coords: space.coords(id).map(<[f64]>::to_vec),
                    })
                    .collect(),
                matrix: None,
            },
            sepdet_core::metric::MetricKind::Matrix => SpaceDescriptor {
                kind: SpaceKind::Finite,
                metric: MetricName::Matrix,
                points: ids.clone().map(|id| PointDescriptor::Label(space.label(id).to_string())).collect(),
                matrix: Some(ids.map(|id| space.row(id).to_vec()).collect()),
            },
        }
    }

    fn labels(&self, n: usize) -> Vec<String> {
        (0..n)
            .map(|i| {
                self.points.get(i).and_then(PointDescriptor::label).map_or_else(|| format!("p{i}"), str::to_string)
            })
            .collect()
    }

    /// Builds the space, rejecting metric axiom violations with the labels of
    /// the points involved.
    pub fn build(&self) -> Result<FiniteSpace, FormatError> {
        match self.metric {
            MetricName::Euclidean => {
                if self.matrix.is_some() {
                    return Err(FormatError::invalid("matrix", "not allowed for a euclidean space"));
                }
                if self.points.is_empty() {
                    return Err(FormatError::invalid("points", "a space needs at least one point"));
                }
                let labels = self.labels(self.points.len());
                let mut points = Vec::with_capacity(self.points.len());
                for (i, (p, label)) in self.points.iter().zip(&labels).enumerate() {
                    let coords =
                        p.coords().ok_or_else(|| FormatError::invalid(format!("points[{i}].coords"), "missing"))?;
                    points.push((label.clone(), coords.to_vec()));
                }
                FiniteSpace::euclidean(points).map_err(|e| space_error("points", e, &labels))
            }
            MetricName::Matrix => {
                let rows = self.matrix.clone().ok_or_else(|| FormatError::invalid("matrix", "missing"))?;
                if rows.is_empty() {
                    return Err(FormatError::invalid("matrix", "a space needs at least one point"));
                }
                if !self.points.is_empty() && self.points.len() != rows.len() {
                    return Err(FormatError::invalid(
                        "points",
                        format!("{} points for a {}x{} matrix", self.points.len(), rows.len(), rows.len()),
                    ));
                }
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != rows.len() {
                        return Err(FormatError::invalid(
                            format!("matrix[{i}]"),
                            format!("has {} entries, expected {}", row.len(), rows.len()),
                        ));
                    }
                }
                let labels = self.labels(rows.len());
                FiniteSpace::from_matrix(labels.clone(), rows).map_err(|e| space_error("matrix", e, &labels))
            }
        }
    }
}

fn space_error(field: &str, e: CoreError, labels: &[String]) -> FormatError {
    let name = |p: &PointId| labels.get(p.0).cloned().unwrap_or_else(|| p.to_string());
    let message = match e {
        CoreError::Axiom(v) => match v {
            AxiomViolation::NonZeroDiagonal { a, value } => {
                format!("d({a}, {a}) = {value}, expected 0", a = name(&a))
            }
            AxiomViolation::InvalidDistance { a, b, value } => {
                format!("d({}, {}) = {value} is negative or not finite", name(&a), name(&b))
            }
            AxiomViolation::Coincident { a, b } => format!("d({}, {}) = 0 for distinct points", name(&a), name(&b)),
            AxiomViolation::Asymmetric { a, b, ab, ba } => {
                let (a, b) = (name(&a), name(&b));
                format!("asymmetric pair ({a}, {b}): d({a}, {b}) = {ab} but d({b}, {a}) = {ba}")
            }
            AxiomViolation::Triangle { a, b, c } => {
                let (a, b, c) = (name(&a), name(&b), name(&c));
                format!("triangle inequality fails: d({a}, {c}) > d({a}, {b}) + d({b}, {c})")
            }
        },
        other => other.to_string(),
    };
    FormatError::invalid(field, message)
}

/// A function as stored on disk: a bare array of values, `{"values": [...]}`,
/// or a closed form such as `{"shape": "linear", "slope": 1, "intercept": 0}`.
/// Infinite values are written `"+inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionDescriptor {
    Values(Vec<ExtReal>),
    Table { values: Vec<ExtReal> },
    Closed(ClosedForm),
}

/// Names accepted by `--fn` in place of a file.
pub const FUNCTION_NAMES: [&str; 5] = ["coord", "neg-coord", "abs", "square", "zero"];

pub fn named_function(name: &str) -> Option<FunctionDescriptor> {
    let shape = match name {
        "coord" => Shape::Linear { slope: 1.0, intercept: 0.0 },
        "neg-coord" => Shape::Linear { slope: -1.0, intercept: 0.0 },
        "abs" => Shape::Abs { scale: 1.0 },
        "square" => Shape::Quadratic { scale: 1.0 },
        "zero" => Shape::Linear { slope: 0.0, intercept: 0.0 },
        _ => return None,
    };
    Some(FunctionDescriptor::Closed(ClosedForm::new(shape)))
}

impl FunctionDescriptor {
    pub fn build(&self, space: &FiniteSpace) -> Result<Tabulated, FormatError> {
        let values = match self {
            FunctionDescriptor::Values(v) | FunctionDescriptor::Table { values: v } => v,
            FunctionDescriptor::Closed(form) => {
                return form.tabulate(space, space.len()).map_err(|e| FormatError::invalid("fn", e));
            }
        };
        if values.len() != space.len() {
            return Err(FormatError::invalid(
                "fn.values",
                format!("{} values for a space of {} points", values.len(), space.len()),
            ));
        }
        Tabulated::new(values.clone()).map_err(|e| FormatError::invalid("fn.values", e))
    }
}

/// Resolves `--fn`: a built-in name or a path to a function descriptor.
pub fn load_function(arg: &str) -> Result<FunctionDescriptor, FormatError> {
    if let Some(f) = named_function(arg) {
        return Ok(f);
    }
    let path = Path::new(arg);
    if path.exists() {
        return read_json("fn", path);
    }
    Err(FormatError::invalid(
        "fn",
        format!("unknown function name {arg:?} (expected a file or one of {})", FUNCTION_NAMES.join(", ")),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    BallPairs,
    TorusSlope,
    PuncturedBall,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::BallPairs, Family::TorusSlope, Family::PuncturedBall];

    pub fn name(self) -> &'static str {
        match self {
            Family::BallPairs => "ball-pairs",
            Family::TorusSlope => "torus-slope",
            Family::PuncturedBall => "punctured-ball",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Levels `t` of a torus-slope problem.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Levels {
    /// `t = f(x)` around each `x`.
    #[default]
    AtPoint,
    /// Every value taken by the function.
    Function,
    Fixed(Vec<ExtReal>),
}

/// `{ "family": "ball-pairs", "mode": "sup", "truncation": {...}, "levels": "at-point" }`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDescriptor {
    pub family: Family,
    #[serde(default = "sup")]
    pub mode: Mode,
    #[serde(default = "realized")]
    pub truncation: Truncation,
    #[serde(default)]
    pub levels: Levels,
}

fn sup() -> Mode {
    Mode::Sup
}

fn realized() -> Truncation {
    Truncation::Realized
}

impl ProblemDescriptor {
    pub fn new(family: Family) -> Self {
        ProblemDescriptor { family, mode: Mode::Sup, truncation: Truncation::Realized, levels: Levels::AtPoint }
    }

    pub fn build<'a>(&self, space: &'a FiniteSpace, f: &'a Tabulated) -> Box<dyn WitnessProblem + 'a> {
        let n = space.len();
        let t = self.truncation;
        match self.family {
            Family::BallPairs => Box::new(BallPairQuotient::new(space, n, f, self.mode).with_truncation(t)),
            Family::PuncturedBall => Box::new(PuncturedBall::new(space, n, f, self.mode).with_truncation(t)),
            Family::TorusSlope => {
                let torus = match &self.levels {
                    Levels::AtPoint => TorusSlope::at_point_level(space, n, f, self.mode),
                    Levels::Function => TorusSlope::with_function_levels(space, n, f, self.mode),
                    Levels::Fixed(levels) => TorusSlope::new(space, n, f, levels.clone(), self.mode),
                };
                Box::new(torus.with_truncation(t))
            }
        }
    }
}

/// Resolves `--problem`: a family name or a path to a problem descriptor.
pub fn load_problem(arg: &str) -> Result<ProblemDescriptor, FormatError> {
    if let Some(family) = Family::parse(arg) {
        return Ok(ProblemDescriptor::new(family));
    }
    let path = Path::new(arg);
    if path.exists() {
        return read_json("problem", path);
    }
    Err(FormatError::invalid(
        "problem",
        format!("unknown problem {arg:?} (expected a file or one of ball-pairs, torus-slope, punctured-ball)"),
    ))
}

pub fn load_space(path: &Path) -> Result<FiniteSpace, FormatError> {
    read_json::<SpaceDescriptor>("space", path)?.build()
}

/// Looks a point up by label, or by `#i` / a bare index.
pub fn find_point(space: &FiniteSpace, name: &str) -> Result<PointId, FormatError> {
    if let Ok(id) = space.find(name) {
        return Ok(id);
    }
    let index = name.strip_prefix('#').unwrap_or(name).parse::<usize>().ok();
    match index {
        Some(i) if i < space.len() => Ok(PointId(i)),
        _ => Err(FormatError::invalid("x", format!("no point labelled {name:?}"))),
    }
}
