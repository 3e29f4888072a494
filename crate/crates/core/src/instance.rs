//! Instance files: JSON documents describing a space, an optional self-map
//! and an optional comparison modulus.
//!
//! ```json
//! {
//!   "space": {"points": ["a", "b", "c"],
//!             "d": [[0, 1, 2], [1, 0, 1], [2, 1, 0]],
//!             "v": 1, "s": 1.0, "complete": true},
//!   "map": {"table": [1, 1, 1]}
//! }
//! ```
//!
//! Function-backed spaces replace `points`/`d` with a `domain` and an
//! optional `metric` expression in `x`, `y` (default `abs(x - y)`):
//!
//! ```json
//! {
//!   "space": {"metric": "abs(x - y)", "v": 1, "s": 1.0, "complete": true},
//!   "domain": {"lo": 0.0, "hi": 1.0, "sampler_n": 1001},
//!   "map": {"expr": "if(x < 0.5, x/4, x/5)"},
//!   "phi": {"expr": "t^2/(1+t)"}
//! }
//! ```
//!
//! `domain` may also sit inside `map`. `phi` accepts `{"expr": ..}`,
//! `{"linear": c}`, `{"power": {"coef": a, "exponent": b}}` or
//! `{"table": [[t, phi], ..]}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::{ContractionError, Modulus};
use crate::expr::ParseError;
use crate::space::{FiniteSpace, Metric, RealMap, RealSpace, SpaceError, SpaceSignature, TableMap};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid instance: {0}")]
    Schema(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("invalid expression in {field}: {source}")]
    Expr { field: &'static str, source: ParseError },
    #[error("invalid phi: {0}")]
    Phi(#[from] ContractionError),
}

/// A parsed space together with its optional map.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Finite { space: FiniteSpace, map: Option<TableMap> },
    Real { space: RealSpace, map: Option<RealMap> },
}

impl Instance {
    pub fn has_map(&self) -> bool {
        match self {
            Instance::Finite { map, .. } => map.is_some(),
            Instance::Real { map, .. } => map.is_some(),
        }
    }

    /// The finite set the axiom and pair checks run on: the whole space, or
    /// the sampler grid of a function-backed space.
    pub fn check_space(&self) -> Result<FiniteSpace, SpaceError> {
        match self {
            Instance::Finite { space, .. } => Ok(space.clone()),
            Instance::Real { space, .. } => space.restrict(&space.grid()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedInstance {
    pub instance: Instance,
    pub signature: SpaceSignature,
    pub phi: Option<Modulus>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    space: SpaceDoc,
    #[serde(default)]
    map: Option<MapDoc>,
    #[serde(default)]
    domain: Option<DomainDoc>,
    #[serde(default)]
    phi: Option<PhiDoc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Number(serde_json::Number),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceDoc {
    #[serde(default)]
    points: Option<Vec<Label>>,
    #[serde(default)]
    d: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    metric: Option<String>,
    v: usize,
    s: f64,
    #[serde(default)]
    complete: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    #[serde(default)]
    table: Option<Vec<usize>>,
    #[serde(default)]
    expr: Option<String>,
    #[serde(default)]
    domain: Option<DomainDoc>,
}

#[derive(Deserialize, Serialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct DomainDoc {
    lo: f64,
    hi: f64,
    sampler_n: usize,
}

#[derive(Deserialize, Serialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct PowerDoc {
    coef: f64,
    exponent: f64,
}

#[derive(Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum PhiDoc {
    Expr(String),
    Linear(f64),
    Power(PowerDoc),
    Table(Vec<(f64, f64)>),
}

fn json_error(err: serde_json::Error) -> InstanceError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => InstanceError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        },
        Category::Data => InstanceError::Schema(err.to_string()),
    }
}

/// Parse an instance document.
pub fn parse_instance(document: &str) -> Result<ParsedInstance, InstanceError> {
    let doc: Doc = serde_json::from_str(document).map_err(json_error)?;
    let SpaceDoc {
        points,
        d,
        metric,
        v,
        s,
        complete,
    } = doc.space;
    let signature = SpaceSignature::declared(v, s, complete)?;
    let map_domain = doc.map.as_ref().and_then(|m| m.domain);
    let domain = match (doc.domain, map_domain) {
        (Some(_), Some(_)) => return Err(InstanceError::Schema("domain given twice".into())),
        (a, b) => a.or(b),
    };

    let instance = match (d, domain) {
        (Some(_), Some(_)) => {
            return Err(InstanceError::Schema("a space has either a matrix `d` or a `domain`, not both".into()))
        }
        (Some(matrix), None) => {
            if metric.is_some() {
                return Err(InstanceError::Schema("`metric` only applies to function-backed spaces".into()));
            }
            let labels: Vec<String> = match points {
                Some(points) => points
                    .into_iter()
                    .map(|l| match l {
                        Label::Text(s) => s,
                        Label::Number(n) => n.to_string(),
                    })
                    .collect(),
                None => (0..matrix.len()).map(|i| i.to_string()).collect(),
            };
            let mut seen = std::collections::HashSet::new();
            if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
                return Err(InstanceError::Schema(format!("duplicate point label '{dup}'")));
            }
            let space = FiniteSpace::new(labels, &matrix)?;
            let map = match doc.map {
                None => None,
                Some(MapDoc { expr: Some(_), .. }) => {
                    return Err(InstanceError::Schema("finite spaces take a `table` map, not `expr`".into()))
                }
                Some(MapDoc { table: Some(t), .. }) => Some(TableMap::new(t, space.len())?),
                Some(_) => return Err(InstanceError::Schema("map needs `table` or `expr`".into())),
            };
            Instance::Finite { space, map }
        }
        (None, Some(dom)) => {
            if points.is_some() {
                return Err(InstanceError::Schema("`points` requires a matrix `d`".into()));
            }
            let metric = match metric {
                Some(src) => Metric::parse(&src).map_err(|source| InstanceError::Expr { field: "metric", source })?,
                None => Metric::Abs,
            };
            let space = RealSpace::new(dom.lo, dom.hi, metric, dom.sampler_n)?;
            let map = match doc.map {
                None => None,
                Some(MapDoc { table: Some(_), .. }) => {
                    return Err(InstanceError::Schema("function-backed spaces take an `expr` map, not `table`".into()))
                }
                Some(MapDoc { expr: Some(src), .. }) => {
                    Some(RealMap::parse(&src).map_err(|source| InstanceError::Expr { field: "map", source })?)
                }
                Some(_) => return Err(InstanceError::Schema("map needs `table` or `expr`".into())),
            };
            Instance::Real { space, map }
        }
        (None, None) => {
            return Err(InstanceError::Schema("space needs a matrix `d` or a `domain`".into()))
        }
    };

    let phi = match doc.phi {
        None => None,
        Some(PhiDoc::Expr(src)) => {
            Some(Modulus::parse(&src).map_err(|source| InstanceError::Expr { field: "phi", source })?)
        }
        Some(PhiDoc::Linear(c)) => Some(Modulus::Linear(c)),
        Some(PhiDoc::Power(PowerDoc { coef, exponent })) => Some(Modulus::Power { coef, exponent }),
        Some(PhiDoc::Table(knots)) => Some(Modulus::table(knots)?),
    };

    Ok(ParsedInstance {
        instance,
        signature,
        phi,
    })
}

#[derive(Serialize)]
struct SpaceOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<String>,
    v: usize,
    s: f64,
    complete: bool,
}

#[derive(Serialize)]
struct MapOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expr: Option<String>,
}

#[derive(Serialize)]
struct DocOut {
    space: SpaceOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain: Option<DomainDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<MapOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<PhiDoc>,
}

impl ParsedInstance {
    /// Serialize back to the instance file format.
    pub fn to_json(&self) -> String {
        let sig = &self.signature;
        let (space, domain, map) = match &self.instance {
            Instance::Finite { space, map } => (
                SpaceOut {
                    points: Some(space.labels().to_vec()),
                    d: Some(space.matrix()),
                    metric: None,
                    v: sig.v,
                    s: sig.s,
                    complete: sig.complete,
                },
                None,
                map.as_ref().map(|m| MapOut {
                    table: Some(m.targets().to_vec()),
                    expr: None,
                }),
            ),
            Instance::Real { space, map } => (
                SpaceOut {
                    points: None,
                    d: None,
                    metric: Some(space.metric.source()),
                    v: sig.v,
                    s: sig.s,
                    complete: sig.complete,
                },
                Some(DomainDoc {
                    lo: space.lo,
                    hi: space.hi,
                    sampler_n: space.sampler_n,
                }),
                map.as_ref().map(|m| MapOut {
                    table: None,
                    expr: Some(m.source().to_string()),
                }),
            ),
        };
        let phi = self.phi.as_ref().map(|phi| match phi {
            Modulus::Linear(c) => PhiDoc::Linear(*c),
            Modulus::Power { coef, exponent } => PhiDoc::Power(PowerDoc {
                coef: *coef,
                exponent: *exponent,
            }),
            Modulus::Table(knots) => PhiDoc::Table(knots.clone()),
            Modulus::Expression(e) => PhiDoc::Expr(e.source().to_string()),
        });
        let doc = DocOut {
            space,
            domain,
            map,
            phi,
        };
        serde_json::to_string_pretty(&doc).expect("instance serializes")
    }
}
