//! JSON interchange format for [`NormSpec`], version 1.
//!
//! ```json
//! {"schema": 1, "family": "interp", "theta": 0.5,
//!  "left":  {"family": "lp", "dim": 2, "p": 1},
//!  "right": {"family": "lp", "dim": 2, "p": "inf"}}
//! ```
//!
//! Families: `euclidean`, `lp`, `weighted_lp`, `polytope`, `profile`,
//! `interp`, `opposite`, `pullback`, `scaled`, `max`. Only the top-level
//! object carries `"schema"`. Exponents are numbers or `"inf"`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::NormError;
use crate::linmap::LinearMap;
use crate::projgrid::ProjectiveGrid;
use crate::quasinorm::NormSpec;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("unsupported schema version: {0} (expected {SCHEMA_VERSION})")]
    Version(String),
    #[error("schema violation at `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("invalid spec at `{path}`: {source}")]
    Invalid { path: String, source: NormError },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Exponent {
    Number(f64),
    Word(String),
}

impl Exponent {
    fn from_f64(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Word("inf".into())
        } else {
            Exponent::Number(p)
        }
    }

    fn value(&self) -> Option<f64> {
        match self {
            Exponent::Number(p) => Some(*p),
            Exponent::Word(w) if matches!(w.as_str(), "inf" | "infinity" | "∞") => {
                Some(f64::INFINITY)
            }
            Exponent::Word(_) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    dim: usize,
    resolution: usize,
    seed: u64,
    points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum SpecDoc {
    Euclidean {
        dim: usize,
    },
    Lp {
        dim: usize,
        p: Exponent,
    },
    WeightedLp {
        p: Exponent,
        weights: Vec<f64>,
    },
    Polytope {
        dim: usize,
        vertices: Vec<Vec<f64>>,
    },
    Profile {
        grid: GridDoc,
        logvalues: Vec<f64>,
    },
    Interp {
        theta: f64,
        left: Box<SpecDoc>,
        right: Box<SpecDoc>,
    },
    Opposite {
        inner: Box<SpecDoc>,
    },
    Pullback {
        matrix: Vec<Vec<f64>>,
        inner: Box<SpecDoc>,
    },
    Scaled {
        factor: f64,
        inner: Box<SpecDoc>,
    },
    Max {
        parts: Vec<SpecDoc>,
    },
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u64,
    #[serde(flatten)]
    spec: &'a SpecDoc,
}

fn join(path: &str, field: &str) -> String {
    match (path.is_empty(), field.is_empty() || field == ".") {
        (_, true) => path.to_string(),
        (true, false) => field.to_string(),
        (false, false) => format!("{path}.{field}"),
    }
}

fn root(path: &str) -> String {
    if path.is_empty() {
        "<root>".into()
    } else {
        path.to_string()
    }
}

/// Deserializes the fields of one family, reporting errors at their path.
fn fields<T: DeserializeOwned>(map: Map<String, Value>, path: &str) -> Result<T, SchemaError> {
    serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| SchemaError::Field {
        path: root(&join(path, &e.path().to_string())),
        message: e.into_inner().to_string(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DimDoc {
    dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LpDoc {
    dim: usize,
    p: Exponent,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightedDoc {
    p: Exponent,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeDoc {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    grid: GridDoc,
    logvalues: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InterpDoc {
    theta: f64,
    left: Value,
    right: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InnerDoc {
    inner: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PullbackDoc {
    matrix: Vec<Vec<f64>>,
    inner: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaledDoc {
    factor: f64,
    inner: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaxDoc {
    parts: Vec<Value>,
}

const FAMILIES: &str =
    "euclidean, lp, weighted_lp, polytope, profile, interp, opposite, pullback, scaled, max";

fn parse(value: Value, path: &str) -> Result<NormSpec, SchemaError> {
    let Value::Object(mut map) = value else {
        return Err(SchemaError::Field {
            path: root(path),
            message: "expected a JSON object".into(),
        });
    };
    let family = match map.remove("family") {
        Some(Value::String(f)) => f,
        Some(_) => {
            return Err(SchemaError::Field {
                path: join(path, "family"),
                message: "expected a string".into(),
            })
        }
        None => {
            return Err(SchemaError::Field {
                path: join(path, "family"),
                message: "missing field `family`".into(),
            })
        }
    };
    let invalid = |source: NormError| SchemaError::Invalid {
        path: root(path),
        source,
    };
    let exponent = |p: &Exponent| {
        p.value().ok_or_else(|| SchemaError::Field {
            path: join(path, "p"),
            message: "expected a number or \"inf\"".into(),
        })
    };
    match family.as_str() {
        "euclidean" => {
            let d: DimDoc = fields(map, path)?;
            if d.dim == 0 {
                return Err(invalid(NormError::InvalidParameter(
                    "dimension must be at least 1".into(),
                )));
            }
            Ok(NormSpec::euclidean(d.dim))
        }
        "lp" => {
            let d: LpDoc = fields(map, path)?;
            NormSpec::lp(d.dim, exponent(&d.p)?).map_err(invalid)
        }
        "weighted_lp" => {
            let d: WeightedDoc = fields(map, path)?;
            NormSpec::weighted_lp(exponent(&d.p)?, d.weights).map_err(invalid)
        }
        "polytope" => {
            let d: PolytopeDoc = fields(map, path)?;
            NormSpec::polytope_from_vertices(d.dim, d.vertices).map_err(invalid)
        }
        "profile" => {
            let d: ProfileDoc = fields(map, path)?;
            let g = ProjectiveGrid::from_parts(
                d.grid.dim,
                d.grid.resolution,
                d.grid.seed,
                d.grid.points,
            )
            .map_err(|source| SchemaError::Invalid {
                path: join(path, "grid"),
                source,
            })?;
            NormSpec::profile(g, d.logvalues).map_err(invalid)
        }
        "interp" => {
            let d: InterpDoc = fields(map, path)?;
            let l = parse(d.left, &join(path, "left"))?;
            let r = parse(d.right, &join(path, "right"))?;
            NormSpec::interp(l, r, d.theta).map_err(invalid)
        }
        "opposite" => {
            let d: InnerDoc = fields(map, path)?;
            Ok(NormSpec::opposite(parse(d.inner, &join(path, "inner"))?))
        }
        "pullback" => {
            let d: PullbackDoc = fields(map, path)?;
            let a = LinearMap::from_rows(&d.matrix).map_err(|source| SchemaError::Invalid {
                path: join(path, "matrix"),
                source,
            })?;
            NormSpec::pullback(a, parse(d.inner, &join(path, "inner"))?).map_err(invalid)
        }
        "scaled" => {
            let d: ScaledDoc = fields(map, path)?;
            NormSpec::scaled(d.factor, parse(d.inner, &join(path, "inner"))?).map_err(invalid)
        }
        "max" => {
            let d: MaxDoc = fields(map, path)?;
            let parts = d
                .parts
                .into_iter()
                .enumerate()
                .map(|(i, v)| parse(v, &format!("{}[{i}]", join(path, "parts"))))
                .collect::<Result<Vec<_>, _>>()?;
            NormSpec::max_of(parts).map_err(invalid)
        }
        other => Err(SchemaError::Field {
            path: join(path, "family"),
            message: format!("unknown family `{other}`; expected one of {FAMILIES}"),
        }),
    }
}

impl SpecDoc {
    fn from_spec(spec: &NormSpec) -> SpecDoc {
        let boxed = |s: &NormSpec| Box::new(SpecDoc::from_spec(s));
        match spec {
            NormSpec::Euclidean { dim } => SpecDoc::Euclidean { dim: *dim },
            NormSpec::Lp { dim, p } => SpecDoc::Lp {
                dim: *dim,
                p: Exponent::from_f64(*p),
            },
            NormSpec::WeightedLp { p, weights } => SpecDoc::WeightedLp {
                p: Exponent::from_f64(*p),
                weights: weights.clone(),
            },
            NormSpec::Polytope(b) => SpecDoc::Polytope {
                dim: b.dim(),
                vertices: b.vertices().to_vec(),
            },
            NormSpec::Profile(p) => SpecDoc::Profile {
                grid: GridDoc {
                    dim: p.grid().dim(),
                    resolution: p.grid().resolution(),
                    seed: p.grid().seed(),
                    points: p
                        .grid()
                        .points()
                        .iter()
                        .map(|d| d.coords().to_vec())
                        .collect(),
                },
                logvalues: p.logvalues().to_vec(),
            },
            NormSpec::Pullback { map, inner } => SpecDoc::Pullback {
                matrix: map.rows(),
                inner: boxed(inner),
            },
            NormSpec::Interp { left, right, theta } => SpecDoc::Interp {
                theta: *theta,
                left: boxed(left),
                right: boxed(right),
            },
            NormSpec::Opposite(inner) => SpecDoc::Opposite {
                inner: boxed(inner),
            },
            NormSpec::Scaled { factor, inner } => SpecDoc::Scaled {
                factor: *factor,
                inner: boxed(inner),
            },
            NormSpec::MaxOf(list) => SpecDoc::Max {
                parts: list.iter().map(SpecDoc::from_spec).collect(),
            },
        }
    }
}

/// Parses and validates a version-1 spec document.
pub fn spec_from_json(text: &str) -> Result<NormSpec, SchemaError> {
    let mut value: Value =
        serde_json::from_str(text).map_err(|e| SchemaError::Syntax(e.to_string()))?;
    let obj = value.as_object_mut().ok_or_else(|| SchemaError::Field {
        path: "<root>".into(),
        message: "expected a JSON object".into(),
    })?;
    match obj.remove("schema") {
        Some(Value::Number(v)) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(SchemaError::Version(other.to_string())),
        None => {
            return Err(SchemaError::Field {
                path: "schema".into(),
                message: "missing field `schema`".into(),
            })
        }
    }
    parse(value, "")
}

/// Pretty-printed version-1 document; numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn spec_to_json(spec: &NormSpec) -> String {
    let doc = SpecDoc::from_spec(spec);
    let mut out = serde_json::to_string_pretty(&Envelope {
        schema: SCHEMA_VERSION,
        spec: &doc,
    })
    .expect("spec documents always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgrid::make_grid;

    fn roundtrip(spec: &NormSpec) -> NormSpec {
        spec_from_json(&spec_to_json(spec)).unwrap()
    }

    #[test]
    fn roundtrips_every_family() {
        let g = make_grid(2, 12, 0).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| (i as f64).sin() / 3.0).collect();
        let hex = NormSpec::polytope_from_vertices(
            2,
            vec![vec![1.0, 0.0], vec![0.5, 0.9], vec![-0.5, 0.9]],
        );
        assert!(hex.is_err());
        let sq = NormSpec::polytope_from_vertices(
            2,
            vec![
                vec![1.0, 1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0],
            ],
        )
        .unwrap();
        let specs = vec![
            NormSpec::euclidean(3),
            NormSpec::lp(2, f64::INFINITY).unwrap(),
            NormSpec::lp(2, 0.5).unwrap(),
            NormSpec::weighted_lp(1.0, vec![2.0, 0.5]).unwrap(),
            sq.clone(),
            NormSpec::profile(g, vals).unwrap(),
            NormSpec::interp(sq.clone(), NormSpec::lp(2, 1.0).unwrap(), 0.3).unwrap(),
            NormSpec::opposite(sq.clone()),
            NormSpec::pullback(LinearMap::rotation(2, 0.1), sq.clone()).unwrap(),
            NormSpec::scaled(0.1, sq.clone()).unwrap(),
            NormSpec::max_of(vec![sq, NormSpec::euclidean(2)]).unwrap(),
        ];
        for s in &specs {
            let back = roundtrip(s);
            assert_eq!(&back, s, "{}", spec_to_json(s));
            let x: Vec<f64> = (0..s.dim()).map(|i| 0.3 + i as f64 * 0.7).collect();
            assert_eq!(back.value(&x).to_bits(), s.value(&x).to_bits());
        }
    }

    #[test]
    fn parses_hand_written_documents() {
        let s = spec_from_json(r#"{"schema": 1, "family": "lp", "dim": 2, "p": "inf"}"#).unwrap();
        assert_eq!(s.value(&[1.0, -3.0]), 3.0);
        let s = spec_from_json(
            r#"{"schema":1,"family":"interp","theta":0.5,
                "left":{"family":"weighted_lp","p":1,"weights":[2,0.5]},
                "right":{"family":"weighted_lp","p":1,"weights":[0.5,2]}}"#,
        )
        .unwrap();
        assert_eq!(s.value(&[1.0, 1.0]), 2.5);
    }

    #[test]
    fn errors_carry_paths() {
        let e = spec_from_json("{not json").unwrap_err();
        assert!(matches!(e, SchemaError::Syntax(_)));
        let e = spec_from_json(r#"{"schema": 2, "family": "euclidean", "dim": 2}"#).unwrap_err();
        assert!(matches!(e, SchemaError::Version(_)));
        let e = spec_from_json(r#"{"family": "euclidean", "dim": 2}"#).unwrap_err();
        assert!(e.to_string().contains("schema"));
        let e = spec_from_json(
            r#"{"schema":1,"family":"opposite","inner":{"family":"lp","dim":"two","p":1}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("inner.dim"), "{e}");
        let e = spec_from_json(
            r#"{"schema":1,"family":"max","parts":[{"family":"euclidean","dim":2},
                {"family":"polytope","dim":2,"vertices":[[1,0],[0,1]]}]}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("parts[1]"), "{e}");
        assert!(e.to_string().contains("not balanced"), "{e}");
        let e = spec_from_json(
            r#"{"schema":1,"family":"interp","theta":0.5,
                "left":{"family":"euclidean","dim":2},"right":{"family":"euclidean","dim":3}}"#,
        )
        .unwrap_err();
        assert!(matches!(
            e,
            SchemaError::Invalid {
                source: NormError::DimensionMismatch { .. },
                ..
            }
        ));
        let e = spec_from_json(r#"{"schema":1,"family":"lp","dim":2,"p":"huge"}"#).unwrap_err();
        assert!(e.to_string().contains("p"));
        let e = spec_from_json(r#"{"schema":1,"family":"cube","dim":2}"#).unwrap_err();
        assert!(matches!(e, SchemaError::Field { .. }));
    }
}
