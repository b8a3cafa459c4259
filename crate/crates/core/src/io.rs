use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rat::Rat;
use crate::skew::LiePair;
use crate::subspace::Subspace;
use crate::tensor::{Tensor, ValueKind};
use crate::triple::Triple;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const FORMAT: &str = "ahs/1";

pub fn check_format(format: &str) -> Result<()> {
    if format != FORMAT {
        return Err(Error::Schema {
            pointer: "/format".into(),
            message: format!("expected \"{FORMAT}\", found \"{format}\""),
        });
    }
    Ok(())
}

/// JSON document for a connection–curvature–torsion triple. Tensors are
/// nested arrays, row-major: A[a][i][j], R[a][b][i][j], T[a][b][i].
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TripleDoc {
    pub format: String,
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<Rat>>>,
    #[serde(rename = "R")]
    pub r: Vec<Vec<Vec<Vec<Rat>>>>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<Vec<Rat>>>,
}

impl TripleDoc {
    pub fn from_triple(t: &Triple) -> TripleDoc {
        let n = t.dim();
        TripleDoc {
            format: FORMAT.to_owned(),
            dim: n,
            a: (0..n).map(|a| t.a_mat(a).row_vecs()).collect(),
            r: (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| t.curvature().value_endo(&[a, b]).row_vecs())
                        .collect()
                })
                .collect(),
            t: (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| t.torsion().value_vector(&[a, b]))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_triple(&self) -> Result<Triple> {
        check_format(&self.format)?;
        Triple::from_components(self.dim, &self.a, &self.r, &self.t).map_err(|e| match e {
            Error::NotAntisymmetric { field, indices } => {
                let path: Vec<String> = indices.iter().map(usize::to_string).collect();
                Error::Schema {
                    pointer: format!("/{}/{}", field, path.join("/")),
                    message: format!("{field} must be antisymmetric in its first two slots"),
                }
            }
            Error::DimensionMismatch(msg) => Error::Schema {
                pointer: "/".into(),
                message: msg,
            },
            other => other,
        })
    }
}

/// JSON document for an abstract Lie pair: structure constants c[a][b][k],
/// isotropy subalgebra rows, splitting rows, and the connection matrices
/// A[a][i][j] attached to the Lie-algebra basis.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct LiePairDoc {
    pub format: String,
    pub dim_g: usize,
    pub c: Vec<Vec<Vec<Rat>>>,
    pub h: Vec<Vec<Rat>>,
    pub split: Vec<Vec<Rat>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<Rat>>>,
}

impl LiePairDoc {
    pub fn from_lie_pair(p: &LiePair) -> LiePairDoc {
        LiePairDoc {
            format: FORMAT.to_owned(),
            dim_g: p.dim_g,
            c: p.c.clone(),
            h: p.h.basis().row_vecs(),
            split: p.split.row_vecs(),
            a: p.connection.iter().map(Matrix::row_vecs).collect(),
        }
    }

    pub fn to_lie_pair(&self) -> Result<LiePair> {
        check_format(&self.format)?;
        let nn = self.dim_g;
        if self.h.iter().any(|row| row.len() != nn) {
            return Err(Error::Schema {
                pointer: "/h".into(),
                message: format!("subalgebra rows must have length {nn}"),
            });
        }
        if self.split.iter().any(|row| row.len() != nn) {
            return Err(Error::Schema {
                pointer: "/split".into(),
                message: format!("splitting rows must have length {nn}"),
            });
        }
        let h = Subspace::from_rows(nn, self.h.clone());
        let pair = LiePair {
            dim_g: nn,
            c: self.c.clone(),
            h,
            split: Matrix::from_rows(self.split.clone()),
            connection: self.a.iter().map(|m| Matrix::from_rows(m.clone())).collect(),
        };
        pair.validate()?;
        Ok(pair)
    }
}

/// JSON document for a candidate SU(n) structure: metric g, complex
/// operator I and the n-form psi as a depth-n nested array over Q^{2n}.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SuDoc {
    pub format: String,
    pub n: usize,
    pub g: Vec<Vec<Rat>>,
    #[serde(rename = "I")]
    pub i: Vec<Vec<Rat>>,
    pub psi: Value,
}

impl SuDoc {
    pub fn from_structure(s: &crate::kstructures::SuStructure, n_complex: usize) -> SuDoc {
        SuDoc {
            format: FORMAT.to_owned(),
            n: n_complex,
            g: s.metric.row_vecs(),
            i: s.complex_op.row_vecs(),
            psi: tensor_to_value(&s.psi),
        }
    }

    pub fn to_structure(&self) -> Result<crate::kstructures::SuStructure> {
        check_format(&self.format)?;
        let dim = 2 * self.n;
        let psi = value_to_scalar_tensor(&self.psi, dim, self.n)?;
        Ok(crate::kstructures::SuStructure {
            metric: Matrix::from_rows(self.g.clone()),
            complex_op: Matrix::from_rows(self.i.clone()),
            psi,
        })
    }
}

pub fn tensor_to_value(t: &Tensor) -> Value {
    fn build(t: &Tensor, prefix: &mut Vec<usize>) -> Value {
        if prefix.len() == t.arity() {
            return serde_json::to_value(t.get(prefix, 0)).expect("rational serializes");
        }
        let items: Vec<Value> = (0..t.dim())
            .map(|a| {
                prefix.push(a);
                let v = build(t, prefix);
                prefix.pop();
                v
            })
            .collect();
        Value::Array(items)
    }
    assert_eq!(t.value_kind(), ValueKind::Scalar);
    build(t, &mut Vec::new())
}

pub fn value_to_scalar_tensor(v: &Value, dim: usize, arity: usize) -> Result<Tensor> {
    let mut t = Tensor::zeros(dim, arity, ValueKind::Scalar, vec![(0..arity).collect()]);
    fn walk(
        v: &Value,
        t: &mut Tensor,
        dim: usize,
        prefix: &mut Vec<usize>,
        arity: usize,
    ) -> Result<()> {
        let pointer = || {
            let p: Vec<String> = prefix.iter().map(usize::to_string).collect();
            format!("/psi/{}", p.join("/"))
        };
        if prefix.len() == arity {
            let r: Rat = serde_json::from_value(v.clone()).map_err(|e| Error::Schema {
                pointer: pointer(),
                message: e.to_string(),
            })?;
            let idx = prefix.clone();
            t.set(&idx, 0, r);
            return Ok(());
        }
        let Value::Array(items) = v else {
            return Err(Error::Schema {
                pointer: pointer(),
                message: "expected a nested array".into(),
            });
        };
        if items.len() != dim {
            return Err(Error::Schema {
                pointer: pointer(),
                message: format!("expected {dim} entries, found {}", items.len()),
            });
        }
        for (a, item) in items.iter().enumerate() {
            prefix.push(a);
            walk(item, t, dim, prefix, arity)?;
            prefix.pop();
        }
        Ok(())
    }
    walk(v, &mut t, dim, &mut Vec::new(), arity)?;
    Ok(t)
}

/// Parse with the format tag dispatched: returns whichever document type
/// the JSON declares.
pub enum Document {
    Triple(TripleDoc),
    LiePair(LiePairDoc),
    Su(SuDoc),
}

pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Schema {
        pointer: "/".into(),
        message: e.to_string(),
    })?;
    let schema_err = |pointer: &str, message: String| Error::Schema {
        pointer: pointer.into(),
        message,
    };
    let obj = value
        .as_object()
        .ok_or_else(|| schema_err("/", "expected a JSON object".into()))?;
    match obj.get("format").and_then(Value::as_str) {
        Some(f) => check_format(f)?,
        None => return Err(schema_err("/format", "missing format tag".into())),
    }
    if obj.contains_key("dim_g") {
        let doc: LiePairDoc = serde_json::from_value(value.clone())
            .map_err(|e| schema_err("/", e.to_string()))?;
        Ok(Document::LiePair(doc))
    } else if obj.contains_key("psi") {
        let doc: SuDoc =
            serde_json::from_value(value.clone()).map_err(|e| schema_err("/", e.to_string()))?;
        Ok(Document::Su(doc))
    } else if obj.contains_key("A") {
        let doc: TripleDoc =
            serde_json::from_value(value.clone()).map_err(|e| schema_err("/", e.to_string()))?;
        Ok(Document::Triple(doc))
    } else {
        Err(schema_err(
            "/",
            "unrecognized document: expected a triple, Lie pair or SU structure".into(),
        ))
    }
}

/// Verify that every declared alternating group of a freshly parsed tensor
/// really alternates; used by loaders for friendlier diagnostics.
pub fn check_declared_alternation(t: &Tensor) -> Result<()> {
    t.check_alternating()
        .map_err(|(slots, indices)| Error::NotAlternating { slots, indices })
}
