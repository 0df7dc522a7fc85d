//! JSON documents for forms, relations, contractions, and sequences.
//!
//! Complex entries are encoded as two-element arrays `[re, im]`, matrices
//! as row-major nested arrays. Numbers are rounded to 12 significant
//! digits on emission, so one round of parse/emit is idempotent and
//! reports are byte-stable.

use formkit::decomp::ContractionParam;
use formkit::form::HermitianForm;
use formkit::monotone::{FormSequence, Sense};
use formkit::relation::LinearRelation;
use formkit::{CMatrix, Scalar, Subspace, Tolerance};
use serde::{Deserialize, Serialize};

/// An error while interpreting a document, split by exit-code category.
#[derive(Debug)]
pub enum DocError {
    /// Malformed JSON or a payload of the wrong shape (exit 2).
    Parse(String),
    /// Structurally valid JSON violating a type invariant (exit 3/4).
    Invalid(formkit::Error),
}

impl From<formkit::Error> for DocError {
    fn from(e: formkit::Error) -> Self {
        DocError::Invalid(e)
    }
}

pub type DocResult<T> = Result<T, DocError>;

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Form(FormDoc),
    Relation(RelationDoc),
    Contraction(ContractionDoc),
    Sequence(SequenceDoc),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormDoc {
    pub ambient_dim: usize,
    pub domain_basis: JsonMatrix,
    pub matrix: JsonMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationDoc {
    pub dim_h: usize,
    pub dim_k: usize,
    pub graph_basis: JsonMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionDoc {
    pub matrix: JsonMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub encoding: String,
    pub sense: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<FormDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<FormDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms: Option<Vec<FormDoc>>,
}

/// Round to 12 significant digits; the emission precision of the toolkit.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn to_json_matrix(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [round12(m[(i, j)].re), round12(m[(i, j)].im)])
                .collect()
        })
        .collect()
}

fn from_json_matrix(rows_hint: Option<usize>, m: &JsonMatrix) -> DocResult<CMatrix> {
    let rows = m.len();
    if let Some(h) = rows_hint {
        if rows != h {
            return Err(DocError::Invalid(formkit::Error::DimensionMismatch {
                context: format!("matrix has {rows} rows, expected {h}"),
            }));
        }
    }
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(DocError::Invalid(formkit::Error::DimensionMismatch {
                context: format!(
                    "matrix is ragged: row {i} has {} entries, row 0 has {cols}",
                    row.len()
                ),
            }));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        Scalar::new(m[i][j][0], m[i][j][1])
    }))
}

impl FormDoc {
    pub fn from_form(form: &HermitianForm) -> Self {
        FormDoc {
            ambient_dim: form.ambient(),
            domain_basis: to_json_matrix(form.domain().basis()),
            matrix: to_json_matrix(form.matrix()),
        }
    }

    pub fn to_form(&self, tol: &Tolerance) -> DocResult<HermitianForm> {
        let basis = from_json_matrix(Some(self.ambient_dim), &self.domain_basis)?;
        let matrix = from_json_matrix(None, &self.matrix)?;
        let domain = Subspace::from_orthonormal(basis, tol)?;
        Ok(HermitianForm::new(domain, matrix, tol)?)
    }
}

impl RelationDoc {
    pub fn from_relation(rel: &LinearRelation) -> Self {
        RelationDoc {
            dim_h: rel.dim_h(),
            dim_k: rel.dim_k(),
            graph_basis: to_json_matrix(rel.graph().basis()),
        }
    }

    pub fn to_relation(&self, tol: &Tolerance) -> DocResult<LinearRelation> {
        let basis = from_json_matrix(Some(self.dim_h + self.dim_k), &self.graph_basis)?;
        let graph = Subspace::from_orthonormal(basis, tol)?;
        Ok(LinearRelation::from_graph(self.dim_h, self.dim_k, graph)?)
    }
}

impl ContractionDoc {
    pub fn from_contraction(k: &ContractionParam) -> Self {
        ContractionDoc {
            matrix: to_json_matrix(k.matrix()),
        }
    }

    pub fn to_contraction(&self, tol: &Tolerance) -> DocResult<ContractionParam> {
        let matrix = from_json_matrix(None, &self.matrix)?;
        Ok(ContractionParam::new(matrix, tol)?)
    }
}

fn parse_sense(s: &str) -> DocResult<Sense> {
    match s {
        "nondecreasing" => Ok(Sense::Nondecreasing),
        "nonincreasing" => Ok(Sense::Nonincreasing),
        other => Err(DocError::Parse(format!(
            "unknown sense {other:?}; expected \"nondecreasing\" or \"nonincreasing\""
        ))),
    }
}

impl SequenceDoc {
    pub fn from_sequence(seq: &FormSequence) -> Self {
        match seq {
            FormSequence::Affine { base, slope, sense } => SequenceDoc {
                encoding: "affine".to_string(),
                sense: sense.as_str().to_string(),
                base: Some(FormDoc::from_form(base)),
                slope: Some(FormDoc::from_form(slope)),
                forms: None,
            },
            FormSequence::Chain { forms, sense } => SequenceDoc {
                encoding: "chain".to_string(),
                sense: sense.as_str().to_string(),
                base: None,
                slope: None,
                forms: Some(forms.iter().map(FormDoc::from_form).collect()),
            },
        }
    }

    pub fn to_sequence(&self, tol: &Tolerance) -> DocResult<FormSequence> {
        let sense = parse_sense(&self.sense)?;
        match self.encoding.as_str() {
            "affine" => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| DocError::Parse("affine sequence requires \"base\"".into()))?
                    .to_form(tol)?;
                let slope = self
                    .slope
                    .as_ref()
                    .ok_or_else(|| DocError::Parse("affine sequence requires \"slope\"".into()))?
                    .to_form(tol)?;
                Ok(FormSequence::affine(base, slope, sense, tol)?)
            }
            "chain" => {
                let docs = self
                    .forms
                    .as_ref()
                    .ok_or_else(|| DocError::Parse("chain sequence requires \"forms\"".into()))?;
                let forms = docs
                    .iter()
                    .map(|d| d.to_form(tol))
                    .collect::<DocResult<Vec<_>>>()?;
                Ok(FormSequence::chain(forms, sense, tol)?)
            }
            other => Err(DocError::Parse(format!(
                "unknown encoding {other:?}; expected \"affine\" or \"chain\""
            ))),
        }
    }
}

pub fn parse_document(text: &str) -> DocResult<Document> {
    serde_json::from_str(text).map_err(|e| DocError::Parse(e.to_string()))
}

pub fn emit_document(doc: &Document) -> String {
    let mut out = serde_json::to_string(doc).expect("documents serialize");
    out.push('\n');
    out
}

/// Fixed-format scalar used in reports: 12 significant digits, shortest
/// decimal of the rounded value.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    format!("{}", round12(x))
}
