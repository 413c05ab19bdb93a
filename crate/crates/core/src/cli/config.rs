//! JSON request schema and its translation into library objects.
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major nested
//! lists and generators are a list of column vectors.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{model_space, ModelSpace, TruncHardy};
use crate::inner::{BlaschkeProduct, MatrixInner};
use crate::instances;
use crate::numkit::Mat;
use crate::operators::OperatorSpec;

pub type Pair = [f64; 2];

pub fn to_complex(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Admissibility,
    FrameBounds,
    ParsevalGenerators,
    Tighten,
    IndexCertificate,
    ModelSpace,
    AdjointFrame,
    OptimalFrames,
    InnerSimilarity,
    SynthesisKernel,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Admissibility => "admissibility",
            Task::FrameBounds => "frame-bounds",
            Task::ParsevalGenerators => "parseval-generators",
            Task::Tighten => "tighten",
            Task::IndexCertificate => "index-certificate",
            Task::ModelSpace => "model-space",
            Task::AdjointFrame => "adjoint-frame",
            Task::OptimalFrames => "optimal-frames",
            Task::InnerSimilarity => "inner-similarity",
            Task::SynthesisKernel => "synthesis-kernel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Repeated eigenvalue family; `n` copies of the first eigenvalue.
    Tn,
    /// `Te₁ = 2e₂`, `Te₂ = 0`, diagonal tail.
    Noncontraction,
    /// Diagonal operator on a Carleson sequence.
    Carleson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorConfig {
    Dense {
        matrix: Vec<Vec<Pair>>,
    },
    Diagonal {
        entries: Vec<Pair>,
    },
    Preset {
        name: Preset,
        /// Total dimension.
        dim: usize,
        /// Multiplicity parameter of the `tn` preset.
        #[serde(default)]
        n: Option<usize>,
        /// Explicit eigenvalues; otherwise points on the circle of radius `radius`.
        #[serde(default)]
        lambdas: Option<Vec<Pair>>,
        #[serde(default)]
        radius: Option<f64>,
    },
    BlaschkeModel {
        /// Zeros of a scalar Blaschke product.
        #[serde(default)]
        zeros: Option<Vec<Pair>>,
        /// Zeros of each diagonal factor of a matrix inner function.
        #[serde(default)]
        factors: Option<Vec<Vec<Pair>>>,
        /// Optional unitary similarity witness for `inner-similarity`.
        #[serde(default)]
        witness: Option<Vec<Vec<Pair>>>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub m: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-8
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { m: 60, tol: default_tol() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub operator: OperatorConfig,
    #[serde(default)]
    pub generators: Option<Vec<Vec<Pair>>>,
    #[serde(default)]
    pub truncation: Truncation,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub seed: u64,
}

pub fn parse_config(text: &str) -> Result<Config> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
}

fn matrix_from_rows(rows: &[Vec<Pair>]) -> Result<Mat> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|row| row.len() != c) {
        return Err(Error::DimensionMismatch { expected: c, found: bad.len() });
    }
    Ok(Mat::from_fn(r, c, |i, j| to_complex(&rows[i][j])))
}

fn matrix_from_columns(cols: &[Vec<Pair>]) -> Result<Mat> {
    Ok(matrix_from_rows(cols)?.transpose())
}

/// What the request's operator turned into.
#[derive(Debug, Clone)]
pub enum Subject {
    Operator(OperatorSpec),
    Model { inner: MatrixInner, model: Arc<ModelSpace>, witness: Option<Mat> },
}

impl Subject {
    pub fn operator(&self) -> Result<OperatorSpec> {
        match self {
            Subject::Operator(t) => Ok(t.clone()),
            Subject::Model { model, .. } => OperatorSpec::compression(model.clone()),
        }
    }
}

fn blaschke(zeros: &[Pair]) -> Result<BlaschkeProduct> {
    let z: Vec<Complex64> = zeros.iter().map(to_complex).collect();
    BlaschkeProduct::from_zeros(&z)
}

pub fn build_subject(cfg: &Config) -> Result<Subject> {
    match &cfg.operator {
        OperatorConfig::Dense { matrix } => Ok(Subject::Operator(OperatorSpec::dense(matrix_from_rows(matrix)?)?)),
        OperatorConfig::Diagonal { entries } => {
            Ok(Subject::Operator(OperatorSpec::diagonal(entries.iter().map(to_complex).collect())?))
        }
        OperatorConfig::Preset { name, dim, n, lambdas, radius } => {
            let radius = radius.unwrap_or(0.9);
            let needed = match name {
                Preset::Tn => {
                    let n = n.unwrap_or(3);
                    if *dim < n {
                        return Err(Error::InvalidInput(format!("dim {dim} is below N = {n}")));
                    }
                    dim + 1 - n
                }
                Preset::Noncontraction => dim.checked_sub(2).ok_or_else(|| {
                    Error::InvalidInput(format!("dim {dim} is below 3"))
                })?,
                Preset::Carleson => *dim,
            };
            let seq: Vec<Complex64> = match lambdas {
                Some(l) if l.len() == needed => l.iter().map(to_complex).collect(),
                Some(l) => return Err(Error::DimensionMismatch { expected: needed, found: l.len() }),
                None => instances::circle_sequence(needed, radius),
            };
            let t = match name {
                Preset::Tn => instances::tn_operator(n.unwrap_or(3), &seq)?,
                Preset::Noncontraction => instances::non_contraction_operator(&seq)?,
                Preset::Carleson => instances::carleson_diag(&seq)?,
            };
            Ok(Subject::Operator(t))
        }
        OperatorConfig::BlaschkeModel { zeros, factors, witness } => {
            let inner = match (zeros, factors) {
                (Some(z), None) => MatrixInner::scalar(blaschke(z)?),
                (None, Some(f)) => MatrixInner::diagonal(f.iter().map(|z| blaschke(z)).collect::<Result<_>>()?)?,
                _ => {
                    return Err(Error::InvalidInput(
                        "blaschke-model needs exactly one of `zeros` or `factors`".into(),
                    ))
                }
            };
            let h = TruncHardy::new(inner.multiplicity(), cfg.truncation.m)?;
            let model = Arc::new(model_space(&inner, &h)?);
            let witness = witness.as_deref().map(matrix_from_rows).transpose()?;
            Ok(Subject::Model { inner, model, witness })
        }
    }
}

pub fn build_generators(cfg: &Config) -> Result<Option<Mat>> {
    cfg.generators.as_deref().map(matrix_from_columns).transpose()
}
