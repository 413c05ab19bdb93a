//! Evolution operators and the admissibility predicates for frames of
//! iterations.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::ModelSpace;
use crate::numkit::{self, all_finite, checked_inverse, spectral_norm, Mat};

/// Width of the band around spectral radius 1 in which no verdict is given.
pub const BORDERLINE_BAND: f64 = 1e-8;

/// Computed radii at or above `1 − UNIT_RADIUS_SLACK` count as radius ≥ 1.
pub const UNIT_RADIUS_SLACK: f64 = 1e-12;

/// Largest condition number accepted by [`similarity_transform`].
pub const MAX_SIMILARITY_COND: f64 = 1e12;

#[derive(Debug, Clone)]
pub enum OperatorSpec {
    Dense(Mat),
    Diagonal(Vec<Complex64>),
    /// Compression `P_N S|_N` of the shift to a truncated model space,
    /// in the coordinates of the model space's orthonormal basis.
    Compression(Arc<ModelSpace>),
}

impl OperatorSpec {
    pub fn dense(m: Mat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidInput("operator dimension must be positive".into()));
        }
        if !all_finite(&m) {
            return Err(Error::InvalidInput("non-finite operator entry".into()));
        }
        Ok(OperatorSpec::Dense(m))
    }

    pub fn diagonal(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("operator dimension must be positive".into()));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite diagonal entry".into()));
        }
        Ok(OperatorSpec::Diagonal(entries))
    }

    pub fn compression(model: Arc<ModelSpace>) -> Result<Self> {
        if model.dim() == 0 {
            return Err(Error::Degenerate);
        }
        Ok(OperatorSpec::Compression(model))
    }

    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::Dense(m) => m.nrows(),
            OperatorSpec::Diagonal(v) => v.len(),
            OperatorSpec::Compression(n) => n.dim(),
        }
    }

    pub fn matrix(&self) -> Mat {
        match self {
            OperatorSpec::Dense(m) => m.clone(),
            OperatorSpec::Diagonal(v) => numkit::diag(v),
            OperatorSpec::Compression(n) => n.compression_matrix(),
        }
    }

    /// The adjoint operator. Compressions become dense `S*|_N` matrices.
    pub fn adjoint(&self) -> OperatorSpec {
        match self {
            OperatorSpec::Dense(m) => OperatorSpec::Dense(m.adjoint()),
            OperatorSpec::Diagonal(v) => OperatorSpec::Diagonal(v.iter().map(|z| z.conj()).collect()),
            OperatorSpec::Compression(n) => OperatorSpec::Dense(n.adjoint_compression_matrix()),
        }
    }
}

pub fn op_norm(t: &OperatorSpec) -> f64 {
    match t {
        OperatorSpec::Diagonal(v) => v.iter().fold(0.0_f64, |a, z| a.max(z.norm())),
        other => spectral_norm(&other.matrix()),
    }
}

pub fn spectral_radius(t: &OperatorSpec) -> f64 {
    match t {
        OperatorSpec::Diagonal(v) => v.iter().fold(0.0_f64, |a, z| a.max(z.norm())),
        other => numkit::spectral_radius(&other.matrix()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub norm: f64,
    pub spectral_radius: f64,
    pub is_contraction: bool,
    pub adjoint_strongly_stable: bool,
    pub admits_parseval: bool,
    pub admits_frame: bool,
}

/// Decides whether `T` admits frames / Parseval frames of iterations.
///
/// In finite dimensions `(T*)ⁿv → 0` for every `v` iff `ρ(T) < 1`, and `T`
/// is then similar to a strict contraction. So a frame exists iff `ρ(T) < 1`
/// and a Parseval frame exists iff additionally `‖T‖ ≤ 1`.
///
/// Radii in `[1 − tol, 1)` give [`Error::Borderline`]. A computed radius at
/// or above one (up to [`UNIT_RADIUS_SLACK`]) is a definite "no".
pub fn admissibility(t: &OperatorSpec, tol: f64) -> Result<AdmissibilityReport> {
    if !(tol > 0.0 && tol < 0.1) {
        return Err(Error::InvalidInput(format!("tolerance {tol} outside (0, 0.1)")));
    }
    let norm = op_norm(t);
    let radius = spectral_radius(t);
    if radius >= 1.0 - tol && radius < 1.0 - UNIT_RADIUS_SLACK {
        return Err(Error::Borderline { spectral_radius: radius });
    }
    let is_contraction = norm <= 1.0 + tol;
    let adjoint_strongly_stable = radius < 1.0 - tol;
    let admits_frame = adjoint_strongly_stable;
    let admits_parseval = is_contraction && adjoint_strongly_stable;
    Ok(AdmissibilityReport {
        norm,
        spectral_radius: radius,
        is_contraction,
        adjoint_strongly_stable,
        admits_parseval,
        admits_frame,
    })
}

/// `V·T·V⁻¹` together with the condition number of `V`.
pub fn similarity_transform(t: &OperatorSpec, v: &Mat) -> Result<(OperatorSpec, f64)> {
    if v.nrows() != t.dim() || v.ncols() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), found: v.nrows() });
    }
    let (inv, cond) = checked_inverse(v, MAX_SIMILARITY_COND)?;
    let m = v * t.matrix() * inv;
    Ok((OperatorSpec::Dense(m), cond))
}
