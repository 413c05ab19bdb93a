//! Canonical tightening `Q = S^{−1/2} T S^{1/2}` of a frame of iterations
//! and the frame-index certificate built on it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{frame_bounds, frame_index_oracle, reduce_generators, FrameReport, FrameSystem};
use crate::numkit::{herm_eig, herm_fn, numerical_rank, spectral_norm, HermMat, Mat};
use crate::operators::{op_norm, OperatorSpec};

/// Relative rank threshold for `I − QQ*`.
pub const CERTIFICATE_RANK_TOL: f64 = 1e-8;

/// Allowed excess of `‖Q‖` over one.
pub const CONTRACTION_TOL: f64 = 1e-8;

/// Allowed relative residual of `S − TST* = GG*`.
pub const STEIN_CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Tightening {
    pub q: OperatorSpec,
    pub tightened: FrameSystem,
    /// Report on the original system.
    pub original: FrameReport,
    /// Report on the tightened system.
    pub report: FrameReport,
    pub q_norm: f64,
}

/// Tightens a frame: with `S` the frame operator, `Q = S^{−1/2} T S^{1/2}`
/// and the generators `S^{−1/2} vᵢ` form a Parseval frame of iterations of
/// `Q`, and `Q` is a contraction.
pub fn canonical_tighten(sys: &FrameSystem) -> Result<Tightening> {
    let original = frame_bounds(sys)?;
    if !original.is_frame {
        return Err(Error::NotAFrame { lower: original.lower_bound, upper: original.upper_bound });
    }
    let s = &original.frame_operator;
    let half = herm_fn(s, f64::sqrt);
    let inv_half = herm_fn(s, |l| 1.0 / l.sqrt());
    let q_mat = inv_half.as_mat() * sys.operator_matrix() * half.as_mat();
    let q = OperatorSpec::dense(q_mat)?;
    let gens = inv_half.as_mat() * sys.generators();
    let tightened = FrameSystem::new(q.clone(), gens)?.with_horizon(sys.horizon());
    let report = frame_bounds(&tightened)?;
    let q_norm = op_norm(&q);
    Ok(Tightening { q, tightened, original, report, q_norm })
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexCertificate {
    pub gamma: usize,
    #[serde(skip)]
    pub q: OperatorSpec,
    pub check: bool,
    /// `rank(I − QQ*)`.
    pub defect_rank: usize,
    pub q_norm: f64,
    /// Smallest eigenvalue of `I − QQ*`.
    pub contraction_margin: f64,
    /// `‖I − QQ* − S^{−1/2} G G* S^{−1/2}‖₂`.
    pub defect_identity_residual: f64,
    /// `‖S − TST* − GG*‖₂ / ‖S‖₂`.
    pub stein_residual: f64,
    pub parseval_defect: f64,
    pub witness_attempts: usize,
}

/// Certifies `γ(T) = rank(I − QQ*)` where `Q` is the tightening of a
/// minimal witness frame for `T`.
pub fn index_certificate(t: &OperatorSpec, seed: u64) -> Result<IndexCertificate> {
    let witness = frame_index_oracle(t, seed)?;
    let sys = reduce_generators(&FrameSystem::new(t.clone(), witness.generators)?);
    let tight = canonical_tighten(&sys)?;
    let q = tight.q.matrix();
    let d = q.nrows();
    let gap = HermMat::symmetrized(Mat::identity(d, d) - &q * q.adjoint());
    let defect_rank = numerical_rank(gap.as_mat(), CERTIFICATE_RANK_TOL);
    let (values, _) = herm_eig(&gap);
    let contraction_margin = values.first().copied().unwrap_or(0.0);
    let tg = tight.tightened.generators();
    let defect_identity_residual = spectral_norm(&(gap.as_mat() - tg * tg.adjoint()));
    let s_norm = tight.original.upper_bound.max(f64::MIN_POSITIVE);
    let stein_residual = tight.original.stein_residual / s_norm;

    let check = defect_rank == witness.gamma
        && sys.generator_count() == witness.gamma
        && tight.q_norm <= 1.0 + CONTRACTION_TOL
        && stein_residual <= STEIN_CHECK_TOL;
    if !check {
        return Err(Error::CertificateFailed(format!(
            "gamma {}, rank(I-QQ*) {}, generators {}, |Q| {:.3e}, stein residual {:.3e}",
            witness.gamma,
            defect_rank,
            sys.generator_count(),
            tight.q_norm,
            stein_residual
        )));
    }
    Ok(IndexCertificate {
        gamma: witness.gamma,
        q: tight.q,
        check,
        defect_rank,
        q_norm: tight.q_norm,
        contraction_margin,
        defect_identity_residual,
        stein_residual,
        parseval_defect: tight.report.parseval_defect,
        witness_attempts: witness.attempts,
    })
}
