//! Defect operator of a contraction, Parseval frames generated by it, and
//! the Rota embedding into a vector-valued Hardy space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::FrameSystem;
use crate::hardy::{split_wandering, wandering_subspace, ModelSource, ModelSpace, TruncHardy};
use crate::numkit::{self, herm_eig, herm_fn, iterate_tail_sum, spectral_norm, HermMat, Mat, Subspace};
use crate::operators::{admissibility, op_norm, OperatorSpec, BORDERLINE_BAND};

/// Relative rank threshold of `I − TT*`.
pub const DEFECT_RANK_TOL: f64 = 1e-8;

/// Truncation error accepted by [`optimal_frames`].
pub const OPTIMAL_TAIL_TOL: f64 = 1e-6;

/// Largest horizon [`rota_horizon`] will consider.
pub const MAX_HORIZON: usize = 100_000;

#[derive(Debug, Clone)]
pub struct DefectData {
    /// `D = (I − TT*)^{1/2}`.
    pub d: HermMat,
    /// Orthonormal basis of `ran D`, ordered by decreasing eigenvalue.
    pub defect_space: Subspace,
    /// `γ = rank(I − TT*)`.
    pub index: usize,
}

/// `D = (I − TT*)^{1/2}` for `‖T‖ ≤ 1 + tol`, with its range and rank.
///
/// Eigenvalues of `I − TT*` that are negative within the contraction
/// tolerance are set to zero; the rank counts eigenvalues above
/// `tol·λ_max`.
pub fn defect(t: &OperatorSpec, tol: f64) -> Result<DefectData> {
    let norm = op_norm(t);
    if norm > 1.0 + tol {
        return Err(Error::NotContraction { norm });
    }
    let m = t.matrix();
    let n = m.nrows();
    let gap = HermMat::symmetrized(Mat::identity(n, n) - &m * m.adjoint());
    let (values, vectors) = herm_eig(&gap);
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let index = if top > 0.0 { values.iter().filter(|&&x| x > tol * top).count() } else { 0 };
    let d = herm_fn(&gap, |x| x.max(0.0).sqrt());
    let cols: Vec<usize> = (0..n).rev().take(index).collect();
    let mut basis = Mat::from_fn(n, index, |r, c| vectors[(r, cols[c])]);
    numkit::fix_column_phases(&mut basis);
    let defect_space = Subspace::from_orthonormal(basis, 1e-8)?;
    Ok(DefectData { d, defect_space, index })
}

/// Minimal number of generators of a Parseval frame of iterations of `T`;
/// zero when no Parseval frame exists.
pub fn parseval_index(t: &OperatorSpec) -> Result<usize> {
    let report = admissibility(t, BORDERLINE_BAND)?;
    if !report.admits_parseval {
        return Ok(0);
    }
    Ok(defect(t, DEFECT_RANK_TOL)?.index)
}

/// The Parseval frame `{Tⁿ D gⱼ}` with `gⱼ` an orthonormal basis of `ran D`.
pub fn parseval_generators(t: &OperatorSpec) -> Result<FrameSystem> {
    let report = admissibility(t, BORDERLINE_BAND)?;
    if !report.admits_parseval {
        return Err(Error::NotAdmissible(format!(
            "norm {:.6}, spectral radius {:.6}",
            report.norm, report.spectral_radius
        )));
    }
    let data = defect(t, DEFECT_RANK_TOL)?;
    let gens = data.d.as_mat() * data.defect_space.basis();
    FrameSystem::new(t.clone(), gens)
}

/// Smallest `m` with `‖D²‖·Σ_{n>m}‖Tⁿ‖² ≤ tol`, the size of the Rota
/// embedding that is lost by truncating at degree `m`.
pub fn rota_horizon(t: &OperatorSpec, tol: f64) -> Result<usize> {
    let m = t.matrix();
    let n = m.nrows();
    let dd = spectral_norm(&(Mat::identity(n, n) - &m * m.adjoint()));
    let within = |h: usize| iterate_tail_sum(&m, h).is_some_and(|s| dd * s <= tol);
    let mut hi = 1;
    while !within(hi) {
        hi *= 2;
        if hi > MAX_HORIZON {
            let bound = iterate_tail_sum(&m, MAX_HORIZON).map_or(f64::INFINITY, |s| dd * s);
            return Err(Error::TailNotCertified { bound, requested: tol });
        }
    }
    let mut lo = 0;
    if within(0) {
        return Ok(0);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if within(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The Rota map `L x = Σ (G* D (T*)ⁿ x) zⁿ`, cut at degree `m`.
#[derive(Debug, Clone)]
pub struct RotaEmbedding {
    /// `γ(m+1) × d`; block `n` is `G*·D·(T*)ⁿ`.
    pub l: Mat,
    /// `‖L*L − I‖₂`.
    pub isometry_defect: f64,
    /// `‖S*L − L T*‖₂` on the first `m` blocks.
    pub intertwine_defect: f64,
    /// Norm lost to the truncation, `‖D²‖·Σ_{n>m}‖Tⁿ‖²`.
    pub tail_bound: f64,
    pub defect: DefectData,
}

pub fn rota_embed(t: &OperatorSpec, m: usize, tol: f64) -> Result<RotaEmbedding> {
    let report = admissibility(t, BORDERLINE_BAND)?;
    if !report.admits_parseval {
        return Err(Error::NotAdmissible(format!(
            "norm {:.6}, spectral radius {:.6}",
            report.norm, report.spectral_radius
        )));
    }
    let mat = t.matrix();
    let d = mat.nrows();
    let data = defect(t, DEFECT_RANK_TOL)?;
    let dd = spectral_norm(&(Mat::identity(d, d) - &mat * mat.adjoint()));
    let tail_bound = iterate_tail_sum(&mat, m).map_or(f64::INFINITY, |s| dd * s);
    if !(tail_bound <= tol) {
        return Err(Error::TailNotCertified { bound: tail_bound, requested: tol });
    }
    let g = data.index;
    let mut l = Mat::zeros(g * (m + 1), d);
    let mut block = data.defect_space.basis().adjoint() * data.d.as_mat();
    let adj = mat.adjoint();
    for n in 0..=m {
        if n > 0 {
            block = &block * &adj;
        }
        l.rows_mut(n * g, g).copy_from(&block);
    }
    let isometry_defect = spectral_norm(&(l.adjoint() * &l - Mat::identity(d, d)));
    let intertwine_defect = if m == 0 || g == 0 {
        0.0
    } else {
        let lt = &l * &adj;
        let up = l.rows(g, g * m).into_owned();
        spectral_norm(&(up - lt.rows(0, g * m)))
    };
    Ok(RotaEmbedding { l, isometry_defect, intertwine_defect, tail_bound, defect: data })
}

/// The Rota model: `N = ran L ⊂ H_m` with multiplicity `γ`.
#[derive(Debug, Clone)]
pub struct RotaModel {
    pub model: ModelSpace,
    pub embedding: RotaEmbedding,
    /// `‖(I − P_N) S* B‖` on the first `m` degrees.
    pub invariance_defect: f64,
    /// `dim(K ∩ N⊥)` for the constants `K`; zero when the defect space is
    /// all of `K`.
    pub constants_meet_complement: usize,
}

pub fn model_space_of(t: &OperatorSpec, m: usize, tol: f64) -> Result<RotaModel> {
    let embedding = rota_embed(t, m, tol)?;
    let g = embedding.defect.index;
    if g == 0 {
        return Err(Error::Degenerate);
    }
    let h = TruncHardy::new(g, m)?;
    let n = Subspace::span(&embedding.l, 1e-10);
    let meet = h.constants().intersection(&n.complement(), 1e-6)?.dim();
    let model = ModelSpace::new(
        h,
        n,
        ModelSource::Rota { operator_dim: t.dim(), defect_index: g },
        embedding.tail_bound.max(1e-12),
    )?;
    let invariance_defect = model.invariance_defect();
    Ok(RotaModel { model, embedding, invariance_defect, constants_meet_complement: meet })
}

/// Frames for `T` and `T*` read off the wandering subspace of the Rota model.
#[derive(Debug, Clone)]
pub struct OptimalFrames {
    /// `{Tⁿ L* eⱼ}` with `eⱼ` an orthonormal basis of `K₁ = K ⊖ (W ∩ K)`.
    pub for_t: FrameSystem,
    /// `{(T*)ⁿ L* S* Eⱼ}` with `Eⱼ` an orthonormal basis of `W₁ = W ⊖ (W ∩ K)`.
    pub for_t_adjoint: FrameSystem,
    pub rota: RotaModel,
    pub wandering: Subspace,
    /// `dim(W ∩ K)`.
    pub k0_dim: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimalSummary {
    pub gamma: usize,
    pub wandering_dim: usize,
    pub k0_dim: usize,
    pub t_generators: usize,
    pub t_adjoint_generators: usize,
    pub tail_bound: f64,
}

impl OptimalFrames {
    pub fn summary(&self) -> OptimalSummary {
        OptimalSummary {
            gamma: self.rota.embedding.defect.index,
            wandering_dim: self.wandering.dim(),
            k0_dim: self.k0_dim,
            t_generators: self.for_t.generator_count(),
            t_adjoint_generators: self.for_t_adjoint.generator_count(),
            tail_bound: self.rota.embedding.tail_bound,
        }
    }
}

pub fn optimal_frames(t: &OperatorSpec, m: usize) -> Result<OptimalFrames> {
    let report = admissibility(t, BORDERLINE_BAND)?;
    if !report.admits_parseval {
        return Err(Error::NotAdmissible(format!(
            "norm {:.6}, spectral radius {:.6}",
            report.norm, report.spectral_radius
        )));
    }
    let rota = match model_space_of(t, m, OPTIMAL_TAIL_TOL) {
        Err(Error::TailNotCertified { .. }) => {
            let required = rota_horizon(t, OPTIMAL_TAIL_TOL)?;
            return Err(Error::CutoffTooSmall { cutoff: m, required });
        }
        other => other?,
    };
    let h = rota.model.space();
    let g = h.multiplicity();
    let m_sub = rota.model.subspace().complement();
    let wtol = (10.0 * rota.embedding.tail_bound).max(OPTIMAL_TAIL_TOL);
    let w = wandering_subspace(&m_sub, &h, wtol)?;
    let split = split_wandering(&w, &h, 1e-6)?;
    let l_adj = rota.embedding.l.adjoint();

    let k1 = split.k1.basis();
    let t_gens = &l_adj * k1;
    let for_t = FrameSystem::new(t.clone(), t_gens)?.with_parseval_tol(OPTIMAL_TAIL_TOL);

    // S*·Eⱼ drops the constant term; Eⱼ ⊥ K₀ but may still have one.
    let e = split.w1.basis();
    let moved = crate::hardy::backshift_rows(e, g);
    let adj_gens = &l_adj * moved;
    let for_t_adjoint = FrameSystem::new(t.adjoint(), adj_gens)?.with_parseval_tol(OPTIMAL_TAIL_TOL);
    Ok(OptimalFrames { for_t, for_t_adjoint, rota, wandering: w, k0_dim: split.k0.dim() })
}
