//! Truncated vector-valued Hardy space, shift-invariant subspaces, model
//! spaces and the frames that live on them.
//!
//! `H_m` holds `C^d`-valued polynomials of degree `≤ m`, stored degree-major:
//! the coefficient of `e_i·zⁿ` sits at index `n·d + i`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::FrameSystem;
use crate::inner::MatrixInner;
use crate::numkit::{numerical_rank, spectral_norm, CVec, Mat, Subspace, ZERO};
use crate::operators::OperatorSpec;

/// Cutoff headroom required above the degree of an inner function.
pub const CUTOFF_MARGIN: usize = 8;

/// Generators whose projection has norm below this are dropped.
pub const GENERATOR_DROP_TOL: f64 = 1e-8;

/// Relative rank threshold for spans of exactly independent vectors.
const SPAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncHardy {
    d: usize,
    m: usize,
}

impl TruncHardy {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("multiplicity must be positive".into()));
        }
        Ok(TruncHardy { d, m })
    }

    pub fn multiplicity(&self) -> usize {
        self.d
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d * (self.m + 1)
    }

    pub fn index(&self, degree: usize, coord: usize) -> usize {
        degree * self.d + coord
    }

    /// The constants `C^d ⊂ H_m` (degree-zero block).
    pub fn constants(&self) -> Subspace {
        let mut b = Mat::zeros(self.dim(), self.d);
        for i in 0..self.d {
            b[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Subspace::from_orthonormal(b, 0.0).expect("unit vectors")
    }

    /// Matrix of the truncated shift (top degree dropped).
    pub fn shift_matrix(&self) -> Mat {
        shift_rows(&Mat::identity(self.dim(), self.dim()), self.d)
    }

    /// Matrix of the backward shift, exact on `H_m`.
    pub fn backshift_matrix(&self) -> Mat {
        backshift_rows(&Mat::identity(self.dim(), self.dim()), self.d)
    }
}

/// Applies the shift to every column: rows move down by `d`, the top block is dropped.
pub(crate) fn shift_rows(v: &Mat, d: usize) -> Mat {
    let n = v.nrows();
    let mut out = Mat::zeros(n, v.ncols());
    if n > d {
        out.rows_mut(d, n - d).copy_from(&v.rows(0, n - d));
    }
    out
}

/// Applies the backward shift to every column.
pub(crate) fn backshift_rows(v: &Mat, d: usize) -> Mat {
    let n = v.nrows();
    let mut out = Mat::zeros(n, v.ncols());
    if n > d {
        out.rows_mut(0, n - d).copy_from(&v.rows(d, n - d));
    }
    out
}

/// An element of `H_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyVec {
    space: TruncHardy,
    coeffs: CVec,
}

impl HardyVec {
    pub fn new(space: TruncHardy, coeffs: CVec) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: coeffs.len() });
        }
        Ok(HardyVec { space, coeffs })
    }

    pub fn zero(space: TruncHardy) -> Self {
        HardyVec { space, coeffs: CVec::zeros(space.dim()) }
    }

    /// `e_i·zⁿ`.
    pub fn monomial(space: TruncHardy, coord: usize, degree: usize) -> Result<Self> {
        if coord >= space.d {
            return Err(Error::DimensionMismatch { expected: space.d, found: coord });
        }
        if degree > space.m {
            return Err(Error::DegreeOverflow { degree, cutoff: space.m });
        }
        let mut v = Self::zero(space);
        v.coeffs[space.index(degree, coord)] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn space(&self) -> TruncHardy {
        self.space
    }

    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    /// Coefficient vector of `zⁿ`.
    pub fn coefficient(&self, n: usize) -> CVec {
        self.coeffs.rows(n * self.space.d, self.space.d).into_owned()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// Largest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        (0..=self.space.m).rev().find(|&n| self.coefficient(n).iter().any(|z| *z != ZERO))
    }

    pub fn shift(&self) -> Result<HardyVec> {
        if self.coefficient(self.space.m).iter().any(|z| *z != ZERO) {
            return Err(Error::Overflow);
        }
        let col = Mat::from_column_slice(self.coeffs.len(), 1, self.coeffs.as_slice());
        let s = shift_rows(&col, self.space.d);
        Ok(HardyVec { space: self.space, coeffs: s.column(0).into_owned() })
    }

    pub fn backshift(&self) -> HardyVec {
        let col = Mat::from_column_slice(self.coeffs.len(), 1, self.coeffs.as_slice());
        let s = backshift_rows(&col, self.space.d);
        HardyVec { space: self.space, coeffs: s.column(0).into_owned() }
    }
}

pub fn shift(f: &HardyVec) -> Result<HardyVec> {
    f.shift()
}

pub fn backshift(f: &HardyVec) -> HardyVec {
    f.backshift()
}

/// `Q·f`, exact when `deg(Q) + deg(f) ≤ m`.
pub fn mult_by_inner(q: &MatrixInner, f: &HardyVec) -> Result<HardyVec> {
    let h = f.space;
    if q.multiplicity() != h.d {
        return Err(Error::DimensionMismatch { expected: h.d, found: q.multiplicity() });
    }
    let deg = q.degree();
    if deg > h.m {
        return Err(Error::DegreeOverflow { degree: deg, cutoff: h.m });
    }
    let fdeg = f.degree().unwrap_or(0);
    if fdeg + deg > h.m {
        return Err(Error::DegreeOverflow { degree: fdeg + deg, cutoff: h.m });
    }
    let qs = q.coefficients(h.m);
    let mut out = CVec::zeros(h.dim());
    for n in 0..=fdeg {
        let fn_ = f.coefficient(n);
        for k in n..=h.m {
            let block = &qs[k - n] * &fn_;
            let mut target = out.rows_mut(k * h.d, h.d);
            target += block;
        }
    }
    Ok(HardyVec { space: h, coeffs: out })
}

/// Truncation of `Q·H²_d` to `H_m`: the span of `L·b_j·e_j·zⁿ` for
/// `n ≤ m − deg b_j`, where `Q = L·diag(b_j)·R`.
pub fn invariant_subspace(q: &MatrixInner, h: &TruncHardy) -> Result<Subspace> {
    if q.multiplicity() != h.d {
        return Err(Error::DimensionMismatch { expected: h.d, found: q.multiplicity() });
    }
    let deg = q.degree();
    if deg > h.m {
        return Err(Error::DegreeOverflow { degree: deg, cutoff: h.m });
    }
    let (left, diag, _) = q.factors();
    let count: usize = diag.iter().map(|b| h.m + 1 - b.degree()).sum();
    let mut cols = Mat::zeros(h.dim(), count);
    let mut c = 0;
    for (j, b) in diag.iter().enumerate() {
        let coeffs = b.coeffs(h.m);
        let lj = left.column(j);
        for n in 0..=(h.m - b.degree()) {
            for k in n..=h.m {
                let w = coeffs[k - n];
                if w == ZERO {
                    continue;
                }
                for i in 0..h.d {
                    cols[(k * h.d + i, c)] = lj[i] * w;
                }
            }
            c += 1;
        }
    }
    Ok(Subspace::span(&cols, SPAN_TOL))
}

/// Where a model space came from.
#[derive(Debug, Clone)]
pub enum ModelSource {
    Inner(MatrixInner),
    Rota { operator_dim: usize, defect_index: usize },
}

/// A finite-dimensional co-invariant subspace `N ⊂ H_m` with an
/// orthonormal basis and an estimate of its truncation error.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    space: TruncHardy,
    basis: Subspace,
    source: ModelSource,
    tail_tol: f64,
}

impl ModelSpace {
    pub fn new(space: TruncHardy, basis: Subspace, source: ModelSource, tail_tol: f64) -> Result<Self> {
        if basis.ambient_dim() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: basis.ambient_dim() });
        }
        Ok(ModelSpace { space, basis, source, tail_tol })
    }

    pub fn space(&self) -> TruncHardy {
        self.space
    }

    pub fn subspace(&self) -> &Subspace {
        &self.basis
    }

    pub fn basis(&self) -> &Mat {
        self.basis.basis()
    }

    pub fn source(&self) -> &ModelSource {
        &self.source
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `P_N S|_N` in basis coordinates.
    pub fn compression_matrix(&self) -> Mat {
        let b = self.basis();
        b.adjoint() * shift_rows(b, self.space.d)
    }

    /// `P_N S*|_N` in basis coordinates.
    pub fn adjoint_compression_matrix(&self) -> Mat {
        let b = self.basis();
        b.adjoint() * backshift_rows(b, self.space.d)
    }

    /// `‖(I − P_N)·S*·B‖`, zero for an exactly co-invariant `N`.
    pub fn invariance_defect(&self) -> f64 {
        let moved = backshift_rows(self.basis(), self.space.d);
        spectral_norm(&(&moved - self.basis.project(&moved)))
    }

    /// Embeds basis coordinates back into `H_m`.
    pub fn embed(&self, coords: &Mat) -> Mat {
        self.basis() * coords
    }
}

/// Heuristic size of the truncation error for `Q` at cutoff `m`:
/// the kernel functions of `N` decay like `(m+1)^{k−1}·r^{m+1−deg}`.
pub fn truncation_tail(q: &MatrixInner, m: usize) -> f64 {
    let r = q.max_zero_modulus();
    let deg = q.degree();
    let k = q.max_multiplicity().max(1);
    let decay = r.powi((m + 1).saturating_sub(deg) as i32);
    let poly = ((m + 1) as f64).powi(k as i32 - 1);
    (q.total_degree().max(1) as f64 * poly * decay).max(1e-12)
}

/// `N = H_m ⊖ (Q·H²)|_m`, requiring `m ≥ deg(Q) + 8`.
pub fn model_space(q: &MatrixInner, h: &TruncHardy) -> Result<ModelSpace> {
    let required = q.degree() + CUTOFF_MARGIN;
    if h.m < required {
        return Err(Error::CutoffTooSmall { cutoff: h.m, required });
    }
    let m_sub = invariant_subspace(q, h)?;
    let n = m_sub.complement();
    ModelSpace::new(*h, n, ModelSource::Inner(q.clone()), truncation_tail(q, h.m))
}

/// The compression of the shift to `N` as an operator.
pub fn compression(n: &Arc<ModelSpace>) -> Result<OperatorSpec> {
    OperatorSpec::compression(n.clone())
}

/// The frame `{A_Nⁿ P_N e_i}` of the compression, generated by the
/// projected constants. Generators that project to zero are dropped.
pub fn basic_frame(n: &Arc<ModelSpace>) -> Result<FrameSystem> {
    if n.dim() == 0 {
        return Err(Error::Degenerate);
    }
    let d = n.space.d;
    let b = n.basis();
    let gens: Vec<CVec> = (0..d)
        .map(|i| b.row(i).adjoint())
        .filter(|g| {
            let keep = g.norm() > GENERATOR_DROP_TOL;
            if !keep {
                log::debug!("dropping generator with projected norm {:.3e}", g.norm());
            }
            keep
        })
        .collect();
    if gens.is_empty() {
        return Err(Error::Degenerate);
    }
    let g = Mat::from_columns(&gens);
    Ok(FrameSystem::new(compression(n)?, g)?.with_parseval_tol(n.tail_tol.max(1e-8)))
}

/// Wandering subspace `W = M ⊖ S·M` of a shift-invariant `M ⊂ H_m`.
///
/// `S·M` is formed from `M₀ = {f ∈ M : top coefficient 0}` so that nothing
/// is lost to truncation; fails when `S·M₀` leaves `M` by more than `tol`.
pub fn wandering_subspace(m_sub: &Subspace, h: &TruncHardy, tol: f64) -> Result<Subspace> {
    if m_sub.ambient_dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: m_sub.ambient_dim() });
    }
    let b = m_sub.basis();
    if b.ncols() == 0 {
        return Ok(Subspace::zero(h.dim()));
    }
    let top = b.rows(h.m * h.d, h.d).into_owned();
    let kernel = crate::numkit::nullspace(&top, 1e-10);
    let m0 = b * kernel;
    let sm0 = shift_rows(&m0, h.d);
    let defect = m_sub.containment_defect(&sm0);
    if defect > tol {
        return Err(Error::NotInvariant { defect, tol });
    }
    m_sub.orthogonal_difference(&Subspace::span(&sm0, SPAN_TOL))
}

/// Split of a wandering subspace against the constants `K`:
/// `K₀ = W ∩ K`, `W₁ = W ⊖ K₀`, `K₁ = K ⊖ K₀`.
#[derive(Debug, Clone)]
pub struct WanderingSplit {
    pub k0: Subspace,
    pub w1: Subspace,
    pub k1: Subspace,
}

pub fn split_wandering(w: &Subspace, h: &TruncHardy, angle_tol: f64) -> Result<WanderingSplit> {
    let k = h.constants();
    let k0 = w.intersection(&k, angle_tol)?;
    let w1 = w.orthogonal_difference(&k0)?;
    let k1 = k.orthogonal_difference(&k0)?;
    Ok(WanderingSplit { k0, w1, k1 })
}

/// Anything that can be evaluated on the unit circle as a `d × d` matrix.
pub trait BoundarySymbol {
    fn multiplicity(&self) -> usize;
    fn eval(&self, z: Complex64) -> Mat;
}

impl BoundarySymbol for MatrixInner {
    fn multiplicity(&self) -> usize {
        MatrixInner::multiplicity(self)
    }

    fn eval(&self, z: Complex64) -> Mat {
        MatrixInner::eval(self, z)
    }
}

/// A constant, not necessarily unitary, symbol.
#[derive(Debug, Clone)]
pub struct ConstantSymbol(pub Mat);

impl BoundarySymbol for ConstantSymbol {
    fn multiplicity(&self) -> usize {
        self.0.nrows()
    }

    fn eval(&self, _z: Complex64) -> Mat {
        self.0.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FullRange {
    pub is_full_range: bool,
    pub min_rank: usize,
}

/// Full range means the boundary values have rank `d` almost everywhere;
/// checked on an equispaced grid of at least 8 points.
pub fn full_range_check(q: &dyn BoundarySymbol, grid_points: usize) -> Result<FullRange> {
    if grid_points < 8 {
        return Err(Error::InvalidInput(format!("grid of {grid_points} points is below 8")));
    }
    let d = q.multiplicity();
    let mut min_rank = d;
    for k in 0..grid_points {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / grid_points as f64;
        let v = q.eval(Complex64::from_polar(1.0, theta));
        let rank = numerical_rank(&v, crate::numkit::default_rank_tol(&v));
        min_rank = min_rank.min(rank);
    }
    Ok(FullRange { is_full_range: min_rank == d, min_rank })
}

/// The adjoint frame `{(A_N*)ⁿ P_N S*Q e_i}` on the model space of `Q`.
#[derive(Debug, Clone)]
pub struct AdjointFrame {
    pub system: FrameSystem,
    pub model: Arc<ModelSpace>,
}

pub fn adjoint_frame(q: &MatrixInner, h: &TruncHardy) -> Result<AdjointFrame> {
    let model = Arc::new(model_space(q, h)?);
    if model.dim() == 0 {
        return Err(Error::Degenerate);
    }
    let d = h.d;
    let qs = q.coefficients(h.m + 1);
    // S*·(Q e_i): block n holds Q̂(n+1)·e_i.
    let mut moved = Mat::zeros(h.dim(), d);
    for n in 0..=h.m {
        moved.rows_mut(n * d, d).copy_from(&qs[n + 1]);
    }
    let coords = model.basis().adjoint() * moved;
    let gens: Vec<CVec> = (0..d)
        .map(|i| coords.column(i).into_owned())
        .filter(|g| g.norm() > GENERATOR_DROP_TOL)
        .collect();
    if gens.is_empty() {
        return Err(Error::Degenerate);
    }
    let op = OperatorSpec::dense(model.adjoint_compression_matrix())?;
    let system = FrameSystem::new(op, Mat::from_columns(&gens))?.with_parseval_tol(model.tail_tol.max(1e-8));
    Ok(AdjointFrame { system, model })
}

/// Model space of `ρ(Q)`, together with the round trip `ρ(ρ(Q)) = Q`
/// checked on model spaces.
pub fn basic_of_adjoint(q: &MatrixInner, h: &TruncHardy) -> Result<(ModelSpace, bool)> {
    let n_rho = model_space(&q.rho(), h)?;
    let back = model_space(&q.rho().rho(), h)?;
    let orig = model_space(q, h)?;
    let ok = back.subspace().equals(orig.subspace(), 1e-10)?;
    Ok((n_rho, ok))
}

/// `𝓛 = span{(I − P_N)·S·f : f ∈ N}`.
///
/// `S·f` is formed one degree higher so the top coefficient is kept, then
/// the result is cut back to `H_m`. Components below the truncation noise
/// (`100 × tail_tol`, relative) are discarded.
pub fn script_l(n: &ModelSpace) -> Result<Subspace> {
    if n.dim() == 0 {
        return Err(Error::Degenerate);
    }
    let h = n.space;
    let d = h.d;
    let b = n.basis();
    let big = h.dim() + d;
    let mut padded = Mat::zeros(big, b.ncols());
    padded.rows_mut(0, h.dim()).copy_from(b);
    let shifted = shift_rows(&padded, d);
    let residual = &shifted - &padded * (padded.adjoint() * &shifted);
    let cut = residual.rows(0, h.dim()).into_owned();
    let rel = (100.0 * n.tail_tol).clamp(1e-8, 1e-2);
    Ok(Subspace::span(&cut, rel))
}
