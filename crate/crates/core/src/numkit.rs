//! Dense complex linear algebra: Hermitian eigendecomposition, SVD helpers,
//! PSD square roots, numerical rank, subspace algebra and the Stein solver.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Subspaces always carry an
//! orthonormal basis stored column-wise.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Symmetry tolerance for [`HermMat`]: `‖M − M*‖_max ≤ 1e-12·(1 + ‖M‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative clamp window for PSD square roots.
pub const PSD_CLAMP: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn all_finite(m: &Mat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Diagonal matrix from complex entries.
pub fn diag(entries: &[Complex64]) -> Mat {
    Mat::from_diagonal(&CVec::from_column_slice(entries))
}

/// Diagonal matrix from real entries.
pub fn diag_real(entries: &[f64]) -> Mat {
    let v: Vec<Complex64> = entries.iter().map(|&x| c64(x, 0.0)).collect();
    diag(&v)
}

/// Makes the largest-magnitude entry of every column real and positive.
pub fn fix_column_phases(m: &mut Mat) {
    for mut col in m.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(ZERO);
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            col.iter_mut().for_each(|z| *z *= phase);
        }
    }
}

/// Hermitian matrix, verified on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMat(Mat);

impl HermMat {
    pub fn new(m: Mat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if !all_finite(&m) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let asymmetry = max_abs(&(&m - m.adjoint()));
        if asymmetry > HERMITIAN_TOL * (1.0 + max_abs(&m)) {
            return Err(Error::NonHermitian { asymmetry });
        }
        Ok(Self::symmetrized(m))
    }

    /// `(M + M*)/2` without any check. Use for matrices Hermitian by construction.
    pub fn symmetrized(m: Mat) -> Self {
        let h = (&m + m.adjoint()) * c64(0.5, 0.0);
        HermMat(h)
    }

    pub fn identity(n: usize) -> Self {
        HermMat(Mat::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        HermMat(Mat::zeros(n, n))
    }

    /// Gram sum `G·G*` of the columns of `g`.
    pub fn gram(g: &Mat) -> Self {
        Self::symmetrized(g * g.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }
}

/// Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.
pub fn herm_eig(m: &HermMat) -> (Vec<f64>, Mat) {
    let n = m.dim();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(m.as_mat().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn herm_fn(m: &HermMat, f: impl Fn(f64) -> f64) -> HermMat {
    let (values, vectors) = herm_eig(m);
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let s = c64(f(lambda), 0.0);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    HermMat::symmetrized(scaled * vectors.adjoint())
}

/// Square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-10·‖M‖, 0)` are clamped to zero; anything more
/// negative is rejected.
pub fn psd_sqrt(m: &HermMat) -> Result<HermMat> {
    let (values, _) = herm_eig(m);
    let scale = values.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    if let Some(&min) = values.first() {
        if min < -PSD_CLAMP * scale {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    Ok(herm_fn(m, |x| x.max(0.0).sqrt()))
}

/// Singular value decomposition with singular values sorted descending.
/// Returns `(U, σ, V*)` in thin form.
pub fn svd_sorted(m: &Mat) -> (Mat, Vec<f64>, Mat) {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return (Mat::zeros(r, 0), Vec::new(), Mat::zeros(0, c));
    }
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V*");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = Mat::from_fn(r, k, |i, j| u[(i, order[j])]);
    let vt_sorted = Mat::from_fn(k, c, |i, j| vt[(order[i], j)]);
    (u_sorted, sigma, vt_sorted)
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &Mat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Default relative rank threshold: `max(rows, cols)·ε`.
pub fn default_rank_tol(m: &Mat) -> f64 {
    m.nrows().max(m.ncols()).max(1) as f64 * f64::EPSILON
}

/// Number of singular values above `rel_tol·σ_max`.
pub fn numerical_rank(m: &Mat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Eigenvalues of a square matrix, read off its complex Schur form.
pub fn eigenvalues(m: &Mat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

pub fn spectral_radius(m: &Mat) -> f64 {
    eigenvalues(m).iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

/// Spectral radius at or above which the Stein solver refuses to run.
pub const STEIN_RADIUS_LIMIT: f64 = 1.0 - 1e-10;

/// Solves the Stein equation `S − T·S·T* = V` for Hermitian `S`.
///
/// Uses the complex Schur form `T = U·R·U*` and a column sweep on the
/// triangular factor, O(d³).
pub fn stein_solve(t: &Mat, v: &HermMat) -> Result<HermMat> {
    let d = t.nrows();
    if !t.is_square() {
        return Err(Error::DimensionMismatch { expected: d, found: t.ncols() });
    }
    if v.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
    }
    if d == 0 {
        return Ok(HermMat::zeros(0));
    }
    let (u, r) = Schur::new(t.clone()).unpack();
    let radius = (0..d).fold(0.0_f64, |a, i| a.max(r[(i, i)].norm()));
    if radius >= STEIN_RADIUS_LIMIT {
        return Err(Error::Unstable { spectral_radius: radius });
    }
    let vt = u.adjoint() * v.as_mat() * &u;
    let mut x = Mat::zeros(d, d);
    for j in (0..d).rev() {
        // acc = Σ_{l>j} conj(R[j,l])·X[:,l]
        let mut acc = CVec::zeros(d);
        for l in (j + 1)..d {
            let w = r[(j, l)].conj();
            if w != ZERO {
                acc.axpy(w, &x.column(l), ONE);
            }
        }
        let mut rhs: CVec = vt.column(j).into_owned();
        if j + 1 < d {
            rhs += &r * &acc;
        }
        let cj = r[(j, j)].conj();
        let mut col = CVec::zeros(d);
        for i in (0..d).rev() {
            let mut s = rhs[i];
            for k in (i + 1)..d {
                s += cj * r[(i, k)] * col[k];
            }
            col[i] = s / (ONE - cj * r[(i, i)]);
        }
        x.set_column(j, &col);
    }
    Ok(HermMat::symmetrized(&u * x * u.adjoint()))
}

/// `Σ_{n≤max_power} Tⁿ·V·(T*)ⁿ`.
pub fn stein_series(t: &Mat, v: &HermMat, max_power: usize) -> HermMat {
    let mut term = v.as_mat().clone();
    let mut sum = term.clone();
    for _ in 0..max_power {
        term = t * term * t.adjoint();
        sum += &term;
    }
    HermMat::symmetrized(sum)
}

/// Spectral norm of `S − T·S·T* − V`.
pub fn stein_residual(t: &Mat, s: &HermMat, v: &HermMat) -> f64 {
    let r = s.as_mat() - t * s.as_mat() * t.adjoint() - v.as_mat();
    spectral_norm(&r)
}

/// Certified upper bound on `Σ_{n>m} ‖Tⁿ‖²`.
///
/// With `‖T‖ < 1` this is `‖T^{m+1}‖²/(1 − ‖T‖²)`. Otherwise the smallest
/// power `k` with `q = ‖T^k‖ < 1` gives
/// `Σ_{n≥0} ‖Tⁿ‖² ≤ k·max_{r<k}‖T^r‖²/(1 − q²)`, and the tail is bounded by
/// `‖T^{m+1}‖²` times that sum. Returns `None` when no contracting power
/// exists below a fixed search limit.
pub fn iterate_tail_sum(t: &Mat, m: usize) -> Option<f64> {
    let d = t.nrows();
    let head = matrix_power(t, m + 1);
    let head_norm = spectral_norm(&head);
    let norm = spectral_norm(t);
    if norm < 1.0 {
        return Some(head_norm * head_norm / (1.0 - norm * norm));
    }
    const MAX_SEARCH: usize = 4096;
    let mut power = Mat::identity(d, d);
    let mut worst: f64 = 1.0;
    for k in 1..=MAX_SEARCH {
        power = &power * t;
        let q = spectral_norm(&power);
        if q < 1.0 {
            let total = k as f64 * worst / (1.0 - q * q);
            return Some(head_norm * head_norm * total);
        }
        worst = worst.max(q * q);
    }
    None
}

/// `Tⁿ` by repeated squaring.
pub fn matrix_power(t: &Mat, n: usize) -> Mat {
    let d = t.nrows();
    let mut result = Mat::identity(d, d);
    let mut base = t.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Inverse via LU, rejecting matrices with condition number above `max_cond`.
/// Returns the inverse and the 2-norm condition number.
pub fn checked_inverse(v: &Mat, max_cond: f64) -> Result<(Mat, f64)> {
    if !v.is_square() {
        return Err(Error::DimensionMismatch { expected: v.nrows(), found: v.ncols() });
    }
    let s = singular_values(v);
    let cond = match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (None, None) => 1.0,
        _ => f64::INFINITY,
    };
    if !(cond <= max_cond) {
        return Err(Error::Singular { condition: cond });
    }
    let inv = v.clone().try_inverse().ok_or(Error::Singular { condition: cond })?;
    Ok((inv, cond))
}

/// Orthonormal basis of the right nullspace of `m`.
pub fn nullspace(m: &Mat, rel_tol: f64) -> Mat {
    Subspace::span(&m.adjoint(), rel_tol).complement().basis
}

/// A subspace of `C^n`, held as an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
    tol: f64,
}

impl Subspace {
    /// Wraps a basis that is already orthonormal within `tol`.
    pub fn from_orthonormal(basis: Mat, tol: f64) -> Result<Self> {
        let k = basis.ncols();
        if k > basis.nrows() {
            return Err(Error::DimensionMismatch { expected: basis.nrows(), found: k });
        }
        let defect = spectral_norm(&(basis.adjoint() * &basis - Mat::identity(k, k)));
        if defect > tol.max(1e-10) {
            return Err(Error::InvalidInput(format!(
                "basis is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Subspace { ambient_dim: basis.nrows(), basis, tol })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Mat::zeros(ambient_dim, 0), tol: 0.0 }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::identity(ambient_dim, ambient_dim),
            tol: 0.0,
        }
    }

    /// Orthonormalized column span, rank decided by [`numerical_rank`] at `rel_tol`.
    pub fn span(vectors: &Mat, rel_tol: f64) -> Self {
        let n = vectors.nrows();
        if vectors.ncols() == 0 || max_abs(vectors) == 0.0 {
            return Subspace::zero(n);
        }
        let (u, s, _) = svd_sorted(vectors);
        let smax = s[0];
        let rank = s.iter().filter(|&&x| x > rel_tol * smax).count();
        let mut basis = u.columns(0, rank).into_owned();
        fix_column_phases(&mut basis);
        Subspace { ambient_dim: n, basis, tol: rel_tol }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn projector(&self) -> Mat {
        &self.basis * self.basis.adjoint()
    }

    /// Orthogonal projection of the columns of `v`.
    pub fn project(&self, v: &Mat) -> Mat {
        &self.basis * (self.basis.adjoint() * v)
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim;
        if self.dim() == 0 {
            return Subspace::full(n);
        }
        if self.dim() == n {
            return Subspace::zero(n);
        }
        let p = HermMat::symmetrized(Mat::identity(n, n) - self.projector());
        let (values, vectors) = herm_eig(&p);
        let keep: Vec<usize> = (0..n).filter(|&i| values[i] > 0.5).collect();
        let mut basis = Mat::from_fn(n, keep.len(), |r, c| vectors[(r, keep[c])]);
        fix_column_phases(&mut basis);
        Subspace { ambient_dim: n, basis, tol: self.tol }
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }

    /// Largest principal angle; `π/2` when the dimensions differ.
    pub fn max_angle(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        if self.dim() != other.dim() {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        if self.dim() == 0 {
            return Ok(0.0);
        }
        let residual = &self.basis - other.project(&self.basis);
        Ok(spectral_norm(&residual).min(1.0).asin())
    }

    /// Equal iff every principal angle is at most `tol`.
    pub fn equals(&self, other: &Subspace, tol: f64) -> Result<bool> {
        Ok(self.max_angle(other)? <= tol)
    }

    /// Directions of `self` lying within `angle_tol` of `other`.
    pub fn intersection(&self, other: &Subspace, angle_tol: f64) -> Result<Subspace> {
        let cos2 = angle_tol.cos().powi(2);
        self.select_by_overlap(other, |c2| c2 >= cos2)
    }

    /// `self ⊖ other`: directions of `self` orthogonal to `other`.
    /// Meant for `other` (nearly) contained in `self`.
    pub fn orthogonal_difference(&self, other: &Subspace) -> Result<Subspace> {
        self.select_by_overlap(other, |c2| c2 < 0.5)
    }

    fn select_by_overlap(
        &self,
        other: &Subspace,
        keep: impl Fn(f64) -> bool,
    ) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.dim() == 0 {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        let g = other.basis.adjoint() * &self.basis;
        let (values, vectors) = herm_eig(&HermMat::gram(&g.adjoint()));
        let chosen: Vec<usize> = (0..values.len()).filter(|&i| keep(values[i])).collect();
        let coords = Mat::from_fn(self.dim(), chosen.len(), |r, c| vectors[(r, chosen[c])]);
        let mut basis = &self.basis * coords;
        fix_column_phases(&mut basis);
        Ok(Subspace { ambient_dim: self.ambient_dim, basis, tol: self.tol })
    }

    /// Sum of two subspaces.
    pub fn sum(&self, other: &Subspace, rel_tol: f64) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut joined = Mat::zeros(self.ambient_dim, self.dim() + other.dim());
        joined.columns_mut(0, self.dim()).copy_from(&self.basis);
        joined.columns_mut(self.dim(), other.dim()).copy_from(&other.basis);
        Ok(Subspace::span(&joined, rel_tol))
    }

    /// Largest distance from a unit column of `v` to this subspace, relative
    /// to the column norm.
    pub fn containment_defect(&self, v: &Mat) -> f64 {
        let r = v - self.project(v);
        let mut worst: f64 = 0.0;
        for j in 0..v.ncols() {
            let n = v.column(j).norm();
            if n > 0.0 {
                worst = worst.max(r.column(j).norm() / n);
            }
        }
        worst
    }
}

pub fn subspace_equal(a: &Subspace, b: &Subspace, tol: f64) -> Result<bool> {
    a.equals(b, tol)
}

pub fn subspace_complement(a: &Subspace) -> Subspace {
    a.complement()
}

pub fn subspace_span(vectors: &Mat, tol: f64) -> Subspace {
    Subspace::span(vectors, tol)
}
