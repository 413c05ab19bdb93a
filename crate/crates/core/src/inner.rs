//! Finite Blaschke products, diagonalizable matrix inner functions and the
//! conjugation-similarity tests.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{self, c64, spectral_norm, Mat, ONE, ZERO};

/// Zeros closer than this are merged; zeros this close to the circle are rejected.
pub const ZERO_TOL: f64 = 1e-12;

/// Relative threshold below which a coefficient counts as zero.
pub const COEFF_ZERO_TOL: f64 = 1e-12;

/// Principal-angle tolerance for comparing invariant subspaces.
pub const SUBSPACE_ANGLE_TOL: f64 = 1e-6;

/// Residual tolerance for a unitary similarity witness.
pub const WITNESS_TOL: f64 = 1e-10;

/// A finite Blaschke product `α·z^p·∏ b_a(z)^k` with
/// `b_a(z) = (ā/|a|)(a − z)/(1 − āz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    alpha: Complex64,
    zeros: Vec<(Complex64, usize)>,
    power: usize,
}

impl BlaschkeProduct {
    /// Builds a product from a list of zeros, repeated zeros counting with
    /// multiplicity. Zeros at the origin go into the monomial power.
    pub fn new(alpha: Complex64, zeros: &[Complex64], power: usize) -> Result<Self> {
        let with_mult: Vec<(Complex64, usize)> = zeros.iter().map(|&a| (a, 1)).collect();
        Self::with_multiplicities(alpha, &with_mult, power)
    }

    pub fn with_multiplicities(
        alpha: Complex64,
        zeros: &[(Complex64, usize)],
        power: usize,
    ) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) || (alpha.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("|alpha| = {} is not 1", alpha.norm())));
        }
        let alpha = alpha / alpha.norm();
        let mut merged: Vec<(Complex64, usize)> = Vec::new();
        let mut power = power;
        for &(a, k) in zeros {
            if !(a.re.is_finite() && a.im.is_finite()) || a.norm() >= 1.0 - ZERO_TOL {
                return Err(Error::NotInDisc { re: a.re, im: a.im });
            }
            if k == 0 {
                continue;
            }
            if a.norm() <= ZERO_TOL {
                power += k;
                continue;
            }
            match merged.iter_mut().find(|(b, _)| (*b - a).norm() <= ZERO_TOL) {
                Some(entry) => entry.1 += k,
                None => merged.push((a, k)),
            }
        }
        Ok(BlaschkeProduct { alpha, zeros: merged, power })
    }

    pub fn from_zeros(zeros: &[Complex64]) -> Result<Self> {
        Self::new(ONE, zeros, 0)
    }

    pub fn monomial(power: usize) -> Self {
        BlaschkeProduct { alpha: ONE, zeros: Vec::new(), power }
    }

    pub fn constant(alpha: Complex64) -> Result<Self> {
        Self::new(alpha, &[], 0)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Nonzero zeros with multiplicities.
    pub fn zeros(&self) -> &[(Complex64, usize)] {
        &self.zeros
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn degree(&self) -> usize {
        self.power + self.zeros.iter().map(|&(_, k)| k).sum::<usize>()
    }

    /// All zeros listed with multiplicity, the origin included.
    pub fn zero_multiset(&self) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.power];
        for &(a, k) in &self.zeros {
            out.extend(std::iter::repeat_n(a, k));
        }
        out
    }

    /// Largest zero modulus, `0` when only the origin (or nothing) vanishes.
    pub fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().fold(0.0_f64, |a, (z, _)| a.max(z.norm()))
    }

    /// Largest multiplicity of a single zero.
    pub fn max_multiplicity(&self) -> usize {
        self.zeros.iter().map(|&(_, k)| k).max().unwrap_or(0).max(self.power.min(1))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = self.alpha * z.powu(self.power as u32);
        for &(a, k) in &self.zeros {
            let f = a.conj() / a.norm() * (a - z) / (ONE - a.conj() * z);
            v *= f.powu(k as u32);
        }
        v
    }

    /// Taylor coefficients `b̂(0..=m)`.
    pub fn coeffs(&self, m: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; m + 1];
        if self.power <= m {
            out[self.power] = self.alpha;
        }
        for &(a, k) in &self.zeros {
            let f = factor_coeffs(a, m);
            for _ in 0..k {
                out = convolve_truncated(&out, &f, m);
            }
        }
        out
    }

    /// `ρ(b)(z) = conj(b(z̄))`: conjugated zeros and unimodular constant.
    pub fn rho(&self) -> BlaschkeProduct {
        BlaschkeProduct {
            alpha: self.alpha.conj(),
            zeros: self.zeros.iter().map(|&(a, k)| (a.conj(), k)).collect(),
            power: self.power,
        }
    }

    /// True when the zero multiset is closed under complex conjugation.
    pub fn zeros_conjugation_closed(&self) -> bool {
        self.zeros.iter().all(|&(a, k)| {
            self.zeros
                .iter()
                .any(|&(b, j)| j == k && (b - a.conj()).norm() <= ZERO_TOL)
        })
    }

    /// Multiset inclusion of zeros, i.e. `self` divides `other` as inner functions.
    pub fn divides(&self, other: &BlaschkeProduct) -> bool {
        self.power <= other.power
            && self.zeros.iter().all(|&(a, k)| {
                other
                    .zeros
                    .iter()
                    .any(|&(b, j)| j >= k && (b - a).norm() <= ZERO_TOL)
            })
    }
}

/// Coefficients of the single factor `(ā/|a|)(a − z)/(1 − āz)`, `a ≠ 0`:
/// `(ā/|a|)·(a + (|a|² − 1)·Σ_{n≥1} ā^{n−1} zⁿ)`.
pub fn factor_coeffs(a: Complex64, m: usize) -> Vec<Complex64> {
    let unit = a.conj() / a.norm();
    let scale = c64(a.norm_sqr() - 1.0, 0.0);
    let mut out = Vec::with_capacity(m + 1);
    out.push(unit * a);
    let mut p = ONE;
    for _ in 1..=m {
        out.push(unit * scale * p);
        p *= a.conj();
    }
    out
}

/// Product of two power series truncated at degree `m`.
pub fn convolve_truncated(a: &[Complex64], b: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; m + 1];
    for (i, &x) in a.iter().enumerate().take(m + 1) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn blaschke_coeffs(b: &BlaschkeProduct, m: usize) -> Vec<Complex64> {
    b.coeffs(m)
}

/// Coefficientwise conjugation, the action of `ρ` on power series.
pub fn rho_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().map(|z| z.conj()).collect()
}

/// `max | |b(e^{iθ})| − 1 |` over an equispaced grid on the circle.
pub fn unimodularity_defect(b: &BlaschkeProduct, grid: usize) -> f64 {
    (0..grid)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
            (b.eval(Complex64::from_polar(1.0, theta)).norm() - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// A matrix inner function `L·diag(b₁, …, b_d)·R` with unitary constants.
#[derive(Debug, Clone)]
pub struct MatrixInner {
    structure: InnerStructure,
}

#[derive(Debug, Clone)]
pub enum InnerStructure {
    Constant(Mat),
    DiagBlaschke(Vec<BlaschkeProduct>),
    Product { left: Mat, diag: Vec<BlaschkeProduct>, right: Mat },
}

fn check_unitary(u: &Mat) -> Result<()> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
    }
    if !numkit::all_finite(u) {
        return Err(Error::InvalidInput("non-finite unitary entry".into()));
    }
    let n = u.nrows();
    let defect = spectral_norm(&(u.adjoint() * u - Mat::identity(n, n)));
    if defect > 1e-10 {
        return Err(Error::InvalidInput(format!("matrix is not unitary (defect {defect:.3e})")));
    }
    Ok(())
}

impl MatrixInner {
    pub fn constant(u: Mat) -> Result<Self> {
        check_unitary(&u)?;
        if u.nrows() == 0 {
            return Err(Error::InvalidInput("multiplicity must be positive".into()));
        }
        Ok(MatrixInner { structure: InnerStructure::Constant(u) })
    }

    pub fn diagonal(diag: Vec<BlaschkeProduct>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidInput("multiplicity must be positive".into()));
        }
        Ok(MatrixInner { structure: InnerStructure::DiagBlaschke(diag) })
    }

    pub fn scalar(b: BlaschkeProduct) -> Self {
        MatrixInner { structure: InnerStructure::DiagBlaschke(vec![b]) }
    }

    pub fn product(left: Mat, diag: Vec<BlaschkeProduct>, right: Mat) -> Result<Self> {
        check_unitary(&left)?;
        check_unitary(&right)?;
        if left.nrows() != diag.len() || right.nrows() != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len(), found: left.nrows() });
        }
        if diag.is_empty() {
            return Err(Error::InvalidInput("multiplicity must be positive".into()));
        }
        Ok(MatrixInner { structure: InnerStructure::Product { left, diag, right } })
    }

    pub fn structure(&self) -> &InnerStructure {
        &self.structure
    }

    pub fn multiplicity(&self) -> usize {
        match &self.structure {
            InnerStructure::Constant(u) => u.nrows(),
            InnerStructure::DiagBlaschke(d) => d.len(),
            InnerStructure::Product { diag, .. } => diag.len(),
        }
    }

    /// `(L, [b_j], R)` with `Q = L·diag(b_j)·R`; a constant `U` is `(U, [1,…], I)`.
    pub fn factors(&self) -> (Mat, Vec<BlaschkeProduct>, Mat) {
        let d = self.multiplicity();
        match &self.structure {
            InnerStructure::Constant(u) => (
                u.clone(),
                vec![BlaschkeProduct::monomial(0); d],
                Mat::identity(d, d),
            ),
            InnerStructure::DiagBlaschke(b) => (Mat::identity(d, d), b.clone(), Mat::identity(d, d)),
            InnerStructure::Product { left, diag, right } => (left.clone(), diag.clone(), right.clone()),
        }
    }

    /// Degrees of the diagonal factors.
    pub fn column_degrees(&self) -> Vec<usize> {
        self.factors().1.iter().map(BlaschkeProduct::degree).collect()
    }

    /// Largest degree of a diagonal factor.
    pub fn degree(&self) -> usize {
        self.column_degrees().into_iter().max().unwrap_or(0)
    }

    /// `Σ deg b_j`, the dimension of the model space.
    pub fn total_degree(&self) -> usize {
        self.column_degrees().into_iter().sum()
    }

    pub fn max_zero_modulus(&self) -> f64 {
        self.factors().1.iter().fold(0.0, |a, b| a.max(b.max_zero_modulus()))
    }

    pub fn max_multiplicity(&self) -> usize {
        self.factors().1.iter().map(BlaschkeProduct::max_multiplicity).max().unwrap_or(0)
    }

    /// Matrix Taylor coefficients `Q̂(0..=m)`.
    pub fn coefficients(&self, m: usize) -> Vec<Mat> {
        let (left, diag, right) = self.factors();
        let series: Vec<Vec<Complex64>> = diag.iter().map(|b| b.coeffs(m)).collect();
        (0..=m)
            .map(|n| {
                let dn: Vec<Complex64> = series.iter().map(|s| s[n]).collect();
                &left * numkit::diag(&dn) * &right
            })
            .collect()
    }

    pub fn eval(&self, z: Complex64) -> Mat {
        let (left, diag, right) = self.factors();
        let vals: Vec<Complex64> = diag.iter().map(|b| b.eval(z)).collect();
        left * numkit::diag(&vals) * right
    }

    /// `ρ(Q)(z) = Q(z̄)*`, coefficients `Q̂(n) ↦ Q̂(n)*`; for `L·diag(b_j)·R`
    /// this is `R*·diag(ρ(b_j))·L*`.
    pub fn rho(&self) -> MatrixInner {
        let structure = match &self.structure {
            InnerStructure::Constant(u) => InnerStructure::Constant(u.adjoint()),
            InnerStructure::DiagBlaschke(b) => {
                InnerStructure::DiagBlaschke(b.iter().map(BlaschkeProduct::rho).collect())
            }
            InnerStructure::Product { left, diag, right } => InnerStructure::Product {
                left: right.adjoint(),
                diag: diag.iter().map(BlaschkeProduct::rho).collect(),
                right: left.adjoint(),
            },
        };
        MatrixInner { structure }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        let kind = match &self.structure {
            InnerStructure::Constant(_) => "constant",
            InnerStructure::DiagBlaschke(_) => "diagonal",
            InnerStructure::Product { .. } => "product",
        };
        format!("{kind} inner function of multiplicity {} and degrees {:?}", self.multiplicity(), self.column_degrees())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarSimilarity {
    pub similar: bool,
    /// Unimodular `α` with `α·b̂(n)` real for all `n`, when one exists.
    pub alpha_witness: Option<(f64, f64)>,
    pub coefficient_residual: f64,
    pub zero_set_verdict: bool,
}

/// Decides whether `ρ(b)·H²` and `b·H²` coincide, equivalently whether the
/// model-space compression is similar to its `ρ`-conjugate, in two
/// independent ways: a unimodular constant making all coefficients real,
/// and conjugation-closure of the zero set. Disagreement is an error.
pub fn similarity_test_scalar(b: &BlaschkeProduct, m: usize, tol: f64) -> Result<ScalarSimilarity> {
    let deg = b.degree();
    if m < 2 * deg {
        return Err(Error::CutoffTooSmall { cutoff: m, required: 2 * deg });
    }
    let c = b.coeffs(m);
    let scale = c.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let lead = c
        .iter()
        .find(|z| z.norm() > COEFF_ZERO_TOL * scale)
        .copied()
        .unwrap_or(ONE);
    let alpha = lead.conj() / lead.norm();
    let residual = c.iter().fold(0.0_f64, |a, z| a.max((alpha * z).im.abs())) / scale;
    let coefficient = residual <= tol;
    let zero_set = b.zeros_conjugation_closed();
    if coefficient != zero_set {
        return Err(Error::VerdictMismatch { coefficient, zero_set });
    }
    Ok(ScalarSimilarity {
        similar: coefficient,
        alpha_witness: coefficient.then_some((alpha.re, alpha.im)),
        coefficient_residual: residual,
        zero_set_verdict: zero_set,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixSimilarity {
    /// `ρ(Q)·H²_d = Q·H²_d` within the truncation.
    pub similar: bool,
    pub max_angle: f64,
    /// Whether the candidate `A` is unitary with every `A·Q̂(n)` Hermitian
    /// and commuting with `Q̂(n)`.
    pub witness_ok: Option<bool>,
    pub witness_residual: Option<f64>,
}

/// Subspace comparison of `Q·H²` with `ρ(Q)·H²` in `H_m`, plus an optional
/// check of a unitary witness `A`.
pub fn similarity_test_matrix(q: &MatrixInner, m: usize, candidate: Option<&Mat>) -> Result<MatrixSimilarity> {
    let deg = q.degree();
    if m < 2 * deg {
        return Err(Error::CutoffTooSmall { cutoff: m, required: 2 * deg });
    }
    let h = crate::hardy::TruncHardy::new(q.multiplicity(), m)?;
    let a = crate::hardy::invariant_subspace(q, &h)?;
    let b = crate::hardy::invariant_subspace(&q.rho(), &h)?;
    let angle = a.max_angle(&b)?;
    let similar = angle <= SUBSPACE_ANGLE_TOL;

    let (witness_ok, witness_residual) = match candidate {
        None => (None, None),
        Some(w) => {
            let d = q.multiplicity();
            if w.nrows() != d || w.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: w.nrows() });
            }
            let mut residual = spectral_norm(&(w.adjoint() * w - Mat::identity(d, d)));
            for qn in q.coefficients(m) {
                let aq = w * &qn;
                let scale = spectral_norm(&qn).max(1.0);
                residual = residual
                    .max(spectral_norm(&(&aq - aq.adjoint())) / scale)
                    .max(spectral_norm(&(&aq - &qn * w)) / scale);
            }
            (Some(residual <= WITNESS_TOL), Some(residual))
        }
    };
    Ok(MatrixSimilarity { similar, max_angle: angle, witness_ok, witness_residual })
}
