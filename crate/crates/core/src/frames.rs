//! Frames of iterations `{Tⁿvᵢ}`: frame operator, bounds, reconstruction,
//! synthesis and the frame index.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{
    self, all_finite, herm_eig, herm_fn, iterate_tail_sum, singular_values, spectral_norm,
    stein_residual, stein_series, stein_solve, svd_sorted, CVec, HermMat, Mat, Subspace, STEIN_RADIUS_LIMIT,
};
use crate::operators::{op_norm, spectral_radius, OperatorSpec};

/// A system is a frame when `λ_min(S) > FRAME_REL_TOL·λ_max(S)`.
pub const FRAME_REL_TOL: f64 = 1e-8;

pub const DEFAULT_PARSEVAL_TOL: f64 = 1e-8;

/// Relative singular-value threshold used by [`reduce_generators`].
pub const GENERATOR_RANK_TOL: f64 = 1e-10;

/// Attempts made by [`frame_index_oracle`] before giving up.
pub const WITNESS_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum HorizonPolicy {
    /// Solve the Stein equation; the series is summed to infinity.
    ExactStein,
    /// Sum the series up to `max_power` and certify the tail.
    Series { max_power: usize, tail_tol: f64 },
}

#[derive(Debug, Clone)]
pub struct FrameSystem {
    operator: OperatorSpec,
    matrix: Mat,
    generators: Mat,
    horizon: HorizonPolicy,
    parseval_tol: f64,
}

impl FrameSystem {
    /// Generators are the columns of `generators`; none may be zero.
    pub fn new(operator: OperatorSpec, generators: Mat) -> Result<Self> {
        let d = operator.dim();
        if generators.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, found: generators.nrows() });
        }
        if generators.ncols() == 0 {
            return Err(Error::InvalidInput("at least one generator is required".into()));
        }
        if !all_finite(&generators) {
            return Err(Error::InvalidInput("non-finite generator entry".into()));
        }
        if let Some(j) = (0..generators.ncols()).find(|&j| generators.column(j).norm() == 0.0) {
            return Err(Error::InvalidInput(format!("generator {j} is zero")));
        }
        let matrix = operator.matrix();
        Ok(FrameSystem {
            operator,
            matrix,
            generators,
            horizon: HorizonPolicy::ExactStein,
            parseval_tol: DEFAULT_PARSEVAL_TOL,
        })
    }

    pub fn with_horizon(mut self, horizon: HorizonPolicy) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_parseval_tol(mut self, tol: f64) -> Self {
        self.parseval_tol = tol;
        self
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.operator
    }

    /// Dense matrix of the operator.
    pub fn operator_matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn generators(&self) -> &Mat {
        &self.generators
    }

    pub fn horizon(&self) -> HorizonPolicy {
        self.horizon
    }

    pub fn parseval_tol(&self) -> f64 {
        self.parseval_tol
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn generator_count(&self) -> usize {
        self.generators.ncols()
    }
}

/// Frame operator `S = Σ Tⁿ V (T*)ⁿ` with `V = Σ vᵢvᵢ*`, together with a
/// bound on what the chosen horizon leaves out.
pub fn frame_operator_with_tail(sys: &FrameSystem) -> Result<(HermMat, f64)> {
    let v = HermMat::gram(&sys.generators);
    match sys.horizon {
        HorizonPolicy::ExactStein => Ok((stein_solve(&sys.matrix, &v)?, 0.0)),
        HorizonPolicy::Series { max_power, tail_tol } => {
            let s = stein_series(&sys.matrix, &v, max_power);
            let vn = spectral_norm(v.as_mat());
            let bound = match iterate_tail_sum(&sys.matrix, max_power) {
                Some(t) => vn * t,
                None => f64::INFINITY,
            };
            let requested = tail_tol * spectral_norm(s.as_mat()).max(f64::MIN_POSITIVE);
            if !(bound <= requested) {
                return Err(Error::TailNotCertified { bound, requested });
            }
            Ok((s, bound))
        }
    }
}

pub fn frame_operator(sys: &FrameSystem) -> Result<HermMat> {
    frame_operator_with_tail(sys).map(|(s, _)| s)
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_frame: bool,
    pub is_parseval: bool,
    /// `‖S − I‖₂`.
    pub parseval_defect: f64,
    /// `‖S − TST* − V‖₂`.
    pub stein_residual: f64,
    pub tail_bound: f64,
    #[serde(skip)]
    pub frame_operator: HermMat,
}

pub fn frame_bounds(sys: &FrameSystem) -> Result<FrameReport> {
    let (s, tail) = frame_operator_with_tail(sys)?;
    let (values, _) = herm_eig(&s);
    let lower = values.first().copied().unwrap_or(0.0);
    let upper = values.last().copied().unwrap_or(0.0);
    let d = sys.dim();
    let parseval_defect = spectral_norm(&(s.as_mat() - Mat::identity(d, d)));
    let residual = stein_residual(&sys.matrix, &s, &HermMat::gram(&sys.generators));
    Ok(FrameReport {
        lower_bound: lower,
        upper_bound: upper,
        is_frame: upper > 0.0 && lower > FRAME_REL_TOL * upper,
        is_parseval: parseval_defect <= sys.parseval_tol,
        parseval_defect,
        stein_residual: residual,
        tail_bound: tail,
        frame_operator: s,
    })
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub x_hat: CVec,
    /// `‖x − x̂‖`.
    pub residual: f64,
    /// `‖x‖·‖V‖·Σ_{n>M}‖Tⁿ‖² / A`; infinite when no tail bound is available.
    pub bound: f64,
}

/// `x̂ = Σ_{n≤M} Σᵢ ⟨x, S⁻¹Tⁿvᵢ⟩ Tⁿvᵢ`, the canonical-dual expansion cut at `M`.
pub fn reconstruct(sys: &FrameSystem, x: &CVec, horizon: usize) -> Result<Reconstruction> {
    if x.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: x.len() });
    }
    let report = frame_bounds(sys)?;
    if !report.is_frame {
        return Err(Error::NotAFrame { lower: report.lower_bound, upper: report.upper_bound });
    }
    let s_inv = herm_fn(&report.frame_operator, |l| 1.0 / l);
    let y = s_inv.as_mat() * x;
    let mut orbit = sys.generators.clone();
    let mut x_hat = CVec::zeros(sys.dim());
    for n in 0..=horizon {
        if n > 0 {
            orbit = &sys.matrix * orbit;
        }
        x_hat += &orbit * (orbit.adjoint() * &y);
    }
    let residual = (x - &x_hat).norm();
    let vn = spectral_norm(HermMat::gram(&sys.generators).as_mat());
    let bound = match iterate_tail_sum(&sys.matrix, horizon) {
        Some(t) => x.norm() * vn * t / report.lower_bound,
        None => f64::INFINITY,
    };
    Ok(Reconstruction { x_hat, residual, bound })
}

/// Synthesis matrix with columns `Tⁿvᵢ`, `n = 0..=M`, at index `n·k + i`.
pub fn synthesis_matrix(sys: &FrameSystem, horizon: usize) -> Mat {
    let d = sys.dim();
    let k = sys.generator_count();
    let mut c = Mat::zeros(d, k * (horizon + 1));
    let mut orbit = sys.generators.clone();
    for n in 0..=horizon {
        if n > 0 {
            orbit = &sys.matrix * orbit;
        }
        c.columns_mut(n * k, k).copy_from(&orbit);
    }
    c
}

/// Kernel of the truncated synthesis map as a subspace of `C^{k(M+1)}`.
pub fn synthesis_kernel(sys: &FrameSystem, horizon: usize, rel_tol: f64) -> Subspace {
    let c = synthesis_matrix(sys, horizon);
    Subspace::span(&c.adjoint(), rel_tol).complement()
}

/// Replaces the generators by an equivalent linearly independent family
/// with the same Gram matrix `V = GG*` up to the discarded singular values:
/// `U_r·Σ_r` from the thin SVD of `G`.
pub fn reduce_generators(sys: &FrameSystem) -> FrameSystem {
    let (mut u, s, _) = svd_sorted(&sys.generators);
    numkit::fix_column_phases(&mut u);
    let smax = s.first().copied().unwrap_or(0.0);
    let r = s.iter().filter(|&&x| x > GENERATOR_RANK_TOL * smax).count().max(1);
    let mut g = u.columns(0, r).into_owned();
    for (j, &sj) in s.iter().take(r).enumerate() {
        g.column_mut(j).scale_mut(sj);
    }
    FrameSystem { generators: g, ..sys.clone() }
}

#[derive(Debug, Clone)]
pub struct IndexWitness {
    /// Largest geometric multiplicity of an eigenvalue of `T`.
    pub gamma: usize,
    /// `γ` generators forming a frame of iterations.
    pub generators: Mat,
    pub attempts: usize,
    pub seed: u64,
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Eigenvalue clusters of `T` with geometric multiplicities and null bases.
struct Cluster {
    center: Complex64,
    null_basis: Mat,
}

fn eigen_clusters(t: &Mat) -> Vec<Cluster> {
    let scale = spectral_norm(t).max(1.0);
    let cluster_tol = 1e-5 * scale;
    let null_tol = 1e-7 * scale;
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for z in numkit::eigenvalues(t) {
        match groups.iter_mut().find(|g| (g[0] - z).norm() <= cluster_tol) {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    let d = t.nrows();
    groups
        .into_iter()
        .map(|g| {
            let center = g.iter().sum::<Complex64>() / g.len() as f64;
            let shifted = t - Mat::identity(d, d) * center;
            let (_, s, vt) = svd_sorted(&shifted);
            let nullity = s.iter().filter(|&&x| x <= null_tol).count().max(1);
            let v = vt.adjoint();
            let null_basis = v.columns(d - nullity, nullity).into_owned();
            Cluster { center, null_basis }
        })
        .collect()
}

/// Computes the frame index `γ(T)` (largest geometric multiplicity of an
/// eigenvalue) of a power-stable `T` and a witness family of `γ` generators.
///
/// When `T` is diagonalizable with a reasonably conditioned eigenbasis `X`,
/// the witness is `X·C` where each eigenvalue's block of `C` has orthonormal
/// rows scaled by `√(1 − |λ|²)`; this makes the frame operator close to the
/// identity in eigen-coordinates. Otherwise, or when that fails, seeded
/// complex Gaussian generators are tried.
pub fn frame_index_oracle(t: &OperatorSpec, seed: u64) -> Result<IndexWitness> {
    let radius = spectral_radius(t);
    if radius >= STEIN_RADIUS_LIMIT {
        return Err(Error::Unstable { spectral_radius: radius });
    }
    let m = t.matrix();
    let d = m.nrows();
    let clusters = eigen_clusters(&m);
    let gamma = clusters.iter().map(|c| c.null_basis.ncols()).max().unwrap_or(1);
    let geometric: usize = clusters.iter().map(|c| c.null_basis.ncols()).sum();

    let eigenbasis = if geometric == d {
        let x = Mat::from_columns(
            &clusters
                .iter()
                .flat_map(|c| c.null_basis.column_iter().map(|col| col.into_owned()))
                .collect::<Vec<DVector<Complex64>>>(),
        );
        let s = singular_values(&x);
        let cond = s[0] / s[s.len() - 1];
        (cond < 1e8).then_some(x)
    } else {
        None
    };

    for attempt in 0..WITNESS_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let structured = eigenbasis.is_some() && attempt % 2 == 0;
        let g = if structured {
            let x = eigenbasis.as_ref().expect("checked");
            let mut c = Mat::zeros(d, gamma);
            let mut row = 0;
            for cl in &clusters {
                let k = cl.null_basis.ncols();
                let (u, _, vt) = svd_sorted(&gaussian(&mut rng, k, gamma));
                let w = (1.0 - cl.center.norm_sqr()).max(0.0).sqrt();
                c.rows_mut(row, k).copy_from(&((u * vt) * Complex64::new(w, 0.0)));
                row += k;
            }
            x * c
        } else {
            gaussian(&mut rng, d, gamma)
        };
        if (0..gamma).any(|j| g.column(j).norm() == 0.0) {
            continue;
        }
        let sys = FrameSystem::new(t.clone(), g.clone())?;
        match frame_bounds(&sys) {
            Ok(r) if r.is_frame => {
                return Ok(IndexWitness { gamma, generators: g, attempts: attempt + 1, seed });
            }
            Ok(r) => log::debug!(
                "witness attempt {attempt} rejected: bounds {:.3e}/{:.3e}",
                r.lower_bound,
                r.upper_bound
            ),
            Err(e) => log::debug!("witness attempt {attempt} failed: {e}"),
        }
    }
    Err(Error::WitnessFailed { attempts: WITNESS_ATTEMPTS })
}

/// `‖T‖`, exposed for reports.
pub fn system_norm(sys: &FrameSystem) -> f64 {
    op_norm(&sys.operator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{c64, ONE, ZERO};

    fn diag_sys(entries: &[f64], gens: Mat) -> FrameSystem {
        let t = OperatorSpec::diagonal(entries.iter().map(|&x| c64(x, 0.0)).collect()).unwrap();
        FrameSystem::new(t, gens).unwrap()
    }

    #[test]
    fn zero_operator_frame_is_gram() {
        let g = Mat::from_row_slice(2, 1, &[c64(1.0, 0.0), c64(0.0, 2.0)]);
        let t = OperatorSpec::dense(Mat::zeros(2, 2)).unwrap();
        let sys = FrameSystem::new(t, g.clone()).unwrap();
        let s = frame_operator(&sys).unwrap();
        assert!(numkit::max_abs(&(s.as_mat() - &g * g.adjoint())) < 1e-15);
        assert!(!frame_bounds(&sys).unwrap().is_frame);
    }

    #[test]
    fn scalar_parseval_frame() {
        let g = Mat::from_element(1, 1, c64(0.75_f64.sqrt(), 0.0));
        let sys = diag_sys(&[0.5], g);
        let r = frame_bounds(&sys).unwrap();
        assert!((r.lower_bound - 1.0).abs() < 1e-14);
        assert!(r.is_parseval);
    }

    #[test]
    fn series_policy_agrees_with_stein() {
        let g = Mat::from_row_slice(2, 1, &[ONE, ONE]);
        let sys = diag_sys(&[0.5, -0.3], g);
        let exact = frame_operator(&sys).unwrap();
        let series = sys
            .clone()
            .with_horizon(HorizonPolicy::Series { max_power: 60, tail_tol: 1e-12 });
        let (s, tail) = frame_operator_with_tail(&series).unwrap();
        assert!(numkit::max_abs(&(s.as_mat() - exact.as_mat())) <= tail + 1e-14);
        let short = sys.with_horizon(HorizonPolicy::Series { max_power: 3, tail_tol: 1e-12 });
        assert!(matches!(frame_operator(&short), Err(Error::TailNotCertified { .. })));
    }

    #[test]
    fn jordan_block_needs_one_generator() {
        let t = OperatorSpec::dense(Mat::from_row_slice(2, 2, &[c64(0.3, 0.0), ONE, ZERO, c64(0.3, 0.0)])).unwrap();
        let w = frame_index_oracle(&t, 1).unwrap();
        assert_eq!(w.gamma, 1);
        let t = OperatorSpec::diagonal(vec![c64(0.2, 0.0); 3]).unwrap();
        let w = frame_index_oracle(&t, 1).unwrap();
        assert_eq!(w.gamma, 3);
        let sys = FrameSystem::new(t, w.generators).unwrap();
        assert!(frame_bounds(&sys).unwrap().is_frame);
    }

    #[test]
    fn reduction_keeps_gram() {
        let v = [c64(1.0, 0.0), c64(0.5, -0.5), c64(0.0, 0.0)];
        let g = Mat::from_fn(3, 3, |i, j| match j {
            0 => v[i],
            1 => v[i] * 2.0,
            _ => [c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)][i],
        });
        let sys = diag_sys(&[0.1, 0.2, 0.3], g.clone());
        let r = reduce_generators(&sys);
        assert_eq!(r.generator_count(), 2);
        let gram = r.generators() * r.generators().adjoint();
        assert!(numkit::max_abs(&(gram - &g * g.adjoint())) < 1e-12);
        let again = reduce_generators(&r);
        assert!(numkit::max_abs(&(again.generators() - r.generators())) < 1e-12);
    }

    #[test]
    fn reconstruction_converges() {
        let g = Mat::from_row_slice(2, 1, &[ONE, ONE]);
        let sys = diag_sys(&[0.5, -0.3], g);
        let x = CVec::from_vec(vec![c64(1.0, 2.0), c64(-0.5, 0.0)]);
        let r = reconstruct(&sys, &x, 80).unwrap();
        assert!(r.residual <= r.bound.max(1e-12));
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn synthesis_layout() {
        let g = Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]);
        let sys = diag_sys(&[0.5, 0.25], g);
        let c = synthesis_matrix(&sys, 2);
        assert_eq!(c.ncols(), 6);
        assert!((c[(0, 4)] - c64(0.25, 0.0)).norm() < 1e-15);
        assert!((c[(1, 5)] - c64(0.0625, 0.0)).norm() < 1e-15);
        assert_eq!(synthesis_kernel(&sys, 2, 1e-10).dim(), 4);
    }
}
