//! Seeded random ensembles and brute-force oracles shared by the
//! integration tests. Oracles use nalgebra directly, not the library's
//! numerical kit.
#![allow(dead_code)]

use dynframe::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    })
}

/// Haar-ish unitary from the QR factor of a Gaussian matrix.
pub fn unitary(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    gaussian(rng, d, d).qr().q()
}

pub fn in_disc(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    loop {
        let z = c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        if z.norm() < 1.0 {
            return z * r;
        }
    }
}

pub fn norm2(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn singular_values(m: &Mat) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn rank(m: &Mat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.iter().copied().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > rel_tol * top.max(1.0)).count()
}

pub fn eigenvalues(m: &Mat) -> Vec<Complex64> {
    m.clone().schur().eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
}

pub fn radius(m: &Mat) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `U·diag(σ)·V*` with the given singular values.
pub fn with_singular_values(rng: &mut ChaCha8Rng, sigma: &[f64]) -> Mat {
    let d = sigma.len();
    let u = unitary(rng, d);
    let v = unitary(rng, d);
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, sigma.iter().map(|&x| c(x, 0.0))));
    u * s * v.adjoint()
}

/// A contraction with `ρ < 0.95` and a known number of singular values
/// strictly below one, which is then `rank(I − TT*)`.
pub fn contraction(rng: &mut ChaCha8Rng, d: usize) -> (Mat, usize) {
    loop {
        let sigma: Vec<f64> = (0..d)
            .map(|_| if rng.random::<f64>() < 0.3 { 1.0 } else { rng.random::<f64>() * 0.98 })
            .collect();
        let t = with_singular_values(rng, &sigma);
        if radius(&t) < 0.95 {
            return (t, sigma.iter().filter(|&&s| s < 1.0).count());
        }
    }
}

/// `V·diag(λ)·V⁻¹` with eigenvalue multiplicities `mult`; the largest
/// multiplicity is the frame index.
pub fn with_spectrum(rng: &mut ChaCha8Rng, mult: &[usize], r: f64) -> Mat {
    let lambdas: Vec<Complex64> = mult.iter().map(|_| in_disc(rng, r)).collect();
    let entries: Vec<Complex64> = mult.iter().zip(&lambdas).flat_map(|(&k, &l)| std::iter::repeat_n(l, k)).collect();
    let d = entries.len();
    let v = gaussian(rng, d, d) * c(0.3, 0.0) + Mat::identity(d, d);
    let vinv = v.clone().try_inverse().expect("invertible");
    &v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(entries)) * vinv
}

/// A stable matrix with `ρ < r`, generally not a contraction.
pub fn stable(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Mat {
    let a = gaussian(rng, d, d);
    let rad = radius(&a).max(1e-12);
    let target = r * (0.2 + 0.8 * rng.random::<f64>());
    a * c(target / rad, 0.0)
}

/// `Σ_{n≤N} Tⁿ G G* (T*)ⁿ` by brute force.
pub fn frame_operator_series(t: &Mat, g: &Mat, terms: usize) -> Mat {
    let d = t.nrows();
    let mut s = Mat::zeros(d, d);
    let mut x = g.clone();
    for _ in 0..terms {
        s += &x * x.adjoint();
        x = t * x;
    }
    s
}

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns.
pub fn max_angle(a: &Mat, b: &Mat) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    let s = singular_values(&(a.adjoint() * b));
    let smallest = s.iter().copied().fold(1.0, f64::min).min(1.0);
    smallest.acos()
}

/// Orthonormal basis of the column span at a relative tolerance.
pub fn orth(m: &Mat, rel_tol: f64) -> Mat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let top = svd.singular_values.max();
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * top)
        .collect();
    idx.sort();
    Mat::from_columns(&idx.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>())
}

/// Taylor coefficients `0..=m` of `∏ (ā/|a|)(a − z)/(1 − āz)`, expanding
/// `(a − z)·Σ āⁿzⁿ` term by term.
pub fn blaschke_series(zeros: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m + 1];
    out[0] = Complex64::new(1.0, 0.0);
    for &a in zeros {
        let unit = a.conj() / a.norm();
        let mut f = vec![Complex64::new(0.0, 0.0); m + 1];
        for (n, fn_) in f.iter_mut().enumerate() {
            let geo = a.conj().powu(n as u32);
            let prev = if n == 0 { Complex64::new(0.0, 0.0) } else { a.conj().powu(n as u32 - 1) };
            *fn_ = unit * (a * geo - prev);
        }
        let mut next = vec![Complex64::new(0.0, 0.0); m + 1];
        for i in 0..=m {
            for j in 0..=m - i {
                next[i + j] += out[i] * f[j];
            }
        }
        out = next;
    }
    out
}

/// Columns `zⁿ·φ`, `n = 0..=m − deg`, of a `d`-vector-valued polynomial
/// given by its coefficient blocks, laid out at index `n·d + i`.
pub fn shifted_copies(blocks: &[Mat], d: usize, m: usize, deg: usize) -> Mat {
    let k = blocks[0].ncols();
    let count = m + 1 - deg;
    let mut out = Mat::zeros(d * (m + 1), k * count);
    for s in 0..count {
        for (n, b) in blocks.iter().enumerate() {
            if s + n > m {
                break;
            }
            out.view_mut(((s + n) * d, s * k), (d, k)).copy_from(b);
        }
    }
    out
}
