//! Ready-made operators: Carleson diagonals, the `T_N` family with a
//! repeated eigenvalue, and a non-contractive example.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkit::{c64, Mat};
use crate::operators::OperatorSpec;

fn check_disc(lambdas: &[Complex64]) -> Result<()> {
    match lambdas.iter().find(|z| !(z.norm() < 1.0)) {
        Some(z) => Err(Error::NotInDisc { re: z.re, im: z.im }),
        None => Ok(()),
    }
}

/// `T e_k = λ_k e_k`.
pub fn carleson_diag(lambdas: &[Complex64]) -> Result<OperatorSpec> {
    check_disc(lambdas)?;
    OperatorSpec::diagonal(lambdas.to_vec())
}

/// `inf_k ∏_{j≠k} |λ_k − λ_j| / |1 − λ̄_k λ_j|` over the given points.
pub fn carleson_margin(lambdas: &[Complex64]) -> Result<f64> {
    check_disc(lambdas)?;
    let margin = (0..lambdas.len())
        .map(|k| {
            (0..lambdas.len())
                .filter(|&j| j != k)
                .map(|j| {
                    let (a, b) = (lambdas[k], lambdas[j]);
                    (a - b).norm() / (Complex64::new(1.0, 0.0) - a.conj() * b).norm()
                })
                .product::<f64>()
        })
        .fold(1.0, f64::min);
    Ok(margin)
}

/// `λ_k = 1 − 2^{−k}`, `k = 1..=n`.
pub fn dyadic_sequence(n: usize) -> Vec<Complex64> {
    (1..=n).map(|k| c64(1.0 - 0.5_f64.powi(k as i32), 0.0)).collect()
}

/// `n` equispaced points on the circle of radius `r`, starting at `r`.
pub fn circle_sequence(n: usize, r: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// Diagonal operator with `λ₁` repeated `N − 1` times followed by the
/// whole sequence, so `λ₁` has geometric multiplicity `N`.
pub fn tn_operator(n: usize, lambdas: &[Complex64]) -> Result<OperatorSpec> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("N = {n} must be at least 2")));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidInput("empty eigenvalue sequence".into()));
    }
    check_disc(lambdas)?;
    let mut entries = vec![lambdas[0]; n - 1];
    entries.extend_from_slice(lambdas);
    OperatorSpec::diagonal(entries)
}

/// `T e₁ = 2e₂`, `T e₂ = 0`, `T e_{j+2} = λ_j e_{j+2}`: norm 2, spectral
/// radius `max |λ_j|`.
pub fn non_contraction_operator(lambdas: &[Complex64]) -> Result<OperatorSpec> {
    check_disc(lambdas)?;
    let d = lambdas.len() + 2;
    let mut m = Mat::zeros(d, d);
    m[(1, 0)] = c64(2.0, 0.0);
    for (j, &l) in lambdas.iter().enumerate() {
        m[(j + 2, j + 2)] = l;
    }
    OperatorSpec::dense(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{op_norm, spectral_radius};

    #[test]
    fn margins() {
        assert!(carleson_margin(&dyadic_sequence(12)).unwrap() > 0.0);
        assert_eq!(carleson_margin(&[c64(0.3, 0.0), c64(0.3, 0.0)]).unwrap(), 0.0);
        assert_eq!(carleson_margin(&[c64(0.3, 0.0)]).unwrap(), 1.0);
        assert!(matches!(carleson_diag(&[c64(1.0, 0.0)]), Err(Error::NotInDisc { .. })));
    }

    #[test]
    fn tn_shape() {
        let t = tn_operator(3, &circle_sequence(48, 0.9)).unwrap();
        assert_eq!(t.dim(), 50);
        let m = t.matrix();
        assert_eq!((0..50).filter(|&i| m[(i, i)] == c64(0.9, 0.0)).count(), 3);
        assert!(tn_operator(1, &[c64(0.1, 0.0)]).is_err());
    }

    #[test]
    fn non_contraction_shape() {
        let t = non_contraction_operator(&[c64(0.5, 0.0), c64(-0.25, 0.25)]).unwrap();
        assert!((op_norm(&t) - 2.0).abs() < 1e-14);
        assert!((spectral_radius(&t) - 0.5).abs() < 1e-12);
    }
}
