mod common;

use common::*;
use dynframe::numkit::{
    iterate_tail_sum, numerical_rank, psd_sqrt, stein_series, stein_solve, Subspace,
};
use dynframe::operators::{admissibility, op_norm, similarity_transform, spectral_radius};
use dynframe::{Error, HermMat, Mat, OperatorSpec};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn psd_sqrt_squares_back(seed in any::<u64>(), d in 1usize..9, k in 1usize..9) {
        let g = gaussian(&mut rng(seed), d, k);
        let m = &g * g.adjoint();
        let r = psd_sqrt(&HermMat::new(m.clone()).unwrap()).unwrap();
        let back = r.as_mat() * r.as_mat();
        prop_assert!(norm2(&(back - &m)) <= 1e-9 * norm2(&m).max(1.0));
    }

    #[test]
    fn stein_solve_matches_series(seed in any::<u64>(), d in 1usize..9) {
        let mut r = rng(seed);
        let t = stable(&mut r, d, 0.9);
        let g = gaussian(&mut r, d, 2);
        let v = HermMat::gram(&g);
        let exact = stein_solve(&t, &v).unwrap();
        let m = 400;
        let series = stein_series(&t, &v, m);
        let tail = iterate_tail_sum(&t, m).unwrap() * norm2(v.as_mat());
        let gap = norm2(&(exact.as_mat() - series.as_mat()));
        prop_assert!(gap <= tail + 1e-10 * norm2(exact.as_mat()), "gap {gap:e} tail {tail:e}");
    }

    #[test]
    fn rank_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..9, r_ in 0usize..9) {
        let mut r = rng(seed);
        let k = r_.min(d);
        let m = gaussian(&mut r, d, k) * gaussian(&mut r, k, d);
        let (u, v) = (unitary(&mut r, d), unitary(&mut r, d));
        let base = numerical_rank(&m, 1e-10);
        prop_assert_eq!(base, k);
        prop_assert_eq!(numerical_rank(&(&u * &m), 1e-10), base);
        prop_assert_eq!(numerical_rank(&(&m * &v), 1e-10), base);
    }

    #[test]
    fn complement_reconstructs_identity(seed in any::<u64>(), d in 1usize..10, k in 0usize..10) {
        let s = Subspace::span(&gaussian(&mut rng(seed), d, k.min(d)), 1e-12);
        let c = s.complement();
        prop_assert_eq!(s.dim() + c.dim(), d);
        let sum = s.projector() + c.projector();
        prop_assert!(norm2(&(sum - Mat::identity(d, d))) <= 1e-10);
        prop_assert!(s.equals(&s, 1e-10).unwrap());
    }

    #[test]
    fn similarity_keeps_radius_and_frame_admissibility(seed in any::<u64>(), d in 1usize..8) {
        let mut r = rng(seed);
        let t = OperatorSpec::dense(stable(&mut r, d, 0.95)).unwrap();
        let v = Mat::identity(d, d) + gaussian(&mut r, d, d) * c(0.1, 0.0);
        let (tv, _) = similarity_transform(&t, &v).unwrap();
        prop_assert!((spectral_radius(&t) - spectral_radius(&tv)).abs() <= 1e-9);
        let (a, b) = (admissibility(&t, 1e-6).unwrap(), admissibility(&tv, 1e-6).unwrap());
        prop_assert_eq!(a.admits_frame, b.admits_frame);
        prop_assert!(!a.admits_parseval || a.admits_frame);
        let u = unitary(&mut r, d);
        let (tu, _) = similarity_transform(&t, &u).unwrap();
        prop_assert!((op_norm(&t) - op_norm(&tu)).abs() <= 1e-10 * op_norm(&t).max(1.0));
    }
}

#[test]
fn tail_bound_dominates_the_true_tail() {
    let mut r = rng(5);
    for _ in 0..20 {
        let t = stable(&mut r, 5, 0.9);
        let m = 30;
        let bound = iterate_tail_sum(&t, m).unwrap();
        let mut p = Mat::identity(5, 5);
        let mut tail = 0.0;
        for n in 1..3000 {
            p = &t * p;
            if n > m {
                tail += norm2(&p).powi(2);
            }
        }
        assert!(tail <= bound * (1.0 + 1e-9), "tail {tail} bound {bound}");
    }
}

#[test]
fn stein_rejects_unstable_and_mismatched() {
    let t = Mat::identity(2, 2);
    assert!(matches!(stein_solve(&t, &HermMat::identity(2)), Err(Error::Unstable { .. })));
    let t = Mat::zeros(2, 2);
    assert!(matches!(stein_solve(&t, &HermMat::identity(3)), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn scalar_stein() {
    // s − |t|² s = 1.
    let t = Mat::from_element(1, 1, c(0.6, 0.0));
    let s = stein_solve(&t, &HermMat::identity(1)).unwrap();
    assert!((s.as_mat()[(0, 0)].re - 1.0 / 0.64).abs() < 1e-14);
}

#[test]
fn admissibility_examples() {
    let jordan = OperatorSpec::dense(Mat::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
    ))
    .unwrap();
    let a = admissibility(&jordan, 1e-8).unwrap();
    assert!(a.admits_parseval && a.is_contraction);

    let identity = OperatorSpec::diagonal(vec![c(1.0, 0.0); 3]).unwrap();
    let a = admissibility(&identity, 1e-8).unwrap();
    assert!(!a.admits_frame && !a.admits_parseval);

    let near = OperatorSpec::diagonal(vec![c(1.0 - 1e-10, 0.0)]).unwrap();
    assert!(matches!(admissibility(&near, 1e-8), Err(Error::Borderline { .. })));
    assert!(matches!(admissibility(&near, 0.5), Err(Error::InvalidInput(_))));
}

#[test]
fn span_of_three_vectors_in_the_plane() {
    let g = gaussian(&mut rng(3), 2, 3);
    assert_eq!(Subspace::span(&g, 1e-12).dim(), 2);
}
