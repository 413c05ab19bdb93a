//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured quantities, then asserts.

mod common;

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use common::*;
use dynframe::defect::{optimal_frames, parseval_generators, parseval_index, rota_horizon};
use dynframe::frames::{frame_bounds, FrameSystem};
use dynframe::hardy::{adjoint_frame, basic_frame, model_space, script_l, split_wandering, wandering_subspace};
use dynframe::inner::{similarity_test_matrix, similarity_test_scalar, BlaschkeProduct, MatrixInner};
use dynframe::instances::{circle_sequence, non_contraction_operator, tn_operator};
use dynframe::operators::admissibility;
use dynframe::tighten::index_certificate;
use dynframe::{Mat, OperatorSpec, TruncHardy};
use num_complex::Complex64;
use rand::Rng;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("{} [{id:>2}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

/// Contractions with a known defect rank, some of norm exactly one.
fn contraction_ensemble() -> Vec<(Mat, usize)> {
    let mut r = rng(101);
    (0..200).map(|k| contraction(&mut r, 1 + k % 12)).collect()
}

#[test]
fn c01_parseval_characterization() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut unit_norm = 0;
    for (t, _) in contraction_ensemble() {
        if (norm2(&t) - 1.0).abs() < 1e-12 {
            unit_norm += 1;
        }
        let sys = parseval_generators(&OperatorSpec::dense(t).unwrap()).unwrap();
        worst = worst.max(frame_bounds(&sys).unwrap().parseval_defect);
    }
    let mut r = rng(102);
    let mut wrong_index = 0;
    for k in 0..50 {
        let d = 1 + k % 12;
        let mut sigma: Vec<f64> = (0..d).map(|_| r.random::<f64>()).collect();
        sigma[0] = 1.06 + r.random::<f64>();
        let t = OperatorSpec::dense(with_singular_values(&mut r, &sigma)).unwrap();
        if parseval_index(&t).unwrap() != 0 {
            wrong_index += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = worst <= 1e-8 && wrong_index == 0 && secs < 30.0;
    report(
        1,
        "Parseval characterization",
        ok,
        format!(
            "max ‖S−I‖ = {worst:.2e} (≤ 1e-8) over 200 ({unit_norm} of norm 1), \
             nonzero index on expansive T: {wrong_index}/50, {secs:.1}s (< 30s)"
        ),
    );
    assert!(ok);
}

#[test]
fn c02_index_formula() {
    let mut mismatches = 0;
    for (t, defect_rank) in contraction_ensemble() {
        let sys = parseval_generators(&OperatorSpec::dense(t).unwrap()).unwrap();
        let count = sys.generator_count();
        let gen_rank = rank(sys.generators(), 1e-8);
        if count != defect_rank || gen_rank != defect_rank {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0;
    report(
        2,
        "index formula",
        ok,
        format!("count = rank(I−TT*) = rank(G) mismatches: {mismatches}/200"),
    );
    assert!(ok);
}

#[test]
fn c03_stein_identity() {
    let mut r = rng(103);
    let mut worst: f64 = 0.0;
    let mut worst_series: f64 = 0.0;
    for k in 0..200 {
        let d = 1 + k % 12;
        let t = stable(&mut r, d, 0.95);
        let g = gaussian(&mut r, d, 1 + k % 3);
        let sys = FrameSystem::new(OperatorSpec::dense(t.clone()).unwrap(), g.clone()).unwrap();
        let s = frame_bounds(&sys).unwrap().frame_operator.into_mat();
        let residual = norm2(&(&s - &t * &s * t.adjoint() - &g * g.adjoint()));
        let s_norm = norm2(&s);
        worst = worst.max(residual / s_norm);
        let series = frame_operator_series(&t, &g, 4000);
        worst_series = worst_series.max(norm2(&(&s - series)) / s_norm);
    }
    let ok = worst <= 1e-10;
    report(
        3,
        "Stein identity",
        ok,
        format!("max ‖S−TST*−GG*‖/‖S‖ = {worst:.2e} (≤ 1e-10); brute-force series gap {worst_series:.2e}"),
    );
    assert!(ok);
    assert!(worst_series < 1e-8);
}

#[test]
fn c04_tightening_certificate() {
    let start = Instant::now();
    let mut r = rng(104);
    let mut failures = Vec::new();
    for k in 0..100 {
        let (t, gamma) = if k % 2 == 0 {
            (stable(&mut r, 1 + k % 10, 0.95), 1)
        } else {
            let mult: Vec<usize> = match k % 5 {
                0 => vec![2, 1, 1],
                1 => vec![3, 2],
                2 => vec![2, 2, 2],
                3 => vec![4, 1, 1, 1],
                _ => vec![1, 1, 1],
            };
            let gamma = *mult.iter().max().unwrap();
            (with_spectrum(&mut r, &mult, 0.9), gamma)
        };
        let rad = radius(&t);
        let op = OperatorSpec::dense(t).unwrap();
        match index_certificate(&op, k as u64) {
            Ok(cert) => {
                let q = cert.q.matrix();
                let gap = Mat::identity(q.nrows(), q.nrows()) - &q * q.adjoint();
                let oracle_rank = rank(&gap, 1e-8);
                if cert.gamma != gamma || oracle_rank != gamma || norm2(&q) > 1.0 + 1e-8 {
                    failures.push(format!("#{k}: gamma {} vs {gamma}, rank {oracle_rank}", cert.gamma));
                }
            }
            Err(e) => failures.push(format!("#{k} (d = {}, ρ = {rad:.2}): {e}", op.dim())),
        }
    }
    let tn = tn_operator(3, &circle_sequence(48, 0.9)).unwrap();
    let tn_gamma = index_certificate(&tn, 0).map(|c| c.gamma);
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && matches!(tn_gamma, Ok(3)) && secs < 60.0;
    report(
        4,
        "tightening certificate",
        ok,
        format!("random failures {}/100 {:?}, T_3 (d = 50) gamma {tn_gamma:?} (= 3), {secs:.1}s (< 60s)", failures.len(), failures),
    );
    assert!(ok);
}

#[test]
fn c05_non_contraction_shadow() {
    let t = non_contraction_operator(&circle_sequence(28, 0.9)).unwrap();
    let a = admissibility(&t, 1e-8).unwrap();
    let gamma = index_certificate(&t, 0).map(|c| c.gamma);
    let ok = (a.norm - 2.0).abs() <= 1e-10 && !a.admits_parseval && a.admits_frame && matches!(gamma, Ok(2));
    report(
        5,
        "non-contraction example at d = 30",
        ok,
        format!(
            "norm {:.12} (2 ± 1e-10), admits_parseval {}, admits_frame {}, gamma {gamma:?} (expected 2)",
            a.norm, a.admits_parseval, a.admits_frame
        ),
    );
    assert!(ok);
}

#[test]
fn c06_model_space_pipeline() {
    let mut r = rng(106);
    let h = TruncHardy::new(1, 60).unwrap();
    let (mut basic, mut adjoint, mut eig) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut dim_mismatch = 0;
    for _ in 0..50 {
        let deg = r.random_range(1..=4);
        let zeros: Vec<Complex64> = (0..deg).map(|_| in_disc(&mut r, 0.8)).collect();
        let q = MatrixInner::scalar(BlaschkeProduct::from_zeros(&zeros).unwrap());
        let n = Arc::new(model_space(&q, &h).unwrap());
        if n.dim() != deg {
            dim_mismatch += 1;
        }
        basic = basic.max(frame_bounds(&basic_frame(&n).unwrap()).unwrap().parseval_defect);
        adjoint = adjoint.max(frame_bounds(&adjoint_frame(&q, &h).unwrap().system).unwrap().parseval_defect);
        let mut ev = eigenvalues(&n.compression_matrix());
        for z in &zeros {
            let (i, dist) = ev
                .iter()
                .enumerate()
                .map(|(i, e)| (i, (e - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            eig = eig.max(dist);
            ev.remove(i);
        }
    }
    let ok = basic <= 1e-5 && adjoint <= 1e-5 && eig <= 1e-5 && dim_mismatch == 0;
    report(
        6,
        "model-space pipeline",
        ok,
        format!(
            "basic defect {basic:.2e}, adjoint defect {adjoint:.2e} (≤ 1e-5), \
             eigenvalue error {eig:.2e} (≤ 1e-5), dim mismatches {dim_mismatch}/50"
        ),
    );
    assert!(ok);
}

/// `W₁ = L·span{b_j e_j : b_j non-constant}` for `Q = L·diag(b_j)·R`.
fn w1_oracle(left: &Mat, zeros: &[Vec<Complex64>], m: usize) -> Mat {
    let d = left.nrows();
    let cols: Vec<Mat> = zeros
        .iter()
        .enumerate()
        .filter(|(_, z)| !z.is_empty())
        .map(|(j, z)| {
            let b = blaschke_series(z, m);
            Mat::from_fn(d * (m + 1), 1, |row, _| left[(row % d, j)] * b[row / d])
        })
        .collect();
    let mut all = Mat::zeros(d * (m + 1), cols.len());
    for (k, col) in cols.iter().enumerate() {
        all.set_column(k, &col.column(0));
    }
    orth(&all, 1e-12)
}

#[test]
fn c07_script_l_equals_w1() {
    let m = 40;
    let mut r = rng(107);
    let l_rand = unitary(&mut r, 2);
    let r_rand = unitary(&mut r, 2);
    let id = Mat::identity(2, 2);
    let a = vec![c(0.5, 0.2)];
    let b = vec![c(-0.3, 0.6), c(0.7, 0.0)];
    let family: Vec<(&str, Mat, Vec<Vec<Complex64>>, Mat)> = vec![
        ("diag(1, b)", id.clone(), vec![vec![], a.clone()], id.clone()),
        ("diag(b1, b2)", id.clone(), vec![b.clone(), a.clone()], id.clone()),
        ("L diag(b1, b2) R", l_rand.clone(), vec![b.clone(), a.clone()], r_rand.clone()),
        ("L diag(1, b) R", l_rand, vec![vec![], b.clone()], r_rand),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, left, zeros, right) in family {
        let diag = zeros.iter().map(|z| BlaschkeProduct::from_zeros(z).unwrap()).collect();
        let q = MatrixInner::product(left.clone(), diag, right).unwrap();
        let h = TruncHardy::new(2, m).unwrap();
        let n = model_space(&q, &h).unwrap();
        let sl = script_l(&n).unwrap();
        let w = wandering_subspace(&n.subspace().complement(), &h, 1e-6).unwrap();
        let split = split_wandering(&w, &h, 1e-6).unwrap();
        let oracle = w1_oracle(&left, &zeros, m);
        let angle_lib = sl.max_angle(&split.w1).unwrap_or(f64::INFINITY);
        let angle_oracle = if sl.dim() == oracle.ncols() { max_angle(sl.basis(), &oracle) } else { f64::INFINITY };
        let dims_ok = split.w1.dim() == split.k1.dim() && split.w1.dim() == oracle.ncols();
        let good = angle_lib <= 1e-5 && angle_oracle <= 1e-5 && dims_ok;
        ok &= good;
        lines.push(format!(
            "{name}: ∠(𝓛,W₁) {angle_lib:.1e}, ∠(𝓛,oracle) {angle_oracle:.1e}, dim W₁ {} K₁ {} K₀ {}",
            split.w1.dim(),
            split.k1.dim(),
            split.k0.dim()
        ));
    }
    report(7, "𝓛 = W₁ and dim W₁ = dim K₁", ok, lines.join("; "));
    assert!(ok);
}

#[test]
fn c08_synthesis_kernel() {
    let m = 60;
    let h = TruncHardy::new(1, m).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, a, fixed_point) in [("{0.5}", c(0.5, 0.0), true), ("{0.5i}", c(0.0, 0.5), false)] {
        let q = MatrixInner::scalar(BlaschkeProduct::from_zeros(&[a]).unwrap());
        let af = adjoint_frame(&q, &h).unwrap();
        let k = dynframe::frames::synthesis_kernel(&af.system, m, 1e-8);
        let coeffs = blaschke_series(&[a], m);
        let block = |v: Complex64| Mat::from_element(1, 1, v);
        let rho_q: Vec<Mat> = coeffs.iter().map(|z| block(z.conj())).collect();
        let plain_q: Vec<Mat> = coeffs.iter().map(|&z| block(z)).collect();
        let rho_space = orth(&shifted_copies(&rho_q, 1, m, 1), 1e-12);
        let q_space = orth(&shifted_copies(&plain_q, 1, m, 1), 1e-12);
        let to_rho = max_angle(k.basis(), &rho_space);
        let to_q = max_angle(k.basis(), &q_space);
        let good = to_rho <= 1e-5 && (!fixed_point || to_q <= 1e-5);
        ok &= good;
        lines.push(format!("{name}: ∠(ker, ρ(q)H²) {to_rho:.1e}, ∠(ker, qH²) {to_q:.1e}"));
    }
    report(8, "synthesis kernel", ok, lines.join("; "));
    assert!(ok);
}

#[test]
fn c09_similarity_tests() {
    let mut r = rng(109);
    let mut mismatches = 0;
    let mut wrong = 0;
    for k in 0..500 {
        let closed = k % 2 == 0;
        let mut zeros = Vec::new();
        let deg = r.random_range(1..=6);
        while zeros.len() < deg {
            let z = in_disc(&mut r, 0.9);
            if closed {
                if zeros.len() + 2 <= deg && r.random::<bool>() {
                    zeros.push(z);
                    zeros.push(z.conj());
                } else {
                    zeros.push(c(z.re, 0.0));
                }
            } else {
                zeros.push(z);
            }
        }
        let alpha = Complex64::from_polar(1.0, r.random::<f64>() * std::f64::consts::TAU);
        let b = BlaschkeProduct::new(alpha, &zeros, 0).unwrap();
        match similarity_test_scalar(&b, 60, 1e-10) {
            Ok(s) if s.similar != closed => wrong += 1,
            Ok(_) => {}
            Err(_) => mismatches += 1,
        }
    }
    let bp = |a: Complex64| BlaschkeProduct::from_zeros(&[a]).unwrap();
    let swap = Mat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let conj_pair = MatrixInner::diagonal(vec![bp(c(0.0, 0.5)), bp(c(0.0, -0.5))]).unwrap();
    let s_pair = similarity_test_matrix(&conj_pair, 40, Some(&swap)).unwrap();
    let same = MatrixInner::diagonal(vec![bp(c(0.0, 0.5)), bp(c(0.0, 0.5))]).unwrap();
    let s_same = similarity_test_matrix(&same, 40, None).unwrap();
    let swap_passes = s_pair.similar && s_pair.witness_ok == Some(true);
    let ok = mismatches == 0 && wrong == 0 && swap_passes && !s_same.similar;
    report(
        9,
        "similarity tests",
        ok,
        format!(
            "verdict mismatches {mismatches}/500, wrong verdicts {wrong}/500; \
             diag(b_0.5i, b_-0.5i) with swap: similar {} (angle {:.3}), witness_ok {:?} (residual {:.2e}) [expected pass]; \
             diag(b_0.5i, b_0.5i): similar {} [expected false]",
            s_pair.similar,
            s_pair.max_angle,
            s_pair.witness_ok,
            s_pair.witness_residual.unwrap_or(f64::NAN),
            s_same.similar
        ),
    );
    assert!(ok);
}

#[test]
fn c10_optimal_frames() {
    let mut r = rng(110);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 0..50 {
        let d = 2 + k % 4;
        let sigma: Vec<f64> = (0..d).map(|_| 0.85 * r.random::<f64>()).collect();
        let t = OperatorSpec::dense(with_singular_values(&mut r, &sigma)).unwrap();
        let m = rota_horizon(&t, 1e-8).unwrap();
        let gp = parseval_index(&t).unwrap();
        match optimal_frames(&t, m) {
            Ok(of) => {
                let a = frame_bounds(&of.for_t).unwrap().parseval_defect;
                let b = frame_bounds(&of.for_t_adjoint).unwrap().parseval_defect;
                worst = worst.max(a).max(b);
                let (ga, gb) = (of.for_t.generators(), of.for_t_adjoint.generators());
                let independent = rank(ga, 1e-8) == ga.ncols() && rank(gb, 1e-8) == gb.ncols();
                if ga.ncols() != gp || gb.ncols() != gp || !independent {
                    failures.push(format!("#{k}: counts {} / {} vs {gp}", ga.ncols(), gb.ncols()));
                }
            }
            Err(e) => failures.push(format!("#{k}: {e}")),
        }
    }
    let ok = failures.is_empty() && worst <= 1e-5;
    report(
        10,
        "optimal frames",
        ok,
        format!("max defect {worst:.2e} (≤ 1e-5), count/independence failures {}/50 {failures:?}", failures.len()),
    );
    assert!(ok);
}

#[test]
fn c11_cli_determinism() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut configs: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    configs.sort();
    let run = |p: &Path| Command::new(env!("CARGO_BIN_EXE_dynframe")).arg("--config").arg(p).output().unwrap();
    let mut differing = Vec::new();
    for p in &configs {
        let (a, b) = (run(p), run(p));
        if a.stdout != b.stdout || !a.status.success() || a.stdout.is_empty() {
            differing.push(p.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    let ok = !configs.is_empty() && differing.is_empty();
    report(
        11,
        "CLI determinism",
        ok,
        format!("{} configs, differing or failing: {differing:?}", configs.len()),
    );
    assert!(ok);
}
