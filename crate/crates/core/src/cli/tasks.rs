//! One function per task; each returns the JSON pieces of its report entry.

use serde_json::{json, Value};

use super::config::{to_pair, Config, Subject, Task};
use crate::defect::{model_space_of, optimal_frames, parseval_generators, parseval_index};
use crate::error::{Error, Result};
use crate::frames::{frame_bounds, frame_index_oracle, synthesis_kernel, FrameReport, FrameSystem, FRAME_REL_TOL};
use crate::hardy::{adjoint_frame, basic_frame, invariant_subspace, TruncHardy};
use crate::inner::{similarity_test_matrix, similarity_test_scalar, InnerStructure, SUBSPACE_ANGLE_TOL};
use crate::numkit::{eigenvalues, Mat};
use crate::operators::{admissibility, OperatorSpec};
use crate::tighten::{canonical_tighten, index_certificate, CERTIFICATE_RANK_TOL, CONTRACTION_TOL};

pub struct Context<'a> {
    pub config: &'a Config,
    pub subject: &'a Subject,
    pub generators: Option<&'a Mat>,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Default)]
pub struct TaskOutput {
    pub identity: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub tolerances: Value,
    pub matrices: Vec<(String, Mat)>,
}

pub fn mat_json(m: &Mat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(to_pair(m[(i, j)]))).collect()))
            .collect(),
    )
}

fn frame_json(r: &FrameReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

fn cutoff(ctx: &Context) -> usize {
    ctx.config.truncation.m
}

/// The frame system a task works on: explicit generators if given,
/// otherwise the basic frame of a model space.
fn frame_system(ctx: &Context, task: Task) -> Result<FrameSystem> {
    match (ctx.generators, ctx.subject) {
        (Some(g), subject) => FrameSystem::new(subject.operator()?, g.clone()),
        (None, Subject::Model { model, .. }) => basic_frame(model),
        (None, Subject::Operator(_)) => Err(Error::InvalidInput(format!(
            "task `{}` needs `generators` or a blaschke-model operator",
            task.name()
        ))),
    }
}

fn plain_operator(ctx: &Context, task: Task) -> Result<OperatorSpec> {
    match ctx.subject {
        Subject::Operator(t) => Ok(t.clone()),
        Subject::Model { .. } => Err(Error::InvalidInput(format!(
            "task `{}` needs a matrix operator, not a blaschke-model",
            task.name()
        ))),
    }
}

pub fn run_task(ctx: &Context, task: Task) -> Result<TaskOutput> {
    match task {
        Task::Admissibility => admissibility_task(ctx),
        Task::FrameBounds => frame_bounds_task(ctx),
        Task::ParsevalGenerators => parseval_task(ctx),
        Task::Tighten => tighten_task(ctx),
        Task::IndexCertificate => certificate_task(ctx),
        Task::ModelSpace => model_space_task(ctx),
        Task::AdjointFrame => adjoint_frame_task(ctx),
        Task::OptimalFrames => optimal_task(ctx),
        Task::InnerSimilarity => similarity_task(ctx),
        Task::SynthesisKernel => kernel_task(ctx),
    }
}

fn admissibility_task(ctx: &Context) -> Result<TaskOutput> {
    let t = ctx.subject.operator()?;
    let report = admissibility(&t, ctx.tol)?;
    let gamma_p = if report.admits_parseval { parseval_index(&t)? } else { 0 };
    let gamma = if report.admits_frame { frame_index_oracle(&t, ctx.seed)?.gamma } else { 0 };
    let mut results = serde_json::to_value(report).expect("report serializes");
    results["parseval_index"] = json!(gamma_p);
    results["gamma"] = json!(gamma);
    Ok(TaskOutput {
        identity: "frame of iterations exists iff spectral radius < 1; Parseval frame iff also norm <= 1",
        inputs: json!({"dim": t.dim(), "seed": ctx.seed}),
        results,
        tolerances: json!({"borderline_band": ctx.tol}),
        ..Default::default()
    })
}

fn frame_bounds_task(ctx: &Context) -> Result<TaskOutput> {
    let sys = frame_system(ctx, Task::FrameBounds)?;
    let r = frame_bounds(&sys)?;
    Ok(TaskOutput {
        identity: "S - T S T* = sum_i v_i v_i*",
        inputs: json!({"dim": sys.dim(), "generators": sys.generator_count()}),
        results: frame_json(&r),
        tolerances: json!({"frame_rel_tol": FRAME_REL_TOL, "parseval_tol": sys.parseval_tol()}),
        matrices: vec![("frame_operator".into(), r.frame_operator.as_mat().clone())],
    })
}

fn parseval_task(ctx: &Context) -> Result<TaskOutput> {
    let t = ctx.subject.operator()?;
    let sys = parseval_generators(&t)?;
    let r = frame_bounds(&sys)?;
    Ok(TaskOutput {
        identity: "{T^n D g_j} is a Parseval frame, D = (I - T T*)^(1/2)",
        inputs: json!({"dim": t.dim()}),
        results: json!({
            "generator_count": sys.generator_count(),
            "generators": mat_json(sys.generators()),
            "frame": frame_json(&r),
        }),
        tolerances: json!({"parseval_tol": sys.parseval_tol()}),
        matrices: vec![("parseval_generators".into(), sys.generators().clone())],
    })
}

fn tighten_task(ctx: &Context) -> Result<TaskOutput> {
    let sys = frame_system(ctx, Task::Tighten)?;
    let r = canonical_tighten(&sys)?;
    let q = r.q.matrix();
    Ok(TaskOutput {
        identity: "Q = S^(-1/2) T S^(1/2); {Q^n S^(-1/2) v_i} is a Parseval frame",
        inputs: json!({"dim": sys.dim(), "generators": sys.generator_count()}),
        results: json!({
            "q": mat_json(&q),
            "q_norm": r.q_norm,
            "tightened_generators": mat_json(r.tightened.generators()),
            "original": frame_json(&r.original),
            "tightened": frame_json(&r.report),
        }),
        tolerances: json!({"parseval_tol": r.tightened.parseval_tol(), "contraction_tol": CONTRACTION_TOL}),
        matrices: vec![
            ("tighten_q".into(), q),
            ("tighten_generators".into(), r.tightened.generators().clone()),
        ],
    })
}

fn certificate_task(ctx: &Context) -> Result<TaskOutput> {
    let t = ctx.subject.operator()?;
    let c = index_certificate(&t, ctx.seed)?;
    let q = c.q.matrix();
    let mut results = serde_json::to_value(&c).expect("certificate serializes");
    results["q"] = mat_json(&q);
    Ok(TaskOutput {
        identity: "gamma(T) = rank(I - Q Q*) for the tightening Q of a minimal frame",
        inputs: json!({"dim": t.dim(), "seed": ctx.seed}),
        results,
        tolerances: json!({"rank_tol": CERTIFICATE_RANK_TOL, "contraction_tol": CONTRACTION_TOL}),
        matrices: vec![("certificate_q".into(), q)],
    })
}

fn model_space_task(ctx: &Context) -> Result<TaskOutput> {
    match ctx.subject {
        Subject::Model { inner, model, .. } => {
            let a = model.compression_matrix();
            let mut ev = eigenvalues(&a);
            ev.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            Ok(TaskOutput {
                identity: "N = H^2 (-) Q H^2, A_N = P_N S|_N",
                inputs: json!({"inner": inner.describe(), "m": cutoff(ctx)}),
                results: json!({
                    "dim": model.dim(),
                    "total_degree": inner.total_degree(),
                    "compression_eigenvalues": ev.iter().map(|z| to_pair(*z)).collect::<Vec<_>>(),
                    "invariance_defect": model.invariance_defect(),
                    "compression": mat_json(&a),
                }),
                tolerances: json!({"tail_tol": model.tail_tol()}),
                matrices: vec![
                    ("model_basis".into(), model.basis().clone()),
                    ("compression".into(), a),
                ],
            })
        }
        Subject::Operator(t) => {
            let r = model_space_of(t, cutoff(ctx), ctx.tol)?;
            Ok(TaskOutput {
                identity: "L T* = S* L and L* L = I for L x = sum_n (D (T*)^n x) z^n",
                inputs: json!({"dim": t.dim(), "m": cutoff(ctx)}),
                results: json!({
                    "multiplicity": r.embedding.defect.index,
                    "dim": r.model.dim(),
                    "isometry_defect": r.embedding.isometry_defect,
                    "intertwine_defect": r.embedding.intertwine_defect,
                    "invariance_defect": r.invariance_defect,
                    "tail_bound": r.embedding.tail_bound,
                }),
                tolerances: json!({"tail_tol": ctx.tol}),
                matrices: vec![("rota_embedding".into(), r.embedding.l.clone())],
            })
        }
    }
}

fn model_parts<'a>(ctx: &Context<'a>, task: Task) -> Result<(&'a crate::inner::MatrixInner, TruncHardy)> {
    match ctx.subject {
        Subject::Model { inner, model, .. } => Ok((inner, model.space())),
        Subject::Operator(_) => Err(Error::InvalidInput(format!(
            "task `{}` needs a blaschke-model operator",
            task.name()
        ))),
    }
}

fn adjoint_frame_task(ctx: &Context) -> Result<TaskOutput> {
    let (inner, h) = model_parts(ctx, Task::AdjointFrame)?;
    let af = adjoint_frame(inner, &h)?;
    let r = frame_bounds(&af.system)?;
    Ok(TaskOutput {
        identity: "{(S*)^n P_N S* Q e_i} is a Parseval frame of N",
        inputs: json!({"inner": inner.describe(), "m": h.cutoff()}),
        results: json!({
            "generator_count": af.system.generator_count(),
            "frame": frame_json(&r),
        }),
        tolerances: json!({"parseval_tol": af.system.parseval_tol()}),
        matrices: vec![("adjoint_generators".into(), af.system.generators().clone())],
    })
}

fn optimal_task(ctx: &Context) -> Result<TaskOutput> {
    let t = plain_operator(ctx, Task::OptimalFrames)?;
    let o = optimal_frames(&t, cutoff(ctx))?;
    let a = frame_bounds(&o.for_t)?;
    let b = frame_bounds(&o.for_t_adjoint)?;
    Ok(TaskOutput {
        identity: "{T^n L* e_j} and {(T*)^n L* S* E_j} are Parseval frames",
        inputs: json!({"dim": t.dim(), "m": cutoff(ctx)}),
        results: json!({
            "summary": serde_json::to_value(o.summary()).expect("summary serializes"),
            "for_t": frame_json(&a),
            "for_t_adjoint": frame_json(&b),
        }),
        tolerances: json!({"parseval_tol": o.for_t.parseval_tol()}),
        matrices: vec![
            ("optimal_t_generators".into(), o.for_t.generators().clone()),
            ("optimal_t_adjoint_generators".into(), o.for_t_adjoint.generators().clone()),
        ],
    })
}

fn similarity_task(ctx: &Context) -> Result<TaskOutput> {
    let (inner, h) = model_parts(ctx, Task::InnerSimilarity)?;
    let m = h.cutoff();
    let witness = match ctx.subject {
        Subject::Model { witness, .. } => witness.as_ref(),
        Subject::Operator(_) => None,
    };
    let scalar = match inner.structure() {
        InnerStructure::DiagBlaschke(b) if b.len() == 1 && witness.is_none() => Some(&b[0]),
        _ => None,
    };
    let results = match scalar {
        Some(b) => {
            let r = similarity_test_scalar(b, m, ctx.tol)?;
            serde_json::to_value(r).expect("similarity serializes")
        }
        None => {
            let r = similarity_test_matrix(inner, m, witness)?;
            serde_json::to_value(r).expect("similarity serializes")
        }
    };
    Ok(TaskOutput {
        identity: "rho(Q) H^2 = Q H^2 iff A Q_n = Q_n A = (A Q_n)* for a unitary A",
        inputs: json!({"inner": inner.describe(), "m": m, "witness": witness.map(mat_json)}),
        results,
        tolerances: json!({"coefficient_tol": ctx.tol, "angle_tol": SUBSPACE_ANGLE_TOL}),
        ..Default::default()
    })
}

fn kernel_task(ctx: &Context) -> Result<TaskOutput> {
    let m = cutoff(ctx);
    let rank_tol = 1e-8;
    match (ctx.generators, ctx.subject) {
        (None, Subject::Model { inner, model, .. }) => {
            let h = model.space();
            let af = adjoint_frame(inner, &h)?;
            let k = synthesis_kernel(&af.system, m, rank_tol);
            let mut results = json!({"kernel_dim": k.dim(), "generator_count": af.system.generator_count()});
            if af.system.generator_count() == h.multiplicity() {
                let target = invariant_subspace(&inner.rho(), &h)?;
                results["angle_to_rho_q_h2"] = json!(k.max_angle(&target)?);
            }
            Ok(TaskOutput {
                identity: "ker C = rho(Q) H^2 for the synthesis map C of the adjoint frame",
                inputs: json!({"inner": inner.describe(), "m": m}),
                results,
                tolerances: json!({"rank_tol": rank_tol, "angle_tol": SUBSPACE_ANGLE_TOL}),
                matrices: vec![("synthesis_kernel".into(), k.basis().clone())],
            })
        }
        _ => {
            let sys = frame_system(ctx, Task::SynthesisKernel)?;
            let k = synthesis_kernel(&sys, m, rank_tol);
            Ok(TaskOutput {
                identity: "ker C for C c = sum_{n,i} c_{n,i} T^n v_i",
                inputs: json!({"dim": sys.dim(), "generators": sys.generator_count(), "m": m}),
                results: json!({"kernel_dim": k.dim()}),
                tolerances: json!({"rank_tol": rank_tol}),
                matrices: vec![("synthesis_kernel".into(), k.basis().clone())],
            })
        }
    }
}
