//! Batch front end: read a JSON request, run its tasks in order and emit a
//! JSON report.
//!
//! Exit codes: `0` success, `2` invalid input or violated precondition,
//! `3` failed numerical certificate.

pub mod config;
pub mod tasks;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::{json, Value};

use crate::error::Error;
use crate::numkit::Mat;
use config::{build_generators, build_subject, parse_config, to_pair};
use tasks::{run_task, Context};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;

#[derive(Debug, Clone, Parser)]
#[command(name = "dynframe", version, about = "Frames of operator iterates: analysis and synthesis")]
pub struct Args {
    /// Request file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for CSV exports of the matrices produced by each task.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Overrides the request's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the request's `truncation.tol`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_certificate_failure() {
        EXIT_CERTIFICATE
    } else {
        EXIT_INVALID
    }
}

/// Writes a matrix as CSV, one row per matrix row, each entry as two
/// columns `re,im`.
pub fn write_csv(path: &Path, m: &Mat) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .flat_map(|j| to_pair(m[(i, j)]))
            .map(|x| x.to_string())
            .collect();
        w.write_record(&row)?;
    }
    w.flush()
}

/// The report as a JSON value and the exit code, without touching the
/// filesystem beyond CSV exports.
pub fn build_report(args: &Args, text: &str) -> (Option<Value>, i32) {
    let mut cfg = match parse_config(text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return (None, EXIT_INVALID);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tol {
        cfg.truncation.tol = tol;
    }
    let (subject, generators) = match build_subject(&cfg).and_then(|s| Ok((s, build_generators(&cfg)?))) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return (None, exit_code(&e));
        }
    };
    let ctx = Context {
        config: &cfg,
        subject: &subject,
        generators: generators.as_ref(),
        seed: cfg.seed,
        tol: cfg.truncation.tol,
    };

    let mut code = EXIT_OK;
    let mut entries = Vec::new();
    let mut exports: Vec<(String, Mat)> = Vec::new();
    for (index, &task) in cfg.tasks.iter().enumerate() {
        log::info!("running task {index}: {}", task.name());
        match run_task(&ctx, task) {
            Ok(out) => {
                entries.push(json!({
                    "task": task.name(),
                    "identity": out.identity,
                    "inputs": out.inputs,
                    "results": out.results,
                    "tolerances": out.tolerances,
                }));
                exports.extend(out.matrices.into_iter().map(|(name, m)| (format!("{index:02}_{name}"), m)));
            }
            Err(e) => {
                eprintln!("error in task `{}`: {e}", task.name());
                code = code.max(exit_code(&e));
                entries.push(json!({
                    "task": task.name(),
                    "error": e.to_string(),
                    "certificate_failure": e.is_certificate_failure(),
                }));
            }
        }
    }

    if let Some(dir) = &args.csv {
        if let Err(e) = fs::create_dir_all(dir).and_then(|_| {
            exports.iter().try_for_each(|(name, m)| write_csv(&dir.join(format!("{name}.csv")), m))
        }) {
            eprintln!("error: writing CSV to {}: {e}", dir.display());
            code = code.max(EXIT_INVALID);
        }
    }

    let report = json!({
        "config": serde_json::to_value(&cfg).expect("config serializes"),
        "seed": cfg.seed,
        "tol": cfg.truncation.tol,
        "tasks": entries,
    });
    (Some(report), code)
}

pub fn run(args: &Args) -> i32 {
    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", args.config.display());
            return EXIT_INVALID;
        }
    };
    let (report, mut code) = build_report(args, &text);
    if let Some(report) = report {
        let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
        body.push('\n');
        let written = match &args.output {
            Some(path) => fs::write(path, body),
            None => std::io::stdout().write_all(body.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: writing report: {e}");
            code = code.max(EXIT_INVALID);
        }
    }
    code
}
