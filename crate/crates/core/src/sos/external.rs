//! Out-of-process backends: the problem goes through an SDPA file to a Python
//! helper that drives SCS or Clarabel.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde::Deserialize;

use super::sdpa::write_sdpa;
use super::solution::{NumericSolution, SolverStats, SolverStatus};
use super::{Backend, SolverConfig, SosProblem};
use crate::error::{Error, Result};

pub fn default_script_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scripts/sdpa_scs.py")
}

#[derive(Deserialize)]
struct HelperOutput {
    status: String,
    lambda: Option<f64>,
    n: usize,
    iterations: Option<usize>,
    message: Option<String>,
}

pub fn solve_external(p: &SosProblem, cfg: &SolverConfig) -> Result<NumericSolution> {
    let start = Instant::now();
    let solver = match cfg.backend {
        Backend::Scs => "scs",
        Backend::Clarabel => "clarabel",
        Backend::Native => return Err(Error::Domain("native backend is not external".into())),
    };
    let script = cfg.script.clone().unwrap_or_else(default_script_path);
    if !script.exists() {
        return Err(Error::SolverEnvironment(format!(
            "helper script {} not found",
            script.display()
        )));
    }
    let tmp = tempfile::tempdir().map_err(|e| Error::io(&std::env::temp_dir(), e))?;
    let dir = tmp.path();
    let input = dir.join("problem.dat-s");
    let output = dir.join("solution");
    write_sdpa(p, &input)?;
    let run = Command::new(&cfg.python)
        .arg(&script)
        .arg(&input)
        .arg(&output)
        .arg("--solver")
        .arg(solver)
        .arg("--tol")
        .arg(format!("{}", cfg.tolerance))
        .arg("--max-iter")
        .arg(cfg.max_iter.to_string())
        .output()
        .map_err(|e| Error::SolverEnvironment(format!("cannot run {}: {e}", cfg.python)))?;
    if !run.status.success() {
        return Err(Error::SolverEnvironment(format!(
            "{solver} helper failed: {}",
            String::from_utf8_lossy(&run.stderr).trim()
        )));
    }
    let json = output.with_extension("json");
    let text = fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
    let out: HelperOutput = serde_json::from_str(&text).map_err(|e| Error::format(&json, e))?;
    if out.n != p.n {
        return Err(Error::format(&json, format!("size {} != {}", out.n, p.n)));
    }
    let status = match out.status.as_str() {
        "optimal" => SolverStatus::Optimal,
        "near_optimal" => SolverStatus::NearOptimal,
        "infeasible" => SolverStatus::Infeasible,
        _ => SolverStatus::Failed,
    };
    let bin = output.with_extension("bin");
    let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
    if bytes.len() != 8 * p.n * p.n {
        return Err(Error::format(&bin, "Gram block has the wrong size"));
    }
    let gram: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let lambda = out.lambda.unwrap_or(f64::NAN);
    Ok(NumericSolution {
        lambda,
        n: p.n,
        stats: SolverStats {
            backend: solver.into(),
            iterations: out.iterations.unwrap_or(0),
            reconstruction_residual: p.reconstruction_residual(&gram, lambda),
            seconds: start.elapsed().as_secs_f64(),
            message: out.message.unwrap_or_default(),
            ..SolverStats::default()
        },
        gram,
        status,
        dual: None,
    })
}
