use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Failed,
}

impl SolverStatus {
    pub fn is_usable(self) -> bool {
        matches!(self, SolverStatus::Optimal | SolverStatus::NearOptimal)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub backend: String,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub reconstruction_residual: f64,
    pub seconds: f64,
    /// Final ADMM penalty, needed to resume with the stored dual.
    #[serde(default)]
    pub rho: f64,
    pub message: String,
}

/// Floating-point solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSolution {
    pub lambda: f64,
    pub n: usize,
    /// Row-major symmetric Gram matrix.
    pub gram: Vec<f64>,
    pub status: SolverStatus,
    pub stats: SolverStats,
    /// Scaled ADMM dual, kept so that checkpoints resume exactly.
    pub dual: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    /// Absent when not finite.
    lambda: Option<f64>,
    n: usize,
    status: SolverStatus,
    stats: SolverStats,
    has_dual: bool,
}

impl NumericSolution {
    pub fn infeasible(n: usize, message: String) -> Self {
        NumericSolution {
            lambda: f64::NAN,
            n,
            gram: vec![0.0; n * n],
            status: SolverStatus::Infeasible,
            stats: SolverStats {
                message,
                ..SolverStats::default()
            },
            dual: None,
        }
    }

    /// Writes `<path>.json` metadata and `<path>.bin` little-endian matrices.
    pub fn dump(&self, path: &Path) -> Result<()> {
        let meta = Meta {
            lambda: self.lambda.is_finite().then_some(self.lambda),
            n: self.n,
            status: self.status,
            stats: self.stats.clone(),
            has_dual: self.dual.is_some(),
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let bin = path.with_extension("bin");
        let tmp = path.with_extension("bin.tmp");
        let mut bytes = Vec::with_capacity(8 * self.gram.len() * 2);
        for x in self.gram.iter().chain(self.dual.iter().flatten()) {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &bin).map_err(|e| Error::io(&bin, e))?;
        let json = path.with_extension("json");
        let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::format(&json, e))?;
        fs::write(&json, text).map_err(|e| Error::io(&json, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = path.with_extension("json");
        let text = fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
        let meta: Meta = serde_json::from_str(&text).map_err(|e| Error::format(&json, e))?;
        let bin = path.with_extension("bin");
        let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
        let nn = meta.n * meta.n;
        let expect = 8 * nn * if meta.has_dual { 2 } else { 1 };
        if bytes.len() != expect {
            return Err(Error::format(
                &bin,
                format!("expected {expect} bytes, found {}", bytes.len()),
            ));
        }
        let vals: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        let (gram, dual) = vals.split_at(nn);
        Ok(NumericSolution {
            lambda: meta.lambda.unwrap_or(f64::NAN),
            n: meta.n,
            gram: gram.to_vec(),
            status: meta.status,
            stats: meta.stats,
            dual: meta.has_dual.then(|| dual.to_vec()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol");
        let s = NumericSolution {
            lambda: 0.25,
            n: 2,
            gram: vec![1.0, -0.5, -0.5, 1.0],
            status: SolverStatus::NearOptimal,
            stats: SolverStats {
                iterations: 7,
                ..SolverStats::default()
            },
            dual: Some(vec![0.0, 1.0, 1.0, 0.0]),
        };
        s.dump(&path).unwrap();
        assert_eq!(NumericSolution::load(&path).unwrap(), s);
    }
}
