//! Sparse SDPA (`.dat-s`) export.
//!
//! The problem is written in SDPA's dual form `max ⟨F0, Y⟩` subject to
//! `⟨F_k, Y⟩ = c_k`, `Y ⪰ 0`, with `Y = diag(P, λ⁺, λ⁻)`. Constraints for `g`
//! and `g⁻¹` coincide on symmetric `P` and are merged into one.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_traits::ToPrimitive;

use super::SosProblem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpaEntry {
    /// 0 is the objective.
    pub matrix: usize,
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpaProblem {
    pub block_sizes: Vec<i64>,
    pub rhs: Vec<f64>,
    /// Sorted by `(matrix, block, i, j)`, upper triangle, 1-based.
    pub entries: Vec<SdpaEntry>,
}

impl SdpaProblem {
    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }
}

pub fn to_sdpa(p: &SosProblem) -> Result<SdpaProblem> {
    let n = p.n;
    let nc = p.num_constraints();
    let mut rep_id = vec![usize::MAX; nc];
    let mut reps = Vec::new();
    for c in 0..nc {
        let d = p.constraint_inverse[c] as usize;
        if c <= d {
            rep_id[c] = reps.len();
            rep_id[d] = reps.len();
            reps.push(c);
        }
    }
    let f64_of = |q: Option<&num_rational::BigRational>| -> Result<f64> {
        q.map_or(Ok(0.0), |q| {
            q.to_f64()
                .filter(|v| v.is_finite())
                .ok_or(Error::Overflow("rational to float"))
        })
    };
    let mut rhs = Vec::with_capacity(reps.len());
    let mut entries = vec![
        SdpaEntry {
            matrix: 0,
            block: 2,
            i: 1,
            j: 1,
            value: 1.0,
        },
        SdpaEntry {
            matrix: 0,
            block: 2,
            i: 2,
            j: 2,
            value: -1.0,
        },
    ];
    for (k, &c) in reps.iter().enumerate() {
        let f = if p.constraint_inverse[c] as usize == c {
            1.0
        } else {
            2.0
        };
        rhs.push(f * f64_of(p.target.get(&c))?);
        let m = f * f64_of(p.order.get(&c))?;
        if m != 0.0 {
            for (i, v) in [(1, m), (2, -m)] {
                entries.push(SdpaEntry {
                    matrix: k + 1,
                    block: 2,
                    i,
                    j: i,
                    value: v,
                });
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let c = p.pair_constraint[i * n + j] as usize;
            entries.push(SdpaEntry {
                matrix: rep_id[c] + 1,
                block: 1,
                i: i + 1,
                j: j + 1,
                value: 1.0,
            });
        }
    }
    entries.sort_by_key(|e| (e.matrix, e.block, e.i, e.j));
    Ok(SdpaProblem {
        block_sizes: vec![n as i64, -2],
        rhs,
        entries,
    })
}

pub fn render_sdpa(s: &SdpaProblem) -> String {
    let mut out = String::new();
    out.push_str("* sum of squares Gram problem, Y = diag(P, lambda+, lambda-)\n");
    let _ = writeln!(out, "{} = mDIM", s.rhs.len());
    let _ = writeln!(out, "{} = nBLOCK", s.block_sizes.len());
    let sizes: Vec<String> = s.block_sizes.iter().map(|b| b.to_string()).collect();
    let _ = writeln!(out, "{} = bLOCKsTRUCT", sizes.join(" "));
    let rhs: Vec<String> = s.rhs.iter().map(|v| format!("{v}")).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    for e in &s.entries {
        let _ = writeln!(out, "{} {} {} {} {}", e.matrix, e.block, e.i, e.j, e.value);
    }
    out
}

pub fn write_sdpa(p: &SosProblem, path: &Path) -> Result<SdpaProblem> {
    let s = to_sdpa(p)?;
    fs::write(path, render_sdpa(&s)).map_err(|e| Error::io(path, e))?;
    Ok(s)
}

pub fn parse_sdpa(path: &Path) -> Result<SdpaProblem> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |msg: &str| Error::format(path, msg);
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('*') && !l.starts_with('"'));
    let mut header = |what: &str| -> Result<Vec<String>> {
        let l = lines.next().ok_or_else(|| bad(&format!("missing {what}")))?;
        let l = l.split('=').next().unwrap_or("");
        Ok(
            l.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect(),
        )
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad(&format!("bad number {t:?}")));
    let m: usize = header("mDIM")?
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad mDIM"))?;
    let nb: usize = header("nBLOCK")?
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad nBLOCK"))?;
    let block_sizes: Vec<i64> = header("bLOCKsTRUCT")?
        .iter()
        .map(|t| t.parse().map_err(|_| bad("bad block size")))
        .collect::<Result<_>>()?;
    if block_sizes.len() != nb {
        return Err(bad("block count mismatch"));
    }
    let rhs: Vec<f64> = header("rhs")?.iter().map(|t| num(t)).collect::<Result<_>>()?;
    if rhs.len() != m {
        return Err(bad("right-hand side length mismatch"));
    }
    let mut entries = Vec::new();
    for l in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 5 {
            return Err(bad(&format!("entry line {l:?} needs 5 fields")));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad(&format!("bad index {s:?}")));
        entries.push(SdpaEntry {
            matrix: int(t[0])?,
            block: int(t[1])?,
            i: int(t[2])?,
            j: int(t[3])?,
            value: num(t[4])?,
        });
    }
    Ok(SdpaProblem {
        block_sizes,
        rhs,
        entries,
    })
}
