//! The Gram-matrix semidefinite program for `x − λ·m ⩾_R 0`.
//!
//! Every ordered pair `(i, j)` of `B(R)` contributes `P[i,j]` to exactly one
//! group element `g = b_i⁻¹·b_j`, so the linear constraints partition the
//! Gram entries. Both backends rely on that.

mod admm;
mod external;
mod sdpa;
mod solution;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use admm::solve_admm;
pub use external::{default_script_path, solve_external};
pub use sdpa::{parse_sdpa, to_sdpa, write_sdpa, SdpaEntry, SdpaProblem};
pub use solution::{NumericSolution, SolverStats, SolverStatus};

use crate::chevalley::Element;
use crate::error::{Error, Result};
use crate::groupring::RingElement;

/// Gram-matrix SDP: for every `g`, `Σ_{pairs(g)} P[i,j] + λ·m_g = x_g`,
/// `P ⪰ 0`, maximize `λ`.
#[derive(Debug, Clone)]
pub struct SosProblem {
    pub radius: usize,
    /// `|B(R)|`.
    pub n: usize,
    /// Constraint id of each ordered pair, row-major.
    pub pair_constraint: Vec<u32>,
    /// Ball index of the group element behind each constraint.
    pub constraint_element: Vec<usize>,
    /// Constraint id of the inverse element.
    pub constraint_inverse: Vec<u32>,
    /// `|pairs(g)|`.
    pub counts: Vec<u32>,
    pub target: BTreeMap<usize, BigRational>,
    pub order: BTreeMap<usize, BigRational>,
    /// `|S|`.
    pub generators: usize,
    /// Whether some generator is its own inverse.
    pub involutive_generator: bool,
}

impl SosProblem {
    pub fn num_constraints(&self) -> usize {
        self.counts.len()
    }

    /// Ordered pairs `(i, j)` with `b_i⁻¹·b_j` equal to constraint `c`.
    pub fn pairs(&self, c: usize) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n * n)
            .filter(|&k| self.pair_constraint[k] as usize == c)
            .map(|k| (k / n, k % n))
            .collect()
    }

    pub fn target_f64(&self) -> Vec<f64> {
        dense(&self.target, self.num_constraints())
    }

    pub fn order_f64(&self) -> Vec<f64> {
        dense(&self.order, self.num_constraints())
    }

    /// `Σ_g |Σ_{pairs(g)} P[i,j] − (x_g − λ·m_g)|` in floating point.
    pub fn reconstruction_residual(&self, gram: &[f64], lambda: f64) -> f64 {
        let mut s = vec![0.0; self.num_constraints()];
        for (k, &c) in self.pair_constraint.iter().enumerate() {
            s[c as usize] += gram[k];
        }
        let (x, m) = (self.target_f64(), self.order_f64());
        s.iter()
            .zip(x.iter().zip(&m))
            .map(|(s, (x, m))| (s - (x - lambda * m)).abs())
            .sum()
    }

    /// Symmetric Gram matrices can only represent self-adjoint elements.
    pub fn self_adjoint_defect(&self) -> Option<usize> {
        (0..self.num_constraints()).find(|&c| {
            let d = self.constraint_inverse[c] as usize;
            self.target.get(&c) != self.target.get(&d) || self.order.get(&c) != self.order.get(&d)
        })
    }
}

fn dense(map: &BTreeMap<usize, BigRational>, len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    for (&c, q) in map {
        v[c] = q.to_f64().unwrap_or(f64::NAN);
    }
    v
}

/// Builds the SDP for `x − λ·m` on the ball of radius `radius`.
pub fn formulate<E: Element>(x: &RingElement<E>, m: &RingElement<E>, radius: usize) -> Result<SosProblem> {
    if !Arc::ptr_eq(x.context(), m.context()) {
        return Err(Error::ContextMismatch);
    }
    let ctx = x.context();
    let ball = ctx.ball();
    if ball.radius() < 2 * radius {
        return Err(Error::Resource(format!(
            "radius {radius} needs a ball of radius {}, have {}",
            2 * radius,
            ball.radius()
        )));
    }
    for (name, e) in [("target", x), ("order element", m)] {
        if !e.augmentation().is_zero() {
            return Err(Error::Contract(format!(
                "{name} has augmentation {} and cannot be a sum of squares",
                e.augmentation()
            )));
        }
    }
    let n = ball.size_at(radius);
    let product = |i: usize, j: usize| ctx.product(ball.inverse(i), j);
    let mut raw = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            raw.push(product(i, j)?);
        }
    }
    let mut used: Vec<usize> = raw.clone();
    used.sort_unstable();
    used.dedup();
    let mut id_of = vec![u32::MAX; ball.len()];
    for (c, &g) in used.iter().enumerate() {
        id_of[g] = c as u32;
    }
    let pair_constraint: Vec<u32> = raw.iter().map(|&g| id_of[g]).collect();
    let mut counts = vec![0u32; used.len()];
    for &c in &pair_constraint {
        counts[c as usize] += 1;
    }
    let constraint_inverse = used
        .iter()
        .map(|&g| {
            let c = id_of[ball.inverse(g)];
            if c == u32::MAX {
                Err(Error::Consistency("constraint set not closed under inverse".into()))
            } else {
                Ok(c)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let restrict = |e: &RingElement<E>, name: &str| -> Result<BTreeMap<usize, BigRational>> {
        e.coeffs()
            .iter()
            .map(|(&g, q)| match id_of[g] {
                u32::MAX => Err(Error::Resource(format!(
                    "{name} has support at word length {}, outside B({})",
                    ball.word_length(g),
                    2 * radius
                ))),
                c => Ok((c as usize, q.clone())),
            })
            .collect()
    };
    let involutive_generator = ball
        .generators()
        .iter()
        .filter_map(|s| ball.index_of(s))
        .any(|k| ball.inverse(k) == k);
    Ok(SosProblem {
        radius,
        n,
        generators: ball.generators().len(),
        involutive_generator,
        pair_constraint,
        constraint_element: used,
        constraint_inverse,
        counts,
        target: restrict(x, "target")?,
        order: restrict(m, "order element")?,
    })
}

/// Which numerical backend solves the SDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// In-process ADMM with dense eigendecompositions.
    #[default]
    Native,
    /// SCS through a Python helper reading the exported problem file.
    Scs,
    /// Clarabel through the same helper; practical only for small problems.
    Clarabel,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "native" | "admm" => Ok(Backend::Native),
            "scs" => Ok(Backend::Scs),
            "clarabel" => Ok(Backend::Clarabel),
            other => Err(Error::Domain(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub backend: Backend,
    pub tolerance: f64,
    pub max_iter: usize,
    pub time_limit_sec: Option<f64>,
    /// Initial ADMM penalty.
    pub rho: f64,
    /// Solve the feasibility problem at this λ instead of maximizing λ.
    /// Far better conditioned when λ is strictly below the optimum.
    pub fixed_lambda: Option<f64>,
    pub checkpoint_path: Option<PathBuf>,
    pub checkpoint_interval_sec: f64,
    pub python: String,
    pub script: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            backend: Backend::Native,
            tolerance: 1e-9,
            max_iter: 100_000,
            time_limit_sec: None,
            rho: 1.0,
            fixed_lambda: None,
            checkpoint_path: None,
            checkpoint_interval_sec: 300.0,
            python: "python3".into(),
            script: None,
        }
    }
}

/// Solves with the configured backend. Non-convergence is reported through
/// the status; only environment failures are errors.
pub fn solve(p: &SosProblem, cfg: &SolverConfig) -> Result<NumericSolution> {
    if let Some(c) = p.self_adjoint_defect() {
        return Ok(NumericSolution::infeasible(
            p.n,
            format!("x - λm is not self-adjoint at constraint {c}, no symmetric Gram matrix exists"),
        ));
    }
    match cfg.backend {
        Backend::Native => {
            let warm = match &cfg.checkpoint_path {
                Some(path) if path.with_extension("json").exists() => Some(NumericSolution::load(path)?),
                _ => None,
            };
            solve_admm(p, cfg, warm.as_ref())
        }
        Backend::Scs | Backend::Clarabel if cfg.fixed_lambda.is_some() => Err(Error::Unsupported(
            "fixed λ is only implemented for the native backend".into(),
        )),
        Backend::Scs | Backend::Clarabel => solve_external(p, cfg),
    }
}
