use std::time::Instant;

use super::solution::{NumericSolution, SolverStats, SolverStatus};
use super::{SolverConfig, SosProblem};
use crate::error::{Error, Result};
use crate::linalg::{psd_project, SymMat};

const RELAXATION: f64 = 1.6;
const RHO_BALANCE: f64 = 10.0;
const RHO_EVERY: usize = 20;
const NEAR_OPTIMAL: f64 = 1e-5;

struct Affine<'a> {
    p: &'a SosProblem,
    x: Vec<f64>,
    m: Vec<f64>,
    inv_k: Vec<f64>,
    mm: f64,
    fixed: Option<f64>,
}

impl Affine<'_> {
    /// Projects `v` onto `{(P, λ)}` satisfying the constraints while
    /// minimizing `−λ + ρ/2·‖P − v‖²`; returns `λ`.
    fn project(&self, v: &[f64], rho: f64, out: &mut [f64]) -> f64 {
        let mut d = self.x.clone();
        for (k, &c) in self.p.pair_constraint.iter().enumerate() {
            d[c as usize] -= v[k];
        }
        let md: f64 = d
            .iter()
            .zip(&self.m)
            .zip(&self.inv_k)
            .map(|((d, m), k)| d * m * k)
            .sum();
        let lambda = self.fixed.unwrap_or((md + 1.0 / rho) / self.mm);
        let corr: Vec<f64> = d
            .iter()
            .zip(&self.m)
            .zip(&self.inv_k)
            .map(|((d, m), k)| (d - lambda * m) * k)
            .collect();
        for (k, &c) in self.p.pair_constraint.iter().enumerate() {
            out[k] = v[k] + corr[c as usize];
        }
        lambda
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Douglas–Rachford splitting between the affine constraint set (with the
/// linear objective folded into its proximal step) and the PSD cone.
pub fn solve_admm(p: &SosProblem, cfg: &SolverConfig, warm: Option<&NumericSolution>) -> Result<NumericSolution> {
    let start = Instant::now();
    let (x, m) = (p.target_f64(), p.order_f64());
    let scale = x
        .iter()
        .chain(&m)
        .fold(0.0f64, |a, v| a.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let inv_k: Vec<f64> = p.counts.iter().map(|&k| 1.0 / k as f64).collect();
    let xs: Vec<f64> = x.iter().map(|v| v / scale).collect();
    let ms: Vec<f64> = m.iter().map(|v| v / scale).collect();
    let mm: f64 = ms.iter().zip(&inv_k).map(|(m, k)| m * m * k).sum();
    if mm == 0.0 {
        return Err(Error::Domain("order element is zero".into()));
    }
    let aff = Affine {
        p,
        x: xs,
        m: ms,
        inv_k,
        mm,
        fixed: cfg.fixed_lambda,
    };
    let n = p.n;
    let mut z = SymMat::zeros(n);
    let mut u = vec![0.0; n * n];
    if let Some(w) = warm {
        if w.n != n {
            return Err(Error::Domain(format!("warm start has size {}, problem has {n}", w.n)));
        }
        z.data = w.gram.iter().map(|v| v / scale).collect();
        if let Some(d) = &w.dual {
            u.clone_from(d);
        }
        tracing::info!(lambda = w.lambda, "resuming from checkpoint");
    }
    // the objective pushes λ by 1/(ρ·mm) per step, so ρ is measured in units of 1/mm
    let mut rho = warm.map(|w| w.stats.rho).filter(|&r| r > 0.0).unwrap_or(cfg.rho / mm);
    let mut lambda = 0.0;
    let mut pm = vec![0.0; n * n];
    let mut v = vec![0.0; n * n];
    let mut w = SymMat::zeros(n);
    let (mut r_p, mut r_d) = (f64::INFINITY, f64::INFINITY);
    let mut last_checkpoint = Instant::now();
    let mut last_log = Instant::now();
    let mut status = SolverStatus::Failed;
    let mut message = String::from("iteration limit reached");
    let mut iter = 0;
    while iter < cfg.max_iter {
        iter += 1;
        for k in 0..n * n {
            v[k] = z.data[k] - u[k];
        }
        lambda = aff.project(&v, rho, &mut pm);
        for k in 0..n * n {
            w.data[k] = RELAXATION * pm[k] + (1.0 - RELAXATION) * z.data[k] + u[k];
        }
        w.symmetrize();
        // the constraints force P·1 = 0; the cone {P ⪰ 0, P·1 = 0} restores
        // strict feasibility that the full PSD cone lacks
        let mut wc = w.clone();
        wc.center();
        let (z_new, _) = psd_project(&wc, 0.0)?;
        for k in 0..n * n {
            u[k] = w.data[k] - z_new.data[k];
        }
        r_p = dist(&pm, &z_new.data);
        r_d = rho * dist(&z_new.data, &z.data);
        z = z_new;
        if !lambda.is_finite() || lambda.abs() > 1e12 {
            message = "λ diverged; the problem is probably infeasible".into();
            break;
        }
        let rel_p = r_p / norm(&pm).max(z.frobenius()).max(f64::MIN_POSITIVE);
        let rel_d = r_d / (rho * norm(&u)).max(f64::MIN_POSITIVE);
        if rel_p <= cfg.tolerance && rel_d <= cfg.tolerance {
            status = SolverStatus::Optimal;
            message = "converged".into();
            break;
        }
        if iter % RHO_EVERY == 0 {
            // relative residuals, so that ρ is not driven by units
            let ratio = rel_p / rel_d.max(f64::MIN_POSITIVE);
            let factor = if ratio > RHO_BALANCE {
                2.0
            } else if ratio < 1.0 / RHO_BALANCE {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                u.iter_mut().for_each(|x| *x /= factor);
            }
        }
        if last_log.elapsed().as_secs_f64() > 10.0 {
            tracing::info!(iter, lambda, r_p, r_d, rho, "admm progress");
            last_log = Instant::now();
        }
        if let Some(path) = &cfg.checkpoint_path {
            if last_checkpoint.elapsed().as_secs_f64() > cfg.checkpoint_interval_sec {
                snapshot(&z, &u, lambda, scale, iter, r_p, r_d, &start, rho, SolverStatus::Failed).dump(path)?;
                last_checkpoint = Instant::now();
            }
        }
        if cfg.time_limit_sec.is_some_and(|t| start.elapsed().as_secs_f64() > t) {
            message = "time limit reached".into();
            break;
        }
    }
    if status == SolverStatus::Failed && lambda.is_finite() && r_p <= NEAR_OPTIMAL * z.frobenius().max(1.0) {
        status = SolverStatus::NearOptimal;
    }
    let mut sol = snapshot(&z, &u, lambda, scale, iter, r_p, r_d, &start, rho, status);
    sol.stats.reconstruction_residual = p.reconstruction_residual(&sol.gram, lambda);
    sol.stats.message = message;
    if let Some(path) = &cfg.checkpoint_path {
        sol.dump(path)?;
    }
    tracing::info!(
        iter,
        lambda,
        r_p,
        r_d,
        status = ?sol.status,
        seconds = sol.stats.seconds,
        "admm finished"
    );
    Ok(sol)
}

#[allow(clippy::too_many_arguments)]
fn snapshot(
    z: &SymMat,
    u: &[f64],
    lambda: f64,
    scale: f64,
    iter: usize,
    r_p: f64,
    r_d: f64,
    start: &Instant,
    rho: f64,
    status: SolverStatus,
) -> NumericSolution {
    NumericSolution {
        lambda,
        n: z.n,
        gram: z.data.iter().map(|v| v * scale).collect(),
        status,
        stats: SolverStats {
            backend: "native-admm".into(),
            iterations: iter,
            primal_residual: if r_p.is_finite() { r_p * scale } else { -1.0 },
            dual_residual: if r_d.is_finite() { r_d * scale } else { -1.0 },
            reconstruction_residual: 0.0,
            rho,
            seconds: start.elapsed().as_secs_f64(),
            message: String::new(),
        },
        dual: Some(u.to_vec()),
    }
}
