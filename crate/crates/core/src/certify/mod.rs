//! Rigorous bounds from floating-point Gram matrices.
//!
//! The float solution only suggests a matrix. The rounded matrix `M` is
//! proved positive definite by an interval Cholesky, the Gram matrix actually
//! used is `G = Π M Π` with `Π = I − 11ᵀ/n`, and the residual
//! `r = x − λ_r·m − Σ_g (Σ_{pairs(g)} G[i,j])·g` is computed exactly. Since
//! `1ᵀ G 1 = 0` the residual has augmentation zero by construction, and
//! `r + c_R·‖r‖₁·Δ ⩾ 0` absorbs it at the price of `c_R·‖r‖₁` in `λ`.
//! Before absorbing, the component of `r` along `m = Δ` is moved back into `λ`.

mod certificate;
mod interval;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use certificate::{Certificate, GramAttachment, Provenance, RationalString};
pub use interval::{verify_positive_definite, DefinitenessFailure, DefinitenessProof, Interval};

use crate::chevalley::Element;
use crate::error::{Error, Result};
use crate::groupring::{RingContext, RingElement};
use crate::linalg::{psd_project, sym_eigen, SymMat};
use crate::sos::{NumericSolution, SosProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    /// Gram entries are rounded to multiples of `2^-bits`.
    pub denominator_bits: u32,
    /// Relative amount by which `λ` is lowered before rounding, buying
    /// interior room for the Gram matrix.
    pub lambda_margin: f64,
    /// Eigenvalue floor for the refinement, relative to the mean diagonal.
    pub eigen_floor: f64,
    pub refine_iters: usize,
    /// Largest admissible diagonal repair `ε`.
    pub eps_cap: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            denominator_bits: 30,
            lambda_margin: 1e-2,
            eigen_floor: 1e-4,
            refine_iters: 200,
            eps_cap: 2f64.powi(-10),
        }
    }
}

fn big(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// `⌊x·2^bits⌋ / 2^bits`.
pub fn dyadic_floor(x: f64, bits: u32) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot round {x}")));
    }
    let scaled = (x * 2f64.powi(bits as i32)).floor();
    let num = BigInt::from(scaled as i128);
    Ok(BigRational::new(num, pow2(bits)))
}

/// Float-side clean-up: alternately enforces the linear constraints at the
/// fixed `lambda`, the kernel condition `P·1 = 0`, and an eigenvalue floor on
/// the complement of `1`, so that rounding cannot destroy definiteness.
pub fn refine_gram(p: &SosProblem, gram: &[f64], lambda: f64, cfg: &CertifyConfig) -> Result<Vec<f64>> {
    let n = p.n;
    let (x, m) = (p.target_f64(), p.order_f64());
    let rhs: Vec<f64> = x.iter().zip(&m).map(|(x, m)| x - lambda * m).collect();
    let mut pm = SymMat { n, data: gram.to_vec() };
    pm.symmetrize();
    let mean_diag = (0..n).map(|i| pm.get(i, i)).sum::<f64>() / n as f64;
    let floor = cfg.eigen_floor * mean_diag.abs().max(f64::MIN_POSITIVE);
    let ones = SymMat {
        n,
        data: vec![1.0; n * n],
    };
    let scale = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    for it in 0..=cfg.refine_iters {
        // alternating projections between the two affine subspaces converge
        // to their intersection
        for _ in 0..INNER_ALTERNATIONS {
            let mut s = vec![0.0; p.num_constraints()];
            for (k, &c) in p.pair_constraint.iter().enumerate() {
                s[c as usize] += pm.data[k];
            }
            let mut worst = 0.0f64;
            let corr: Vec<f64> = s
                .iter()
                .zip(&rhs)
                .zip(&p.counts)
                .map(|((s, b), &k)| {
                    worst = worst.max((b - s).abs());
                    (b - s) / k as f64
                })
                .collect();
            if worst <= 1e-14 * scale {
                break;
            }
            for (k, &c) in p.pair_constraint.iter().enumerate() {
                pm.data[k] += corr[c as usize];
            }
            pm.symmetrize();
            pm.center();
        }
        // the all-ones direction is excluded by shifting it far up
        let mut shifted = pm.clone();
        for (a, b) in shifted.data.iter_mut().zip(&ones.data) {
            *a += mean_diag.abs().max(1.0) * b;
        }
        let min = sym_eigen(&shifted)?.values[0];
        tracing::debug!(it, min, floor, "gram refinement");
        if min >= 0.5 * floor || it == cfg.refine_iters {
            break;
        }
        pm = psd_project(&pm, floor)?.0;
    }
    Ok(pm.data)
}

/// A symmetric matrix with entries in `2^-bits·ℤ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalGram {
    pub n: usize,
    pub bits: u32,
    /// Row-major numerators of `M`, including the diagonal repair and the
    /// multiple of `11ᵀ`.
    pub numerators: Vec<i64>,
    /// Numerator of the diagonal repair `ε`.
    pub eps_numerator: i64,
}

impl RationalGram {
    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.numerators[i * self.n + j].into(), pow2(self.bits))
    }

    pub fn eps(&self) -> BigRational {
        BigRational::new(self.eps_numerator.into(), pow2(self.bits))
    }

    /// Entries as floats; exact because numerators stay below `2^53`.
    pub fn to_f64(&self) -> Vec<f64> {
        let s = 2f64.powi(-(self.bits as i32));
        self.numerators.iter().map(|&v| v as f64 * s).collect()
    }

    pub fn verify_psd(&self) -> bool {
        verify_positive_definite(&self.to_f64(), self.n).is_ok()
    }

    pub fn upper_triangle(&self) -> Vec<i64> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| self.numerators[i * n + j])
            .collect()
    }

    pub fn from_upper_triangle(n: usize, bits: u32, upper: &[i64], eps_numerator: i64) -> Result<Self> {
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::Domain(format!(
                "{} upper-triangle entries do not fit size {n}",
                upper.len()
            )));
        }
        let mut numerators = vec![0i64; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i..n {
                let v = *it.next().expect("length checked");
                numerators[i * n + j] = v;
                numerators[j * n + i] = v;
            }
        }
        Ok(RationalGram {
            n,
            bits,
            numerators,
            eps_numerator,
        })
    }
}

const MAX_EXACT: i64 = 1 << 52;
const INNER_ALTERNATIONS: usize = 5000;

/// Rounds to `2^-bits·ℤ`, symmetrizes, and adds the smallest `ε·I`
/// (`ε = 0` or a power of two, at least `2^-bits`) for which the interval
/// Cholesky succeeds. With `ones_shift`, a multiple of `11ᵀ` is added first;
/// it does not change `Π M Π` but lifts the kernel direction of a centered
/// matrix.
pub fn rationalize(gram: &[f64], n: usize, bits: u32, ones_shift: bool, eps_cap: f64) -> Result<RationalGram> {
    if gram.len() != n * n {
        return Err(Error::Domain("Gram matrix has the wrong size".into()));
    }
    let scale = 2f64.powi(bits as i32);
    let mut num = vec![0i64; n * n];
    for i in 0..n {
        for j in i..n {
            let v = (0.5 * (gram[i * n + j] + gram[j * n + i]) * scale).round();
            if !v.is_finite() || v.abs() >= MAX_EXACT as f64 {
                return Err(Error::Overflow("Gram rounding"));
            }
            num[i * n + j] = v as i64;
            num[j * n + i] = v as i64;
        }
    }
    if ones_shift {
        let trace: i64 = (0..n).map(|i| num[i * n + i]).sum();
        let tau = (trace / (n * n) as i64).max(1);
        num.iter_mut().for_each(|v| *v += tau);
    }
    let with_eps = |e: i64| {
        let mut g = RationalGram {
            n,
            bits,
            numerators: num.clone(),
            eps_numerator: e,
        };
        for i in 0..n {
            g.numerators[i * n + i] += e;
        }
        g
    };
    let base = with_eps(0);
    if base.verify_psd() {
        return Ok(base);
    }
    // ε = 2^(e - bits), e = 0..=top; success is monotone in ε
    let top = ((eps_cap * scale).log2().floor() as i64).clamp(0, 62) as u32;
    let ok = |e: u32| with_eps(1i64 << e).verify_psd();
    if !ok(top) {
        return Err(Error::Certification(format!(
            "no diagonal repair up to {eps_cap:e} makes the rounded Gram matrix verifiably positive definite"
        )));
    }
    if ok(0) {
        return Ok(with_eps(1));
    }
    // invariant: fails at lo, succeeds at hi
    let (mut lo, mut hi) = (0u32, top);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(with_eps(1i64 << hi))
}

/// Exact residual per constraint of `G = Π M Π`, zero entries omitted.
pub fn exact_residual(p: &SosProblem, g: &RationalGram, lambda: &BigRational) -> Result<Vec<(usize, BigRational)>> {
    let n = p.n;
    if g.n != n {
        return Err(Error::Domain(format!("Gram size {} for problem size {n}", g.n)));
    }
    let row: Vec<i128> = (0..n)
        .map(|i| g.numerators[i * n..(i + 1) * n].iter().map(|&v| v as i128).sum())
        .collect();
    let total: i128 = row.iter().sum();
    let nn = n as i128;
    // n²·2^bits·G[i,j] = n²M[i,j] − n(row_i + row_j) + total, in numerator units
    let mut sums = vec![0i128; p.num_constraints()];
    for i in 0..n {
        for j in 0..n {
            let h = nn * nn * g.numerators[i * n + j] as i128 - nn * (row[i] + row[j]) + total;
            let c = p.pair_constraint[i * n + j] as usize;
            sums[c] = sums[c].checked_add(h).ok_or(Error::Overflow("exact residual"))?;
        }
    }
    let den = BigInt::from(nn * nn) * pow2(g.bits);
    let mut out = Vec::new();
    for (c, s) in sums.into_iter().enumerate() {
        let x = p.target.get(&c).cloned().unwrap_or_else(BigRational::zero);
        let m = p.order.get(&c).cloned().unwrap_or_else(BigRational::zero);
        let r = x - lambda * m - BigRational::new(BigInt::from(s), den.clone());
        if !r.is_zero() {
            out.push((c, r));
        }
    }
    let aug: BigRational = out.iter().map(|(_, r)| r).sum();
    if !aug.is_zero() {
        return Err(Error::Consistency(format!("residual augmentation {aug} is not zero")));
    }
    Ok(out)
}

/// The residual as a group-ring element.
pub fn residual_element<E: Element>(
    ctx: &Arc<RingContext<E>>,
    p: &SosProblem,
    r: &[(usize, BigRational)],
) -> RingElement<E> {
    RingElement::from_terms(ctx, r.iter().map(|(c, v)| (p.constraint_element[*c], v.clone())))
}

/// `c_R = 2R²·κ_S` with `κ_S = 1`, or `2` when some generator is an
/// involution.
///
/// For self-adjoint `r` with zero augmentation,
/// `r = −½ Σ_g r_g (1−g)*(1−g)`. Writing `g` as a word of length `ℓ ⩽ 2R`
/// and telescoping, `(1−g)*(1−g) ⩽ ℓ Σ_j (1−s_j)*(1−s_j) ⩽ κ_S ℓ² Δ`, hence
/// `r + ½κ_S(2R)²‖r‖₁Δ ⩾ 0`. For `R = 1` without involutions this is the
/// familiar `2^{2k−1}` with `2^k = 2R`.
pub fn domination_constant(radius: usize, involutive_generator: bool) -> BigRational {
    let kappa = if involutive_generator { 2 } else { 1 };
    big(2 * (radius * radius) as i128 * kappa)
}

/// `c·‖r‖₁`, after checking the hypotheses of the domination bound.
pub fn dominate<E: Element>(r: &RingElement<E>, radius: usize, c: &BigRational) -> Result<BigRational> {
    if !r.augmentation().is_zero() {
        return Err(Error::Contract(format!(
            "residual augmentation {} is not zero",
            r.augmentation()
        )));
    }
    if !r.is_self_adjoint() {
        return Err(Error::Contract("residual is not self-adjoint".into()));
    }
    if r.support_radius() > 2 * radius {
        return Err(Error::Contract(format!(
            "residual support radius {} exceeds {}",
            r.support_radius(),
            2 * radius
        )));
    }
    Ok(c * r.l1_norm())
}

/// `√(2λ/|S|)`, rounded down.
pub fn kappa_lower_bound(lambda: &BigRational, s_size: usize) -> f64 {
    if !lambda.is_positive() || s_size == 0 {
        return 0.0;
    }
    let q = lambda * big(2) / big(s_size as i128);
    let exact = |f: f64| BigRational::from_float(f).expect("finite");
    let mut qf = q.to_f64().unwrap_or(f64::MAX);
    while exact(qf) > q {
        qf = qf.next_down();
    }
    let mut s = qf.sqrt();
    while s > 0.0 && exact(s) * exact(s) > q {
        s = s.next_down();
    }
    s
}

/// Maximizes `t − c‖r − t·m‖₁` over `t`. The objective is concave and
/// piecewise linear with kinks at `r_g/m_g`, so those and `0` suffice. Any `t`
/// is sound: `r − t·m` is still self-adjoint with zero augmentation. This
/// makes lowering `λ_r` harmless, since the lost part of `λ·m` is recovered.
fn best_shift(p: &SosProblem, r: &[(usize, BigRational)], c: &BigRational) -> (BigRational, BigRational) {
    let rmap: BTreeMap<usize, &BigRational> = r.iter().map(|(k, v)| (*k, v)).collect();
    let l1_at = |t: &BigRational| -> BigRational {
        let shifted: BigRational = p
            .order
            .iter()
            .map(|(k, m)| (rmap.get(k).map_or_else(BigRational::zero, |v| (*v).clone()) - t * m).abs())
            .sum();
        let rest: BigRational = r
            .iter()
            .filter(|(k, _)| !p.order.contains_key(k))
            .map(|(_, v)| v.abs())
            .sum();
        shifted + rest
    };
    let zero = BigRational::zero();
    let mut best = (zero.clone(), l1_at(&zero));
    let mut best_value = -(c * &best.1);
    for (k, m) in &p.order {
        if m.is_zero() {
            continue;
        }
        let t = rmap.get(k).map_or_else(BigRational::zero, |v| (*v).clone()) / m;
        let l1 = l1_at(&t);
        let value = &t - c * &l1;
        if value > best_value {
            best_value = value;
            best = (t, l1);
        }
    }
    best
}

/// The exact part of certification, shared by fresh runs and replay.
#[derive(Debug, Clone, PartialEq)]
pub struct Verified {
    pub lambda_rounded: BigRational,
    /// `t` with `x − (λ_r + t)·m − Σ G = r − t·m`; chosen to maximize the bound.
    pub lambda_shift: BigRational,
    /// `‖r − t·m‖₁`.
    pub residual_l1: BigRational,
    pub domination_constant: BigRational,
    pub lambda_certified: BigRational,
    pub residual_terms: usize,
}

pub fn verify(p: &SosProblem, g: &RationalGram, lambda_rounded: &BigRational) -> Result<Verified> {
    if let Some(c) = p.self_adjoint_defect() {
        return Err(Error::Contract(format!("target is not self-adjoint at constraint {c}")));
    }
    if let Err(f) = verify_positive_definite(&g.to_f64(), g.n) {
        return Err(Error::Certification(format!(
            "Gram matrix not verifiably positive definite: {f:?}"
        )));
    }
    let r = exact_residual(p, g, lambda_rounded)?;
    let c = domination_constant(p.radius, p.involutive_generator);
    let (t, l1) = best_shift(p, &r, &c);
    let lambda_certified = lambda_rounded + &t - &c * &l1;
    Ok(Verified {
        lambda_rounded: lambda_rounded.clone(),
        lambda_shift: t,
        residual_l1: l1,
        domination_constant: c,
        lambda_certified,
        residual_terms: r.len(),
    })
}

#[derive(Debug, Clone)]
pub struct CertifiedBound {
    pub verified: Verified,
    pub gram: RationalGram,
    pub kappa_lower_bound: f64,
}

/// Full float-to-exact pipeline for one solution.
pub fn certify(p: &SosProblem, sol: &NumericSolution, cfg: &CertifyConfig) -> Result<CertifiedBound> {
    if !sol.status.is_usable() {
        return Err(Error::Certification(format!(
            "solver status {:?} cannot be certified: {}",
            sol.status, sol.stats.message
        )));
    }
    if sol.n != p.n {
        return Err(Error::Domain("solution does not match the problem".into()));
    }
    let target = sol.lambda - cfg.lambda_margin * sol.lambda.abs();
    let lambda_rounded = dyadic_floor(target, cfg.denominator_bits)?;
    let lambda_f = lambda_rounded.to_f64().expect("dyadic");
    let refined = refine_gram(p, &sol.gram, lambda_f, cfg)?;
    let gram = rationalize(&refined, p.n, cfg.denominator_bits, true, cfg.eps_cap)?;
    let verified = verify(p, &gram, &lambda_rounded)?;
    if verified.lambda_certified.is_negative() {
        return Err(Error::Certification(format!(
            "residual deduction {} exceeds λ = {}",
            (&verified.domination_constant * &verified.residual_l1)
                .to_f64()
                .unwrap_or(f64::NAN),
            lambda_f
        )));
    }
    let kappa = kappa_lower_bound(&verified.lambda_certified, p.generators);
    tracing::info!(
        lambda = lambda_f,
        certified = verified.lambda_certified.to_f64().unwrap_or(f64::NAN),
        residual_l1 = verified.residual_l1.to_f64().unwrap_or(f64::NAN),
        eps = gram.eps().to_f64().unwrap_or(f64::NAN),
        "certified"
    );
    Ok(CertifiedBound {
        verified,
        gram,
        kappa_lower_bound: kappa,
    })
}
