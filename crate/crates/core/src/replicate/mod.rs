//! Family-wide witnesses assembled from per-plane constants, and the
//! regenerated bound tables.
//!
//! Every λ is exact; κ = √(2λ/|S|) is only evaluated in floating point for
//! display and comparison.

mod constants;
mod tables;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use constants::{format_rational, parse_rational, Constant, ConstantSet, Source, Statement, DEFAULT_CONSTANTS};
pub use tables::{reference_kappa, render_tables, Annotation, CrossoverRow, Report, ReportOptions, Row, TableId};

use crate::elements::lemma_constant;
use crate::error::{Error, Result};
use crate::rootsys::{weyl_order, Family, PlaneCensus, PlaneType, RootSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MainThm,
    Corollary,
    Levels,
    Direct,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MainThm => "main_thm",
            Method::Corollary => "corollary",
            Method::Levels => "levels",
            Method::Direct => "direct",
        }
    }
}

/// A witness `Δ² − λΔ ⩾_R 0` for one group, with its Kazhdan bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyBound {
    pub family: Family,
    pub rank: usize,
    pub radius: usize,
    #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
    pub lambda: BigRational,
    pub s_size: usize,
    pub kappa_lb: f64,
    pub method: Method,
    /// How λ was combined from the constants, e.g. `3*Adj[C2] + 4*Adj[A2]`.
    pub formula: String,
    pub sources: Vec<Source>,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(serde::de::Error::custom)
}

/// `√(2λ/|S|)`.
pub fn kappa(lambda: &BigRational, s_size: usize) -> f64 {
    let l = lambda.to_f64().unwrap_or(f64::NAN);
    (2.0 * l / s_size as f64).sqrt()
}

impl FamilyBound {
    fn new(
        rs: &RootSystem,
        radius: usize,
        lambda: BigRational,
        method: Method,
        formula: String,
        sources: Vec<Source>,
    ) -> Self {
        let s_size = rs.generator_count();
        FamilyBound {
            family: rs.family(),
            rank: rs.rank(),
            radius,
            kappa_lb: kappa(&lambda, s_size),
            lambda,
            s_size,
            method,
            formula,
            sources,
        }
    }
}

/// Incidence `root ↦ {plane type ↦ count}`. Type B is computed on the dual
/// type C system and pulled back along `α ↦ α^∨`; duality maps every
/// irreducible plane to one of the same type.
pub fn incidence_table(rs: &RootSystem) -> Result<Vec<BTreeMap<PlaneType, usize>>> {
    if rs.family() != Family::B {
        let census = PlaneCensus::new(rs)?;
        return Ok((0..rs.len()).map(|a| census.incidence(a)).collect());
    }
    let dual = rs.dual()?;
    let census = PlaneCensus::new(&dual)?;
    (0..rs.len())
        .map(|a| {
            let x = rs.root(a).coords();
            let image = (0..dual.len()).find(|&b| {
                let y = dual.root(b).coords();
                let parallel = (0..x.len()).all(|i| (0..x.len()).all(|j| x[i] * y[j] == x[j] * y[i]));
                parallel && x.iter().zip(y).map(|(p, q)| p * q).sum::<i64>() > 0
            });
            image
                .map(|b| census.incidence(b))
                .ok_or_else(|| Error::Consistency(format!("root {x:?} has no coroot")))
        })
        .collect()
}

/// `λ = min_α Σ_{W ∋ α} λ_{type(W)}` and `R = max R_W` over the types used.
pub fn assemble_main(rs: &RootSystem, constants: &BTreeMap<PlaneType, Constant>) -> Result<FamilyBound> {
    for (t, c) in constants {
        if c.statement != (Statement::Adj { plane: *t }) {
            return Err(Error::Domain(format!(
                "constant {} supplied for plane type {t}",
                c.statement
            )));
        }
    }
    let positive = |t: &PlaneType| constants.get(t).is_some_and(|c| c.lambda.is_positive());
    let incidence = incidence_table(rs)?;
    let mut best: Option<(BigRational, &BTreeMap<PlaneType, usize>)> = None;
    for (a, inc) in incidence.iter().enumerate() {
        let sum = inc
            .iter()
            .filter(|(t, _)| positive(t))
            .fold(BigRational::zero(), |acc, (t, &k)| {
                acc + &constants[t].lambda * BigRational::from_integer(BigInt::from(k))
            });
        if sum.is_zero() {
            return Err(Error::Domain(format!(
                "hypothesis violated: root {:?} of {}{} lies in no plane with a positive constant",
                rs.root(a).coords(),
                rs.family(),
                rs.rank()
            )));
        }
        if best.as_ref().is_none_or(|(b, _)| sum < *b) {
            best = Some((sum, inc));
        }
    }
    let (lambda, inc) = best.ok_or_else(|| Error::Domain("empty root system".into()))?;
    let used: Vec<PlaneType> = incidence
        .iter()
        .flat_map(|inc| inc.iter().filter(|(t, &k)| k > 0 && positive(t)).map(|(t, _)| *t))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let radius = used.iter().map(|t| constants[t].radius).max().unwrap_or(1);
    let formula = inc
        .iter()
        .filter(|(t, &k)| k > 0 && positive(t))
        .map(|(t, k)| format!("{k}*{}", constants[t].statement))
        .collect::<Vec<_>>()
        .join(" + ");
    let sources = used.iter().map(|t| constants[t].source.clone()).collect();
    Ok(FamilyBound::new(rs, radius, lambda, Method::MainThm, formula, sources))
}

/// `λ = γ(Ω)·λ_min` for irreducible Ω of rank at least two.
pub fn assemble_corollary(rs: &RootSystem, lambda_min: &Constant) -> Result<FamilyBound> {
    if rs.rank() < 2 {
        return Err(Error::Domain(format!(
            "{}{} has rank below 2 and no admissible planes",
            rs.family(),
            rs.rank()
        )));
    }
    if lambda_min.lambda.is_negative() {
        return Err(Error::Domain("negative plane constant".into()));
    }
    let gamma = PlaneCensus::new(rs)?.gamma();
    if gamma == 0 {
        return Err(Error::Domain(format!(
            "{}{} is reducible: some root lies in no irreducible plane",
            rs.family(),
            rs.rank()
        )));
    }
    let lambda = &lambda_min.lambda * BigRational::from_integer(BigInt::from(gamma));
    let formula = format!("{gamma}*{}", lambda_min.statement);
    Ok(FamilyBound::new(
        rs,
        lambda_min.radius,
        lambda,
        Method::Corollary,
        formula,
        vec![lambda_min.source.clone()],
    ))
}

/// Whether a group-ring element is known to be a sum of Hermitian squares,
/// and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SosStatus {
    Established { reason: String },
    NotEstablished { reason: String },
}

impl SosStatus {
    pub fn is_established(&self) -> bool {
        matches!(self, SosStatus::Established { .. })
    }
}

/// One orbit-sum step: `Σ_w x^w = total·X`, and `total / divisor = quotient`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStep {
    pub term: String,
    pub total: u128,
    pub quotient: u128,
    /// The coefficient the closed form predicts.
    pub expected: u128,
}

/// Replay of the argument from the C₃ level inequality to `Cₙ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelsTrace {
    pub n: usize,
    /// `3·2ⁿ·(n−3)!`.
    pub divisor: u128,
    pub steps: Vec<OrbitStep>,
    /// `(coefficient of Lev₂, of Lev₃, of λΔ)` after bounding the Δ_α sums
    /// below by their smallest coefficient.
    pub inequality: (u128, u128, u128),
    pub identities_hold: bool,
    pub lev3: SosStatus,
    pub lev4: SosStatus,
    /// Whether `Δ² − λΔ ⩾_2 0` follows, which needs both statuses.
    pub delta_sq_follows: bool,
}

fn long_short_counts(rs: &RootSystem) -> (u128, u128) {
    let long = (0..rs.len()).filter(|&a| rs.is_long(a)).count() as u128;
    (long, rs.len() as u128 - long)
}

/// Root subgroups `X_α`, `X_β` (α ≠ ±β) commute iff no `iα + jβ` with
/// `i, j ⩾ 1` is a root. Root strings have length at most 3.
fn subgroups_commute(rs: &RootSystem, a: usize, b: usize) -> bool {
    let (x, y) = (rs.root(a).coords(), rs.root(b).coords());
    (1..=3i64).all(|i| {
        (1..=3i64).all(|j| {
            let v: Vec<i64> = x.iter().zip(y).map(|(p, q)| i * p + j * q).collect();
            rs.index_of(&v).is_none()
        })
    })
}

/// For each plane of type `t` in `Cₙ`, whether the root subgroups of its
/// root pairs commute. Returns `(checked pairs, failing pairs)`.
fn commuting_pairs(n: usize, t: PlaneType) -> Result<(usize, Vec<(Vec<i64>, Vec<i64>)>)> {
    let rs = RootSystem::build(Family::C, n)?;
    let census = PlaneCensus::new(&rs)?;
    let (mut checked, mut failing) = (0, Vec::new());
    for p in census.planes().iter().filter(|p| p.plane_type == t) {
        for &a in &p.member_roots {
            for &b in &p.member_roots {
                if a < b && !rs.proportional(a, b) {
                    checked += 1;
                    if !subgroups_commute(&rs, a, b) {
                        failing.push((rs.root(a).coords().to_vec(), rs.root(b).coords().to_vec()));
                    }
                }
            }
        }
    }
    Ok((checked, failing))
}

fn adj_status(n: usize, t: PlaneType) -> Result<SosStatus> {
    let (checked, failing) = commuting_pairs(n, t)?;
    Ok(match (checked, failing.first()) {
        (0, _) => SosStatus::Established {
            reason: format!("no {t} planes in C{n}; the element is zero"),
        },
        (_, None) => SosStatus::Established {
            reason: format!(
                "all {checked} root pairs of {t} planes in C{n} have commuting root subgroups, \
                 so each Δ_αΔ_β + Δ_βΔ_α is a product of commuting squares"
            ),
        },
        (_, Some((a, b))) => SosStatus::NotEstablished {
            reason: format!(
                "{} of {checked} orthogonal root pairs of {t} planes in C{n} have non-commuting \
                 root subgroups (e.g. {a:?}, {b:?}); the commutation argument does not apply",
                failing.len()
            ),
        },
    })
}

/// Transfers `Lev₂³ + Lev₃³ − λΔ ⩾_2 0` to `Cₙ`, replaying every
/// coefficient from orbit counts.
pub fn assemble_levels(n: usize, constants: &ConstantSet) -> Result<(FamilyBound, LevelsTrace)> {
    if n < 3 {
        return Err(Error::Domain(format!("the level argument needs n >= 3, got {n}")));
    }
    let c3 = constants
        .get(Statement::Levels23, 2)
        .ok_or_else(|| Error::Domain("missing C3 level constant at R = 2".into()))?;
    let fact = |k: usize| (1..=k as u128).product::<u128>();
    let divisor = 3 * (1u128 << n) * fact(n - 3);

    let c3_sys = RootSystem::build(Family::C, 3)?;
    let cn_sys = RootSystem::build(Family::C, n)?;
    let (l3, s3) = long_short_counts(&c3_sys);
    let (ln, sn) = long_short_counts(&cn_sys);
    let w = weyl_order(Family::C, n)?;
    let nn = n as u128;
    let steps = vec![
        ("Lev2", lemma_constant(n, 3, 2)?, 2 * (nn - 2)),
        ("Lev3", lemma_constant(n, 3, 3)?, 2),
        // each root of the orbit is hit |W|·|Ω₃ ∩ orbit| / |orbit| times
        ("Δ_long", w * l3 / ln, (nn - 1) * (nn - 2)),
        ("Δ_short", w * s3 / sn, 2 * (nn - 2)),
    ];
    let mut identities_hold = true;
    let steps: Vec<OrbitStep> = steps
        .into_iter()
        .map(|(term, total, expected)| {
            identities_hold &= total % divisor == 0 && total / divisor == expected;
            OrbitStep {
                term: term.into(),
                total,
                quotient: total / divisor,
                expected,
            }
        })
        .collect();
    let (q2, q3, ql, qs) = (
        steps[0].quotient,
        steps[1].quotient,
        steps[2].quotient,
        steps[3].quotient,
    );
    let q_delta = ql.min(qs);
    // λ·(ql Σ_long + qs Σ_short) ⩾ λ·min(ql, qs)·Δ since every Δ_α ⩾ 0
    let inequality = (q2, q3, q_delta);

    let a2 = constants.get(Statement::Adj { plane: PlaneType::A2 }, 2);
    let lev3 = match (a2, adj_status(3, PlaneType::A1xC1)?) {
        (Some(c), SosStatus::Established { reason }) if c.lambda.is_positive() => SosStatus::Established {
            reason: format!("Adj_A2 ⩾ {}·Δ_A2 ⩾ 0 on radius 2; {reason}", format_rational(&c.lambda)),
        },
        (None, _) => SosStatus::NotEstablished {
            reason: "no positive A2 constant at R = 2".into(),
        },
        (_, other) => other,
    };
    let lev4 = adj_status(n, PlaneType::A1xA1)?;
    if !lev3.is_established() || q3 > q2 || q2 == 0 {
        return Err(Error::Domain(format!("the level argument does not close for n = {n}")));
    }
    // add (q2 − q3)·Lev₃ and divide by q2
    let lambda = &c3.lambda * BigRational::new(BigInt::from(q_delta), BigInt::from(q2));
    let delta_sq_follows = identities_hold && lev4.is_established();
    let trace = LevelsTrace {
        n,
        divisor,
        steps,
        inequality,
        identities_hold,
        lev3,
        lev4,
        delta_sq_follows,
    };
    let formula = format!(
        "{}*{}",
        format_rational(&BigRational::new(BigInt::from(q_delta), BigInt::from(q2))),
        c3.statement
    );
    let bound = FamilyBound::new(
        &cn_sys,
        c3.radius,
        lambda,
        Method::Levels,
        formula,
        vec![c3.source.clone()],
    );
    Ok((bound, trace))
}

/// A bound read directly from a constant for `Δ² − λΔ`.
pub fn direct_bound(rs: &RootSystem, c: &Constant) -> Result<FamilyBound> {
    let expect = Statement::DeltaSq {
        family: rs.family(),
        rank: rs.rank(),
    };
    if c.statement != expect && !(c.statement == Statement::AFamily && rs.family() == Family::A) {
        return Err(Error::Domain(format!(
            "constant {} does not apply to {}{}",
            c.statement,
            rs.family(),
            rs.rank()
        )));
    }
    let (lambda, formula) = if c.statement == Statement::AFamily {
        let k = BigRational::from_integer(BigInt::from(rs.rank() as i64 - 1));
        (&c.lambda * k, format!("{}*{}", rs.rank() - 1, c.statement))
    } else {
        (c.lambda.clone(), c.statement.to_string())
    };
    Ok(FamilyBound::new(
        rs,
        c.radius,
        lambda,
        Method::Direct,
        formula,
        vec![c.source.clone()],
    ))
}
