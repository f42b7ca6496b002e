//! Named groups and targets, so that a problem can be rebuilt from a
//! certificate alone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certify::{certify, CertifiedBound, CertifyConfig};
use crate::chevalley::finite::{self, Perm};
use crate::chevalley::{enumerate_ball_with, steinberg_generators, Ball, BallCache, DEFAULT_BALL_CAP};
use crate::elements::{adj_tensor, group_laplacian, levels, AdjScope, ChevalleyRing};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groupring::RingContext;
use crate::rootsys::{Family, PlaneCensus};
use crate::sos::{formulate, solve, NumericSolution, SolverConfig, SosProblem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// Elementary Chevalley group over ℤ with Steinberg generators.
    Chevalley {
        family: Family,
        rank: usize,
    },
    /// `ℤ/order` with generators `±k`.
    Cyclic {
        order: usize,
        steps: Vec<usize>,
    },
    Dihedral {
        n: usize,
    },
    Symmetric4,
    Alternating5,
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Chevalley { family, rank } => write!(f, "{family}{rank}"),
            GroupSpec::Cyclic { order, steps } => write!(f, "Z/{order} steps {steps:?}"),
            GroupSpec::Dihedral { n } => write!(f, "D{n}"),
            GroupSpec::Symmetric4 => f.write_str("S4"),
            GroupSpec::Alternating5 => f.write_str("A5"),
        }
    }
}

impl GroupSpec {
    fn finite_generators(&self) -> Result<Option<(usize, Vec<Perm>)>> {
        Ok(Some(match self {
            GroupSpec::Chevalley { .. } => return Ok(None),
            GroupSpec::Cyclic { order, steps } => (*order, finite::cyclic(*order, steps)?),
            GroupSpec::Dihedral { n } => (*n, finite::dihedral(*n)?),
            GroupSpec::Symmetric4 => (4, finite::symmetric4()?),
            GroupSpec::Alternating5 => (5, finite::alternating5()?),
        }))
    }
}

/// The element `x` in `x − λΔ ⩾_R 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `Δ²`.
    DeltaSq,
    /// `Adj_V`.
    Adj,
    /// `Lev₂ + Lev₃` of type C.
    Levels23,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::DeltaSq => "delta_sq",
            Target::Adj => "adj",
            Target::Levels23 => "levels23",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta_sq" => Ok(Target::DeltaSq),
            "adj" => Ok(Target::Adj),
            "levels23" => Ok(Target::Levels23),
            other => Err(Error::Domain(format!(
                "unknown target {other:?}; expected delta_sq, adj or levels23"
            ))),
        }
    }
}

/// Builds the group ring of radius `2R` and the SDP for `target − λΔ`.
pub fn build_problem(
    group: &GroupSpec,
    target: Target,
    radius: usize,
    exec: Exec,
    cache: Option<&BallCache>,
) -> Result<SosProblem> {
    if radius == 0 {
        return Err(Error::Domain("radius must be positive".into()));
    }
    if let Some((degree, gens)) = group.finite_generators()? {
        if target != Target::DeltaSq {
            return Err(Error::Domain(format!(
                "target {target} needs a root system; {group} only supports delta_sq"
            )));
        }
        let ball = Ball::enumerate(Perm::identity(degree), &gens, 2 * radius, DEFAULT_BALL_CAP, exec)?;
        let ctx = RingContext::new(ball, None, exec)?;
        let lap = group_laplacian(&ctx)?;
        return formulate(&lap.mul(&lap)?, &lap, radius);
    }
    let GroupSpec::Chevalley { family, rank } = *group else {
        unreachable!("finite groups handled above")
    };
    let gens = steinberg_generators(family, rank)?;
    let ring = match cache {
        None => ChevalleyRing::new(gens, radius, exec)?,
        Some(cache) => {
            let ball = cache.ball(family, rank, 2 * radius, || {
                enumerate_ball_with(&gens, 2 * radius, DEFAULT_BALL_CAP, exec)
            })?;
            let table = cache.table(family, rank, &ball, radius, exec)?;
            ChevalleyRing::from_parts(gens, RingContext::new(ball, Some(table), exec)?)?
        }
    };
    let rs = ring.generators().system();
    let lap = ring.laplacian();
    let x = match target {
        Target::DeltaSq => lap.mul(&lap)?,
        Target::Adj => {
            let census = PlaneCensus::with_exec(rs, exec)?;
            ring.evaluate(&adj_tensor(rs, &census, AdjScope::Full))?
        }
        Target::Levels23 => {
            if family != Family::C {
                return Err(Error::Domain("levels are defined for type C only".into()));
            }
            let lev = levels(rs)?;
            ring.evaluate(&lev.level(2).plus(lev.level(3)))?
        }
    };
    formulate(&x, &lap, radius)
}

/// Solve and certify in one go.
pub fn run(
    p: &SosProblem,
    solver: &SolverConfig,
    cfg: &CertifyConfig,
) -> Result<(NumericSolution, Result<CertifiedBound>)> {
    let sol = solve(p, solver)?;
    let bound = certify(p, &sol, cfg);
    Ok((sol, bound))
}
