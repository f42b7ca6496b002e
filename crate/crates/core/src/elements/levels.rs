use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::tensor::{adj_tensor, sq_tensor, AdjScope, LengthClass, PairTensor};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rootsys::{Family, PlaneCensus, PlaneType, RootSystem, WeylElement};

/// The four level tensors of a type C system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDecomposition {
    pub rank: usize,
    /// `lev[0]` is level 1.
    pub lev: [PairTensor; 4],
}

impl LevelDecomposition {
    pub fn level(&self, i: usize) -> &PairTensor {
        &self.lev[i - 1]
    }

    pub fn total(&self) -> PairTensor {
        self.lev.iter().fold(PairTensor::new(), |acc, t| acc.plus(t))
    }
}

/// Level 1: long squares. Level 2: short squares and `C2` cross terms.
/// Level 3: `A1×C1` and `A2` cross terms. Level 4: `A1×A1` cross terms.
pub fn levels(rs: &RootSystem) -> Result<LevelDecomposition> {
    if rs.family() != Family::C {
        return Err(Error::Domain(format!(
            "levels are defined for type C, got {}{}",
            rs.family(),
            rs.rank()
        )));
    }
    let census = PlaneCensus::new(rs)?;
    let adj = |t| adj_tensor(rs, &census, AdjScope::PlaneType(t));
    Ok(LevelDecomposition {
        rank: rs.rank(),
        lev: [
            sq_tensor(rs, LengthClass::Long),
            sq_tensor(rs, LengthClass::Short).plus(&adj(PlaneType::C2)),
            adj(PlaneType::A1xC1).plus(&adj(PlaneType::A2)),
            adj(PlaneType::A1xA1),
        ],
    })
}

/// `Σ_w t^w` over the given Weyl elements.
pub fn weyl_sum(t: &PairTensor, weyl: &[WeylElement], exec: Exec) -> PairTensor {
    let merge = |mut a: BTreeMap<(usize, usize), i64>, b: BTreeMap<(usize, usize), i64>| {
        for (p, m) in b {
            *a.entry(p).or_insert(0) += m;
        }
        a
    };
    let total = exec.map_reduce(weyl.len(), BTreeMap::new(), |k| t.act(&weyl[k]).terms().clone(), merge);
    let mut out = PairTensor::new();
    for (p, m) in total {
        out.add_term(p, m);
    }
    out
}

/// Embeds a tensor over `C_m` into `C_n` by padding coordinates.
pub fn embed_tensor(t: &PairTensor, small: &RootSystem, big: &RootSystem) -> Result<PairTensor> {
    Ok(t.relabel(&big.coordinate_embedding(small)?))
}

/// `2ⁿ·m!·(n−i)!/(m−i)!`.
pub fn lemma_constant(n: usize, m: usize, i: usize) -> Result<u128> {
    if !(1..=4).contains(&i) || i > m || m > n {
        return Err(Error::Domain(format!(
            "need 1 <= i <= 4 and i <= m <= n, got (n, m, i) = ({n}, {m}, {i})"
        )));
    }
    let fact = |k: usize| (1..=k as u128).product::<u128>();
    Ok((1u128 << n) * fact(m) * fact(n - i) / fact(m - i))
}

/// Outcome of comparing an orbit sum with the predicted multiple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeylSumCheck {
    pub n: usize,
    pub m: usize,
    pub i: usize,
    pub constant: u128,
    pub holds: bool,
    /// True when both sides vanish, so the constant is untested.
    pub vacuous: bool,
}

/// Checks `Σ_{w ∈ W(C_n)} (Lev_i^m)^w = c·Lev_i^n` by exhaustive summation.
pub fn check_weyl_sum(n: usize, m: usize, i: usize, exec: Exec) -> Result<WeylSumCheck> {
    let constant = lemma_constant(n, m, i)?;
    let small = RootSystem::build(Family::C, m.max(2))?;
    let big = RootSystem::build(Family::C, n.max(2))?;
    // C1 is realized inside C2 as the pairs that involve only the first coordinate
    let lev_small = if m == 1 {
        let c1 = |a: usize| small.root(a).coords()[1] == 0;
        let full = levels(&small)?.level(i).clone();
        let mut t = PairTensor::new();
        for (&(a, b), &k) in full.terms() {
            if c1(a) && c1(b) {
                t.add_term((a, b), k);
            }
        }
        t
    } else {
        levels(&small)?.level(i).clone()
    };
    let lev_big = if n == 1 {
        lev_small.clone()
    } else {
        levels(&big)?.level(i).clone()
    };
    let weyl = crate::rootsys::weyl_group(&big)?;
    let embedded = embed_tensor(&lev_small, &small, &big)?;
    let sum = if n == 1 {
        // W(C1) = {±1} acts on the first coordinate only
        let flip: Vec<usize> = (0..big.len())
            .map(|a| {
                let mut c = big.root(a).coords().to_vec();
                c[0] = -c[0];
                big.index_of(&c).expect("closed under sign change")
            })
            .collect();
        embedded.plus(&embedded.relabel(&flip))
    } else {
        weyl_sum(&embedded, &weyl, exec)
    };
    let expected = lev_big.scaled(i64::try_from(constant).map_err(|_| Error::Overflow("lemma"))?);
    Ok(WeylSumCheck {
        n,
        m,
        i,
        constant,
        holds: sum == expected,
        vacuous: sum.is_empty() && lev_big.is_empty(),
    })
}
