use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rootsys::{AdmissiblePlane, PlaneCensus, PlaneType, RootSystem, WeylElement};

/// Formal ℤ-combination of ordered root pairs `(α, β)`, standing for
/// `Σ m·Δ_α·Δ_β`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTensor {
    terms: BTreeMap<(usize, usize), i64>,
}

impl PairTensor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut t = Self::new();
        for p in pairs {
            t.add_term(p, 1);
        }
        t
    }

    pub fn add_term(&mut self, pair: (usize, usize), mult: i64) {
        let e = self.terms.entry(pair).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove(&pair);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.terms
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> i64 {
        self.terms.get(&(a, b)).copied().unwrap_or(0)
    }

    /// Number of ordered pairs with nonzero multiplicity.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &PairTensor) -> PairTensor {
        let mut t = self.clone();
        for (&p, &m) in &other.terms {
            t.add_term(p, m);
        }
        t
    }

    pub fn scaled(&self, c: i64) -> PairTensor {
        let mut t = PairTensor::new();
        for (&p, &m) in &self.terms {
            t.add_term(p, c * m);
        }
        t
    }

    /// Multiplicity of `(α, β)` equals that of `(β, α)`.
    pub fn is_star_symmetric(&self) -> bool {
        self.terms.iter().all(|(&(a, b), &m)| self.multiplicity(b, a) == m)
    }

    pub fn is_disjoint(&self, other: &PairTensor) -> bool {
        self.terms.keys().all(|p| !other.terms.contains_key(p))
    }

    /// Relabels root indices by `map`.
    pub fn relabel(&self, map: &[usize]) -> PairTensor {
        let mut t = PairTensor::new();
        for (&(a, b), &m) in &self.terms {
            t.add_term((map[a], map[b]), m);
        }
        t
    }

    /// The image under `w`, acting on both indices.
    pub fn act(&self, w: &WeylElement) -> PairTensor {
        self.relabel(w.root_permutation())
    }

    pub fn to_json(&self) -> Vec<(usize, usize, i64)> {
        self.terms.iter().map(|(&(a, b), &m)| (a, b, m)).collect()
    }

    pub fn from_json(entries: &[(usize, usize, i64)]) -> PairTensor {
        let mut t = PairTensor::new();
        for &(a, b, m) in entries {
            t.add_term((a, b), m);
        }
        t
    }
}

/// Which non-proportional pairs an adjacency tensor covers.
#[derive(Debug, Clone, Copy)]
pub enum AdjScope<'a> {
    Plane(&'a AdmissiblePlane),
    PlaneType(PlaneType),
    Full,
}

/// Root length classes for square tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthClass {
    All,
    Long,
    Short,
}

fn plane_pairs(rs: &RootSystem, p: &AdmissiblePlane, out: &mut PairTensor) {
    for &a in &p.member_roots {
        for &b in &p.member_roots {
            if !rs.proportional(a, b) {
                out.add_term((a, b), 1);
            }
        }
    }
}

/// `Adj_W = Σ_{α ∈ Ω_W} Δ_α Σ_{β ∈ Ω_W, β ≁ α} Δ_β`, summed over the scope.
pub fn adj_tensor(rs: &RootSystem, census: &PlaneCensus, scope: AdjScope<'_>) -> PairTensor {
    let mut t = PairTensor::new();
    match scope {
        AdjScope::Plane(p) => plane_pairs(rs, p, &mut t),
        AdjScope::PlaneType(ty) => {
            for p in census.planes().iter().filter(|p| p.plane_type == ty) {
                plane_pairs(rs, p, &mut t);
            }
        }
        AdjScope::Full => {
            for a in 0..rs.len() {
                for b in 0..rs.len() {
                    if !rs.proportional(a, b) {
                        t.add_term((a, b), 1);
                    }
                }
            }
        }
    }
    t
}

/// The proportional pairs `(α, α)` and `(α, -α)` with `α` in the class.
///
/// Including `(α, -α)` makes `Sq + Adj` the full square; the result is still
/// a sum of squares, namely `Σ_{±α} (Δ_α + Δ_{-α})²`.
pub fn sq_tensor(rs: &RootSystem, class: LengthClass) -> PairTensor {
    let keep = |a: usize| match class {
        LengthClass::All => true,
        LengthClass::Long => rs.is_long(a),
        LengthClass::Short => !rs.is_long(a),
    };
    let mut t = PairTensor::new();
    for a in (0..rs.len()).filter(|&a| keep(a)) {
        t.add_term((a, a), 1);
        t.add_term((a, rs.negative(a)), 1);
    }
    t
}

/// Every ordered pair of roots, i.e. `Δ²`.
pub fn full_square_tensor(rs: &RootSystem) -> PairTensor {
    PairTensor::from_pairs((0..rs.len()).flat_map(|a| (0..rs.len()).map(move |b| (a, b))))
}
