//! Reduced irreducible root systems in exact integer coordinates.
//!
//! Every family is realized in its standard Euclidean coordinates, scaled
//! where necessary (types E and F) so that all coordinates are integers.
//! Only ratios of inner products and orthogonality are ever used downstream,
//! so the global scale is irrelevant.

mod planes;
mod weyl;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use planes::{
    admissible_planes, admissible_planes_with, gamma, gamma_by_spans, plane_incidence, AdmissiblePlane, PlaneCensus,
    PlaneType,
};
pub use weyl::{weyl_group, weyl_group_with_cap, weyl_order, WeylElement, DEFAULT_WEYL_CAP};

/// Cartan–Killing family letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::E => "E",
            Family::F => "F",
            Family::G => "G",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            "G" => Ok(Family::G),
            other => Err(Error::Domain(format!("unknown root system family {other:?}"))),
        }
    }
}

impl Family {
    /// Checks the (family, rank) pair against the classification.
    pub fn check_rank(self, rank: usize) -> Result<()> {
        let (ok, constraint) = match self {
            Family::A => (rank >= 1, "type A requires rank >= 1"),
            Family::B => (rank >= 2, "type B requires rank >= 2"),
            Family::C => (rank >= 2, "type C requires rank >= 2 (C2 = B2)"),
            Family::D => (rank >= 4, "type D requires rank >= 4"),
            Family::E => ((6..=8).contains(&rank), "type E requires rank 6, 7 or 8"),
            Family::F => (rank == 4, "type F requires rank 4"),
            Family::G => (rank == 2, "type G requires rank 2"),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{self}{rank}: {constraint}")))
        }
    }

    pub fn is_simply_laced(self) -> bool {
        matches!(self, Family::A | Family::D | Family::E)
    }
}

/// A root with integral coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    coords: Vec<i64>,
    squared_length: i64,
}

impl Root {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.iter().all(|&c| c == 0) {
            return Err(Error::Domain("the zero vector is not a root".into()));
        }
        let squared_length = dot(&coords, &coords);
        Ok(Root { coords, squared_length })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn squared_length(&self) -> i64 {
        self.squared_length
    }

    pub fn inner(&self, other: &Root) -> i64 {
        dot(&self.coords, &other.coords)
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A finite root system with a deterministic (lexicographic) root order.
#[derive(Debug, Clone)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    ambient_dim: usize,
    roots: Vec<Root>,
    index: HashMap<Vec<i64>, usize>,
    negative: Vec<usize>,
    long_length: Option<i64>,
}

/// JSON export shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystemJson {
    pub family: Family,
    pub rank: usize,
    pub roots: Vec<Vec<i64>>,
}

impl RootSystem {
    /// Builds the root system of the given type.
    pub fn build(family: Family, rank: usize) -> Result<Self> {
        family.check_rank(rank)?;
        let (ambient_dim, coords) = match family {
            Family::A => (rank + 1, type_a(rank)),
            Family::B => (rank, type_b(rank)),
            Family::C => (rank, type_c(rank)),
            Family::D => (rank, type_d(rank)),
            Family::E => (8, type_e(rank)),
            Family::F => (4, type_f4()),
            Family::G => (3, type_g2()),
        };
        Self::from_coords(family, rank, ambient_dim, coords)
    }

    fn from_coords(family: Family, rank: usize, ambient_dim: usize, mut coords: Vec<Vec<i64>>) -> Result<Self> {
        coords.sort();
        coords.dedup();
        let roots = coords.into_iter().map(Root::new).collect::<Result<Vec<_>>>()?;
        let index: HashMap<Vec<i64>, usize> = roots.iter().enumerate().map(|(i, r)| (r.coords.clone(), i)).collect();
        let negative = roots
            .iter()
            .map(|r| {
                let neg: Vec<i64> = r.coords.iter().map(|c| -c).collect();
                index
                    .get(&neg)
                    .copied()
                    .ok_or_else(|| Error::Consistency(format!("root {:?} has no negative", r.coords)))
            })
            .collect::<Result<Vec<_>>>()?;
        let min_len = roots.iter().map(|r| r.squared_length).min().unwrap_or(0);
        let max_len = roots.iter().map(|r| r.squared_length).max().unwrap_or(0);
        let long_length = (min_len != max_len).then_some(max_len);
        Ok(RootSystem {
            family,
            rank,
            ambient_dim,
            roots,
            index,
            negative,
            long_length,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root(&self, i: usize) -> &Root {
        &self.roots[i]
    }

    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    /// Index of `-roots[i]`.
    pub fn negative(&self, i: usize) -> usize {
        self.negative[i]
    }

    pub fn inner(&self, i: usize, j: usize) -> i64 {
        self.roots[i].inner(&self.roots[j])
    }

    /// Roots are proportional iff equal or opposite (the system is reduced).
    pub fn proportional(&self, i: usize, j: usize) -> bool {
        i == j || self.negative[i] == j
    }

    /// Long roots exist only in the doubly and triply laced families.
    pub fn is_long(&self, i: usize) -> bool {
        self.long_length == Some(self.roots[i].squared_length)
    }

    pub fn has_two_lengths(&self) -> bool {
        self.long_length.is_some()
    }

    /// Number of Steinberg generators `|S| = 2 |roots|`.
    pub fn generator_count(&self) -> usize {
        2 * self.roots.len()
    }

    /// Reflection of `v` in the hyperplane orthogonal to `roots[i]`, if the
    /// image is integral.
    pub fn reflect(&self, i: usize, v: &[i64]) -> Option<Vec<i64>> {
        let a = &self.roots[i];
        let num = 2 * dot(&a.coords, v);
        if num % a.squared_length != 0 {
            return None;
        }
        let c = num / a.squared_length;
        Some(v.iter().zip(&a.coords).map(|(x, y)| x - c * y).collect())
    }

    /// The coroot system, rescaled to primitive integer coordinates.
    pub fn dual(&self) -> Result<RootSystem> {
        let l = self
            .roots
            .iter()
            .fold(1i64, |acc, r| num_integer::lcm(acc, r.squared_length));
        let mut coords: Vec<Vec<i64>> = self
            .roots
            .iter()
            .map(|r| {
                let s = l / r.squared_length;
                r.coords.iter().map(|c| c * s).collect()
            })
            .collect();
        let g = coords.iter().flatten().fold(0i64, |acc, &c| num_integer::gcd(acc, c));
        if g > 1 {
            for c in coords.iter_mut().flatten() {
                *c /= g;
            }
        }
        let family = match self.family {
            Family::B => Family::C,
            Family::C => Family::B,
            f => f,
        };
        Self::from_coords(family, self.rank, self.ambient_dim, coords)
    }

    /// Checks every root-system axiom exhaustively.
    pub fn validate(&self) -> Result<()> {
        let n = self.roots.len();
        for i in 0..n {
            let a = &self.roots[i];
            if a.squared_length != dot(&a.coords, &a.coords) {
                return Err(Error::Consistency("stored squared length is stale".into()));
            }
            for j in 0..n {
                let b = &self.roots[j];
                let two_ab = 2 * a.inner(b);
                if two_ab % a.squared_length != 0 {
                    return Err(Error::Consistency(format!(
                        "Cartan integer 2<a,b>/<a,a> not integral for {:?}, {:?}",
                        a.coords, b.coords
                    )));
                }
                let img = self.reflect(i, &b.coords).expect("integrality checked");
                if self.index_of(&img).is_none() {
                    return Err(Error::Consistency(format!(
                        "reflection of {:?} in {:?} is not a root",
                        b.coords, a.coords
                    )));
                }
                if i != j && self.negative[i] != j && is_multiple(&a.coords, &b.coords) {
                    return Err(Error::Consistency(format!(
                        "non-reduced pair {:?}, {:?}",
                        a.coords, b.coords
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> RootSystemJson {
        RootSystemJson {
            family: self.family,
            rank: self.rank,
            roots: self.roots.iter().map(|r| r.coords.clone()).collect(),
        }
    }

    /// Restricts to roots in the span of the first `m` coordinates, as used by
    /// the standard embedding `C_m -> C_n`.
    pub fn coordinate_embedding(&self, sub: &RootSystem) -> Result<Vec<usize>> {
        if sub.ambient_dim > self.ambient_dim {
            return Err(Error::Domain(format!(
                "cannot embed {}{} into {}{}",
                sub.family, sub.rank, self.family, self.rank
            )));
        }
        sub.roots
            .iter()
            .map(|r| {
                let mut c = r.coords.clone();
                c.resize(self.ambient_dim, 0);
                self.index_of(&c).ok_or_else(|| {
                    Error::Domain(format!(
                        "root {:?} of {}{} has no image in {}{}",
                        r.coords, sub.family, sub.rank, self.family, self.rank
                    ))
                })
            })
            .collect()
    }
}

fn is_multiple(a: &[i64], b: &[i64]) -> bool {
    // a and b are parallel iff all 2x2 minors vanish
    (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] * b[j] == a[j] * b[i]))
}

fn unit(dim: usize, i: usize, scale: i64) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = scale;
    v
}

fn pm_pairs(dim: usize, scale: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in (i + 1)..dim {
            for si in [-scale, scale] {
                for sj in [-scale, scale] {
                    let mut v = vec![0; dim];
                    v[i] = si;
                    v[j] = sj;
                    out.push(v);
                }
            }
        }
    }
    out
}

fn type_a(n: usize) -> Vec<Vec<i64>> {
    let dim = n + 1;
    let mut out = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                let mut v = vec![0; dim];
                v[i] = 1;
                v[j] = -1;
                out.push(v);
            }
        }
    }
    out
}

fn type_b(n: usize) -> Vec<Vec<i64>> {
    let mut out = pm_pairs(n, 1);
    for i in 0..n {
        out.push(unit(n, i, 1));
        out.push(unit(n, i, -1));
    }
    out
}

fn type_c(n: usize) -> Vec<Vec<i64>> {
    let mut out = pm_pairs(n, 1);
    for i in 0..n {
        out.push(unit(n, i, 2));
        out.push(unit(n, i, -2));
    }
    out
}

fn type_d(n: usize) -> Vec<Vec<i64>> {
    pm_pairs(n, 1)
}

/// E8 with every coordinate doubled; E7 and E6 as orthogonal complements of
/// an A1 and an A2 inside it.
fn type_e(rank: usize) -> Vec<Vec<i64>> {
    let mut e8 = pm_pairs(8, 2);
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            e8.push((0..8).map(|k| if mask & (1 << k) != 0 { -1 } else { 1 }).collect());
        }
    }
    let theta = vec![1i64; 8];
    let phi = vec![0, 0, 0, 0, 0, 0, 2, 2];
    match rank {
        8 => e8,
        7 => e8.into_iter().filter(|r| dot(r, &theta) == 0).collect(),
        6 => e8
            .into_iter()
            .filter(|r| dot(r, &theta) == 0 && dot(r, &phi) == 0)
            .collect(),
        _ => unreachable!("rank checked by caller"),
    }
}

/// F4 with every coordinate doubled.
fn type_f4() -> Vec<Vec<i64>> {
    let mut out = pm_pairs(4, 2);
    for i in 0..4 {
        out.push(unit(4, i, 2));
        out.push(unit(4, i, -2));
    }
    for mask in 0u32..16 {
        out.push((0..4).map(|k| if mask & (1 << k) != 0 { -1 } else { 1 }).collect());
    }
    out
}

/// G2 inside the plane `x + y + z = 0` of R^3.
fn type_g2() -> Vec<Vec<i64>> {
    let mut out = type_a(2);
    for i in 0..3 {
        let mut v = vec![-1; 3];
        v[i] = 2;
        out.push(v.clone());
        out.push(v.iter().map(|c| -c).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_counts() {
        let cases = [
            (Family::A, 1, 2),
            (Family::A, 2, 6),
            (Family::A, 4, 20),
            (Family::B, 3, 18),
            (Family::C, 3, 18),
            (Family::D, 4, 24),
            (Family::E, 6, 72),
            (Family::E, 7, 126),
            (Family::E, 8, 240),
            (Family::F, 4, 48),
            (Family::G, 2, 12),
        ];
        for (f, n, count) in cases {
            let rs = RootSystem::build(f, n).unwrap();
            assert_eq!(rs.len(), count, "{f}{n}");
            rs.validate().unwrap();
        }
    }

    #[test]
    fn a2_lives_in_three_dimensions() {
        let rs = RootSystem::build(Family::A, 2).unwrap();
        assert_eq!(rs.ambient_dim(), 3);
        assert_eq!(rs.len(), 6);
    }

    #[test]
    fn c3_long_and_short() {
        let rs = RootSystem::build(Family::C, 3).unwrap();
        let long: Vec<_> = (0..rs.len()).filter(|&i| rs.is_long(i)).collect();
        assert_eq!(long.len(), 6);
        for &i in &long {
            let c = rs.root(i).coords();
            assert_eq!(c.iter().filter(|&&x| x != 0).count(), 1);
            assert_eq!(c.iter().map(|x| x.abs()).sum::<i64>(), 2);
        }
        assert_eq!(rs.len() - long.len(), 12);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let rs = RootSystem::build(Family::D, 5).unwrap();
        for w in rs.roots().windows(2) {
            assert!(w[0].coords() < w[1].coords());
        }
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        for (f, n) in [
            (Family::A, 0),
            (Family::B, 1),
            (Family::C, 1),
            (Family::D, 3),
            (Family::E, 5),
            (Family::E, 9),
            (Family::F, 3),
            (Family::G, 3),
        ] {
            let err = RootSystem::build(f, n).unwrap_err();
            assert!(matches!(err, Error::Domain(_)), "{f}{n}: {err}");
        }
    }

    #[test]
    fn zero_is_not_a_root() {
        assert!(Root::new(vec![0, 0]).is_err());
    }

    #[test]
    fn dual_swaps_b_and_c() {
        for n in 2..6 {
            let c = RootSystem::build(Family::C, n).unwrap();
            let b = RootSystem::build(Family::B, n).unwrap();
            let dual = c.dual().unwrap();
            assert_eq!(dual.family(), Family::B);
            assert_eq!(dual.to_json().roots, b.to_json().roots);
        }
    }

    #[test]
    fn json_export_shape() {
        let rs = RootSystem::build(Family::A, 1).unwrap();
        let json = serde_json::to_string(&rs.to_json()).unwrap();
        assert_eq!(json, r#"{"family":"A","rank":1,"roots":[[-1,1],[1,-1]]}"#);
    }
}
