use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RootSystem;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Isomorphism type of `Omega ∩ W` for an admissible plane `W`.
///
/// In the reducible types an `A1` factor consists of short roots and a `C1`
/// factor of long roots; in simply laced systems every root counts as short.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlaneType {
    A1xA1,
    A1xC1,
    C1xC1,
    A2,
    C2,
    G2,
}

impl PlaneType {
    pub const ALL: [PlaneType; 6] = [
        PlaneType::A1xA1,
        PlaneType::A1xC1,
        PlaneType::C1xC1,
        PlaneType::A2,
        PlaneType::C2,
        PlaneType::G2,
    ];

    /// Irreducible planes are exactly those with at least five roots.
    pub fn is_irreducible(self) -> bool {
        matches!(self, PlaneType::A2 | PlaneType::C2 | PlaneType::G2)
    }

    pub fn name(self) -> &'static str {
        match self {
            PlaneType::A1xA1 => "A1xA1",
            PlaneType::A1xC1 => "A1xC1",
            PlaneType::C1xC1 => "C1xC1",
            PlaneType::A2 => "A2",
            PlaneType::C2 => "C2",
            PlaneType::G2 => "G2",
        }
    }
}

impl fmt::Display for PlaneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PlaneType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlaneType::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Domain(format!("unknown plane type {s:?}")))
    }
}

/// A two-dimensional subspace spanned by non-proportional roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissiblePlane {
    /// Sorted indices of all roots lying in the plane.
    pub member_roots: Vec<usize>,
    pub plane_type: PlaneType,
    /// The lexicographically smallest non-proportional pair of members.
    pub basis_pair: (usize, usize),
}

impl AdmissiblePlane {
    pub fn contains(&self, root: usize) -> bool {
        self.member_roots.binary_search(&root).is_ok()
    }
}

fn gram_det3(rs: &RootSystem, a: usize, b: usize, c: usize) -> i128 {
    let g = |i: usize, j: usize| rs.inner(i, j) as i128;
    let (aa, ab, ac, bb, bc, cc) = (g(a, a), g(a, b), g(a, c), g(b, b), g(b, c), g(c, c));
    aa * (bb * cc - bc * bc) - ab * (ab * cc - bc * ac) + ac * (ab * bc - bb * ac)
}

fn members_of_span(rs: &RootSystem, a: usize, b: usize) -> Vec<usize> {
    (0..rs.len())
        .filter(|&c| c == a || c == b || gram_det3(rs, a, b, c) == 0)
        .collect()
}

fn classify(rs: &RootSystem, members: &[usize]) -> Result<PlaneType> {
    let long = members.iter().filter(|&&i| rs.is_long(i)).count();
    let t = match (members.len(), long) {
        (4, 0) => PlaneType::A1xA1,
        (4, 2) => PlaneType::A1xC1,
        (4, 4) => PlaneType::C1xC1,
        (6, 0) | (6, 6) => PlaneType::A2,
        (8, 4) => PlaneType::C2,
        (12, 6) => PlaneType::G2,
        (k, l) => {
            return Err(Error::Consistency(format!(
                "plane with {k} roots of which {l} long has no classified type"
            )))
        }
    };
    Ok(t)
}

/// Enumerates all admissible planes in deterministic order.
pub fn admissible_planes(rs: &RootSystem) -> Result<Vec<AdmissiblePlane>> {
    admissible_planes_with(rs, Exec::default())
}

pub fn admissible_planes_with(rs: &RootSystem, exec: Exec) -> Result<Vec<AdmissiblePlane>> {
    if rs.rank() < 2 {
        return Err(Error::Domain(format!(
            "admissible planes need rank >= 2, got {}{}",
            rs.family(),
            rs.rank()
        )));
    }
    let n = rs.len();
    // Every non-proportional pair is keyed by the primitive Plücker
    // coordinates of its span; the members of a plane are then exactly the
    // roots occurring in its pairs.
    let keyed = exec.map_range(n, |a| {
        ((a + 1)..n)
            .filter(|&b| !rs.proportional(a, b))
            .map(|b| (plucker_key(rs.root(a).coords(), rs.root(b).coords()), a, b))
            .collect::<Vec<_>>()
    });
    let mut spans: HashMap<Vec<(u32, u32, i64)>, Vec<usize>> = HashMap::new();
    for (key, a, b) in keyed.into_iter().flatten() {
        let m = spans.entry(key).or_default();
        m.push(a);
        m.push(b);
    }
    let mut planes = spans
        .into_values()
        .map(|mut members| {
            members.sort_unstable();
            members.dedup();
            let a = members[0];
            let b = members
                .iter()
                .copied()
                .find(|&c| !rs.proportional(a, c))
                .expect("a plane has two non-proportional members");
            Ok(AdmissiblePlane {
                plane_type: classify(rs, &members)?,
                member_roots: members,
                basis_pair: (a, b),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    planes.sort_by(|x, y| x.member_roots.cmp(&y.member_roots));
    Ok(planes)
}

/// Nonzero entries `((i, j), c)` of `a ∧ b`, divided by their content and
/// with a positive leading entry. Roots are sparse, so this is cheap.
fn plucker_key(a: &[i64], b: &[i64]) -> Vec<(u32, u32, i64)> {
    let mut key: Vec<(u32, u32, i64)> = Vec::new();
    for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
        for (j, &y) in b.iter().enumerate().filter(|(_, y)| **y != 0) {
            if i == j {
                continue;
            }
            let (lo, hi, v) = if i < j { (i, j, x * y) } else { (j, i, -x * y) };
            key.push((lo as u32, hi as u32, v));
        }
    }
    key.sort_unstable_by_key(|&(i, j, _)| (i, j));
    let mut merged: Vec<(u32, u32, i64)> = Vec::with_capacity(key.len());
    for (i, j, v) in key {
        match merged.last_mut() {
            Some(last) if (last.0, last.1) == (i, j) => last.2 += v,
            _ => merged.push((i, j, v)),
        }
    }
    merged.retain(|e| e.2 != 0);
    let g = merged.iter().fold(0i64, |g, e| num_integer::gcd(g, e.2));
    let sign = merged.first().map_or(1, |e| e.2.signum());
    if g > 0 {
        for e in &mut merged {
            e.2 /= g * sign;
        }
    }
    merged
}

/// Planes together with pair and root lookups.
#[derive(Debug, Clone)]
pub struct PlaneCensus {
    planes: Vec<AdmissiblePlane>,
    pair_plane: HashMap<(usize, usize), usize>,
    root_planes: Vec<Vec<usize>>,
}

impl PlaneCensus {
    pub fn new(rs: &RootSystem) -> Result<Self> {
        Self::with_exec(rs, Exec::default())
    }

    pub fn with_exec(rs: &RootSystem, exec: Exec) -> Result<Self> {
        let planes = if rs.rank() >= 2 {
            admissible_planes_with(rs, exec)?
        } else {
            Vec::new()
        };
        let mut pair_plane = HashMap::new();
        let mut root_planes = vec![Vec::new(); rs.len()];
        for (p, plane) in planes.iter().enumerate() {
            for &a in &plane.member_roots {
                root_planes[a].push(p);
                for &b in &plane.member_roots {
                    if !rs.proportional(a, b) {
                        pair_plane.insert((a, b), p);
                    }
                }
            }
        }
        Ok(PlaneCensus {
            planes,
            pair_plane,
            root_planes,
        })
    }

    pub fn planes(&self) -> &[AdmissiblePlane] {
        &self.planes
    }

    /// The unique plane spanned by a non-proportional pair.
    pub fn plane_of_pair(&self, a: usize, b: usize) -> Option<&AdmissiblePlane> {
        self.pair_plane.get(&(a, b)).map(|&p| &self.planes[p])
    }

    pub fn planes_containing(&self, root: usize) -> impl Iterator<Item = &AdmissiblePlane> {
        self.root_planes[root].iter().map(|&p| &self.planes[p])
    }

    pub fn incidence(&self, root: usize) -> BTreeMap<PlaneType, usize> {
        let mut out: BTreeMap<PlaneType, usize> = PlaneType::ALL.iter().map(|&t| (t, 0)).collect();
        for p in self.planes_containing(root) {
            *out.entry(p.plane_type).or_default() += 1;
        }
        out
    }

    pub fn type_census(&self) -> BTreeMap<PlaneType, usize> {
        let mut out: BTreeMap<PlaneType, usize> = PlaneType::ALL.iter().map(|&t| (t, 0)).collect();
        for p in &self.planes {
            *out.entry(p.plane_type).or_default() += 1;
        }
        out
    }

    /// Minimum over roots of the number of irreducible planes through it.
    pub fn gamma(&self) -> usize {
        self.root_planes
            .iter()
            .map(|ps| {
                ps.iter()
                    .filter(|&&p| self.planes[p].plane_type.is_irreducible())
                    .count()
            })
            .min()
            .unwrap_or(0)
    }
}

/// `min_α |{W irreducible admissible : α ∈ W}|`.
pub fn gamma(rs: &RootSystem) -> Result<usize> {
    Ok(PlaneCensus::new(rs)?.gamma())
}

/// `min_α |{span(α, β) : β non-proportional and non-orthogonal to α}|`,
/// computed directly from spans without classifying planes.
pub fn gamma_by_spans(rs: &RootSystem) -> usize {
    (0..rs.len())
        .map(|a| {
            let spans: BTreeSet<Vec<usize>> = (0..rs.len())
                .filter(|&b| !rs.proportional(a, b) && rs.inner(a, b) != 0)
                .map(|b| members_of_span(rs, a, b))
                .collect();
            spans.len()
        })
        .min()
        .unwrap_or(0)
}

/// Number of admissible planes of each type through `roots[root]`.
pub fn plane_incidence(rs: &RootSystem, root: usize) -> Result<BTreeMap<PlaneType, usize>> {
    if root >= rs.len() {
        return Err(Error::Domain(format!(
            "root index {root} out of range for {}{} with {} roots",
            rs.family(),
            rs.rank(),
            rs.len()
        )));
    }
    Ok(PlaneCensus::new(rs)?.incidence(root))
}
