use std::collections::{HashSet, VecDeque};

use num_integer::Integer;

use super::{dot, Family, RootSystem};
use crate::error::{Error, Result};

pub const DEFAULT_WEYL_CAP: u128 = 1_000_000;

/// An element of the Weyl group.
///
/// The matrix acts on ambient coordinates as `matrix / den`; `den` is 1 in
/// every classical family and may exceed 1 in the scaled E and F
/// realizations. `perm[i]` is the index of the image of `roots[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    dim: usize,
    matrix: Vec<i64>,
    den: i64,
    perm: Vec<usize>,
}

impl WeylElement {
    pub fn identity(rs: &RootSystem) -> Self {
        let d = rs.ambient_dim();
        let mut matrix = vec![0; d * d];
        for i in 0..d {
            matrix[i * d + i] = 1;
        }
        WeylElement {
            dim: d,
            matrix,
            den: 1,
            perm: (0..rs.len()).collect(),
        }
    }

    /// The reflection in the hyperplane orthogonal to `roots[a]`.
    pub fn reflection(rs: &RootSystem, a: usize) -> Self {
        let d = rs.ambient_dim();
        let r = rs.root(a).coords();
        let l = rs.root(a).squared_length();
        let mut matrix = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                matrix[i * d + j] = if i == j { l } else { 0 } - 2 * r[i] * r[j];
            }
        }
        let perm = (0..rs.len())
            .map(|b| {
                let img = rs.reflect(a, rs.root(b).coords()).expect("integral system");
                rs.index_of(&img).expect("reflection closure")
            })
            .collect();
        let mut w = WeylElement {
            dim: d,
            matrix,
            den: l,
            perm,
        };
        w.normalize();
        w
    }

    fn normalize(&mut self) {
        let g = self.matrix.iter().fold(self.den, |acc, &x| acc.gcd(&x));
        if g > 1 {
            self.den /= g;
            for x in &mut self.matrix {
                *x /= g;
            }
        }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let d = self.dim;
        let mut matrix = vec![0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.matrix[i * d + k];
                if a != 0 {
                    for j in 0..d {
                        matrix[i * d + j] += a * other.matrix[k * d + j];
                    }
                }
            }
        }
        let perm = other.perm.iter().map(|&i| self.perm[i]).collect();
        let mut w = WeylElement {
            dim: d,
            matrix,
            den: self.den * other.den,
            perm,
        };
        w.normalize();
        w
    }

    /// Row-major numerator matrix.
    pub fn matrix(&self) -> &[i64] {
        &self.matrix
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// Index of the image of `roots[i]`.
    pub fn act_root(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn root_permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Image of an ambient vector, if integral.
    pub fn apply(&self, v: &[i64]) -> Option<Vec<i64>> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let s = dot(&self.matrix[i * d..(i + 1) * d], v);
                (s % self.den == 0).then_some(s / self.den)
            })
            .collect()
    }
}

/// `|W|` from the classification.
pub fn weyl_order(family: Family, rank: usize) -> Result<u128> {
    family.check_rank(rank)?;
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    Ok(match family {
        Family::A => fact(rank + 1),
        Family::B | Family::C => (1u128 << rank) * fact(rank),
        Family::D => (1u128 << (rank - 1)) * fact(rank),
        Family::E => match rank {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        Family::F => 1152,
        Family::G => 12,
    })
}

pub fn weyl_group(rs: &RootSystem) -> Result<Vec<WeylElement>> {
    weyl_group_with_cap(rs, DEFAULT_WEYL_CAP)
}

/// Enumerates the Weyl group by closure under simple reflections, in BFS
/// order from the identity.
pub fn weyl_group_with_cap(rs: &RootSystem, cap: u128) -> Result<Vec<WeylElement>> {
    let order = weyl_order(rs.family(), rs.rank())?;
    if order > cap {
        return Err(Error::Resource(format!(
            "|W({}{})| = {order} exceeds the enumeration cap {cap}; use orbit-based \
             computations on root indices instead",
            rs.family(),
            rs.rank()
        )));
    }
    let gens: Vec<WeylElement> = simple_roots(rs)?
        .into_iter()
        .map(|a| WeylElement::reflection(rs, a))
        .collect();
    let id = WeylElement::identity(rs);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(id.perm.clone());
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(w) = queue.pop_front() {
        for s in &gens {
            let ws = s.compose(&w);
            if seen.insert(ws.perm.clone()) {
                out.push(ws.clone());
                queue.push_back(ws);
            }
        }
    }
    if out.len() as u128 != order {
        return Err(Error::Consistency(format!(
            "enumerated {} Weyl elements, expected {order}",
            out.len()
        )));
    }
    Ok(out)
}

/// Simple roots for the positive system cut out by a generic linear form.
pub(crate) fn simple_roots(rs: &RootSystem) -> Result<Vec<usize>> {
    let d = rs.ambient_dim();
    let v: Vec<i64> = (0..d as u32).map(|k| 7i64.pow(k)).collect();
    let height: Vec<i64> = rs.roots().iter().map(|r| dot(r.coords(), &v)).collect();
    if height.contains(&0) {
        return Err(Error::Consistency("linear form is not generic".into()));
    }
    let positive: Vec<usize> = (0..rs.len()).filter(|&i| height[i] > 0).collect();
    let pos_set: HashSet<Vec<i64>> = positive.iter().map(|&i| rs.root(i).coords().to_vec()).collect();
    let simple: Vec<usize> = positive
        .iter()
        .copied()
        .filter(|&a| {
            !positive.iter().any(|&b| {
                let diff: Vec<i64> = rs
                    .root(a)
                    .coords()
                    .iter()
                    .zip(rs.root(b).coords())
                    .map(|(x, y)| x - y)
                    .collect();
                pos_set.contains(&diff)
            })
        })
        .collect();
    if simple.len() != rs.rank() {
        return Err(Error::Consistency(format!(
            "found {} simple roots for rank {}",
            simple.len(),
            rs.rank()
        )));
    }
    Ok(simple)
}
