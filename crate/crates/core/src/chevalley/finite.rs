//! Small permutation groups, used as exactly diagonalizable test beds.

use serde::{Deserialize, Serialize};

use super::matrix::Element;
use crate::error::{Error, Result};

/// A permutation of `0..n`, acting on the left: `(p·q)(x) = p(q(x))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn new(images: Vec<u16>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            match seen.get_mut(i as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::Domain(format!("{images:?} is not a permutation"))),
            }
        }
        Ok(Perm(images))
    }

    pub fn identity(n: usize) -> Self {
        Perm((0..n as u16).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u16;
        }
        Perm(inv)
    }

    /// Cycle notation input, 0-based.
    pub fn from_cycles(n: usize, cycles: &[&[u16]]) -> Result<Self> {
        let mut img: Vec<u16> = (0..n as u16).collect();
        for c in cycles {
            for k in 0..c.len() {
                let (a, b) = (c[k] as usize, c[(k + 1) % c.len()]);
                if a >= n {
                    return Err(Error::Domain(format!("point {a} outside degree {n}")));
                }
                img[a] = b;
            }
        }
        Perm::new(img)
    }
}

impl Element for Perm {
    fn compose(&self, other: &Self) -> Result<Self> {
        if self.0.len() != other.0.len() {
            return Err(Error::Domain("permutations of different degree".into()));
        }
        Ok(Perm(other.0.iter().map(|&i| self.0[i as usize]).collect()))
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_le_bytes()).collect()
    }
}

/// Closes a generator list under inverses, keeping the first occurrence.
pub fn symmetrize(gens: &[Perm]) -> Vec<Perm> {
    let mut out: Vec<Perm> = Vec::new();
    for g in gens {
        for h in [g.clone(), g.inverse()] {
            if !out.contains(&h) && h != Perm::identity(h.degree()) {
                out.push(h);
            }
        }
    }
    out
}

/// `ℤ/n` with generators `{±k : k in steps}` as a regular permutation group.
pub fn cyclic(n: usize, steps: &[usize]) -> Result<Vec<Perm>> {
    let gens: Result<Vec<Perm>> = steps
        .iter()
        .map(|&k| Perm::new((0..n).map(|x| ((x + k) % n) as u16).collect()))
        .collect();
    Ok(symmetrize(&gens?))
}

/// Dihedral group of order `2n` acting on the `n`-gon.
pub fn dihedral(n: usize) -> Result<Vec<Perm>> {
    let r = Perm::new((0..n).map(|x| ((x + 1) % n) as u16).collect())?;
    let s = Perm::new((0..n).map(|x| ((n - x) % n) as u16).collect())?;
    Ok(symmetrize(&[r, s]))
}

/// `S_4` generated by a transposition and a 4-cycle.
pub fn symmetric4() -> Result<Vec<Perm>> {
    Ok(symmetrize(&[
        Perm::from_cycles(4, &[&[0, 1]])?,
        Perm::from_cycles(4, &[&[0, 1, 2, 3]])?,
    ]))
}

/// `A_5` generated by a 3-cycle and a 5-cycle.
pub fn alternating5() -> Result<Vec<Perm>> {
    Ok(symmetrize(&[
        Perm::from_cycles(5, &[&[0, 1, 2]])?,
        Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])?,
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_acts_on_the_left() {
        let p = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let q = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        // p(q(2)) = p(1) = 0
        assert_eq!(p.compose(&q).unwrap().0[2], 0);
        assert_eq!(p.compose(&p.inverse()).unwrap(), Perm::identity(3));
    }

    #[test]
    fn generator_sets_are_symmetric() {
        for gens in [cyclic(5, &[1]).unwrap(), dihedral(6).unwrap(), alternating5().unwrap()] {
            for g in &gens {
                assert!(gens.contains(&g.inverse()));
            }
        }
        assert_eq!(cyclic(5, &[1]).unwrap().len(), 2);
        // reflections are involutions
        assert_eq!(dihedral(6).unwrap().len(), 3);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Perm::new(vec![0, 0]).is_err());
        assert!(Perm::new(vec![0, 2]).is_err());
    }
}
