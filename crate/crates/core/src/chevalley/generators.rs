use super::matrix::{Element, IntMatrix};
use crate::error::{Error, Result};
use crate::rootsys::{Family, RootSystem};

/// Steinberg generators graded by roots.
///
/// `elements[2a]` is `x_α(1)` and `elements[2a + 1]` is `x_α(-1)` for
/// `α = roots[a]`.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    system: RootSystem,
    elements: Vec<IntMatrix>,
}

impl GeneratorSet {
    pub fn system(&self) -> &RootSystem {
        &self.system
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn matrix_dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// `(x_α(1), x_α(-1))`.
    pub fn pair(&self, root: usize) -> (&IntMatrix, &IntMatrix) {
        (&self.elements[2 * root], &self.elements[2 * root + 1])
    }

    /// Generator indices belonging to `roots[root]`.
    pub fn indices_of_root(root: usize) -> [usize; 2] {
        [2 * root, 2 * root + 1]
    }

    pub fn root_of(generator: usize) -> usize {
        generator / 2
    }

    /// Principal submatrix on the matrix indices used by the standard
    /// embedding of a lower-rank system of the same family.
    pub fn restrict_matrix(&self, m: &IntMatrix, sub_rank: usize) -> Result<IntMatrix> {
        let idx = embedding_indices(self.system.family(), self.system.rank(), sub_rank)?;
        let rows: Vec<Vec<i64>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| m.get(i, j)).collect())
            .collect();
        IntMatrix::from_rows(&rows)
    }
}

fn embedding_indices(family: Family, rank: usize, sub_rank: usize) -> Result<Vec<usize>> {
    if sub_rank > rank {
        return Err(Error::Domain(format!(
            "cannot restrict rank {rank} to larger rank {sub_rank}"
        )));
    }
    Ok(match family {
        Family::A => (0..=sub_rank).collect(),
        Family::C => (0..sub_rank).chain(rank..rank + sub_rank).collect(),
        f => return Err(Error::Unsupported(format!("no matrix realization for type {f}"))),
    })
}

/// Matrix entries `(row, col, coefficient)` of `x_α(t) - I` divided by `t`.
fn root_entries(family: Family, n: usize, coords: &[i64]) -> Result<Vec<(usize, usize, i64)>> {
    let nz: Vec<(usize, i64)> = coords
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let bad = || Error::Consistency(format!("unexpected root {coords:?} in type {family}"));
    Ok(match (family, nz.as_slice()) {
        (Family::A, [(i, a), (j, _)]) => {
            let (p, q) = if *a > 0 { (*i, *j) } else { (*j, *i) };
            vec![(p, q, 1)]
        }
        (Family::C, [(i, 2)]) => vec![(*i, i + n, 1)],
        (Family::C, [(i, -2)]) => vec![(i + n, *i, 1)],
        (Family::C, [(i, a), (j, b)]) => match (a, b) {
            (1, -1) => vec![(*i, *j, 1), (n + j, n + i, -1)],
            (-1, 1) => vec![(*j, *i, 1), (n + i, n + j, -1)],
            (1, 1) => vec![(*i, j + n, 1), (*j, i + n, 1)],
            (-1, -1) => vec![(j + n, *i, 1), (i + n, *j, 1)],
            _ => return Err(bad()),
        },
        _ => return Err(bad()),
    })
}

/// The generators `x_α(±1)` for `SL_{n+1}(ℤ)` (type A) or `Sp_{2n}(ℤ)`
/// (type C), validated against every structural invariant.
pub fn steinberg_generators(family: Family, rank: usize) -> Result<GeneratorSet> {
    let system = RootSystem::build(family, rank)?;
    let dim = match family {
        Family::A => rank + 1,
        Family::C => 2 * rank,
        f => {
            return Err(Error::Unsupported(format!(
                "type {f} has no matrix realization here; its bounds come from the \
                 replicate module"
            )))
        }
    };
    let mut elements = Vec::with_capacity(2 * system.len());
    for r in system.roots() {
        let e = root_entries(family, rank, r.coords())?;
        elements.push(IntMatrix::elementary(dim, &e));
        let neg: Vec<_> = e.iter().map(|&(i, j, c)| (i, j, -c)).collect();
        elements.push(IntMatrix::elementary(dim, &neg));
    }
    let gens = GeneratorSet { system, elements };
    validate(&gens)?;
    Ok(gens)
}

fn validate(g: &GeneratorSet) -> Result<()> {
    let rs = &g.system;
    let fail = |msg: String| Err(Error::Consistency(msg));
    for a in 0..rs.len() {
        let (p, m) = g.pair(a);
        if !p.compose(m)?.is_identity() {
            return fail(format!("x_α(-1) is not the inverse of x_α(1) for root {a}"));
        }
        if p.det()? != 1 {
            return fail(format!("generator for root {a} has determinant != 1"));
        }
        if rs.family() == Family::C && !p.is_symplectic()? {
            return fail(format!("generator for root {a} is not symplectic"));
        }
        if *g.pair(rs.negative(a)).0 != p.transpose() {
            return fail(format!("x_-α(1) is not the transpose of x_α(1) for root {a}"));
        }
    }
    let mut sorted = g.elements.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != g.elements.len() {
        return fail("generator sets of distinct roots overlap".into());
    }
    for a in 0..rs.len() {
        for b in 0..rs.len() {
            if rs.proportional(a, b) {
                continue;
            }
            let sum: Vec<i64> = rs
                .root(a)
                .coords()
                .iter()
                .zip(rs.root(b).coords())
                .map(|(x, y)| x + y)
                .collect();
            let expect = rs.index_of(&sum).is_none();
            let (x, y) = (g.pair(a).0, g.pair(b).0);
            if (x.compose(y)? == y.compose(x)?) != expect {
                return fail(format!(
                    "commutation of roots {a}, {b} disagrees with the root-sum criterion"
                ));
            }
        }
    }
    Ok(())
}

/// True when `S_α` and `S_β` commute elementwise.
pub fn generators_commute(g: &GeneratorSet, a: usize, b: usize) -> Result<bool> {
    let (p, m) = g.pair(a);
    let (q, n) = g.pair(b);
    for x in [p, m] {
        for y in [q, n] {
            if x.compose(y)? != y.compose(x)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen_for(g: &GeneratorSet, coords: &[i64]) -> IntMatrix {
        let a = g.system().index_of(coords).unwrap();
        g.pair(a).0.clone()
    }

    #[test]
    fn type_a_generators() {
        let g = steinberg_generators(Family::A, 2).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g.matrix_dim(), 3);
        assert_eq!(gen_for(&g, &[1, -1, 0]), IntMatrix::elementary(3, &[(0, 1, 1)]));
    }

    #[test]
    fn type_c_generators() {
        let g = steinberg_generators(Family::C, 2).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(gen_for(&g, &[2, 0]), IntMatrix::elementary(4, &[(0, 2, 1)]));
        let m = gen_for(&g, &[1, 1]);
        let off: Vec<(usize, usize)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && m.get(i, j) != 0)
            .collect();
        // 1-based positions (1,4) and (2,3)
        assert_eq!(off, vec![(0, 3), (1, 2)]);
        assert!(off.iter().all(|&(i, j)| m.get(i, j) == 1));
    }

    #[test]
    fn unsupported_families() {
        for (f, n) in [(Family::B, 2), (Family::D, 4), (Family::G, 2)] {
            assert!(matches!(steinberg_generators(f, n), Err(Error::Unsupported(_))));
        }
    }

    #[test]
    fn orthogonal_long_short_commute_but_short_short_in_c2_do_not() {
        let g = steinberg_generators(Family::C, 3).unwrap();
        let rs = g.system();
        let i = |c: &[i64]| rs.index_of(c).unwrap();
        assert!(generators_commute(&g, i(&[1, -1, 0]), i(&[0, 0, 2])).unwrap());
        assert!(generators_commute(&g, i(&[1, 0, -1]), i(&[0, 2, 0])).unwrap());
        assert!(!generators_commute(&g, i(&[1, -1, 0]), i(&[1, 1, 0])).unwrap());
    }

    #[test]
    fn steinberg_relation_has_order_four() {
        for (f, n) in [(Family::A, 2), (Family::C, 2)] {
            let g = steinberg_generators(f, n).unwrap();
            for a in 0..g.system().len() {
                let x = g.pair(a).0;
                let y = g.pair(g.system().negative(a)).1;
                let w = x.compose(y).unwrap().compose(x).unwrap();
                let w2 = w.compose(&w).unwrap();
                assert!(!w2.is_identity());
                assert!(w2.compose(&w2).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn subsystem_restriction_matches_lower_rank() {
        for f in [Family::A, Family::C] {
            let (big, small) = (3, 2);
            let g = steinberg_generators(f, big).unwrap();
            let h = steinberg_generators(f, small).unwrap();
            let emb = g.system().coordinate_embedding(h.system()).unwrap();
            for (sa, &ba) in emb.iter().enumerate() {
                for s in 0..2 {
                    let m = &g.elements()[2 * ba + s];
                    assert_eq!(&g.restrict_matrix(m, small).unwrap(), &h.elements()[2 * sa + s]);
                }
            }
        }
    }
}
