use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::matrix::Element;
use crate::error::{Error, Result};
use crate::exec::Exec;

pub const DEFAULT_BALL_CAP: usize = 5_000_000;

const NO_PARENT: u32 = u32::MAX;

fn hash_of<E: Hash>(e: &E) -> u64 {
    let mut h = DefaultHasher::new();
    e.hash(&mut h);
    h.finish()
}

/// Hash lookup into an external element vector; stores only 64-bit hashes
/// and positions, so the elements themselves are not duplicated.
#[derive(Debug, Clone, Default)]
struct ElementIndex {
    first: HashMap<u64, u32>,
    collisions: HashMap<u64, Vec<u32>>,
}

impl ElementIndex {
    fn get<E: Element>(&self, e: &E, elements: &[E]) -> Option<usize> {
        let h = hash_of(e);
        let &k = self.first.get(&h)?;
        if elements[k as usize] == *e {
            return Some(k as usize);
        }
        self.collisions
            .get(&h)?
            .iter()
            .map(|&k| k as usize)
            .find(|&k| elements[k] == *e)
    }

    fn insert_new<E: Element>(&mut self, e: &E, pos: usize) {
        let h = hash_of(e);
        match self.first.entry(h) {
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(pos as u32);
            }
            std::collections::hash_map::Entry::Occupied(_) => {
                self.collisions.entry(h).or_default().push(pos as u32);
            }
        }
    }
}

/// Word-metric ball in a Cayley graph, in breadth-first order.
///
/// Within a level, elements are ordered by (parent index, generator index),
/// where a child is `parent · generator`.
#[derive(Debug, Clone)]
pub struct Ball<E> {
    radius: usize,
    generators: Vec<E>,
    generator_inverse: Vec<usize>,
    elements: Vec<E>,
    word_length: Vec<u32>,
    parent: Vec<(u32, u32)>,
    inverse: Vec<u32>,
    level_start: Vec<usize>,
    index: ElementIndex,
}

/// On-disk form; the hash index is rebuilt on load.
#[derive(Serialize, Deserialize)]
pub(crate) struct BallData<E> {
    pub radius: usize,
    pub generators: Vec<E>,
    pub generator_inverse: Vec<usize>,
    pub elements: Vec<E>,
    pub word_length: Vec<u32>,
    pub parent: Vec<(u32, u32)>,
    pub inverse: Vec<u32>,
    pub level_start: Vec<usize>,
}

impl<E: Element> Ball<E> {
    /// Breadth-first enumeration of the radius-`radius` ball.
    pub fn enumerate(identity: E, generators: &[E], radius: usize, cap: usize, exec: Exec) -> Result<Self> {
        let generator_inverse = generators
            .iter()
            .map(|s| {
                for (t, u) in generators.iter().enumerate() {
                    if s.compose(u)? == identity {
                        return Ok(t);
                    }
                }
                Err(Error::Domain(format!(
                    "generating set is not symmetric: {s:?} has no inverse in it"
                )))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ball = Ball {
            radius: 0,
            generators: generators.to_vec(),
            generator_inverse,
            elements: vec![identity.clone()],
            word_length: vec![0],
            parent: vec![(NO_PARENT, NO_PARENT)],
            inverse: vec![0],
            level_start: vec![0, 1],
            index: ElementIndex::default(),
        };
        ball.index.insert_new(&identity, 0);
        for level in 1..=radius {
            ball.grow(level, cap, exec)?;
        }
        Ok(ball)
    }

    fn grow(&mut self, level: usize, cap: usize, exec: Exec) -> Result<()> {
        let frontier = self.level_start[level - 1]..self.level_start[level];
        let this = &*self;
        let candidates: Vec<Vec<(u32, u32, E)>> = exec.try_map_range(frontier.len(), |k| -> Result<_> {
            let p = frontier.start + k;
            let mut out = Vec::new();
            for (s, g) in this.generators.iter().enumerate() {
                let child = this.elements[p].compose(g)?;
                if this.index.get(&child, &this.elements).is_none() {
                    out.push((p as u32, s as u32, child));
                }
            }
            Ok(out)
        })?;
        for (p, s, child) in candidates.into_iter().flatten() {
            if self.index.get(&child, &self.elements).is_some() {
                continue;
            }
            if self.elements.len() >= cap {
                return Err(Error::Resource(format!(
                    "ball enumeration exceeded the cap of {cap} elements while building \
                     level {level} (levels 0..={} complete)",
                    level - 1
                )));
            }
            let pos = self.elements.len();
            self.index.insert_new(&child, pos);
            self.elements.push(child);
            self.word_length.push(level as u32);
            self.parent.push((p, s));
        }
        let start = self.level_start[level];
        let end = self.elements.len();
        self.level_start.push(end);
        self.radius = level;
        // g = p·s, so g⁻¹ = s⁻¹·p⁻¹ with p⁻¹ already known
        let this = &*self;
        let inv = exec.try_map_range(end - start, |k| -> Result<u32> {
            let (p, s) = this.parent[start + k];
            let t = this.generator_inverse[s as usize];
            let g = this.generators[t].compose(&this.elements[this.inverse[p as usize] as usize])?;
            this.index
                .get(&g, &this.elements)
                .map(|i| i as u32)
                .ok_or_else(|| Error::Consistency("inverse escaped the ball".into()))
        })?;
        self.inverse.extend(inv);
        Ok(())
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &E {
        &self.elements[i]
    }

    pub fn generators(&self) -> &[E] {
        &self.generators
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.word_length[i] as usize
    }

    pub fn index_of(&self, e: &E) -> Option<usize> {
        self.index.get(e, &self.elements)
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i] as usize
    }

    /// `(parent, generator)` with `element(i) = element(parent) · generators[generator]`.
    pub fn parent(&self, i: usize) -> Option<(usize, usize)> {
        let (p, s) = self.parent[i];
        (p != NO_PARENT).then_some((p as usize, s as usize))
    }

    /// Indices of elements at exactly distance `k`.
    pub fn level(&self, k: usize) -> Range<usize> {
        self.level_start[k]..self.level_start[k + 1]
    }

    /// `|B(r)|` for `r <= radius`.
    pub fn size_at(&self, r: usize) -> usize {
        self.level_start[r.min(self.radius) + 1]
    }

    /// Index of the product of two ball elements, computed directly.
    pub fn product_index(&self, i: usize, j: usize) -> Result<Option<usize>> {
        Ok(self.index_of(&self.elements[i].compose(&self.elements[j])?))
    }

    pub(crate) fn to_data(&self) -> BallData<E> {
        BallData {
            radius: self.radius,
            generators: self.generators.clone(),
            generator_inverse: self.generator_inverse.clone(),
            elements: self.elements.clone(),
            word_length: self.word_length.clone(),
            parent: self.parent.clone(),
            inverse: self.inverse.clone(),
            level_start: self.level_start.clone(),
        }
    }

    pub(crate) fn from_data(d: BallData<E>) -> Result<Self> {
        let n = d.elements.len();
        if d.word_length.len() != n
            || d.parent.len() != n
            || d.inverse.len() != n
            || d.level_start.len() != d.radius + 2
            || d.level_start.last() != Some(&n)
        {
            return Err(Error::Consistency("ball data arrays disagree in length".into()));
        }
        let mut index = ElementIndex::default();
        for (i, e) in d.elements.iter().enumerate() {
            if index.get(e, &d.elements[..i]).is_some() {
                return Err(Error::Consistency("duplicate element in ball data".into()));
            }
            index.insert_new(e, i);
        }
        Ok(Ball {
            radius: d.radius,
            generators: d.generators,
            generator_inverse: d.generator_inverse,
            elements: d.elements,
            word_length: d.word_length,
            parent: d.parent,
            inverse: d.inverse,
            level_start: d.level_start,
            index,
        })
    }
}

/// Dense multiplication table `B(r) × B(r) → B(R)` with `R >= 2r`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductTable {
    domain_radius: usize,
    n: usize,
    data: Vec<u32>,
}

impl ProductTable {
    /// Tabulates products of elements of `B(r)` inside a ball of radius `>= 2r`.
    pub fn within<E: Element>(ball: &Ball<E>, r: usize, exec: Exec) -> Result<Self> {
        if ball.radius() < 2 * r {
            return Err(Error::Resource(format!(
                "a product table on radius {r} needs a ball of radius {}, have {}",
                2 * r,
                ball.radius()
            )));
        }
        let n = ball.size_at(r);
        let mut data = vec![0u32; n * n];
        let failure = std::sync::Mutex::new(None);
        exec.for_each_chunk_mut(&mut data, n, |off, row| {
            let i = off / n;
            for (j, slot) in row.iter_mut().enumerate() {
                match ball.product_index(i, j) {
                    Ok(Some(k)) => *slot = k as u32,
                    Ok(None) => {
                        *failure.lock().unwrap() = Some(Error::Consistency(format!(
                            "product of ball elements {i} and {j} is missing from the \
                             radius-{} ball",
                            ball.radius()
                        )))
                    }
                    Err(e) => *failure.lock().unwrap() = Some(e),
                }
            }
        });
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(ProductTable {
            domain_radius: r,
            n,
            data,
        })
    }

    pub fn domain_radius(&self) -> usize {
        self.domain_radius
    }

    /// `|B(r)|`.
    pub fn domain_len(&self) -> usize {
        self.n
    }

    /// Index of `element(i) · element(j)`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.data[i * self.n + j] as usize
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Builds the table for `ball_r` inside `ball_2r`.
pub fn product_table<E: Element>(ball_r: &Ball<E>, ball_2r: &Ball<E>, exec: Exec) -> Result<ProductTable> {
    let r = ball_r.radius();
    if ball_2r.radius() != 2 * r || ball_r.generators() != ball_2r.generators() {
        return Err(Error::Domain(format!(
            "product table needs balls of radius r and 2r over one generating set, got \
             radii {} and {}",
            r,
            ball_2r.radius()
        )));
    }
    if ball_r.elements() != &ball_2r.elements()[..ball_r.len()] {
        return Err(Error::Consistency("smaller ball is not a prefix".into()));
    }
    ProductTable::within(ball_2r, r, exec)
}

#[cfg(test)]
mod tests {
    use super::super::finite::{cyclic, Perm};
    use super::*;

    #[test]
    fn cyclic_ball_sizes() {
        let gens = cyclic(11, &[1]).unwrap();
        let b = Ball::enumerate(Perm::identity(11), &gens, 7, 100, Exec::Sequential).unwrap();
        let sizes: Vec<usize> = (0..=7).map(|r| b.size_at(r)).collect();
        assert_eq!(sizes, vec![1, 3, 5, 7, 9, 11, 11, 11]);
        for i in 0..b.len() {
            assert_eq!(b.word_length(b.inverse(i)), b.word_length(i));
            assert_eq!(b.inverse(b.inverse(i)), i);
        }
    }

    #[test]
    fn cap_reports_level() {
        let gens = cyclic(101, &[1]).unwrap();
        let err = Ball::enumerate(Perm::identity(101), &gens, 10, 6, Exec::Sequential).unwrap_err();
        match err {
            Error::Resource(m) => assert!(m.contains("level 3"), "{m}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn asymmetric_generators_rejected() {
        let g = vec![Perm::new(vec![1, 2, 0]).unwrap()];
        assert!(Ball::enumerate(Perm::identity(3), &g, 1, 10, Exec::Sequential).is_err());
    }
}
