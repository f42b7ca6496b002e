//! Root Laplacians, adjacency and level elements, built as formal pair
//! tensors and evaluated into the group ring on demand.

mod levels;
mod tensor;

use std::collections::HashMap;
use std::sync::Arc;

pub use levels::{check_weyl_sum, embed_tensor, lemma_constant, levels, weyl_sum, LevelDecomposition, WeylSumCheck};
pub use tensor::{adj_tensor, full_square_tensor, sq_tensor, AdjScope, LengthClass, PairTensor};

use crate::chevalley::{enumerate_ball_with, Ball, Element, GeneratorSet, IntMatrix, ProductTable, DEFAULT_BALL_CAP};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groupring::{RingContext, RingElement};
use crate::rootsys::AdmissiblePlane;

/// `|S| - Σ_{s ∈ S} s` for the generating set of the context's ball.
pub fn group_laplacian<E: Element>(ctx: &Arc<RingContext<E>>) -> Result<RingElement<E>> {
    let ball = ctx.ball();
    let mut terms = vec![(0usize, ball.generators().len() as i64)];
    for s in ball.generators() {
        let k = ball
            .index_of(s)
            .ok_or_else(|| Error::Resource("the ball does not contain radius 1".into()))?;
        terms.push((k, -1));
    }
    Ok(RingElement::from_integer_terms(ctx, terms))
}

/// Which roots a subspace Laplacian sums over.
#[derive(Debug, Clone, Copy)]
pub enum Subspace<'a> {
    Plane(&'a AdmissiblePlane),
    /// Real span of the given ambient vectors; roots outside contribute nothing.
    Span(&'a [Vec<i64>]),
    Full,
}

fn rank_i128(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                for k in 0..cols {
                    m[r][k] = m[r][k] * a - m[rank][k] * b;
                }
                let g = m[r].iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                if g > 1 {
                    m[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A Chevalley group with its Steinberg generators and an enumerated ball.
#[derive(Debug, Clone)]
pub struct ChevalleyRing {
    gens: GeneratorSet,
    ctx: Arc<RingContext<IntMatrix>>,
    gen_index: Vec<usize>,
}

impl ChevalleyRing {
    /// Ball of radius `2r` with a product table on `B(r)`.
    pub fn new(gens: GeneratorSet, r: usize, exec: Exec) -> Result<Self> {
        let ball = enumerate_ball_with(&gens, 2 * r, DEFAULT_BALL_CAP, exec)?;
        let table = ProductTable::within(&ball, r, exec)?;
        Self::from_parts(gens, RingContext::new(ball, Some(table), exec)?)
    }

    pub fn from_parts(gens: GeneratorSet, ctx: Arc<RingContext<IntMatrix>>) -> Result<Self> {
        if ctx.ball().generators() != gens.elements() {
            return Err(Error::Domain("ball was built from other generators".into()));
        }
        let gen_index = gens
            .elements()
            .iter()
            .map(|g| {
                ctx.ball()
                    .index_of(g)
                    .ok_or_else(|| Error::Resource("the ball does not contain radius 1".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChevalleyRing { gens, ctx, gen_index })
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn context(&self) -> &Arc<RingContext<IntMatrix>> {
        &self.ctx
    }

    pub fn ball(&self) -> &Ball<IntMatrix> {
        self.ctx.ball()
    }

    /// Sparse integer form of `Δ_α`: identity, `x_α(1)`, `x_α(-1)`.
    fn delta_terms(&self, root: usize) -> [(usize, i64); 3] {
        [
            (0, 2),
            (self.gen_index[2 * root], -1),
            (self.gen_index[2 * root + 1], -1),
        ]
    }

    pub fn delta_root(&self, root: usize) -> Result<RingElement<IntMatrix>> {
        if root >= self.gens.system().len() {
            return Err(Error::Domain(format!("root index {root} is not in the grading")));
        }
        Ok(RingElement::from_integer_terms(&self.ctx, self.delta_terms(root)))
    }

    pub fn laplacian(&self) -> RingElement<IntMatrix> {
        let rs = self.gens.system();
        RingElement::from_integer_terms(&self.ctx, (0..rs.len()).flat_map(|a| self.delta_terms(a)))
    }

    /// `Δ_W = Σ_{α ∈ Ω ∩ W} Δ_α`.
    pub fn delta_subspace(&self, w: Subspace<'_>) -> RingElement<IntMatrix> {
        let rs = self.gens.system();
        let roots: Vec<usize> = match w {
            Subspace::Plane(p) => p.member_roots.clone(),
            Subspace::Full => (0..rs.len()).collect(),
            Subspace::Span(vs) => {
                let base = rank_i128(vs);
                (0..rs.len())
                    .filter(|&a| {
                        let mut rows = vs.to_vec();
                        rows.push(rs.root(a).coords().to_vec());
                        rank_i128(&rows) == base
                    })
                    .collect()
            }
        };
        RingElement::from_integer_terms(&self.ctx, roots.into_iter().flat_map(|a| self.delta_terms(a)))
    }

    /// `Σ m·Δ_α·Δ_β`, accumulated in checked integers.
    pub fn evaluate(&self, t: &PairTensor) -> Result<RingElement<IntMatrix>> {
        let terms: Vec<(&(usize, usize), &i64)> = t.terms().iter().collect();
        let n_roots = self.gens.system().len();
        if let Some(((a, b), _)) = terms.iter().find(|((a, b), _)| *a >= n_roots || *b >= n_roots) {
            return Err(Error::Domain(format!("pair ({a}, {b}) is outside the root system")));
        }
        let chunk = 64;
        let parts = self.ctx.exec().try_map_range(terms.len().div_ceil(chunk), |c| {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(&(a, b), &m) in &terms[c * chunk..((c + 1) * chunk).min(terms.len())] {
                for (i, x) in self.delta_terms(a) {
                    for (j, y) in self.delta_terms(b) {
                        let k = self.ctx.product(i, j)?;
                        let e = acc.entry(k).or_insert(0);
                        *e = m
                            .checked_mul(x * y)
                            .and_then(|v| e.checked_add(v))
                            .ok_or(Error::Overflow("tensor evaluation"))?;
                    }
                }
            }
            Ok::<_, Error>(acc)
        })?;
        let mut total: HashMap<usize, i64> = HashMap::new();
        for p in parts {
            for (k, v) in p {
                let e = total.entry(k).or_insert(0);
                *e = e.checked_add(v).ok_or(Error::Overflow("tensor evaluation"))?;
            }
        }
        Ok(RingElement::from_integer_terms(&self.ctx, total))
    }
}
