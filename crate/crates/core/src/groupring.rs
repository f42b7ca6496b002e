//! Exact sparse arithmetic in the real group ring, restricted to an
//! enumerated ball.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chevalley::{Ball, Element, ProductTable};
use crate::error::{Error, Result};
use crate::exec::Exec;

static NEXT_CONTEXT: AtomicU64 = AtomicU64::new(0);

/// The basis shared by ring elements: a ball plus an optional product table
/// on a smaller radius. Products outside the table are computed directly and
/// looked up in the ball.
#[derive(Debug)]
pub struct RingContext<E> {
    id: u64,
    ball: Ball<E>,
    table: Option<ProductTable>,
    exec: Exec,
}

impl<E: Element> RingContext<E> {
    pub fn new(ball: Ball<E>, table: Option<ProductTable>, exec: Exec) -> Result<Arc<Self>> {
        if let Some(t) = &table {
            if 2 * t.domain_radius() > ball.radius() {
                return Err(Error::Domain("product table exceeds the ball".into()));
            }
        }
        Ok(Arc::new(RingContext {
            id: NEXT_CONTEXT.fetch_add(1, Ordering::Relaxed),
            ball,
            table,
            exec,
        }))
    }

    pub fn ball(&self) -> &Ball<E> {
        &self.ball
    }

    pub fn table(&self) -> Option<&ProductTable> {
        self.table.as_ref()
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    /// Index of `element(i) · element(j)`.
    pub fn product(&self, i: usize, j: usize) -> Result<usize> {
        if let Some(t) = &self.table {
            if i < t.domain_len() && j < t.domain_len() {
                return Ok(t.get(i, j));
            }
        }
        self.ball.product_index(i, j)?.ok_or_else(|| {
            Error::Resource(format!(
                "product needs a ball of radius {}, the context has radius {}",
                self.ball.word_length(i) + self.ball.word_length(j),
                self.ball.radius()
            ))
        })
    }
}

/// A finitely supported element of `ℚG`.
#[derive(Clone)]
pub struct RingElement<E> {
    ctx: Arc<RingContext<E>>,
    coeffs: BTreeMap<usize, BigRational>,
}

impl<E: Element> fmt::Debug for RingElement<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().map(|(k, v)| format!("{v}·g{k}")).collect();
        write!(f, "RingElement[{}]", terms.join(" + "))
    }
}

impl<E: Element> PartialEq for RingElement<E> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.id == other.ctx.id && self.coeffs == other.coeffs
    }
}

/// Ball-index-free serialized term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerializedTerm {
    pub word_length: usize,
    pub element: String,
    pub numerator: String,
    pub denominator: String,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl<E: Element> RingElement<E> {
    pub fn zero(ctx: &Arc<RingContext<E>>) -> Self {
        RingElement {
            ctx: Arc::clone(ctx),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<RingContext<E>>) -> Self {
        Self::basis(ctx, 0)
    }

    pub fn basis(ctx: &Arc<RingContext<E>>, index: usize) -> Self {
        Self::from_terms(ctx, [(index, rat(1))])
    }

    pub fn from_terms(ctx: &Arc<RingContext<E>>, terms: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (k, v) in terms {
            assert!(k < ctx.ball.len(), "basis index {k} outside the ball");
            *coeffs.entry(k).or_insert_with(BigRational::zero) += v;
        }
        coeffs.retain(|_, v| !v.is_zero());
        RingElement {
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    pub fn from_integer_terms(ctx: &Arc<RingContext<E>>, terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        Self::from_terms(ctx, terms.into_iter().map(|(k, v)| (k, rat(v))))
    }

    pub fn context(&self) -> &Arc<RingContext<E>> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigRational> {
        &self.coeffs
    }

    pub fn coeff(&self, index: usize) -> BigRational {
        self.coeffs.get(&index).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest `r` with support inside `B(r)`.
    pub fn support_radius(&self) -> usize {
        self.coeffs
            .keys()
            .map(|&k| self.ctx.ball.word_length(k))
            .max()
            .unwrap_or(0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx.id == other.ctx.id {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            *coeffs.entry(*k).or_insert_with(BigRational::zero) += v;
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(RingElement {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        RingElement {
            ctx: Arc::clone(&self.ctx),
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let left: Vec<(&usize, &BigRational)> = self.coeffs.iter().collect();
        let partials = self.ctx.exec.try_map_range(left.len(), |a| {
            let (&i, x) = left[a];
            let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
            for (&j, y) in &other.coeffs {
                let k = self.ctx.product(i, j)?;
                *acc.entry(k).or_insert_with(BigRational::zero) += x * y;
            }
            Ok::<_, Error>(acc)
        })?;
        let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
        for part in partials {
            for (k, v) in part {
                *coeffs.entry(k).or_insert_with(BigRational::zero) += v;
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        Ok(RingElement {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        })
    }

    /// The involution `g ↦ g⁻¹`.
    pub fn star(&self) -> Self {
        RingElement {
            ctx: Arc::clone(&self.ctx),
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, v)| (self.ctx.ball.inverse(k), v.clone()))
                .collect(),
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.star().coeffs == self.coeffs
    }

    pub fn l1_norm(&self) -> BigRational {
        self.coeffs.values().map(|v| v.abs()).sum()
    }

    pub fn augmentation(&self) -> BigRational {
        self.coeffs.values().sum()
    }

    pub fn to_serialized(&self) -> Vec<SerializedTerm> {
        self.coeffs
            .iter()
            .map(|(&k, v)| SerializedTerm {
                word_length: self.ctx.ball.word_length(k),
                element: hex::encode(self.ctx.ball.element(k).canonical_bytes()),
                numerator: v.numer().to_string(),
                denominator: v.denom().to_string(),
            })
            .collect()
    }

    pub fn from_serialized(ctx: &Arc<RingContext<E>>, terms: &[SerializedTerm]) -> Result<Self> {
        let lookup: HashMap<String, usize> = ctx
            .ball
            .elements()
            .iter()
            .enumerate()
            .map(|(i, e)| (hex::encode(e.canonical_bytes()), i))
            .collect();
        let parsed = terms
            .iter()
            .map(|t| {
                let k = *lookup
                    .get(&t.element)
                    .ok_or_else(|| Error::Domain(format!("element {} is not in the ball", t.element)))?;
                if ctx.ball.word_length(k) != t.word_length {
                    return Err(Error::Domain(format!(
                        "word length {} recorded for an element of length {}",
                        t.word_length,
                        ctx.ball.word_length(k)
                    )));
                }
                let parse = |s: &str| {
                    s.parse::<BigInt>()
                        .map_err(|e| Error::Domain(format!("bad integer {s:?}: {e}")))
                };
                let den = parse(&t.denominator)?;
                if den.is_zero() {
                    return Err(Error::Domain("zero denominator".into()));
                }
                Ok((k, BigRational::new(parse(&t.numerator)?, den)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(ctx, parsed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::finite::{cyclic, Perm};

    fn z7() -> Arc<RingContext<Perm>> {
        let gens = cyclic(7, &[1, 2]).unwrap();
        let ball = Ball::enumerate(Perm::identity(7), &gens, 4, 100, Exec::Sequential).unwrap();
        let table = ProductTable::within(&ball, 2, Exec::Sequential).unwrap();
        RingContext::new(ball, Some(table), Exec::default()).unwrap()
    }

    #[test]
    fn additive_identities() {
        let ctx = z7();
        let x = RingElement::from_integer_terms(&ctx, [(0, 3), (2, -1), (4, 5)]);
        assert!(x.add(&x.scale(&rat(-1))).unwrap().is_zero());
        assert!(x.scale(&rat(0)).is_zero());
        assert_eq!(RingElement::one(&ctx).mul(&x).unwrap(), x);
    }

    #[test]
    fn contexts_do_not_mix() {
        let (a, b) = (z7(), z7());
        let x = RingElement::one(&a);
        let y = RingElement::one(&b);
        assert!(matches!(x.add(&y), Err(Error::ContextMismatch)));
    }

    #[test]
    fn serialization_round_trip() {
        let ctx = z7();
        let x = RingElement::from_terms(&ctx, [(1, BigRational::new(3.into(), 7.into())), (3, rat(-2))]);
        let s = x.to_serialized();
        assert_eq!(RingElement::from_serialized(&ctx, &s).unwrap(), x);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"denominator\":\"7\""));
    }
}
