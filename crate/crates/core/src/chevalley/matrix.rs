use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A group element usable as a Cayley-graph vertex.
pub trait Element: Clone + Eq + Hash + Send + Sync + fmt::Debug {
    /// `self · other`.
    fn compose(&self, other: &Self) -> Result<Self>;

    /// Row-major little-endian bytes; equal elements give equal bytes.
    fn canonical_bytes(&self) -> Vec<u8>;
}

/// Dense square integer matrix with overflow-checked arithmetic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[i64]> = self.data.chunks(self.dim).collect();
        write!(f, "{rows:?}")
    }
}

impl IntMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1;
        }
        IntMatrix { dim, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Domain("matrix rows must form a square".into()));
        }
        Ok(IntMatrix {
            dim,
            data: rows.concat(),
        })
    }

    /// `I + t·E_{i,j}` summed over the given entries.
    pub fn elementary(dim: usize, entries: &[(usize, usize, i64)]) -> Self {
        let mut m = Self::identity(dim);
        for &(i, j, t) in entries {
            m.data[i * dim + j] += t;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.dim + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        IntMatrix { dim: n, data }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Domain(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.dim, other.dim
            )));
        }
        let n = self.dim;
        let mut data = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.data[k * n + j];
                    if b != 0 {
                        let c = &mut data[i * n + j];
                        *c = a
                            .checked_mul(b)
                            .and_then(|p| c.checked_add(p))
                            .ok_or(Error::Overflow("integer matrix product"))?;
                    }
                }
            }
        }
        Ok(IntMatrix { dim: n, data })
    }

    /// Determinant by fraction-free Bareiss elimination in `i128`.
    pub fn det(&self) -> Result<i64> {
        let n = self.dim;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                    return Ok(0);
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i * n + j]
                        .checked_mul(a[k * n + k])
                        .zip(a[i * n + k].checked_mul(a[k * n + j]))
                        .and_then(|(x, y)| x.checked_sub(y))
                        .ok_or(Error::Overflow("determinant"))?;
                    a[i * n + j] = v / prev;
                }
            }
            prev = a[k * n + k];
        }
        i64::try_from(sign * a[n * n - 1]).map_err(|_| Error::Overflow("determinant"))
    }

    /// The standard symplectic form `[[0, I], [-I, 0]]` of size `2n`.
    pub fn symplectic_form(n: usize) -> Self {
        let mut m = IntMatrix {
            dim: 2 * n,
            data: vec![0; 4 * n * n],
        };
        for i in 0..n {
            m.data[i * 2 * n + n + i] = 1;
            m.data[(n + i) * 2 * n + i] = -1;
        }
        m
    }

    pub fn is_symplectic(&self) -> Result<bool> {
        if !self.dim.is_multiple_of(2) {
            return Ok(false);
        }
        let j = Self::symplectic_form(self.dim / 2);
        Ok(self.transpose().mul(&j)?.mul(self)? == j)
    }
}

impl Element for IntMatrix {
    fn compose(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        self.data.iter().flat_map(|x| x.to_le_bytes()).collect()
    }
}
