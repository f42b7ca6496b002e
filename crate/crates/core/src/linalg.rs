//! Dense symmetric floating-point kernels. Nothing here is used for
//! certification; results only guide the exact steps.

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    /// `Π A Π` with `Π = I − 11ᵀ/n`, so that the all-ones vector is in the kernel.
    pub fn center(&mut self) {
        let n = self.n;
        let means: Vec<f64> = (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64)
            .collect();
        let grand = means.iter().sum::<f64>() / n as f64;
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] += grand - means[i] - means[j];
            }
        }
    }

    fn to_faer(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |i, j| self.data[i * self.n + j])
    }
}

/// Eigenvalues (ascending) and column eigenvectors.
pub struct Eigen {
    pub values: Vec<f64>,
    vectors: Mat<f64>,
}

pub fn sym_eigen(a: &SymMat) -> Result<Eigen> {
    let evd = a
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Consistency(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..a.n).map(|i| s[i]).collect();
    Ok(Eigen {
        values,
        vectors: evd.U().to_owned(),
    })
}

impl Eigen {
    /// `Σ f(λ_k) u_k u_kᵀ` over the eigenpairs with `keep(λ_k)`.
    pub fn reassemble(&self, keep: impl Fn(f64) -> bool, f: impl Fn(f64) -> f64) -> SymMat {
        let n = self.values.len();
        let cols: Vec<usize> = (0..n).filter(|&k| keep(self.values[k])).collect();
        let mut out = SymMat::zeros(n);
        if cols.is_empty() {
            return out;
        }
        let w = Mat::from_fn(n, cols.len(), |i, c| {
            self.vectors[(i, cols[c])] * f(self.values[cols[c]]).sqrt()
        });
        let prod = &w * w.transpose();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = prod[(i, j)];
            }
        }
        out
    }
}

/// Nearest positive semidefinite matrix in Frobenius norm, with eigenvalues
/// floored at `floor >= 0`.
pub fn psd_project(a: &SymMat, floor: f64) -> Result<(SymMat, f64)> {
    let e = sym_eigen(a)?;
    let min = e.values.first().copied().unwrap_or(0.0);
    let n_pos = e.values.iter().filter(|&&v| v > floor).count();
    let out = if floor == 0.0 && n_pos * 2 > a.n {
        // A - Σ_{λ<0} λ u uᵀ touches fewer eigenvectors
        let neg = e.reassemble(|v| v < 0.0, |v| -v);
        let mut m = a.clone();
        for (x, y) in m.data.iter_mut().zip(&neg.data) {
            *x += y;
        }
        m
    } else {
        e.reassemble(|v| floor > 0.0 || v > 0.0, |v| v.max(floor))
    };
    Ok((out, min))
}

pub fn min_eigenvalue(a: &SymMat) -> Result<f64> {
    Ok(sym_eigen(a)?.values.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centering_kills_constants() {
        let mut a = SymMat {
            n: 3,
            data: vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0],
        };
        a.center();
        for i in 0..3 {
            let row: f64 = (0..3).map(|j| a.get(i, j)).sum();
            assert!(row.abs() < 1e-12);
        }
    }

    #[test]
    fn projection_clips_negative_part() {
        let a = SymMat {
            n: 2,
            data: vec![0.0, 1.0, 1.0, 0.0],
        };
        let (p, min) = psd_project(&a, 0.0).unwrap();
        assert!((min + 1.0).abs() < 1e-12);
        for x in p.data {
            assert!((x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn both_projection_paths_agree() {
        let n = 6;
        let mut a = SymMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a.data[i * n + j] = ((i * 3 + j * 3 + i * j) % 7) as f64 - 2.0;
            }
        }
        a.symmetrize();
        let e = sym_eigen(&a).unwrap();
        let direct = e.reassemble(|_| true, |v| v.max(0.0));
        let (p, _) = psd_project(&a, 0.0).unwrap();
        for (x, y) in direct.data.iter().zip(&p.data) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
