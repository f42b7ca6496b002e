//! Outward-rounded interval arithmetic and a verified positive-definiteness
//! test.
//!
//! Every operation is evaluated in round-to-nearest and then widened by one
//! ulp on each side, which encloses the exact result.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    fn widen(lo: f64, hi: f64) -> Self {
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    pub fn add(self, o: Self) -> Self {
        Self::widen(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::widen(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn mul(self, o: Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::widen(lo, hi)
    }

    /// Upper bound of `|x|` over the interval.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Outcome of a successful definiteness proof: `λ_min(A) ⩾ shift − residual`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefinitenessProof {
    pub shift: f64,
    /// Rigorous upper bound of `‖A − shift·I − LLᵀ‖_F`.
    pub residual: f64,
}

/// Why a definiteness proof failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DefinitenessFailure {
    /// Floating-point Cholesky of `A − shift·I` broke down at this pivot.
    Pivot(usize),
    /// The factorization error is not dominated by the shift.
    Residual { shift: f64, residual: f64 },
}

fn cholesky_lower(a: &[f64], n: usize, shift: f64) -> Result<Vec<f64>, usize> {
    let mut l = vec![0.0f64; n * n];
    for j in 0..n {
        let row_j = &l[j * n..j * n + j];
        let d = a[j * n + j] - shift - row_j.iter().map(|v| v * v).sum::<f64>();
        if !(d > 0.0) {
            return Err(j);
        }
        let pivot = d.sqrt();
        l[j * n + j] = pivot;
        for i in (j + 1)..n {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            l[i * n + j] = (a[i * n + j] - s) / pivot;
        }
    }
    Ok(l)
}

/// Encloses `‖A − shift·I − LLᵀ‖_F` from above.
fn residual_bound(a: &[f64], n: usize, shift: f64, l: &[f64]) -> f64 {
    let mut sq = Interval::point(0.0);
    for i in 0..n {
        for j in 0..=i {
            let mut e = Interval::point(a[i * n + j]);
            if i == j {
                e = e.sub(Interval::point(shift));
            }
            for k in 0..=j {
                e = e.sub(Interval::point(l[i * n + k]).mul(Interval::point(l[j * n + k])));
            }
            let m = Interval::point(e.mag());
            let t = m.mul(m);
            sq = sq.add(if i == j { t } else { t.add(t) });
        }
    }
    sq.hi.sqrt().next_up()
}

/// Proves that a symmetric row-major matrix with exactly representable
/// entries is positive definite: factor `A − δI ≈ LLᵀ` in floating point,
/// enclose the error `E` with intervals, and check `δ > ‖E‖_F`, since then
/// `A = LLᵀ + δI + E ⪰ (δ − ‖E‖₂)·I`.
pub fn verify_positive_definite(a: &[f64], n: usize) -> Result<DefinitenessProof, DefinitenessFailure> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(DefinitenessProof {
            shift: 0.0,
            residual: 0.0,
        });
    }
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    // comfortably above the expected factorization error n·u·‖A‖
    let mut shift = (n as f64) * max_diag * f64::EPSILON * 4.0;
    for _ in 0..8 {
        let l = cholesky_lower(a, n, shift).map_err(DefinitenessFailure::Pivot)?;
        let residual = residual_bound(a, n, shift, &l);
        if residual < shift {
            return Ok(DefinitenessProof { shift, residual });
        }
        shift = 2.0 * residual;
    }
    let residual = cholesky_lower(a, n, shift)
        .map(|l| residual_bound(a, n, shift, &l))
        .map_err(DefinitenessFailure::Pivot)?;
    Err(DefinitenessFailure::Residual { shift, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operations_enclose_exact_results() {
        let third = Interval::point(1.0).mul(Interval::point(1.0 / 3.0));
        assert!(third.lo < third.hi);
        let s = Interval::point(0.1).add(Interval::point(0.2));
        assert!(s.lo <= 0.30000000000000004 && s.hi >= 0.3);
        let d = Interval::point(1.0).sub(Interval::point(1e-20));
        assert!(d.lo < 1.0 && d.hi >= 1.0);
    }

    #[test]
    fn accepts_definite_and_rejects_singular() {
        assert!(verify_positive_definite(&[2.0, -1.0, -1.0, 2.0], 2).is_ok());
        assert!(verify_positive_definite(&[1.0, 1.0, 1.0, 1.0], 2).is_err());
        assert_eq!(verify_positive_definite(&[-1.0], 1), Err(DefinitenessFailure::Pivot(0)));
    }

    #[test]
    fn handles_ill_conditioned_but_definite() {
        // diag(1, 1e-9) rotated by 45°
        let (a, b) = (0.5 * (1.0 + 1e-9), 0.5 * (1.0 - 1e-9));
        assert!(verify_positive_definite(&[a, b, b, a], 2).is_ok());
    }
}
