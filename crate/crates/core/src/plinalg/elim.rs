use crate::error::{Error, Result};
use crate::padic::{cmp_valuation, PadicScalar};

use super::PMatrix;

/// `P * m = L * U` with `P` the row permutation `perm` (row `i` of `P*m`
/// is row `perm[i]` of `m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluDecomposition {
    pub perm: Vec<usize>,
    pub lower: PMatrix,
    pub upper: PMatrix,
}

impl PluDecomposition {
    pub fn permutation_matrix(&self) -> PMatrix {
        let ctx = self.lower.ctx();
        let n = self.perm.len();
        let mut p = PMatrix::zeros(ctx, n, n);
        for (i, &src) in self.perm.iter().enumerate() {
            p[(i, src)] = PadicScalar::one(ctx);
        }
        p
    }

    fn permutation_sign(&self) -> i64 {
        let mut seen = vec![false; self.perm.len()];
        let mut sign = 1;
        for start in 0..self.perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

/// Index of the entry of least valuation in `m[from.., col]`, lowest row on ties.
fn pivot_row(m: &PMatrix, col: usize, from: usize) -> Option<usize> {
    (from..m.rows())
        .filter(|&i| !m[(i, col)].is_zero())
        .min_by(|&a, &b| cmp_valuation(&m[(a, col)], &m[(b, col)]).then(a.cmp(&b)))
}

/// LU factorisation with largest-absolute-value pivoting. Every multiplier
/// has non-negative valuation.
pub fn plu_eliminate(m: &PMatrix) -> Result<PluDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("plu_eliminate needs a square matrix".into()));
    }
    let n = m.rows();
    let ctx = m.ctx();
    let mut upper = m.clone();
    let mut lower = PMatrix::identity(ctx, n);
    let mut perm: Vec<usize> = (0..n).collect();
    for t in 0..n {
        let r = pivot_row(&upper, t, t).ok_or(Error::SingularToPrecision)?;
        if r != t {
            upper.swap_rows(t, r);
            perm.swap(t, r);
            for j in 0..t {
                let a = lower[(t, j)].clone();
                lower[(t, j)] = lower[(r, j)].clone();
                lower[(r, j)] = a;
            }
        }
        let pivot_inv = upper[(t, t)].inv()?;
        for i in t + 1..n {
            if upper[(i, t)].is_zero() {
                continue;
            }
            let factor = upper[(i, t)].mul_scalar(&pivot_inv);
            upper.add_row_multiple(i, t, &factor.neg());
            upper[(i, t)] = PadicScalar::zero(ctx);
            lower[(i, t)] = factor;
        }
    }
    Ok(PluDecomposition { perm, lower, upper })
}

/// Determinant via [`plu_eliminate`]; exact zero when the matrix is
/// singular to working precision.
pub fn determinant(m: &PMatrix) -> Result<PadicScalar> {
    match plu_eliminate(m) {
        Ok(plu) => {
            let mut det = PadicScalar::from_int(m.ctx(), plu.permutation_sign());
            for i in 0..m.rows() {
                det = det.mul_scalar(&plu.upper[(i, i)]);
            }
            Ok(det)
        }
        Err(Error::SingularToPrecision) => Ok(PadicScalar::zero(m.ctx())),
        Err(e) => Err(e),
    }
}

/// Gauss–Jordan inverse with valuation pivoting.
pub fn inverse(m: &PMatrix) -> Result<PMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("inverse needs a square matrix".into()));
    }
    let n = m.rows();
    let ctx = m.ctx();
    let mut a = m.clone();
    let mut inv = PMatrix::identity(ctx, n);
    for t in 0..n {
        let r = pivot_row(&a, t, t).ok_or(Error::SingularToPrecision)?;
        a.swap_rows(t, r);
        inv.swap_rows(t, r);
        let pivot_inv = a[(t, t)].inv()?;
        for j in 0..n {
            a[(t, j)] = a[(t, j)].mul_scalar(&pivot_inv);
            inv[(t, j)] = inv[(t, j)].mul_scalar(&pivot_inv);
        }
        a[(t, t)] = PadicScalar::one(ctx);
        for i in 0..n {
            if i == t || a[(i, t)].is_zero() {
                continue;
            }
            let factor = a[(i, t)].neg();
            a.add_row_multiple(i, t, &factor);
            inv.add_row_multiple(i, t, &factor);
            a[(i, t)] = PadicScalar::zero(ctx);
        }
    }
    Ok(inv)
}

/// Membership in `GL(n, Z_p)`: integral entries and unit determinant.
pub fn is_integral_unit(m: &PMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("is_integral_unit needs a square matrix".into()));
    }
    if m.entries().iter().any(|x| x.valuation().is_some_and(|v| v < 0)) {
        return Ok(false);
    }
    Ok(determinant(m)?.valuation() == Some(0))
}
