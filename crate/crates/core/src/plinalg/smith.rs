use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{cmp_valuation, PadicScalar};

use super::PMatrix;

/// Order of the exponents in a Cartan factorisation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentOrder {
    #[default]
    Ascending,
    Descending,
}

/// `g = k1 * diag(p^a_1, ..., p^a_n) * k2` with `k1, k2` in `GL(n, Z_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanFactors {
    pub k1: PMatrix,
    pub exponents: Vec<i64>,
    pub k2: PMatrix,
}

impl CartanFactors {
    pub fn middle(&self) -> PMatrix {
        let ctx = self.k1.ctx();
        let diag: Vec<PadicScalar> = self.exponents.iter().map(|&e| PadicScalar::p_power(ctx, e)).collect();
        PMatrix::diagonal(ctx, &diag)
    }

    pub fn reconstruct(&self) -> Result<PMatrix> {
        self.k1.mul(&self.middle())?.mul(&self.k2)
    }
}

/// Smith normal form over Z_p, presented as a Cartan factorisation with
/// non-decreasing exponents.
pub fn smith_cartan(g: &PMatrix) -> Result<CartanFactors> {
    smith_cartan_ordered(g, ExponentOrder::Ascending)
}

pub fn smith_cartan_ordered(g: &PMatrix, order: ExponentOrder) -> Result<CartanFactors> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("smith_cartan needs a square matrix".into()));
    }
    let n = g.rows();
    let ctx = g.ctx();
    // invariant: g = left * a * right
    let mut a = g.clone();
    let mut left = PMatrix::identity(ctx, n);
    let mut right = PMatrix::identity(ctx, n);
    let mut exponents = Vec::with_capacity(n);

    for t in 0..n {
        let (pi, pj) = (t..n)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[(i, j)].is_zero())
            .min_by(|&x, &y| cmp_valuation(&a[x], &a[y]).then(x.cmp(&y)))
            .ok_or(Error::SingularToPrecision)?;
        a.swap_rows(t, pi);
        left.swap_cols(t, pi);
        a.swap_cols(t, pj);
        right.swap_rows(t, pj);

        let pivot_inv = a[(t, t)].inv()?;
        for r in t + 1..n {
            if a[(r, t)].is_zero() {
                continue;
            }
            let m = a[(r, t)].mul_scalar(&pivot_inv);
            a.add_row_multiple(r, t, &m.neg());
            a[(r, t)] = PadicScalar::zero(ctx);
            left.add_col_multiple(t, r, &m);
        }
        for c in t + 1..n {
            if a[(t, c)].is_zero() {
                continue;
            }
            let m = a[(t, c)].mul_scalar(&pivot_inv);
            a[(t, c)] = PadicScalar::zero(ctx);
            right.add_row_multiple(t, c, &m);
        }
        let pivot = &a[(t, t)];
        exponents.push(pivot.valuation().unwrap());
        left.scale_col(t, &pivot.unit_part());
    }

    if order == ExponentOrder::Descending {
        exponents.reverse();
        for i in 0..n / 2 {
            left.swap_cols(i, n - 1 - i);
            right.swap_rows(i, n - 1 - i);
        }
    }
    Ok(CartanFactors {
        k1: left,
        exponents,
        k2: right,
    })
}

/// Exponents centred on their mean; the essential part of a Cartan position.
pub fn centered(exponents: &[i64]) -> Vec<f64> {
    if exponents.is_empty() {
        return Vec::new();
    }
    let mean = exponents.iter().sum::<i64>() as f64 / exponents.len() as f64;
    exponents.iter().map(|&e| e as f64 - mean).collect()
}

/// `n * |centered(a)|^2 = n * sum a_i^2 - (sum a_i)^2`, an exact integer.
pub fn scaled_centered_norm_sq(exponents: &[i64]) -> i128 {
    let n = exponents.len() as i128;
    let s: i128 = exponents.iter().map(|&e| e as i128).sum();
    let sq: i128 = exponents.iter().map(|&e| (e as i128) * (e as i128)).sum();
    n * sq - s * s
}

/// Euclidean norm of the mean-centred exponent vector.
pub fn centered_norm(exponents: &[i64]) -> f64 {
    if exponents.is_empty() {
        return 0.0;
    }
    (scaled_centered_norm_sq(exponents) as f64 / exponents.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;
    use crate::plinalg::is_integral_unit;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 24).unwrap()
    }

    fn check(g: &PMatrix, f: &CartanFactors) {
        assert!(is_integral_unit(&f.k1).unwrap());
        assert!(is_integral_unit(&f.k2).unwrap());
        assert!(f.reconstruct().unwrap().agreement(g).unwrap() >= 20);
    }

    #[test]
    fn identity() {
        let c = ctx();
        let id = PMatrix::identity(c, 3);
        let f = smith_cartan(&id).unwrap();
        assert_eq!(f.exponents, vec![0, 0, 0]);
        assert_eq!(f.k1, id);
        assert_eq!(f.k2, id);
    }

    #[test]
    fn diagonal_is_sorted() {
        let c = ctx();
        let g = PMatrix::from_ints(c, &[&[25, 0], &[0, 1]]);
        let f = smith_cartan(&g).unwrap();
        assert_eq!(f.exponents, vec![0, 2]);
        check(&g, &f);
        let f = smith_cartan_ordered(&g, ExponentOrder::Descending).unwrap();
        assert_eq!(f.exponents, vec![2, 0]);
        check(&g, &f);
    }

    #[test]
    fn lower_triangular_example() {
        let c = ctx();
        let g = PMatrix::from_ints(c, &[&[5, 0], &[1, 1]]);
        let f = smith_cartan(&g).unwrap();
        assert_eq!(f.exponents, vec![0, 1]);
        check(&g, &f);
    }

    #[test]
    fn singular_input() {
        let c = ctx();
        let g = PMatrix::from_ints(c, &[&[1, 5], &[1, 5]]);
        assert_eq!(smith_cartan(&g).unwrap_err(), Error::SingularToPrecision);
    }

    #[test]
    fn centred_norm_values() {
        assert_eq!(centered_norm(&[0, 0, 0]), 0.0);
        assert!((centered_norm(&[0, 1]) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(centered(&[0, 1]), vec![-0.5, 0.5]);
        assert_eq!(scaled_centered_norm_sq(&[3, 3, 3]), 0);
    }
}
