use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext, SquareClass};
use crate::plinalg::{inverse, scaled_centered_norm_sq, PMatrix};
use crate::polar::displacement;

use super::lattice::{distance, LatticeClass};

/// The apartment `{[C diag(p^a) E L0] : a in Z^n}` with `C` the conjugator
/// and `E` the base. For the witnessed apartment of a KAH decomposition,
/// `C = h^-1 gamma_s^-1` and `E = gamma_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaApartmentRef {
    pub conjugator: PMatrix,
    pub base: PMatrix,
    pub class_index: Vec<SquareClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestPoint {
    pub distance: f64,
    /// Exponents of the nearest apartment vertex, normalised so the last is 0.
    pub exponents: Vec<i64>,
}

impl SigmaApartmentRef {
    /// The apartment of the diagonal torus through `[L0]`.
    pub fn standard(ctx: PrimeContext, n: usize) -> Self {
        Self {
            conjugator: PMatrix::identity(ctx, n),
            base: PMatrix::identity(ctx, n),
            class_index: vec![SquareClass::ONE; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn point(&self, exponents: &[i64]) -> Result<LatticeClass> {
        if exponents.len() != self.dim() {
            return Err(Error::DimensionMismatch("exponent vector length".into()));
        }
        LatticeClass::from_basis(&self.conjugator.mul(&torus(self.base.ctx(), exponents))?.mul(&self.base)?)
    }
}

fn torus(ctx: PrimeContext, exponents: &[i64]) -> PMatrix {
    let diag: Vec<PadicScalar> = exponents.iter().map(|&e| PadicScalar::p_power(ctx, e)).collect();
    PMatrix::diagonal(ctx, &diag)
}

/// Exact distance from `x` to the apartment, by enumeration.
///
/// With `x' = C^-1 x`, the nearest vertex `[diag(p^a) E L0]` satisfies
/// `|a|_c <= d(L0, E L0) + d(x', E L0) + d(x', L0)` (triangle inequality
/// against the vertex `a = 0`), where `|.|_c` is the centred norm. With
/// `a_n = 0` this confines each `a_i` to `|a_i| <= sqrt(2)` times that bound.
pub fn distance_to_sigma_apartment(x: &LatticeClass, apt: &SigmaApartmentRef) -> Result<NearestPoint> {
    let n = apt.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch("lattice and apartment rank differ".into()));
    }
    let ctx = x.hnf().ctx();
    let base = apt.base.with_precision(ctx.precision().max(apt.base.ctx().precision()))?;
    let x_local = x.act(&inverse(&apt.conjugator)?)?;
    let l0 = LatticeClass::standard(ctx, n);
    let origin = LatticeClass::from_basis(&base)?;
    let radius = displacement(&base)? + distance(&x_local, &origin)? + distance(&x_local, &l0)?;
    let box_half = (std::f64::consts::SQRT_2 * radius + 1e-9).floor() as i64;
    // compare centred norms exactly: n |a|_c^2 <= n R^2
    let limit = (n as f64) * radius * radius + 1e-9;

    let mut best = NearestPoint {
        distance: distance(&x_local, &origin)?,
        exponents: vec![0; n],
    };
    let mut a = vec![-box_half; n];
    a[n - 1] = 0;
    if n == 1 {
        return Ok(best);
    }
    loop {
        if scaled_centered_norm_sq(&a) as f64 <= limit && a.iter().any(|&e| e != 0) {
            let vertex = LatticeClass::from_basis(&torus(ctx, &a).mul(&base)?)?;
            let d = distance(&x_local, &vertex)?;
            if d < best.distance - 1e-12 {
                best = NearestPoint {
                    distance: d,
                    exponents: a.clone(),
                };
            }
        }
        // odometer over a[0..n-1]
        let mut i = 0;
        loop {
            if i == n - 1 {
                return Ok(best);
            }
            if a[i] < box_half {
                a[i] += 1;
                break;
            }
            a[i] = -box_half;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::sigma_dual;
    use crate::quadform::QuadraticForm;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 24).unwrap()
    }

    fn class(c: PrimeContext, rows: &[&[i64]]) -> LatticeClass {
        LatticeClass::from_basis(&PMatrix::from_ints(c, rows)).unwrap()
    }

    #[test]
    fn points_on_the_apartment() {
        let c = ctx();
        let apt = SigmaApartmentRef::standard(c, 2);
        for a in [[0, 0], [3, 0], [-2, 0]] {
            let x = apt.point(&a).unwrap();
            assert_eq!(distance_to_sigma_apartment(&x, &apt).unwrap().distance, 0.0);
        }
        // columns (5, 1), (0, 1) span diag(5, 1) Z_5^2
        let x = class(c, &[&[5, 0], &[1, 1]]);
        assert_eq!(distance_to_sigma_apartment(&x, &apt).unwrap().distance, 0.0);
    }

    #[test]
    fn off_the_apartment() {
        let c = ctx();
        let apt = SigmaApartmentRef::standard(c, 2);
        let x = class(c, &[&[5, 1], &[0, 1]]);
        let near = distance_to_sigma_apartment(&x, &apt).unwrap();
        assert!((near.distance - 0.5f64.sqrt()).abs() < 1e-12);
        // brute force over a wider box agrees
        let brute = (-4..=4)
            .map(|a0| distance(&x, &apt.point(&[a0, 0]).unwrap()).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(brute, near.distance);
    }

    #[test]
    fn translated_by_orthogonal_unit() {
        let c = ctx();
        let apt = SigmaApartmentRef::standard(c, 2);
        // the swap lies in O(x^2 + y^2) and in GL(2, Z_5)
        let h = PMatrix::from_ints(c, &[&[0, 1], &[1, 0]]);
        let moved = SigmaApartmentRef {
            conjugator: h.clone(),
            ..apt.clone()
        };
        let x = class(c, &[&[5, 1], &[0, 1]]);
        let d = distance_to_sigma_apartment(&x, &apt).unwrap().distance;
        let d_moved = distance_to_sigma_apartment(&x.act(&h).unwrap(), &moved).unwrap().distance;
        assert_eq!(d, d_moved);
    }

    #[test]
    fn unique_fixed_vertex() {
        let c = ctx();
        let q0 = QuadraticForm::new(PMatrix::identity(c, 3)).unwrap();
        let apt = SigmaApartmentRef::standard(c, 3);
        let mut fixed = 0;
        for a0 in -2..=2 {
            for a1 in -2..=2 {
                let x = apt.point(&[a0, a1, 0]).unwrap();
                if sigma_dual(&x, &q0).unwrap() == x {
                    fixed += 1;
                }
            }
        }
        assert_eq!(fixed, 1);
    }
}
