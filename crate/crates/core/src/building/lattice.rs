use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext};
use crate::plinalg::{centered_norm, hnf_lattice, inverse, smith_cartan, PMatrix};
use crate::quadform::QuadraticForm;

/// Homothety class of a Z_p-lattice in Q_p^n, i.e. a vertex of the building
/// of `GL(n, Q_p)`.
///
/// Stored as the column Hermite form of a basis, scaled so that the smallest
/// diagonal exponent is 0. Equal classes have equal representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeClass {
    hnf: PMatrix,
}

impl LatticeClass {
    /// The class of the lattice spanned by the columns of `basis`.
    pub fn from_basis(basis: &PMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::DimensionMismatch("lattice basis must be square".into()));
        }
        let h = hnf_lattice(basis)?;
        let shift = h.diagonal_entries().iter().filter_map(PadicScalar::valuation).min().unwrap_or(0);
        if shift == 0 {
            return Ok(Self { hnf: h });
        }
        let scaled = basis.scale(&PadicScalar::p_power(basis.ctx(), -shift));
        Ok(Self {
            hnf: hnf_lattice(&scaled)?,
        })
    }

    /// `[L0]`, the class of the standard lattice `Z_p^n`.
    pub fn standard(ctx: PrimeContext, n: usize) -> Self {
        Self {
            hnf: PMatrix::identity(ctx, n),
        }
    }

    pub fn hnf(&self) -> &PMatrix {
        &self.hnf
    }

    pub fn dim(&self) -> usize {
        self.hnf.rows()
    }

    /// `[g L]`.
    pub fn act(&self, g: &PMatrix) -> Result<Self> {
        Self::from_basis(&g.mul(&self.hnf)?)
    }

    /// Diagonal exponents of the representative.
    pub fn diagonal_exponents(&self) -> Vec<i64> {
        self.hnf
            .diagonal_entries()
            .iter()
            .map(|x| x.valuation().expect("hnf pivots are non-zero"))
            .collect()
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hnf)
    }
}

/// Elementary divisor exponents of `y` relative to `x`, ascending and
/// shifted so the smallest is 0 (the representatives are only defined up to
/// homothety).
pub fn relative_position(x: &LatticeClass, y: &LatticeClass) -> Result<Vec<i64>> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch("lattices of different rank".into()));
    }
    let m = inverse(&x.hnf)?.mul(&y.hnf)?;
    let mut exps = smith_cartan(&m)?.exponents;
    let low = exps.iter().copied().min().unwrap_or(0);
    exps.iter_mut().for_each(|e| *e -= low);
    Ok(exps)
}

/// Euclidean norm of the centred relative position.
pub fn distance(x: &LatticeClass, y: &LatticeClass) -> Result<f64> {
    Ok(centered_norm(&relative_position(x, y)?))
}

/// The class of the `B0`-dual lattice `{v : B0(v, L) in Z_p}`, which is
/// spanned by the columns of `B0^-1 hnf^-T`.
pub fn sigma_dual(x: &LatticeClass, q0: &QuadraticForm) -> Result<LatticeClass> {
    if q0.dim() != x.dim() {
        return Err(Error::DimensionMismatch("form and lattice rank differ".into()));
    }
    let b0 = q0.gram().with_precision(x.hnf.ctx().precision())?;
    let dual = inverse(&b0)?.mul(&inverse(&x.hnf)?.transpose())?;
    LatticeClass::from_basis(&dual)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 24).unwrap()
    }

    fn class(c: PrimeContext, rows: &[&[i64]]) -> LatticeClass {
        LatticeClass::from_basis(&PMatrix::from_ints(c, rows)).unwrap()
    }

    #[test]
    fn homothety_normalised() {
        let c = ctx();
        assert_eq!(class(c, &[&[5, 0], &[0, 5]]), LatticeClass::standard(c, 2));
        assert_eq!(class(c, &[&[25, 5], &[0, 5]]), class(c, &[&[5, 1], &[0, 1]]));
        let x = class(c, &[&[25, 3], &[0, 125]]);
        assert_eq!(x.diagonal_exponents().into_iter().min(), Some(0));
    }

    #[test]
    fn positions() {
        let c = ctx();
        let l0 = LatticeClass::standard(c, 2);
        assert_eq!(relative_position(&l0, &l0).unwrap(), vec![0, 0]);
        assert_eq!(relative_position(&l0, &class(c, &[&[25, 0], &[0, 1]])).unwrap(), vec![0, 2]);
        let y = class(c, &[&[5, 0], &[1, 1]]);
        assert_eq!(relative_position(&l0, &y).unwrap(), vec![0, 1]);
        assert!((distance(&l0, &y).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(distance(&y, &y).unwrap(), 0.0);
    }

    #[test]
    fn dual_examples() {
        let c = ctx();
        let q0 = QuadraticForm::new(PMatrix::identity(c, 2)).unwrap();
        let l0 = LatticeClass::standard(c, 2);
        assert_eq!(sigma_dual(&l0, &q0).unwrap(), l0);
        let x = class(c, &[&[5, 0], &[0, 1]]);
        let dual = sigma_dual(&x, &q0).unwrap();
        assert_eq!(dual, class(c, &[&[1, 0], &[0, 5]]));
        assert_eq!(relative_position(&l0, &dual).unwrap(), relative_position(&l0, &x).unwrap());
        let y = class(c, &[&[5, 2], &[1, 25]]);
        assert_eq!(sigma_dual(&sigma_dual(&y, &q0).unwrap(), &q0).unwrap(), y);
    }
}
