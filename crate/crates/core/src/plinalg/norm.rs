use crate::error::{Error, Result};
use crate::padic::PadicScalar;

use super::{inverse, smith_cartan, PMatrix};

/// Ultrametric norm `N(x) = sup_i |p^w_i y_i|` where `y` are the coordinates
/// of `x` in `basis`. Norms are handled through their log form
/// `nu(x) = min_i (w_i + v(y_i))`, so `N(x) = p^-nu(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltraNorm {
    pub basis: PMatrix,
    pub weights: Vec<i64>,
}

impl UltraNorm {
    pub fn new(basis: PMatrix, weights: Vec<i64>) -> Result<Self> {
        if !basis.is_square() || basis.rows() != weights.len() {
            return Err(Error::DimensionMismatch("norm basis and weights".into()));
        }
        Ok(Self { basis, weights })
    }

    /// The standard sup-norm on `Q_p^n`.
    pub fn sup(ctx: crate::padic::PrimeContext, n: usize) -> Self {
        Self {
            basis: PMatrix::identity(ctx, n),
            weights: vec![0; n],
        }
    }

    /// Basis absorbing the weights, in which the norm is the plain sup-norm.
    fn unweighted_basis(&self) -> PMatrix {
        let ctx = self.basis.ctx();
        let scale: Vec<PadicScalar> = self.weights.iter().map(|&w| PadicScalar::p_power(ctx, -w)).collect();
        self.basis.mul(&PMatrix::diagonal(ctx, &scale)).expect("square")
    }

    /// `nu(x)`; `None` for the zero vector.
    pub fn log_norm(&self, x: &[PadicScalar]) -> Result<Option<i64>> {
        let y = inverse(&self.basis)?.mul_vec(x)?;
        Ok(y.iter()
            .zip(&self.weights)
            .filter_map(|(c, w)| c.valuation().map(|v| v + w))
            .min())
    }
}

/// Common diagonalising basis for two ultrametric norms.
///
/// Returns `(basis, w1, w2)` such that, in coordinates `z` for `basis`,
/// `nu_k(basis * z) = min_i (w_k[i] + v(z_i))`.
pub fn diagonalize_norm_pair(n1: &UltraNorm, n2: &UltraNorm) -> Result<(PMatrix, Vec<i64>, Vec<i64>)> {
    if n1.weights.len() != n2.weights.len() {
        return Err(Error::DimensionMismatch("norms on different dimensions".into()));
    }
    n1.basis.ctx().check_same(&n2.basis.ctx())?;
    let b1 = n1.unweighted_basis();
    let b2 = n2.unweighted_basis();
    let transition = inverse(&b1)?.mul(&b2)?;
    let f = smith_cartan(&transition)?;
    let basis = b1.mul(&f.k1)?;
    let w1 = vec![0; f.exponents.len()];
    let w2 = f.exponents.iter().map(|e| -e).collect();
    Ok((basis, w1, w2))
}
