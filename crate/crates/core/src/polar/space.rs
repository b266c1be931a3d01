use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext, SquareClass};
use crate::plinalg::{inverse, PMatrix};
use crate::quadform::{witt_isometry, QuadraticForm};

/// Precision at which witnesses `gamma_s` are built. Fixed so that the table
/// does not depend on the precision of whichever call created an entry.
pub const WITNESS_PRECISION: u32 = 512;

/// `gamma_s` with `gamma_s^T diag(rep(s)) gamma_s = B0`, and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassWitness {
    pub gamma: PMatrix,
    pub gamma_inv: PMatrix,
}

/// `GL(n, Q_p) / O(q0)` for a diagonal unit form `q0`, with the lazily
/// filled table of square-class witnesses.
#[derive(Debug)]
pub struct SymmetricSpaceContext {
    ctx: PrimeContext,
    q0: QuadraticForm,
    table: RwLock<BTreeMap<Vec<SquareClass>, Arc<ClassWitness>>>,
}

impl SymmetricSpaceContext {
    pub fn new(ctx: PrimeContext, q0_diagonal: &[PadicScalar]) -> Result<Self> {
        if q0_diagonal.is_empty() {
            return Err(Error::InvalidInput("q0 needs at least one coefficient".into()));
        }
        if q0_diagonal.iter().any(|c| c.valuation() != Some(0)) {
            return Err(Error::InvalidInput("q0 must have unit diagonal entries".into()));
        }
        let values: Vec<PadicScalar> = q0_diagonal.iter().map(|c| c.in_context(ctx)).collect();
        Ok(Self {
            ctx,
            q0: QuadraticForm::diagonal(ctx, &values)?,
            table: RwLock::new(BTreeMap::new()),
        })
    }

    /// `q0 = x_1^2 + ... + x_n^2`.
    pub fn standard(ctx: PrimeContext, n: usize) -> Result<Self> {
        Self::new(ctx, &vec![PadicScalar::one(ctx); n])
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn n(&self) -> usize {
        self.q0.dim()
    }

    pub fn q0(&self) -> &QuadraticForm {
        &self.q0
    }

    pub fn b0(&self) -> &PMatrix {
        self.q0.gram()
    }

    /// Number of witnesses built so far; at most `4^n`.
    pub fn table_len(&self) -> usize {
        self.table.read().expect("witness table lock").len()
    }

    pub fn table_keys(&self) -> Vec<Vec<SquareClass>> {
        self.table.read().expect("witness table lock").keys().cloned().collect()
    }

    /// The witness for class vector `s`, built on first use.
    ///
    /// Fails with `InvariantMismatch` when `diag(rep(s))` is not equivalent
    /// to `q0`; such classes never arise from `kah_decompose`.
    pub fn witness(&self, s: &[SquareClass]) -> Result<Arc<ClassWitness>> {
        if s.len() != self.n() {
            return Err(Error::DimensionMismatch("class vector length".into()));
        }
        if let Some(w) = self.table.read().expect("witness table lock").get(s) {
            return Ok(Arc::clone(w));
        }
        let built = Arc::new(self.build(s)?);
        // concurrent builders produce interchangeable witnesses; last one wins
        self.table
            .write()
            .expect("witness table lock")
            .insert(s.to_vec(), Arc::clone(&built));
        Ok(built)
    }

    fn build(&self, s: &[SquareClass]) -> Result<ClassWitness> {
        let ctx = self.ctx.with_precision(WITNESS_PRECISION)?;
        let reps: Vec<PadicScalar> = s.iter().map(|c| c.representative(ctx)).collect();
        let diag = QuadraticForm::diagonal(ctx, &reps)?;
        let q0 = self.q0.with_precision(WITNESS_PRECISION)?;
        let gamma = witt_isometry(&diag, &q0)?;
        let gamma_inv = inverse(&gamma)?;
        Ok(ClassWitness { gamma, gamma_inv })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::isometry_agreement;

    #[test]
    fn standard_witnesses() {
        let ctx = PrimeContext::new(5, 32).unwrap();
        let ssc = SymmetricSpaceContext::standard(ctx, 2).unwrap();
        let one = SquareClass::ONE;
        let u = SquareClass::ALL[1];
        let p = SquareClass::ALL[2];
        assert_eq!(ssc.witness(&[one, one]).unwrap().gamma.with_precision(32).unwrap(), PMatrix::identity(ctx, 2));
        let w = ssc.witness(&[u, u]).unwrap();
        let c = ctx.with_precision(WITNESS_PRECISION).unwrap();
        let diag = QuadraticForm::diagonal(c, &[u.representative(c), u.representative(c)]).unwrap();
        assert!(isometry_agreement(&w.gamma, &diag, ssc.q0()).unwrap() >= 400);
        assert_eq!(ssc.witness(&[p, one]).unwrap_err(), Error::InvariantMismatch);
        assert_eq!(ssc.table_len(), 2);
    }

    #[test]
    fn rejects_non_unit_q0() {
        let ctx = PrimeContext::new(5, 32).unwrap();
        let five = PadicScalar::from_int(ctx, 5);
        assert!(SymmetricSpaceContext::new(ctx, &[PadicScalar::one(ctx), five]).is_err());
    }
}
