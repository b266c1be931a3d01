use crate::error::{Error, Result};
use crate::padic::{hensel_sqrt, PadicScalar, MAX_PRECISION};
use crate::plinalg::{inverse, PMatrix};

use super::form::{diagonalize_gram, QuadraticForm};
use super::represent::represent_diagonal;

/// An isometry `gamma` with `gamma^T B1 gamma = B2`.
///
/// Both forms are diagonalised; the diagonal isometry is then built one
/// vector at a time by representing the next target value and splitting off
/// its orthogonal complement.
///
/// The Gram entries are read as exact expansions and the construction runs
/// with guard digits, doubling them until the identity holds to within 10
/// digits of the input precision. `gamma` is returned at the precision that
/// achieved this.
pub fn witt_isometry(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<PMatrix> {
    q1.ctx().check_same(&q2.ctx())?;
    if q1.invariants() != q2.invariants() {
        return Err(Error::InvariantMismatch);
    }
    if q1.gram() == q2.gram() {
        return Ok(PMatrix::identity(q1.ctx(), q1.dim()));
    }
    let precision = q1.ctx().precision().max(q2.ctx().precision());
    let target = precision as i64 - 10;
    let mut work = (2 * precision).min(MAX_PRECISION);
    loop {
        let attempt = isometry_at(&q1.with_precision(work)?, &q2.with_precision(work)?)
            .and_then(|gamma| Ok((isometry_agreement(&gamma, q1, q2)?, gamma)));
        match attempt {
            Ok((digits, gamma)) if digits >= target => return Ok(gamma),
            Ok(_) => {}
            Err(e) if e.is_precision_loss() || e == Error::Degenerate => {}
            Err(e) => return Err(e),
        }
        if work == MAX_PRECISION {
            return Err(Error::InsufficientPrecision);
        }
        work = (2 * work).min(MAX_PRECISION);
    }
}

/// Digits to which `gamma^T B1 gamma = B2` holds, relative to the scale of
/// `B2`. Everything is evaluated at the precision of `gamma`, reading the
/// Gram entries as exact expansions.
pub fn isometry_agreement(gamma: &PMatrix, q1: &QuadraticForm, q2: &QuadraticForm) -> Result<i64> {
    let work = gamma.ctx().precision().max(q1.ctx().precision());
    let b1 = q1.gram().with_precision(work)?;
    let b2 = q2.gram().with_precision(work)?;
    let gamma = gamma.with_precision(work)?;
    gamma.transpose().mul(&b1)?.mul(&gamma)?.agreement(&b2)
}

fn isometry_at(q1: &QuadraticForm, q2: &QuadraticForm) -> Result<PMatrix> {
    let d1 = diagonalize_gram(q1.gram())?;
    let d2 = diagonalize_gram(q2.gram())?;
    let delta = diagonal_isometry(&d1.diagonal, &d2.diagonal)?;
    d1.transform.mul(&delta)?.mul(&inverse(&d2.transform)?)
}

/// `delta` with `delta^T diag(a) delta = diag(b)`, assuming the two diagonal
/// forms are equivalent.
fn diagonal_isometry(a: &[PadicScalar], b: &[PadicScalar]) -> Result<PMatrix> {
    let n = a.len();
    let ctx = b[0].ctx();
    if n == 1 {
        let root = hensel_sqrt(&b[0].checked_div(&a[0])?).map_err(|_| Error::InvariantMismatch)?;
        return Ok(PMatrix::diagonal(ctx, &[root]));
    }
    let v = represent_diagonal(a, &b[0])?;
    let pivot = (0..n)
        .filter(|&i| !v[i].is_zero())
        .min_by_key(|&i| v[i].valuation())
        .expect("represented vector is non-zero");

    // g_k = e_k - (a_k v_k / b0) v, k != pivot, spans v's orthogonal complement
    let b0_inv = b[0].inv()?;
    let rest: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
    let weight: Vec<PadicScalar> = rest.iter().map(|&k| a[k].mul_scalar(&v[k]).mul_scalar(&b0_inv)).collect();
    let complement = PMatrix::from_fn(ctx, n, n - 1, |i, c| {
        let e = if i == rest[c] { PadicScalar::one(ctx) } else { PadicScalar::zero(ctx) };
        e.sub_lossy(&weight[c].mul_scalar(&v[i]))
    });
    let gram = PMatrix::from_fn(ctx, n - 1, n - 1, |r, c| {
        let (k, l) = (rest[r], rest[c]);
        let cross = weight[r].mul_scalar(&a[l]).mul_scalar(&v[l]);
        if k == l {
            a[k].sub_lossy(&cross)
        } else {
            cross.neg()
        }
    });
    let inner = diagonalize_gram(&gram)?;
    let sub = diagonal_isometry(&inner.diagonal, &b[1..])?;
    let tail = complement.mul(&inner.transform)?.mul(&sub)?;

    let mut columns = vec![v];
    columns.extend((0..n - 1).map(|j| tail.column(j)));
    Ok(PMatrix::from_columns(ctx, &columns))
}
