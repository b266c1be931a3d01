use crate::error::{Error, Result};
use crate::padic::{cmp_valuation, PadicScalar};

use super::PMatrix;

/// Column Hermite form of the Z_p-lattice spanned by the columns of `gens`.
///
/// The result is upper triangular with diagonal entries `p^e_i`, and each
/// entry right of the diagonal in row `i` is reduced modulo `p^e_i` to a
/// finite expansion. Generator matrices of the same lattice give identical
/// output at the same precision.
pub fn hnf_lattice(gens: &PMatrix) -> Result<PMatrix> {
    let n = gens.rows();
    if gens.cols() < n {
        return Err(Error::RankDeficient);
    }
    let ctx = gens.ctx();
    let mut pool: Vec<Vec<PadicScalar>> = (0..gens.cols()).map(|j| gens.column(j)).collect();
    let mut basis: Vec<Vec<PadicScalar>> = vec![Vec::new(); n];
    let mut exps = vec![0i64; n];

    for i in (0..n).rev() {
        let best = (0..pool.len())
            .filter(|&c| !pool[c][i].is_zero())
            .min_by(|&a, &b| cmp_valuation(&pool[a][i], &pool[b][i]).then(a.cmp(&b)))
            .ok_or(Error::RankDeficient)?;
        let mut pivot = pool.remove(best);
        let lead_inv = pivot[i].inv()?;
        for col in pool.iter_mut() {
            if col[i].is_zero() {
                continue;
            }
            let m = col[i].mul_scalar(&lead_inv);
            for r in 0..i {
                let delta = pivot[r].mul_scalar(&m);
                col[r] = col[r].sub_lossy(&delta);
            }
            col[i] = PadicScalar::zero(ctx);
        }
        let e = pivot[i].valuation().unwrap();
        let unit_inv = pivot[i].unit_part().inv()?;
        for x in pivot.iter_mut().take(i) {
            *x = x.mul_scalar(&unit_inv);
        }
        pivot[i] = PadicScalar::p_power(ctx, e);
        exps[i] = e;
        basis[i] = pivot;
    }

    let mut h = PMatrix::from_columns(ctx, &basis);
    for j in 1..n {
        for i in (0..j).rev() {
            let (r, q) = h[(i, j)].split_at(exps[i])?;
            if !q.is_zero() {
                for k in 0..i {
                    let delta = h[(k, i)].mul_scalar(&q);
                    h[(k, j)] = h[(k, j)].sub_lossy(&delta);
                }
            }
            // r is an exact finite expansion; zero-pad so later products keep their digits
            h[(i, j)] = r.with_precision(ctx.precision());
        }
    }
    // every non-zero entry is now a finite expansion; pin the precision so
    // equal lattices compare equal
    h.with_precision(ctx.precision())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 16).unwrap()
    }

    #[test]
    fn identity_is_fixed() {
        let c = ctx();
        let id = PMatrix::identity(c, 3);
        assert_eq!(hnf_lattice(&id).unwrap(), id);
    }

    #[test]
    fn two_by_two_example() {
        let c = ctx();
        // columns (5, 0) and (1, 1)
        let gens = PMatrix::from_ints(c, &[&[5, 1], &[0, 1]]);
        assert_eq!(hnf_lattice(&gens).unwrap(), gens);
        // same lattice, other generators: (5, 0) + 3 (1, 1), -(1, 1)
        let other = PMatrix::from_ints(c, &[&[8, -1], &[3, -1]]);
        assert_eq!(hnf_lattice(&other).unwrap(), gens);
        // and with a redundant third generator
        let extra = PMatrix::from_ints(c, &[&[8, -1, 6], &[3, -1, 1]]);
        assert_eq!(hnf_lattice(&extra).unwrap(), gens);
    }

    #[test]
    fn off_diagonal_reduction() {
        let c = ctx();
        // columns (5, 0), (7, 1) -> (7 mod 5) = 2
        let gens = PMatrix::from_ints(c, &[&[5, 7], &[0, 1]]);
        assert_eq!(hnf_lattice(&gens).unwrap(), PMatrix::from_ints(c, &[&[5, 2], &[0, 1]]));
    }

    #[test]
    fn rank_deficient() {
        let c = ctx();
        let gens = PMatrix::from_ints(c, &[&[1, 2], &[2, 4]]);
        assert_eq!(hnf_lattice(&gens).unwrap_err(), Error::RankDeficient);
        let thin = PMatrix::from_ints(c, &[&[1], &[2]]);
        assert_eq!(hnf_lattice(&thin).unwrap_err(), Error::RankDeficient);
    }
}
