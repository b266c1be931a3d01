use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{class_vector_label, PadicScalar, SquareClass};
use crate::plinalg::{centered_norm, determinant, inverse, smith_cartan, PMatrix};
use crate::precision::{with_precision_retry, PrecisionInfo};
use crate::quadform::{diagonalize_gram, square_class_split};

use super::space::SymmetricSpaceContext;

/// `g = k * (gamma_s^-1 a gamma_s) * h` with `k` in `K0 gamma_s`, `a`
/// diagonal and `h` in `O(q0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KahWitness {
    pub k: PMatrix,
    pub s: Vec<SquareClass>,
    pub a: PMatrix,
    pub h: PMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    /// Worst error valuation for the check; `None` when exact.
    pub valuation: Option<i64>,
}

impl Check {
    fn at_least(digits: i64, target: i64) -> Self {
        Check {
            pass: digits >= target,
            valuation: (digits != i64::MAX).then_some(digits),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub reconstruct: Check,
    pub integral: Check,
    pub diagonal: Check,
    #[serde(rename = "H_membership")]
    pub h_membership: Check,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        self.reconstruct.pass && self.integral.pass && self.diagonal.pass && self.h_membership.pass
    }
}

/// Digits of slack granted to the reconstruction and `H`-membership checks.
pub const RECONSTRUCT_SLACK: i64 = 12;
pub const MEMBERSHIP_SLACK: i64 = 10;

impl KahWitness {
    /// `gamma_s^-1 a gamma_s`, the middle factor of the reconstruction.
    pub fn conjugated_a(&self, ssc: &SymmetricSpaceContext) -> Result<PMatrix> {
        let w = ssc.witness(&self.s)?;
        let work = self.a.ctx().precision();
        let gamma = w.gamma.with_precision(work)?;
        let gamma_inv = w.gamma_inv.with_precision(work)?;
        gamma_inv.mul(&self.a)?.mul(&gamma)
    }

    pub fn class_label(&self) -> String {
        class_vector_label(&self.s)
    }
}

/// A KAH witness for `g`, retrying at doubled precision until it verifies
/// to the context precision.
pub fn kah_decompose(g: &PMatrix, ssc: &SymmetricSpaceContext) -> Result<(KahWitness, PrecisionInfo)> {
    if !g.is_square() || g.rows() != ssc.n() {
        return Err(Error::DimensionMismatch("g must be n x n".into()));
    }
    with_precision_retry(ssc.ctx(), |ctx| {
        let witness = kah_attempt(&g.with_precision(ctx.precision())?, ssc)?;
        let report = verify_witness(g, &witness, ssc)?;
        if !report.integral.pass || !report.diagonal.pass {
            return Err(Error::InternalInvariantViolation("witness outside K0 gamma_s or A".into()));
        }
        if !report.reconstruct.pass || !report.h_membership.pass {
            return Err(Error::InsufficientPrecision);
        }
        Ok(witness)
    })
}

fn kah_attempt(g: &PMatrix, ssc: &SymmetricSpaceContext) -> Result<KahWitness> {
    let ctx = g.ctx();
    let work = ctx.precision();
    let b0 = ssc.b0().with_precision(work)?;
    let g_inv = inverse(g)?;
    let gram = g_inv.transpose().mul(&b0)?.mul(&g_inv)?;
    let diag = diagonalize_gram(&gram).map_err(|e| match e {
        Error::Degenerate => Error::SingularToPrecision,
        other => other,
    })?;
    let (s, t) = square_class_split(&diag.diagonal)?;
    let w = ssc.witness(&s).map_err(|e| match e {
        Error::InvariantMismatch => Error::InternalInvariantViolation("q0 o g^-1 not equivalent to q0".into()),
        other => other,
    })?;
    let gamma = w.gamma.with_precision(work)?;
    let gamma_inv = w.gamma_inv.with_precision(work)?;

    let k0 = diag.transform;
    let t_inv: Vec<PadicScalar> = t.iter().map(PadicScalar::inv).collect::<Result<_>>()?;
    let a = PMatrix::diagonal(ctx, &t_inv);
    let k = k0.mul(&gamma)?;
    let h = gamma_inv
        .mul(&PMatrix::diagonal(ctx, &t))?
        .mul(&inverse(&k0)?)?
        .mul(g)?;
    Ok(KahWitness { k, s, a, h })
}

/// Checks the four witness properties. Targets are relative to the context
/// precision `N`: reconstruction to `N - 12` digits, `h^T B0 h = B0` to
/// `N - 10`.
pub fn verify_witness(g: &PMatrix, w: &KahWitness, ssc: &SymmetricSpaceContext) -> Result<WitnessReport> {
    let n = ssc.n();
    for m in [g, &w.k, &w.a, &w.h] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch("witness shape".into()));
        }
    }
    if w.s.len() != n {
        return Err(Error::DimensionMismatch("class vector length".into()));
    }
    let target = ssc.ctx().precision() as i64;
    let work = [&w.k, &w.a, &w.h]
        .iter()
        .map(|m| m.ctx().precision())
        .max()
        .unwrap_or(target as u32)
        .max(target as u32);
    let lift = |m: &PMatrix| m.with_precision(work);
    let (k, a, h, g) = (lift(&w.k)?, lift(&w.a)?, lift(&w.h)?, lift(g)?);
    let b0 = ssc.b0().with_precision(work)?;
    let witness = ssc.witness(&w.s)?;
    let gamma = witness.gamma.with_precision(work)?;
    let gamma_inv = witness.gamma_inv.with_precision(work)?;

    let rebuilt = k.mul(&gamma_inv)?.mul(&a)?.mul(&gamma)?.mul(&h)?;
    let reconstruct = Check::at_least(rebuilt.agreement(&g)?, target - RECONSTRUCT_SLACK);

    let k0 = k.mul(&gamma_inv)?;
    let min_entry = k0.min_valuation();
    let det_unit = determinant(&k0).map(|d| d.valuation() == Some(0)).unwrap_or(false);
    let integral = Check {
        pass: det_unit && min_entry.is_some_and(|v| v >= 0),
        valuation: min_entry,
    };

    let off_diagonal = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter_map(|(i, j)| a[(i, j)].valuation())
        .min();
    let diagonal = Check {
        pass: off_diagonal.is_none(),
        valuation: off_diagonal,
    };

    let form = h.transpose().mul(&b0)?.mul(&h)?;
    let h_membership = Check::at_least(form.agreement(&b0)?, target - MEMBERSHIP_SLACK);

    Ok(WitnessReport {
        reconstruct,
        integral,
        diagonal,
        h_membership,
    })
}

/// `d(x0, m x0)`: the Euclidean norm of the centred Cartan exponents.
pub fn displacement(m: &PMatrix) -> Result<f64> {
    Ok(centered_norm(&smith_cartan(m)?.exponents))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassUsage {
    pub count: usize,
    pub max_disp: f64,
}

/// Tally of witness classes over `samples`, with the largest displacement
/// of `k` seen for each class.
pub fn witness_usage_stats(samples: &[PMatrix], ssc: &SymmetricSpaceContext) -> Result<BTreeMap<String, ClassUsage>> {
    let mut stats: BTreeMap<String, ClassUsage> = BTreeMap::new();
    for g in samples {
        let (w, _) = kah_decompose(g, ssc)?;
        let disp = displacement(&w.k)?;
        let entry = stats.entry(w.class_label()).or_insert(ClassUsage {
            count: 0,
            max_disp: 0.0,
        });
        entry.count += 1;
        entry.max_disp = entry.max_disp.max(disp);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeContext;

    fn ssc(p: u64, n: usize) -> SymmetricSpaceContext {
        SymmetricSpaceContext::standard(PrimeContext::new(p, 32).unwrap(), n).unwrap()
    }

    fn decompose(g: &PMatrix, space: &SymmetricSpaceContext) -> KahWitness {
        let (w, _) = kah_decompose(g, space).unwrap();
        let report = verify_witness(g, &w, space).unwrap();
        assert!(report.passed(), "{report:?}");
        w
    }

    #[test]
    fn identity() {
        let space = ssc(5, 2);
        let c = space.ctx();
        let w = decompose(&PMatrix::identity(c, 2), &space);
        assert_eq!(w.k, PMatrix::identity(c, 2));
        assert_eq!(w.a, PMatrix::identity(c, 2));
        assert_eq!(w.h, PMatrix::identity(c, 2));
        assert_eq!(w.s, vec![SquareClass::ONE; 2]);
    }

    #[test]
    fn diagonal_example() {
        let space = ssc(5, 2);
        let c = space.ctx();
        let g = PMatrix::from_ints(c, &[&[1, 0], &[0, 5]]);
        let w = decompose(&g, &space);
        // the sup-norm diagonalisation puts 1/25 first, so k and h are swaps
        let swap = PMatrix::from_ints(c, &[&[0, 1], &[1, 0]]);
        assert_eq!(w.k, swap);
        assert_eq!(w.a, PMatrix::from_ints(c, &[&[5, 0], &[0, 1]]));
        assert_eq!(w.h, swap);
        assert_eq!(displacement(&w.k).unwrap(), 0.0);
    }

    #[test]
    fn swap_is_in_h() {
        let space = ssc(5, 2);
        let c = space.ctx();
        let g = PMatrix::from_ints(c, &[&[0, 1], &[1, 0]]);
        let w = decompose(&g, &space);
        assert_eq!(w.k, PMatrix::identity(c, 2));
        assert_eq!(w.a, PMatrix::identity(c, 2));
        assert_eq!(w.h, g);
    }

    #[test]
    fn assorted_matrices() {
        for p in [3, 5, 7] {
            let space = ssc(p, 3);
            let c = space.ctx();
            let pi = p as i64;
            let samples = [
                PMatrix::from_ints(c, &[&[pi, 1, 0], &[0, 1, 2], &[1, 0, pi * pi]]),
                PMatrix::from_ints(c, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]),
                PMatrix::from_ints(c, &[&[pi * pi * pi, 0, 0], &[0, 2, 0], &[0, 0, pi]]),
            ];
            for g in &samples {
                decompose(g, &space);
            }
            assert!(space.table_len() <= 64);
        }
    }

    #[test]
    fn tampering_is_caught() {
        let space = ssc(5, 2);
        let c = space.ctx();
        let g = PMatrix::from_ints(c, &[&[5, 1], &[2, 3]]);
        let (w, _) = kah_decompose(&g, &space).unwrap();

        let mut bad_h = w.clone();
        bad_h.h[(0, 0)] = bad_h.h[(0, 0)].add_lossy(&PadicScalar::one(c));
        let report = verify_witness(&g, &bad_h, &space).unwrap();
        assert!(!report.h_membership.pass);

        let mut bad_a = w.clone();
        bad_a.a[(0, 1)] = PadicScalar::one(c);
        let report = verify_witness(&g, &bad_a, &space).unwrap();
        assert!(!report.diagonal.pass);
        assert!(verify_witness(&g, &w, &space).unwrap().passed());
    }

    #[test]
    fn displacement_examples() {
        let c = PrimeContext::new(5, 16).unwrap();
        assert_eq!(displacement(&PMatrix::identity(c, 3)).unwrap(), 0.0);
        let u = PMatrix::from_ints(c, &[&[1, 2], &[3, 2]]);
        assert_eq!(displacement(&u).unwrap(), 0.0);
        let d = displacement(&PMatrix::from_ints(c, &[&[1, 0], &[0, 5]])).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn usage_stats() {
        let space = ssc(5, 2);
        let c = space.ctx();
        assert!(witness_usage_stats(&[], &space).unwrap().is_empty());
        let samples = [PMatrix::identity(c, 2), PMatrix::from_ints(c, &[&[1, 0], &[0, 5]])];
        let squares = witness_usage_stats(&samples, &space).unwrap();
        assert_eq!(squares.len(), 1);
        assert_eq!(squares["(1,1)"].count, 2);
        // q0 o g^-1 = diag(1/2, 1/2), and 1/2 is a non-square at 5
        let mixed = [PMatrix::identity(c, 2), PMatrix::from_ints(c, &[&[1, 1], &[1, -1]])];
        let stats = witness_usage_stats(&mixed, &space).unwrap();
        assert_eq!(stats.keys().collect::<Vec<_>>(), ["(1,1)", "(u,u)"]);
    }
}
