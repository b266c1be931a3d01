use crate::error::{Error, Result};
use crate::padic::{hensel_sqrt, hilbert_symbol, legendre, pow_mod, sqrt_mod_prime, PadicScalar};

use super::form::{square_class_split, QuadraticForm};

/// Finds `v` with `q(v) = c` for a diagonal form `q`.
///
/// Both sides are first reduced to square-class representatives
/// `{1, u, p, up}`, so every coefficient has valuation 0 or 1. A zero of
/// `<rho_1, ..., rho_n, -rho>` is then searched for among residues and
/// Hensel-lifted on a unit coordinate.
pub fn represent_value(q: &QuadraticForm, c: &PadicScalar) -> Result<Vec<PadicScalar>> {
    if !q.is_diagonal() {
        return Err(Error::InvalidInput("represent_value needs a diagonal form".into()));
    }
    represent_diagonal(&q.gram().diagonal_entries(), c)
}

pub(crate) fn represent_diagonal(coefs: &[PadicScalar], c: &PadicScalar) -> Result<Vec<PadicScalar>> {
    if c.is_zero() {
        return Err(Error::InvalidInput("cannot represent zero".into()));
    }
    let n = coefs.len();
    let ctx = c.ctx();

    if let Some(i) = coefs.iter().position(|a| a == c) {
        let mut x = vec![PadicScalar::zero(ctx); n];
        x[i] = PadicScalar::one(ctx);
        return Ok(x);
    }
    if n == 0 {
        return Err(Error::NotRepresented);
    }
    if n == 2 && hilbert_symbol(&coefs[0].mul_scalar(c), &coefs[1].mul_scalar(c))? != 1 {
        return Err(Error::NotRepresented);
    }

    let (classes, roots) = square_class_split(coefs)?;
    let (target_class, target_root) = square_class_split(std::slice::from_ref(c))?;
    let rho: Vec<PadicScalar> = classes.iter().map(|s| s.representative(ctx)).collect();
    let rho_c = target_class[0].representative(ctx);

    let mut extended = rho.clone();
    extended.push(rho_c.neg());
    let z = match isotropic_vector(&extended, Some(n))? {
        Some(w) => {
            let scale = w[n].inv()?;
            w[..n].iter().map(|x| x.mul_scalar(&scale)).collect::<Vec<_>>()
        }
        None => {
            // <rho_i> is isotropic, hence universal: z = tau w + e_k
            let w = isotropic_vector(&rho, None)?.ok_or(Error::NotRepresented)?;
            let k = w.iter().position(|x| !x.is_zero()).expect("non-trivial zero");
            let two = PadicScalar::from_int(ctx, 2);
            let gap = if rho_c == rho[k] {
                PadicScalar::zero(ctx)
            } else {
                rho_c.checked_sub(&rho[k])?
            };
            let tau = gap.checked_div(&two.mul_scalar(&rho[k]).mul_scalar(&w[k]))?;
            let mut z: Vec<PadicScalar> = w.iter().map(|x| x.mul_scalar(&tau)).collect();
            z[k] = z[k].add_lossy(&PadicScalar::one(ctx));
            z
        }
    };
    z.iter()
        .zip(&roots)
        .map(|(zi, ti)| zi.mul_scalar(&target_root[0]).checked_div(ti))
        .collect()
}

/// Non-trivial zero of `sum coefs_i x_i^2` for coefficients of valuation 0
/// or 1. With `prefer = Some(k)` only zeros with `x_k != 0` are accepted.
fn isotropic_vector(coefs: &[PadicScalar], prefer: Option<usize>) -> Result<Option<Vec<PadicScalar>>> {
    let ctx = coefs[0].ctx();
    let p = ctx.p();
    let mut groups: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, a) in coefs.iter().enumerate() {
        match a.valuation() {
            Some(0) => groups[0].push(i),
            Some(1) => groups[1].push(i),
            _ => {
                return Err(Error::InternalInvariantViolation(
                    "coefficient outside the normalised valuation range".into(),
                ))
            }
        }
    }
    let candidates: Vec<(usize, usize)> = match prefer {
        Some(k) => {
            let g = usize::from(groups[1].contains(&k));
            vec![(g, k)]
        }
        None => (0..2).flat_map(|g| groups[g].iter().map(move |&k| (g, k))).collect(),
    };
    for (g, k) in candidates {
        let group = &groups[g];
        let eps = |i: usize| coefs[i].leading_digit();
        let others: Vec<usize> = group.iter().copied().filter(|&i| i != k).collect();
        let residues: Vec<u64> = others.iter().map(|&i| eps(i)).collect();
        let target = (p - eps(k)) % p;
        let Some(y) = residue_represent(&residues, target, p) else {
            continue;
        };
        // x_k = 1 mod p; lift x_k exactly, keep the rest as small integers
        let mut x = vec![PadicScalar::zero(ctx); coefs.len()];
        let mut partial = PadicScalar::zero(ctx);
        for (&i, &yi) in others.iter().zip(&y) {
            x[i] = PadicScalar::from_int(ctx, yi as i64);
            partial = partial.add_lossy(&coefs[i].mul_scalar(&x[i].square()));
        }
        let square = partial.neg().checked_div(&coefs[k])?;
        x[k] = if partial.is_zero() {
            return Err(Error::InternalInvariantViolation("residue zero lost its unit".into()));
        } else {
            hensel_sqrt(&square)?
        };
        return Ok(Some(x));
    }
    Ok(None)
}

/// Solves `sum eps_i y_i^2 = c (mod p)` for `c != 0`.
fn residue_represent(eps: &[u64], c: u64, p: u64) -> Option<Vec<u64>> {
    let modinv = |a: u64| pow_mod(a, p - 2, p);
    match eps.len() {
        0 => None,
        1 => {
            let r = c * modinv(eps[0]) % p;
            sqrt_mod_prime(r, p).map(|y| vec![y])
        }
        _ => {
            for y0 in 0..p {
                let r = (c + p * p - eps[0] * (y0 * y0 % p) % p) % p;
                let mut y = vec![0; eps.len()];
                y[0] = y0;
                if r == 0 {
                    return Some(y);
                }
                let ratio = r * modinv(eps[1]) % p;
                if legendre(ratio, p) == 1 {
                    y[1] = sqrt_mod_prime(ratio, p).expect("residue");
                    return Some(y);
                }
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{embed_rational, PrimeContext};
    use crate::plinalg::PMatrix;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 24).unwrap()
    }

    fn diag(c: PrimeContext, values: &[PadicScalar]) -> QuadraticForm {
        QuadraticForm::new(PMatrix::diagonal(c, values)).unwrap()
    }

    fn ints(c: PrimeContext, xs: &[i64]) -> Vec<PadicScalar> {
        xs.iter().map(|&x| PadicScalar::from_int(c, x)).collect()
    }

    fn check(q: &QuadraticForm, target: &PadicScalar) -> Vec<PadicScalar> {
        let v = represent_value(q, target).unwrap();
        let value = q.evaluate(&v).unwrap();
        let digits = value.difference_valuation(target).unwrap_or(i64::MAX) - target.valuation().unwrap();
        assert!(digits >= 18, "{value} vs {target}");
        v
    }

    #[test]
    fn basis_vector_first() {
        let c = ctx();
        let q = diag(c, &ints(c, &[3, 7]));
        assert_eq!(represent_value(&q, &PadicScalar::from_int(c, 3)).unwrap(), ints(c, &[1, 0]));
    }

    #[test]
    fn minus_one_as_sum_of_two_squares() {
        let c = ctx();
        let q = diag(c, &ints(c, &[1, 1]));
        let v = check(&q, &PadicScalar::from_int(c, -1));
        // residue search hits 0^2 + 2^2 = -1 (mod 5)
        assert!(v[0].is_zero());
        assert_eq!(v[1].digits()[0], 2);
    }

    #[test]
    fn non_square_rejected() {
        let c = ctx();
        let q = diag(c, &ints(c, &[1]));
        assert_eq!(represent_value(&q, &PadicScalar::from_int(c, 2)).unwrap_err(), Error::NotRepresented);
    }

    #[test]
    fn needs_two_coordinates() {
        let c = ctx();
        // 2 = 1 + 1, neither 2 nor 2/1 is a square
        let q = diag(c, &ints(c, &[1, 1]));
        let v = check(&q, &PadicScalar::from_int(c, 2));
        assert!(!v[0].is_zero() && !v[1].is_zero());
        // <1, 5, 10> is anisotropic and misses exactly the class of -disc = u
        let q = diag(c, &ints(c, &[1, 5, 10]));
        for target in [6, 15, 20] {
            check(&q, &PadicScalar::from_int(c, target));
        }
        check(&q, &embed_rational(11, 25, c).unwrap());
        for target in [2, 7, 3 * 25] {
            let target = PadicScalar::from_int(c, target);
            assert_eq!(represent_value(&q, &target).unwrap_err(), Error::NotRepresented);
        }
    }

    #[test]
    fn universal_fallback() {
        let c = ctx();
        // <1, -1, 5> is isotropic; 10 needs the e_k shift
        let q = diag(c, &ints(c, &[1, -1, 5]));
        for target in [10, 2, 3, 50, 7] {
            check(&q, &PadicScalar::from_int(c, target));
        }
    }

    #[test]
    fn anisotropic_binary_misses() {
        let c = ctx();
        // <1, -2> at p = 5 represents the norms from Q_5(sqrt 2): units only
        let q = diag(c, &ints(c, &[1, -2]));
        assert_eq!(represent_value(&q, &PadicScalar::from_int(c, 5)).unwrap_err(), Error::NotRepresented);
        check(&q, &PadicScalar::from_int(c, 3));
    }

    #[test]
    fn agrees_with_hilbert_on_binary_forms() {
        let c = ctx();
        let values = [1, 2, 5, 10, 3, 15, 25, 7];
        for &a in &values {
            for &b in &values {
                let q = diag(c, &ints(c, &[a, b]));
                for &t in &values {
                    let t = PadicScalar::from_int(c, t);
                    let expected = hilbert_symbol(
                        &PadicScalar::from_int(c, a).mul_scalar(&t),
                        &PadicScalar::from_int(c, b).mul_scalar(&t),
                    )
                    .unwrap()
                        == 1;
                    assert_eq!(represent_value(&q, &t).is_ok(), expected, "<{a},{b}> -> {t}");
                    if expected {
                        check(&q, &t);
                    }
                }
            }
        }
    }
}
