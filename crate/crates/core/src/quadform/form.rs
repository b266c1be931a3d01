use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{hensel_sqrt, hilbert_symbol, unit_square_class, PadicScalar, PrimeContext, SquareClass};
use crate::plinalg::PMatrix;

/// Non-degenerate quadratic form `q(x) = x^T B x` with cached invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: PMatrix,
    disc: SquareClass,
    hasse: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormInvariants {
    pub dim: usize,
    pub disc: SquareClass,
    pub hasse: i8,
}

/// `U^T B U = diag(diagonal)` with `U` in `GL(n, Z_p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupDiagonalization {
    pub transform: PMatrix,
    pub diagonal: Vec<PadicScalar>,
}

impl QuadraticForm {
    /// Validates symmetry and non-degeneracy. The lower triangle is taken
    /// from the upper one once the two agree to within 16 digits of the
    /// working precision.
    pub fn new(gram: PMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
        }
        let n = gram.rows();
        let tolerance = gram.ctx().precision() as i64 - 16;
        if gram.transpose().agreement(&gram)? < tolerance.max(1) {
            return Err(Error::NotSymmetric);
        }
        let mut gram = gram;
        for i in 0..n {
            for j in 0..i {
                gram[(i, j)] = gram[(j, i)].clone();
            }
        }
        let diag = diagonalize_gram(&gram)?;
        let (disc, hasse) = invariants_of_diagonal(&diag.diagonal)?;
        Ok(Self { gram, disc, hasse })
    }

    pub fn diagonal(ctx: PrimeContext, values: &[PadicScalar]) -> Result<Self> {
        Self::new(PMatrix::diagonal(ctx, values))
    }

    pub fn gram(&self) -> &PMatrix {
        &self.gram
    }

    pub fn ctx(&self) -> PrimeContext {
        self.gram.ctx()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn disc(&self) -> SquareClass {
        self.disc
    }

    pub fn hasse(&self) -> i8 {
        self.hasse
    }

    pub fn invariants(&self) -> FormInvariants {
        FormInvariants {
            dim: self.dim(),
            disc: self.disc,
            hasse: self.hasse,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.gram.is_diagonal()
    }

    pub fn evaluate(&self, x: &[PadicScalar]) -> Result<PadicScalar> {
        let bx = self.gram.mul_vec(x)?;
        Ok(x.iter()
            .zip(&bx)
            .fold(PadicScalar::zero(self.ctx()), |acc, (a, b)| acc.add_lossy(&a.mul_scalar(b))))
    }

    /// Same form with the Gram entries re-embedded at `precision` digits.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Ok(Self {
            gram: self.gram.with_precision(precision)?,
            ..self.clone()
        })
    }

    /// Gram matrix of `q o g`, i.e. `g^T B g`.
    pub fn pullback(&self, g: &PMatrix) -> Result<Self> {
        Self::new(g.transpose().mul(&self.gram)?.mul(g)?)
    }
}

/// Discriminant class and Hasse invariant of `diag(values)`.
pub fn invariants_of_diagonal(values: &[PadicScalar]) -> Result<(SquareClass, i8)> {
    let mut disc = SquareClass::ONE;
    let mut hasse = 1i8;
    for (i, a) in values.iter().enumerate() {
        disc = disc.multiply(unit_square_class(a)?);
        for b in &values[i + 1..] {
            hasse *= hilbert_symbol(a, b)?;
        }
    }
    Ok((disc, hasse))
}

/// A vector of the unit ball where `|q|` is maximal, together with the
/// scale `min_ij v(B_ij)`; `v(q(e)) = scale`.
///
/// A unit diagonal entry (after scaling) gives the basis vector `e_i`, lowest
/// index first. Otherwise `e_i + e_j` for the lexicographically first unit
/// off-diagonal entry, since `q(e_i + e_j) = a_ii + 2 a_ij + a_jj` is then a
/// unit when p is odd.
pub fn find_max_vector(q: &QuadraticForm) -> Result<(Vec<PadicScalar>, i64)> {
    let ctx = q.ctx();
    let n = q.dim();
    let indices: Vec<usize> = (0..n).collect();
    let (choice, scale) = max_vector_choice(q.gram(), &indices)?;
    let mut v = vec![PadicScalar::zero(ctx); n];
    match choice {
        MaxVector::Basis(i) => v[i] = PadicScalar::one(ctx),
        MaxVector::Pair(i, j) => {
            v[i] = PadicScalar::one(ctx);
            v[j] = PadicScalar::one(ctx);
        }
    }
    Ok((v, scale))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MaxVector {
    Basis(usize),
    Pair(usize, usize),
}

fn max_vector_choice(gram: &PMatrix, active: &[usize]) -> Result<(MaxVector, i64)> {
    let scale = active
        .iter()
        .flat_map(|&i| active.iter().map(move |&j| (i, j)))
        .filter_map(|(i, j)| gram[(i, j)].valuation())
        .min()
        .ok_or(Error::Degenerate)?;
    if let Some(&i) = active.iter().find(|&&i| gram[(i, i)].valuation() == Some(scale)) {
        return Ok((MaxVector::Basis(i), scale));
    }
    for (a, &i) in active.iter().enumerate() {
        for &j in &active[a + 1..] {
            if gram[(i, j)].valuation() == Some(scale) {
                return Ok((MaxVector::Pair(i, j), scale));
            }
        }
    }
    unreachable!("the minimum is attained somewhere")
}

/// Diagonalises a symmetric Gram matrix by a base change in `GL(n, Z_p)`.
pub(crate) fn diagonalize_gram(gram: &PMatrix) -> Result<SupDiagonalization> {
    let n = gram.rows();
    let ctx = gram.ctx();
    let mut g = gram.clone();
    let mut u = PMatrix::identity(ctx, n);
    let swap = |g: &mut PMatrix, u: &mut PMatrix, a: usize, b: usize| {
        g.swap_rows(a, b);
        g.swap_cols(a, b);
        u.swap_cols(a, b);
    };

    for t in 0..n {
        let active: Vec<usize> = (t..n).collect();
        let (choice, _) = max_vector_choice(&g, &active)?;
        match choice {
            MaxVector::Basis(i) => swap(&mut g, &mut u, t, i),
            MaxVector::Pair(i, j) => {
                // replace f_i by f_i + f_j, then bring it to the front
                let one = PadicScalar::one(ctx);
                g.add_col_multiple(i, j, &one);
                g.add_row_multiple(i, j, &one);
                u.add_col_multiple(i, j, &one);
                swap(&mut g, &mut u, t, i);
            }
        }
        let pivot = g[(t, t)].clone();
        if pivot.is_zero() {
            return Err(Error::Degenerate);
        }
        let pivot_inv = pivot.inv()?;
        let factors: Vec<PadicScalar> = (t + 1..n).map(|k| g[(t, k)].mul_scalar(&pivot_inv)).collect();
        for (idx, k) in (t + 1..n).enumerate() {
            if !factors[idx].is_zero() {
                u.add_col_multiple(k, t, &factors[idx].neg());
            }
        }
        for (a, k) in (t + 1..n).enumerate() {
            for l in k..n {
                let correction = factors[a].mul_scalar(&g[(t, l)]);
                let value = g[(k, l)].sub_lossy(&correction);
                g[(k, l)] = value.clone();
                g[(l, k)] = value;
            }
        }
        for k in t + 1..n {
            g[(t, k)] = PadicScalar::zero(ctx);
            g[(k, t)] = PadicScalar::zero(ctx);
        }
    }
    Ok(SupDiagonalization {
        transform: u,
        diagonal: g.diagonal_entries(),
    })
}

/// Diagonalisation preserving the sup norm: `U^T B U = diag(D)`, `U` in
/// `GL(n, Z_p)`.
pub fn diagonalize_sup(q: &QuadraticForm) -> Result<SupDiagonalization> {
    diagonalize_gram(q.gram())
}

/// Splits each `c_i = rep(s_i) * t_i^2` with `rep(s)` in `{1, u, p, up}`.
pub fn square_class_split(values: &[PadicScalar]) -> Result<(Vec<SquareClass>, Vec<PadicScalar>)> {
    let mut classes = Vec::with_capacity(values.len());
    let mut roots = Vec::with_capacity(values.len());
    for c in values {
        let s = unit_square_class(c)?;
        let rep = s.representative(c.ctx());
        let t = hensel_sqrt(&c.checked_div(&rep)?)?;
        classes.push(s);
        roots.push(t);
    }
    Ok((classes, roots))
}

/// `(dim, disc, hasse)`; two forms over Q_p, p odd, are equivalent exactly
/// when these agree.
pub fn form_invariants(q: &QuadraticForm) -> FormInvariants {
    q.invariants()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::embed_rational;
    use crate::plinalg::is_integral_unit;

    fn ctx() -> PrimeContext {
        PrimeContext::new(5, 24).unwrap()
    }

    fn form(c: PrimeContext, rows: &[&[i64]]) -> QuadraticForm {
        QuadraticForm::new(PMatrix::from_ints(c, rows)).unwrap()
    }

    fn ints(c: PrimeContext, xs: &[i64]) -> Vec<PadicScalar> {
        xs.iter().map(|&x| PadicScalar::from_int(c, x)).collect()
    }

    fn check(q: &QuadraticForm, d: &SupDiagonalization) {
        assert!(is_integral_unit(&d.transform).unwrap());
        let lhs = d.transform.transpose().mul(q.gram()).unwrap().mul(&d.transform).unwrap();
        let rhs = PMatrix::diagonal(q.ctx(), &d.diagonal);
        assert!(lhs.agreement(&rhs).unwrap() >= 16);
    }

    #[test]
    fn max_vector_examples() {
        let c = ctx();
        assert_eq!(find_max_vector(&form(c, &[&[1, 0], &[0, 1]])).unwrap(), (ints(c, &[1, 0]), 0));
        assert_eq!(find_max_vector(&form(c, &[&[0, 1], &[1, 0]])).unwrap(), (ints(c, &[1, 1]), 0));
        let q = form(c, &[&[5, 1], &[1, 5]]);
        let (v, scale) = find_max_vector(&q).unwrap();
        assert_eq!((v.clone(), scale), (ints(c, &[1, 1]), 0));
        assert_eq!(q.evaluate(&v).unwrap(), PadicScalar::from_int(c, 12));
    }

    #[test]
    fn diagonal_input_is_untouched() {
        let c = ctx();
        let q = form(c, &[&[1, 0], &[0, 3]]);
        let d = diagonalize_sup(&q).unwrap();
        assert_eq!(d.transform, PMatrix::identity(c, 2));
        assert_eq!(d.diagonal, ints(c, &[1, 3]));
    }

    #[test]
    fn hyperbolic_plane() {
        let c = ctx();
        let q = form(c, &[&[0, 1], &[1, 0]]);
        let d = diagonalize_sup(&q).unwrap();
        check(&q, &d);
        assert_eq!(d.transform.column(0), ints(c, &[1, 1]));
        let half = embed_rational(1, 2, c).unwrap();
        assert_eq!(d.transform.column(1), vec![half.neg(), half]);
        assert_eq!(d.diagonal[0], PadicScalar::from_int(c, 2));
        assert_eq!(d.diagonal[1], embed_rational(-1, 2, c).unwrap());
    }

    #[test]
    fn homogeneous_in_scaling() {
        let c = ctx();
        let q = form(c, &[&[5, 1, 0], &[1, 25, 2], &[0, 2, 3]]);
        let pq = form(c, &[&[25, 5, 0], &[5, 125, 10], &[0, 10, 15]]);
        let d = diagonalize_sup(&q).unwrap();
        let dp = diagonalize_sup(&pq).unwrap();
        check(&q, &d);
        assert_eq!(d.transform, dp.transform);
        for (a, b) in d.diagonal.iter().zip(&dp.diagonal) {
            assert_eq!(a.shift(1), *b);
        }
    }

    #[test]
    fn degenerate_and_asymmetric_rejected() {
        let c = ctx();
        let singular = PMatrix::from_ints(c, &[&[1, 1], &[1, 1]]);
        assert_eq!(QuadraticForm::new(singular).unwrap_err(), Error::Degenerate);
        let asym = PMatrix::from_ints(c, &[&[1, 2], &[3, 1]]);
        assert_eq!(QuadraticForm::new(asym).unwrap_err(), Error::NotSymmetric);
    }

    #[test]
    fn split_examples() {
        let c = ctx();
        let (s, t) = square_class_split(&ints(c, &[1, 1])).unwrap();
        assert_eq!(s, vec![SquareClass::ONE; 2]);
        assert_eq!(t, ints(c, &[1, 1]));

        let d = vec![PadicScalar::from_int(c, 2), embed_rational(-1, 2, c).unwrap()];
        let (s, t) = square_class_split(&d).unwrap();
        let u_class = SquareClass::new(true, 0);
        assert_eq!(s, vec![u_class, u_class]);
        assert_eq!(t[0], PadicScalar::one(c));
        // t_1^2 = (-1/2) / 2 = -1/4
        assert_eq!(t[1].square(), embed_rational(-1, 4, c).unwrap());

        let (s, t) = square_class_split(&ints(c, &[125 * 3])).unwrap();
        assert_eq!(s[0].parity, 1);
        assert_eq!(t[0].valuation(), Some(1));
        let back = s[0].representative(c).mul_scalar(&t[0].square());
        assert_eq!(back, PadicScalar::from_int(c, 375));
    }

    #[test]
    fn invariant_examples() {
        let c = ctx();
        let inv = form(c, &[&[1, 0], &[0, 1]]).invariants();
        assert_eq!((inv.dim, inv.disc, inv.hasse), (2, SquareClass::ONE, 1));
        let q = QuadraticForm::diagonal(c, &[PadicScalar::from_int(c, 2), embed_rational(1, 2, c).unwrap()]).unwrap();
        let inv = q.invariants();
        assert_eq!((inv.dim, inv.disc, inv.hasse), (2, SquareClass::ONE, 1));
        // <5, 2>: Hilbert symbol (5, 2)_5 = -1
        let q = form(c, &[&[5, 0], &[0, 2]]);
        assert_eq!(q.hasse(), -1);
    }
}
