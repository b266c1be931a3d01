//! Square classes of Q_p^* for odd p, the Hilbert symbol and Hensel square
//! roots.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::context::{legendre, sqrt_mod_prime, PrimeContext};
use super::scalar::PadicScalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitClass {
    Trivial,
    Nonresidue,
}

/// One of the four classes of Q_p^* / (Q_p^*)^2, represented by
/// `{1, u, p, u*p}` with `u` the smallest non-residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SquareClass {
    pub unit_class: UnitClass,
    pub parity: u8,
}

impl SquareClass {
    pub const ONE: SquareClass = SquareClass {
        unit_class: UnitClass::Trivial,
        parity: 0,
    };

    pub const ALL: [SquareClass; 4] = [
        SquareClass::ONE,
        SquareClass {
            unit_class: UnitClass::Nonresidue,
            parity: 0,
        },
        SquareClass {
            unit_class: UnitClass::Trivial,
            parity: 1,
        },
        SquareClass {
            unit_class: UnitClass::Nonresidue,
            parity: 1,
        },
    ];

    pub fn new(nonresidue: bool, parity: u8) -> Self {
        Self {
            unit_class: if nonresidue {
                UnitClass::Nonresidue
            } else {
                UnitClass::Trivial
            },
            parity: parity & 1,
        }
    }

    pub fn multiply(self, other: SquareClass) -> SquareClass {
        let nonres = (self.unit_class == UnitClass::Nonresidue) ^ (other.unit_class == UnitClass::Nonresidue);
        SquareClass::new(nonres, self.parity ^ other.parity)
    }

    /// Canonical representative `u^a * p^b`, an exact scalar.
    pub fn representative(self, ctx: PrimeContext) -> PadicScalar {
        let unit = match self.unit_class {
            UnitClass::Trivial => 1,
            UnitClass::Nonresidue => ctx.nonresidue() as i64,
        };
        PadicScalar::from_int(ctx, unit).shift(self.parity as i64)
    }

    pub fn label(self) -> &'static str {
        match (self.unit_class, self.parity) {
            (UnitClass::Trivial, 0) => "1",
            (UnitClass::Nonresidue, 0) => "u",
            (UnitClass::Trivial, _) => "p",
            (UnitClass::Nonresidue, _) => "up",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "1" => Ok(SquareClass::ALL[0]),
            "u" => Ok(SquareClass::ALL[1]),
            "p" => Ok(SquareClass::ALL[2]),
            "up" => Ok(SquareClass::ALL[3]),
            other => Err(Error::Parse(format!("unknown square class {other:?}"))),
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Formats a class vector as `(1,u,p)`.
pub fn class_vector_label(classes: &[SquareClass]) -> String {
    let parts: Vec<&str> = classes.iter().map(|c| c.label()).collect();
    format!("({})", parts.join(","))
}

/// Square class of a non-zero scalar: valuation parity plus the Legendre
/// symbol of the leading unit digit.
pub fn unit_square_class(a: &PadicScalar) -> Result<SquareClass> {
    let v = a.valuation().ok_or(Error::DivisionByZero)?;
    let nonres = legendre(a.leading_digit(), a.p()) == -1;
    Ok(SquareClass::new(nonres, v.rem_euclid(2) as u8))
}

/// Hilbert symbol `(a, b)` over Q_p, p odd.
///
/// With `a = p^alpha u` and `b = p^beta v`:
/// `(-1/p)^(alpha beta) (u/p)^beta (v/p)^alpha`.
pub fn hilbert_symbol(a: &PadicScalar, b: &PadicScalar) -> Result<i8> {
    let alpha = a.valuation().ok_or(Error::DivisionByZero)?;
    let beta = b.valuation().ok_or(Error::DivisionByZero)?;
    let p = a.p();
    let pow = |s: i8, e: i64| if e.rem_euclid(2) == 0 { 1 } else { s };
    let minus_one = legendre(p - 1, p);
    let u = legendre(a.leading_digit(), p);
    let v = legendre(b.leading_digit(), p);
    Ok(pow(minus_one, alpha * beta) * pow(u, beta) * pow(v, alpha))
}

/// Hilbert symbol on square classes; depends only on the classes.
pub fn hilbert_on_classes(a: SquareClass, b: SquareClass, ctx: PrimeContext) -> i8 {
    hilbert_symbol(&a.representative(ctx), &b.representative(ctx)).expect("representatives are non-zero")
}

/// Square root of a square in Q_p by Newton-Hensel lifting.
///
/// The root whose leading digit lies in `[1, (p-1)/2]` is returned.
pub fn hensel_sqrt(a: &PadicScalar) -> Result<PadicScalar> {
    let v = a.valuation().ok_or(Error::NotASquare)?;
    if unit_square_class(a)? != SquareClass::ONE {
        return Err(Error::NotASquare);
    }
    let ctx = a.ctx();
    let p = ctx.p();
    let precision = a.precision().unwrap();
    let target = a.unit().unwrap().clone();
    let r0 = sqrt_mod_prime(a.leading_digit(), p).expect("class test guarantees a residue");

    let mut root = BigUint::from(r0);
    let mut known = 1u32;
    while known < precision {
        known = (known * 2).min(precision);
        let m = ctx.modulus(known);
        let t = &target % &m;
        let sq = (&root * &root) % &m;
        // root <- root - (root^2 - t) / (2 root)
        let diff = (sq + &m - t) % &m;
        let two_root_inv = ((&root * 2u32) % &m).modinv(&m).expect("2 * root is a unit");
        let step = diff * two_root_inv % &m;
        root = (root + &m - step) % &m;
    }
    debug_assert!(root >= BigUint::one());
    PadicScalar::from_parts(ctx, v / 2, root, precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::embed_rational;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p, 20).unwrap()
    }

    #[test]
    fn classes_at_five() {
        let c = ctx(5);
        let class = |n: i64| unit_square_class(&PadicScalar::from_int(c, n)).unwrap();
        assert_eq!(class(1), SquareClass::ONE);
        assert_eq!(class(2), SquareClass::new(true, 0));
        assert_eq!(class(10), SquareClass::new(true, 1));
        assert_eq!(class(4), SquareClass::ONE);
        assert_eq!(class(-1), SquareClass::ONE);
    }

    #[test]
    fn class_group_has_exponent_two() {
        for a in SquareClass::ALL {
            assert_eq!(a.multiply(a), SquareClass::ONE);
            for b in SquareClass::ALL {
                assert_eq!(a.multiply(b), b.multiply(a));
            }
        }
    }

    #[test]
    fn representatives_have_their_class() {
        for p in [3, 5, 7, 11] {
            let c = ctx(p);
            for s in SquareClass::ALL {
                assert_eq!(unit_square_class(&s.representative(c)).unwrap(), s);
                assert_eq!(SquareClass::from_label(s.label()).unwrap(), s);
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        let c = ctx(5);
        let five = PadicScalar::from_int(c, 5);
        let two = PadicScalar::from_int(c, 2);
        assert_eq!(hilbert_symbol(&five, &two).unwrap(), -1);
        for n in [1i64, 2, 5, 10, 3, 75] {
            let b = PadicScalar::from_int(c, n);
            assert_eq!(hilbert_symbol(&PadicScalar::one(c), &b).unwrap(), 1);
            assert_eq!(hilbert_symbol(&b, &b.neg()).unwrap(), 1);
        }
    }

    #[test]
    fn sqrt_examples() {
        let c = ctx(5);
        let one = PadicScalar::one(c);
        assert_eq!(hensel_sqrt(&one).unwrap(), one);
        let six = PadicScalar::from_int(c, 6);
        let r = hensel_sqrt(&six).unwrap();
        assert_eq!(r.leading_digit(), 1);
        assert_eq!(r.square(), six);
        assert_eq!(hensel_sqrt(&PadicScalar::from_int(c, 2)), Err(Error::NotASquare));
        assert_eq!(hensel_sqrt(&PadicScalar::from_int(c, 5)), Err(Error::NotASquare));
        let big = embed_rational(-4, 25, c).unwrap();
        let r = hensel_sqrt(&big).unwrap();
        assert_eq!(r.valuation(), Some(-1));
        assert_eq!(r.square(), big);
        assert!(r.leading_digit() <= 2);
    }
}
