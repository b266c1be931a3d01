use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::context::PrimeContext;
use crate::error::{Error, Result};

/// An element of Q_p in capped relative precision: `p^valuation * unit`
/// where `unit` is known modulo `p^precision` and is coprime to `p`.
///
/// The valuation of a non-zero scalar is always exact. Exact zero is a
/// separate state with no precision attached.
#[derive(Clone, Debug)]
pub struct PadicScalar {
    ctx: PrimeContext,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    Nonzero {
        valuation: i64,
        unit: BigUint,
        precision: u32,
    },
}

/// Outcome of an addition where every retained digit may cancel.
#[derive(Clone, Debug)]
pub enum Sum {
    Value(PadicScalar),
    /// The result is `O(p^absolute_precision)`: no digit survived.
    Cancelled { absolute_precision: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// p-adic valuation of a non-zero big integer, returning the cofactor.
pub(crate) fn split_valuation(n: &BigUint, p: u64) -> (u32, BigUint) {
    debug_assert!(!n.is_zero());
    let p_big = BigUint::from(p);
    let mut count = 0u32;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&p_big);
        if !r.is_zero() {
            return (count, rest);
        }
        rest = q;
        count += 1;
    }
}

fn signed_valuation(n: &BigInt, p: u64) -> (i64, BigInt) {
    let (v, rest) = split_valuation(n.magnitude(), p);
    let rest = BigInt::from_biguint(n.sign(), rest);
    (v as i64, rest)
}

fn to_residue(n: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from(modulus.clone());
    let r = n.mod_floor(&m);
    r.to_biguint().expect("mod_floor is non-negative")
}

impl PadicScalar {
    pub fn zero(ctx: PrimeContext) -> Self {
        Self {
            ctx,
            repr: Repr::Zero,
        }
    }

    pub fn one(ctx: PrimeContext) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: PrimeContext, n: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(n))
    }

    pub fn from_bigint(ctx: PrimeContext, n: &BigInt) -> Self {
        Self::from_rational(ctx, n, &BigInt::one()).expect("denominator is one")
    }

    /// Embeds `numerator / denominator` at the context's default precision.
    pub fn from_rational(ctx: PrimeContext, numerator: &BigInt, denominator: &BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if numerator.is_zero() {
            return Ok(Self::zero(ctx));
        }
        let (vn, num) = signed_valuation(numerator, ctx.p());
        let (vd, den) = signed_valuation(denominator, ctx.p());
        let precision = ctx.precision();
        let modulus = ctx.modulus(precision);
        let num = to_residue(&num, &modulus);
        let den = to_residue(&den, &modulus);
        let den_inv = den.modinv(&modulus).expect("cofactor is coprime to p");
        Ok(Self {
            ctx,
            repr: Repr::Nonzero {
                valuation: vn - vd,
                unit: num * den_inv % modulus,
                precision,
            },
        })
    }

    /// `p^exponent`, exact up to the context precision.
    pub fn p_power(ctx: PrimeContext, exponent: i64) -> Self {
        Self {
            ctx,
            repr: Repr::Nonzero {
                valuation: exponent,
                unit: BigUint::one(),
                precision: ctx.precision(),
            },
        }
    }

    /// Builds a scalar from its valuation and unit digits.
    pub fn from_parts(ctx: PrimeContext, valuation: i64, unit: BigUint, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InvalidPrecision(precision));
        }
        if unit >= ctx.modulus(precision) {
            return Err(Error::InvalidInput("unit digits exceed the stated precision".into()));
        }
        if (&unit % ctx.p()).is_zero() {
            return Err(Error::InvalidInput("unit part is divisible by p".into()));
        }
        Ok(Self {
            ctx,
            repr: Repr::Nonzero {
                valuation,
                unit,
                precision,
            },
        })
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// `None` stands for the valuation of exact zero, +infinity.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Nonzero { valuation, .. } => Some(*valuation),
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Nonzero { precision, .. } => Some(*precision),
        }
    }

    /// Position of the first unknown digit, `valuation + precision`.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Nonzero {
                valuation, precision, ..
            } => Some(valuation + *precision as i64),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Nonzero { unit, .. } => Some(unit),
        }
    }

    /// Unit digits in base p, least significant first, `precision` of them.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Zero => Vec::new(),
            Repr::Nonzero { unit, precision, .. } => {
                let p = BigUint::from(self.ctx.p());
                let mut rest = unit.clone();
                let mut out = Vec::with_capacity(*precision as usize);
                for _ in 0..*precision {
                    let (q, r) = rest.div_rem(&p);
                    out.push(r.to_u64().unwrap());
                    rest = q;
                }
                out
            }
        }
    }

    pub fn from_digits(ctx: PrimeContext, valuation: i64, digits: &[u64]) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidPrecision(0));
        }
        let p = BigUint::from(ctx.p());
        let mut unit = BigUint::zero();
        for &d in digits.iter().rev() {
            if d >= ctx.p() {
                return Err(Error::InvalidInput(format!("digit {d} out of range for p = {}", ctx.p())));
            }
            unit = unit * &p + BigUint::from(d);
        }
        Self::from_parts(ctx, valuation, unit, digits.len() as u32)
    }

    /// Leading unit digit, in `1..p`. Zero for exact zero.
    pub fn leading_digit(&self) -> u64 {
        match &self.repr {
            Repr::Zero => 0,
            Repr::Nonzero { unit, .. } => (unit % self.ctx.p()).to_u64().unwrap(),
        }
    }

    /// Re-embeds at a new relative precision. Extra digits are zero, so a
    /// finite p-adic expansion is carried over exactly.
    pub fn with_precision(&self, precision: u32) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Nonzero { valuation, unit, precision: old } => {
                let unit = if precision < *old {
                    unit % self.ctx.modulus(precision)
                } else {
                    unit.clone()
                };
                Self {
                    ctx: self.ctx,
                    repr: Repr::Nonzero {
                        valuation: *valuation,
                        unit,
                        precision: precision.max(1),
                    },
                }
            }
        }
    }

    /// Same value relabelled with a context of the same prime.
    pub fn in_context(&self, ctx: PrimeContext) -> Self {
        debug_assert_eq!(ctx.p(), self.ctx.p());
        Self {
            ctx,
            repr: self.repr.clone(),
        }
    }

    /// Multiplies by `p^shift`; exact.
    pub fn shift(&self, shift: i64) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Nonzero {
                valuation,
                unit,
                precision,
            } => Self {
                ctx: self.ctx,
                repr: Repr::Nonzero {
                    valuation: valuation + shift,
                    unit: unit.clone(),
                    precision: *precision,
                },
            },
        }
    }

    /// Unit part `p^-v * self`, valuation zero.
    pub fn unit_part(&self) -> Self {
        match self.valuation() {
            None => self.clone(),
            Some(v) => self.shift(-v),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Nonzero {
                valuation,
                unit,
                precision,
            } => {
                let m = self.ctx.modulus(*precision);
                Self {
                    ctx: self.ctx,
                    repr: Repr::Nonzero {
                        valuation: *valuation,
                        unit: (&m - unit) % &m,
                        precision: *precision,
                    },
                }
            }
        }
    }

    fn combine(&self, other: &Self, subtract: bool) -> Sum {
        debug_assert_eq!(self.ctx.p(), other.ctx.p());
        let (va, ua, na) = match &self.repr {
            Repr::Zero => {
                let out = if subtract { other.neg() } else { other.clone() };
                return Sum::Value(out.in_context(self.ctx));
            }
            Repr::Nonzero {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision as i64),
        };
        let (vb, ub, nb) = match &other.repr {
            Repr::Zero => return Sum::Value(self.clone()),
            Repr::Nonzero {
                valuation,
                unit,
                precision,
            } => (*valuation, unit, *precision as i64),
        };
        let absolute = (va + na).min(vb + nb);
        let base = va.min(vb);
        let width = (absolute - base) as u32;
        let modulus = self.ctx.modulus(width);
        let lift = |v: i64, u: &BigUint| -> BigUint {
            let shift = v - base;
            if shift >= width as i64 {
                BigUint::zero()
            } else {
                (u * self.ctx.modulus(shift as u32)) % &modulus
            }
        };
        let a = lift(va, ua);
        let b = lift(vb, ub);
        let s = if subtract {
            (a + &modulus - b) % &modulus
        } else {
            (a + b) % &modulus
        };
        if s.is_zero() {
            return Sum::Cancelled {
                absolute_precision: absolute,
            };
        }
        let (k, unit) = split_valuation(&s, self.ctx.p());
        Sum::Value(Self {
            ctx: self.ctx,
            repr: Repr::Nonzero {
                valuation: base + k as i64,
                unit,
                precision: width - k,
            },
        })
    }

    /// Addition keeping track of total cancellation.
    pub fn add_tracked(&self, other: &Self) -> Sum {
        self.combine(other, false)
    }

    pub fn sub_tracked(&self, other: &Self) -> Sum {
        self.combine(other, true)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        match self.combine(other, false) {
            Sum::Value(v) => Ok(v),
            Sum::Cancelled { .. } => Err(Error::InsufficientPrecision),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        match self.combine(other, true) {
            Sum::Value(v) => Ok(v),
            Sum::Cancelled { .. } => Err(Error::InsufficientPrecision),
        }
    }

    /// Addition that rounds a fully cancelled result to exact zero.
    ///
    /// Used by the matrix routines, where an entry known to vanish to
    /// working precision is treated as zero.
    pub fn add_lossy(&self, other: &Self) -> Self {
        match self.combine(other, false) {
            Sum::Value(v) => v,
            Sum::Cancelled { .. } => Self::zero(self.ctx),
        }
    }

    pub fn sub_lossy(&self, other: &Self) -> Self {
        match self.combine(other, true) {
            Sum::Value(v) => v,
            Sum::Cancelled { .. } => Self::zero(self.ctx),
        }
    }

    pub fn mul_scalar(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ctx.p(), other.ctx.p());
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Self::zero(self.ctx),
            (
                Repr::Nonzero {
                    valuation: va,
                    unit: ua,
                    precision: na,
                },
                Repr::Nonzero {
                    valuation: vb,
                    unit: ub,
                    precision: nb,
                },
            ) => {
                let precision = (*na).min(*nb);
                let modulus = self.ctx.modulus(precision);
                Self {
                    ctx: self.ctx,
                    repr: Repr::Nonzero {
                        valuation: va + vb,
                        unit: (ua * ub) % modulus,
                        precision,
                    },
                }
            }
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        Ok(self.mul_scalar(other))
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero => Err(Error::DivisionByZero),
            Repr::Nonzero {
                valuation,
                unit,
                precision,
            } => {
                let modulus = self.ctx.modulus(*precision);
                let unit = unit.modinv(&modulus).expect("unit is coprime to p");
                Ok(Self {
                    ctx: self.ctx,
                    repr: Repr::Nonzero {
                        valuation: -valuation,
                        unit,
                        precision: *precision,
                    },
                })
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        Ok(self.mul_scalar(&other.inv()?))
    }

    pub fn square(&self) -> Self {
        self.mul_scalar(self)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.ctx).with_precision(self.precision().unwrap_or(self.ctx.precision()));
        for _ in 0..exp {
            acc = acc.mul_scalar(self);
        }
        acc
    }

    /// `a mod p^level` as an exact finite expansion together with the
    /// quotient `(a - r) / p^level`, which is integral.
    pub fn split_at(&self, level: i64) -> Result<(Self, Self)> {
        match &self.repr {
            Repr::Zero => Ok((self.clone(), self.clone())),
            Repr::Nonzero {
                valuation,
                unit,
                precision,
            } => {
                if *valuation >= level {
                    return Ok((Self::zero(self.ctx), self.shift(-level)));
                }
                let low_digits = (level - valuation) as u64;
                if low_digits >= *precision as u64 {
                    return Err(Error::InsufficientPrecision);
                }
                let m = self.ctx.modulus(low_digits as u32);
                let (high, low) = unit.div_rem(&m);
                // low has leading digit of the unit, so it is a unit itself
                let remainder = Self {
                    ctx: self.ctx,
                    repr: Repr::Nonzero {
                        valuation: *valuation,
                        unit: low,
                        precision: low_digits as u32,
                    },
                };
                let quotient = if high.is_zero() {
                    Self::zero(self.ctx)
                } else {
                    let (k, rest) = split_valuation(&high, self.ctx.p());
                    let left = *precision - low_digits as u32;
                    if k >= left {
                        Self::zero(self.ctx)
                    } else {
                        Self {
                            ctx: self.ctx,
                            repr: Repr::Nonzero {
                                valuation: k as i64,
                                unit: rest,
                                precision: left - k,
                            },
                        }
                    }
                };
                Ok((remainder, quotient))
            }
        }
    }

    /// Exact rational value when the scalar is a finite expansion, as
    /// `(numerator, denominator)` with the denominator a power of p.
    pub fn to_rational(&self) -> (BigInt, BigInt) {
        match &self.repr {
            Repr::Zero => (BigInt::zero(), BigInt::one()),
            Repr::Nonzero { valuation, unit, .. } => {
                let u = BigInt::from(unit.clone());
                let p = BigInt::from(self.ctx.p());
                if *valuation >= 0 {
                    (u * p.pow(*valuation as u32), BigInt::one())
                } else {
                    (u, p.pow((-valuation) as u32))
                }
            }
        }
    }

    /// The unit part as a signed integer in `(-p^prec/2, p^prec/2]`, useful
    /// for recognising small rationals in test output.
    pub fn balanced_unit(&self) -> Option<BigInt> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Nonzero { unit, precision, .. } => {
                let m = self.ctx.modulus(*precision);
                let u = BigInt::from(unit.clone());
                let half = BigInt::from(m.clone()) / 2;
                Some(if u > half { u - BigInt::from(m) } else { u })
            }
        }
    }

    /// Valuation of `self - other`, or the absolute precision bound when
    /// the two agree on every known digit. `None` if both are exact and equal.
    pub fn difference_valuation(&self, other: &Self) -> Option<i64> {
        match self.sub_tracked(other) {
            Sum::Value(v) => v.valuation(),
            Sum::Cancelled { absolute_precision } => Some(absolute_precision),
        }
    }

    /// Compares two scalars on the digits both know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            _ => matches!(self.sub_tracked(other), Sum::Cancelled { .. }),
        }
    }
}

pub fn arith(a: &PadicScalar, b: &PadicScalar, op: ArithOp) -> Result<PadicScalar> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

/// Embeds `numerator / denominator` into Q_p at the context precision.
pub fn embed_rational(numerator: i64, denominator: i64, ctx: PrimeContext) -> Result<PadicScalar> {
    PadicScalar::from_rational(ctx, &BigInt::from(numerator), &BigInt::from(denominator))
}

impl PartialEq for PadicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p() == other.ctx.p() && self.repr == other.repr
    }
}

impl Eq for PadicScalar {}

impl Hash for PadicScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.p().hash(state);
        self.repr.hash(state);
    }
}

impl<'a> Add<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: &'a PadicScalar) -> PadicScalar {
        self.add_lossy(rhs)
    }
}

impl<'a> Sub<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &'a PadicScalar) -> PadicScalar {
        self.sub_lossy(rhs)
    }
}

impl<'a> Mul<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &'a PadicScalar) -> PadicScalar {
        self.mul_scalar(rhs)
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(self)
    }
}

/// Orders by valuation, smallest (largest absolute value) first; zero last.
pub fn cmp_valuation(a: &PadicScalar, b: &PadicScalar) -> Ordering {
    match (a.valuation(), b.valuation()) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Greater,
        (Some(_), None) => Ordering::Less,
        (Some(x), Some(y)) => x.cmp(&y),
    }
}

impl fmt::Display for PadicScalar {
    /// `p^v * (d0 + d1*p + d2*p^2 + ...) [prec N]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(v) = self.valuation() else {
            return write!(f, "0");
        };
        let p = self.ctx.p();
        write!(f, "{p}^{v} * (")?;
        for (i, d) in self.digits().iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{d}")?,
                1 => write!(f, "{d}*{p}")?,
                _ => write!(f, "{d}*{p}^{i}")?,
            }
        }
        write!(f, ") [prec {}]", self.precision().unwrap())
    }
}

impl PadicScalar {
    /// Parses the text produced by `Display`.
    pub fn parse_text(text: &str, ctx: PrimeContext) -> Result<Self> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero(ctx));
        }
        let bad = |what: &str| Error::Parse(format!("{what} in {text:?}"));
        let (head, rest) = text.split_once(" * (").ok_or_else(|| bad("missing ' * ('"))?;
        let (base, val) = head.split_once('^').ok_or_else(|| bad("missing valuation"))?;
        let base: u64 = base.parse().map_err(|_| bad("bad prime"))?;
        if base != ctx.p() {
            return Err(Error::ContextMismatch(ctx.p(), base));
        }
        let valuation: i64 = val.parse().map_err(|_| bad("bad valuation"))?;
        let (body, tail) = rest.split_once(") [prec ").ok_or_else(|| bad("missing precision"))?;
        let precision: usize = tail
            .strip_suffix(']')
            .ok_or_else(|| bad("missing ']'"))?
            .parse()
            .map_err(|_| bad("bad precision"))?;
        let mut digits = Vec::with_capacity(precision);
        for (i, term) in body.split(" + ").enumerate() {
            let (d, power) = match term.split_once('*') {
                None => (term, 0usize),
                Some((d, pw)) => {
                    let power = match pw.split_once('^') {
                        None if pw == base.to_string() => 1,
                        Some((b, e)) if b == base.to_string() => e.parse().map_err(|_| bad("bad exponent"))?,
                        _ => return Err(bad("bad term")),
                    };
                    (d, power)
                }
            };
            if power != i || (i > 0 && power < 1) {
                return Err(bad("digits out of order"));
            }
            digits.push(d.parse::<u64>().map_err(|_| bad("bad digit"))?);
        }
        if digits.len() != precision {
            return Err(bad("digit count does not match precision"));
        }
        Self::from_digits(ctx, valuation, &digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, prec: u32) -> PrimeContext {
        PrimeContext::new(p, prec).unwrap()
    }

    #[test]
    fn embed_basics() {
        let c = ctx(5, 8);
        let one = embed_rational(1, 1, c).unwrap();
        assert_eq!(one.valuation(), Some(0));
        assert_eq!(one.unit(), Some(&BigUint::one()));
        let zero = embed_rational(0, 7, c).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.valuation(), None);
        let fifty = embed_rational(50, 1, c).unwrap();
        assert_eq!(fifty.valuation(), Some(2));
        assert_eq!(fifty.unit(), Some(&BigUint::from(2u32)));
        assert_eq!(embed_rational(3, 0, c), Err(Error::DivisionByZero));
        let frac = embed_rational(7, 50, c).unwrap();
        assert_eq!(frac.valuation(), Some(-2));
    }

    #[test]
    fn identities_and_inverse_pair() {
        let c = ctx(5, 16);
        let a = embed_rational(-17, 3, c).unwrap();
        let zero = PadicScalar::zero(c);
        let one = PadicScalar::one(c);
        assert_eq!(a.checked_add(&zero).unwrap(), a);
        assert_eq!(a.checked_mul(&one).unwrap(), a);
        let half = embed_rational(1, 2, c).unwrap();
        let two = embed_rational(2, 1, c).unwrap();
        assert_eq!(half.checked_mul(&two).unwrap(), one);
    }

    #[test]
    fn subtraction_by_hand() {
        // (1 + 5 + 25) - (1 + 5) = 25 at precision 4
        let c = ctx(5, 4);
        let a = PadicScalar::from_int(c, 31);
        let b = PadicScalar::from_int(c, 6);
        let d = a.checked_sub(&b).unwrap();
        assert_eq!(d.valuation(), Some(2));
        assert_eq!(d.unit(), Some(&BigUint::one()));
        // two absolute digits were consumed by the cancellation
        assert_eq!(d.precision(), Some(2));
    }

    #[test]
    fn full_cancellation_is_reported() {
        let c = ctx(7, 10);
        let a = embed_rational(3, 11, c).unwrap();
        assert_eq!(a.checked_sub(&a), Err(Error::InsufficientPrecision));
        assert!(a.sub_lossy(&a).is_zero());
        match a.sub_tracked(&a) {
            Sum::Cancelled { absolute_precision } => assert_eq!(absolute_precision, 10),
            Sum::Value(_) => panic!("expected cancellation"),
        }
    }

    #[test]
    fn division_by_zero() {
        let c = ctx(3, 8);
        let a = PadicScalar::one(c);
        assert_eq!(a.checked_div(&PadicScalar::zero(c)), Err(Error::DivisionByZero));
    }

    #[test]
    fn context_mismatch() {
        let a = PadicScalar::one(ctx(3, 8));
        let b = PadicScalar::one(ctx(5, 8));
        assert_eq!(a.checked_add(&b), Err(Error::ContextMismatch(3, 5)));
    }

    #[test]
    fn precision_of_mixed_valuations() {
        let c = ctx(5, 6);
        // 5^-2 * 1 (absolute precision 4) plus 5^3 (absolute precision 9)
        let a = PadicScalar::p_power(c, -2);
        let b = PadicScalar::p_power(c, 3);
        let s = a.checked_add(&b).unwrap();
        assert_eq!(s.valuation(), Some(-2));
        assert_eq!(s.absolute_precision(), Some(4));
        // the small term is below the known digits of a
        let t = PadicScalar::p_power(c, 5);
        assert_eq!(a.checked_add(&t).unwrap(), a);
    }

    #[test]
    fn split_at_reduces_mod_power() {
        let c = ctx(5, 10);
        // 1/5 + 3 + 2*5 + 5^3 reduced mod 5^1 -> 1/5 + 3
        let x = embed_rational(1 + 3 * 5 + 2 * 25 + 625, 5, c).unwrap();
        let (r, q) = x.split_at(1).unwrap();
        assert_eq!(r.to_rational(), (BigInt::from(16), BigInt::from(5)));
        let back = r.checked_add(&q.shift(1)).unwrap();
        assert!(back.agrees_with(&x));
    }

    #[test]
    fn text_round_trip() {
        let c = ctx(5, 6);
        let x = embed_rational(-7, 250, c).unwrap();
        let text = x.to_string();
        assert!(text.starts_with("5^-3 * ("));
        assert_eq!(PadicScalar::parse_text(&text, c).unwrap(), x);
        assert_eq!(PadicScalar::parse_text("0", c).unwrap(), PadicScalar::zero(c));
        assert!(PadicScalar::parse_text("5^0 * (1 + 2*5^2) [prec 2]", c).is_err());
    }
}
