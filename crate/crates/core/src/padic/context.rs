use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Digits carried when no precision is requested explicitly.
pub const DEFAULT_PRECISION: u32 = 64;
/// Hard cap for precision-doubling retries.
pub const MAX_PRECISION: u32 = 1024;

/// The field Q_p for an odd prime `p`, together with the default relative
/// precision new scalars are embedded at.
///
/// Contexts are plain values. Two scalars are compatible when their primes
/// agree; the default precision is only a hint for constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
    nonresidue: u64,
    precision: u32,
}

impl PrimeContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::InvalidPrecision(precision));
        }
        let nonresidue = (2..p)
            .find(|&a| legendre(a, p) == -1)
            .expect("every odd prime has a quadratic non-residue");
        Ok(Self {
            p,
            nonresidue,
            precision,
        })
    }

    pub fn with_default_precision(p: u64) -> Result<Self> {
        Self::new(p, DEFAULT_PRECISION)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Smallest positive quadratic non-residue mod p.
    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Same prime, different default precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::InvalidPrecision(precision));
        }
        Ok(Self { precision, ..*self })
    }

    pub(crate) fn modulus(&self, digits: u32) -> BigUint {
        if digits == 0 {
            return BigUint::one();
        }
        BigUint::from(self.p).pow(digits)
    }

    pub(crate) fn check_same(&self, other: &PrimeContext) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.p, other.p))
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol (a / p) for an odd prime p, via Euler's criterion.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Square root mod an odd prime (Tonelli-Shanks). Returns the root in
/// `[0, (p-1)/2]`, or `None` for non-residues.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = (2..p).find(|&z| legendre(z, p) == -1).unwrap();
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mulm(t2, t2);
                i += 1;
            }
            let b = pow_mod(c, 1u64 << (m - i - 1), p);
            m = i;
            c = mulm(b, b);
            t = mulm(t, c);
            r = mulm(r, b);
        }
        r
    };
    Some(root.min(p - root))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_composite() {
        assert_eq!(PrimeContext::new(2, 8), Err(Error::InvalidPrime(2)));
        assert_eq!(PrimeContext::new(9, 8), Err(Error::InvalidPrime(9)));
        assert_eq!(PrimeContext::new(1, 8), Err(Error::InvalidPrime(1)));
        assert!(PrimeContext::new(5, 0).is_err());
        assert!(PrimeContext::new(5, MAX_PRECISION + 1).is_err());
    }

    #[test]
    fn smallest_nonresidue() {
        for (p, u) in [(3, 2), (5, 2), (7, 3), (11, 2), (17, 3), (23, 5), (41, 3)] {
            let ctx = PrimeContext::new(p, 8).unwrap();
            assert_eq!(ctx.nonresidue(), u, "p = {p}");
            assert_eq!(legendre(u, p), -1);
        }
    }

    #[test]
    fn sqrt_mod_matches_enumeration() {
        for p in [3u64, 5, 7, 13, 17, 41, 97] {
            for a in 0..p {
                let brute = (0..=(p - 1) / 2).find(|x| x * x % p == a);
                assert_eq!(sqrt_mod_prime(a, p), brute, "a = {a}, p = {p}");
            }
        }
    }
}
