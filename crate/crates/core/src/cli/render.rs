use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::padic::PadicScalar;
use crate::plinalg::PMatrix;

use super::Format;

/// A command result in every format it supports.
pub struct Emitted {
    pub json: Value,
    pub pretty: String,
    pub csv: Option<String>,
    pub status: i32,
}

impl Emitted {
    pub fn new(json: Value, pretty: String) -> Self {
        Emitted {
            json,
            pretty,
            csv: None,
            status: 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("documents serialise"),
            Format::Pretty => self.pretty.clone(),
            Format::Csv => self.csv.clone().unwrap_or_default(),
        }
    }
}

const SMALL: i64 = 1_000_000;

/// Short human form: small values as integers or `b/p^k`, otherwise the
/// leading digits.
pub fn scalar(x: &PadicScalar) -> String {
    let Some(v) = x.valuation() else {
        return "0".into();
    };
    let p = x.p();
    if let Some((num, den)) = small_rational(x) {
        return if den.is_one() { num.to_string() } else { format!("{num}/{den}") };
    }
    if let Some(b) = x.balanced_unit().filter(|b| b.abs() < BigInt::from(SMALL)) {
        return match v {
            0 => b.to_string(),
            v if v < 0 => format!("{b}/{p}^{}", -v),
            v => {
                let value = b * BigInt::from(p).pow(v as u32);
                if value.abs() < BigInt::from(SMALL) {
                    value.to_string()
                } else {
                    format!("{}*{p}^{v}", x.balanced_unit().unwrap())
                }
            }
        };
    }
    let digits = x.digits();
    let head: Vec<String> = digits.iter().take(6).map(u64::to_string).collect();
    let more = if digits.len() > 6 { " ..." } else { "" };
    format!("{p}^{v}*[{}{more}]", head.join(" "))
}

/// `x` as `r/s` with `|r|, |s| < SMALL`, found by rational reconstruction
/// of the unit modulo `p^precision`.
fn small_rational(x: &PadicScalar) -> Option<(BigInt, BigInt)> {
    let v = x.valuation()?;
    let modulus = BigInt::from(x.p()).pow(x.precision()?);
    let unit = BigInt::from(x.unit()?.clone());
    let bound = BigInt::from(SMALL);
    // extended Euclid on (modulus, unit) until the remainder drops below the bound
    let (mut r0, mut r1) = (modulus.clone(), unit);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 >= bound {
        let (q, r) = r0.div_rem(&r1);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1.clone(), s0 - q * s1);
    }
    // unique only when 2 |r s| < p^N
    if s1.is_zero() || s1.abs() >= bound || !s1.gcd(&modulus).is_one() || BigInt::from(2) * (&r1 * &s1).abs() >= modulus {
        return None;
    }
    let (mut num, mut den) = if s1.is_negative() { (-r1, -s1) } else { (r1, s1) };
    let pv = BigInt::from(x.p()).pow(v.unsigned_abs() as u32);
    if v >= 0 {
        num *= pv;
    } else {
        den *= pv;
    }
    (num.abs() < bound * 1000 && den < BigInt::from(SMALL) * 1000).then_some((num, den))
}

pub fn matrix(m: &PMatrix) -> String {
    let cells: Vec<Vec<String>> = (0..m.rows()).map(|i| m.row(i).iter().map(scalar).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&format!("  [ {} ]\n", padded.join("  ")));
    }
    out
}

pub fn scalars(xs: &[PadicScalar]) -> String {
    let parts: Vec<String> = xs.iter().map(scalar).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{embed_rational, PrimeContext};

    #[test]
    fn compact_forms() {
        let ctx = PrimeContext::new(5, 20).unwrap();
        assert_eq!(scalar(&PadicScalar::zero(ctx)), "0");
        assert_eq!(scalar(&PadicScalar::from_int(ctx, -7)), "-7");
        assert_eq!(scalar(&PadicScalar::from_int(ctx, 50)), "50");
        assert_eq!(scalar(&embed_rational(3, 25, ctx).unwrap()), "3/25");
        assert_eq!(scalar(&embed_rational(-1, 2, ctx).unwrap()), "-1/2");
        assert_eq!(scalar(&embed_rational(7, 150, ctx).unwrap()), "7/150");
        // a unit with no short rational form
        let long = PadicScalar::from_digits(ctx, 0, &[1, 4, 2, 0, 3, 1, 1, 4, 2, 0, 3, 1, 2, 2, 4, 0, 1, 3, 3, 1]).unwrap();
        assert!(scalar(&long).starts_with("5^0*[1 4 2 0 3 1 ..."));
    }
}
