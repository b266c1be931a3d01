use std::io::Read;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::padic::{PadicScalar, PrimeContext};
use crate::plinalg::PMatrix;

/// `--input`: a path, `-` for stdin, or a JSON document given inline.
pub fn read_document(input: Option<&str>) -> Result<Value> {
    let text = match input {
        None => return Err(Error::InvalidInput("--input is required for this command".into())),
        Some("-") => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?;
            buf
        }
        Some(s) if s.trim_start().starts_with(['[', '{']) => s.to_string(),
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("input is not JSON: {e}")))
}

/// An exact rational entry `num / den`, `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: BigInt,
    pub den: BigInt,
}

impl Rational {
    fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        let g = num.gcd(&den);
        let sign = if den.is_negative() { -BigInt::one() } else { BigInt::one() };
        Ok(Self {
            num: sign.clone() * &num / &g,
            den: sign * &den / &g,
        })
    }

    fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad rational {text:?}"));
        let (n, d) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text.trim(), "1"),
        };
        Self::new(n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)
    }

    fn from_value(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => match n.as_i64() {
                Some(i) => Self::new(i.into(), BigInt::one()),
                None => Self::parse(&n.to_string()),
            },
            Value::String(s) => Self::parse(s),
            Value::Object(_) => {
                let x: PadicScalar =
                    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("scalar: {e}")))?;
                let (num, den) = x.to_rational();
                Self::new(num, den)
            }
            other => Err(Error::Parse(format!("unsupported matrix entry {other}"))),
        }
    }

    pub fn embed(&self, ctx: PrimeContext) -> Result<PadicScalar> {
        PadicScalar::from_rational(ctx, &self.num, &self.den)
    }
}

/// A square matrix of exact rationals, from either `[[..], ..]` with
/// integer or `"num/den"` entries, or the matrix JSON `{rows, cols, entries}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: Vec<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn from_value(v: &Value) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = match v {
            Value::Array(rows) => rows
                .iter()
                .map(|row| match row {
                    Value::Array(entries) => entries.iter().map(Rational::from_value).collect(),
                    _ => Err(Error::Parse("matrix rows must be arrays".into())),
                })
                .collect::<Result<_>>()?,
            Value::Object(map) if map.contains_key("entries") => {
                let dim = |key: &str| {
                    map.get(key)
                        .and_then(Value::as_u64)
                        .ok_or_else(|| Error::Parse(format!("matrix JSON needs {key}")))
                };
                let (r, c) = (dim("rows")? as usize, dim("cols")? as usize);
                let entries = map["entries"].as_array().ok_or_else(|| Error::Parse("entries must be an array".into()))?;
                if entries.len() != r * c {
                    return Err(Error::Parse("entry count does not match dimensions".into()));
                }
                let flat: Vec<Rational> = entries.iter().map(Rational::from_value).collect::<Result<_>>()?;
                flat.chunks(c.max(1)).map(<[Rational]>::to_vec).collect()
            }
            _ => return Err(Error::Parse("expected a matrix".into())),
        };
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("expected a non-empty square matrix".into()));
        }
        Ok(Self { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn embed(&self, ctx: PrimeContext) -> Result<PMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.embed(ctx)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        PMatrix::from_rows(ctx, rows)
    }

    /// Exact determinant test by fraction-free (Bareiss) elimination.
    pub fn is_singular(&self) -> bool {
        let n = self.dim();
        // clear denominators row by row
        let mut m: Vec<Vec<BigInt>> = self
            .rows
            .iter()
            .map(|row| {
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(&x.den));
                row.iter().map(|x| &x.num * (&l / &x.den)).collect()
            })
            .collect();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => m.swap(k, i),
                    None => return true,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        m[n - 1][n - 1].is_zero()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.rows[i][j] == self.rows[j][i]))
    }
}

/// A vector of exact rationals.
pub fn rational_vector(v: &Value) -> Result<Vec<Rational>> {
    match v {
        Value::Array(items) => items.iter().map(Rational::from_value).collect(),
        _ => Err(Error::Parse("expected an array".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_inline_forms() {
        let m = RationalMatrix::from_value(&json!([[1, "1/2"], ["-3/6", 4]])).unwrap();
        assert_eq!(m.rows[0][1], Rational::new(1.into(), 2.into()).unwrap());
        assert_eq!(m.rows[1][0], Rational::new((-1).into(), 2.into()).unwrap());
        assert!(!m.is_singular());
        assert!(!m.is_symmetric());
    }

    #[test]
    fn exact_singularity() {
        let m = RationalMatrix::from_value(&json!([[1, 2, 3], [4, 5, 6], [7, 8, 9]])).unwrap();
        assert!(m.is_singular());
        let m = RationalMatrix::from_value(&json!([[0, 1], [1, 0]])).unwrap();
        assert!(!m.is_singular());
        let m = RationalMatrix::from_value(&json!([["1/3", "1/6"], [2, 1]])).unwrap();
        assert!(m.is_singular());
    }

    #[test]
    fn round_trips_matrix_json() {
        let ctx = PrimeContext::new(5, 12).unwrap();
        let g = PMatrix::from_ints(ctx, &[&[5, -1], &[0, 7]]);
        let v = serde_json::to_value(&g).unwrap();
        let back = RationalMatrix::from_value(&v).unwrap().embed(ctx).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(RationalMatrix::from_value(&json!([[1, 2]])).is_err());
        assert!(RationalMatrix::from_value(&json!([])).is_err());
        assert!(RationalMatrix::from_value(&json!([["1/0"]])).is_err());
    }
}
