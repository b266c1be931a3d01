use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::context::{PrimeContext, DEFAULT_PRECISION};
use super::scalar::PadicScalar;
use crate::error::{Error, Result};

/// Lossless JSON form of a scalar. Exact zero has `valuation: null`, no
/// digits and precision 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub p: u64,
    pub valuation: Option<i64>,
    pub digits: Vec<u64>,
    pub precision: u32,
}

impl From<&PadicScalar> for ScalarJson {
    fn from(x: &PadicScalar) -> Self {
        ScalarJson {
            p: x.p(),
            valuation: x.valuation(),
            digits: x.digits(),
            precision: x.precision().unwrap_or(0),
        }
    }
}

impl ScalarJson {
    pub fn into_scalar(self) -> Result<PadicScalar> {
        let ctx = PrimeContext::new(self.p, self.precision.max(1).min(super::MAX_PRECISION))
            .or_else(|_| PrimeContext::new(self.p, DEFAULT_PRECISION))?;
        match self.valuation {
            None => {
                if !self.digits.is_empty() || self.precision != 0 {
                    return Err(Error::Parse("zero must have no digits and precision 0".into()));
                }
                Ok(PadicScalar::zero(ctx))
            }
            Some(v) => {
                if self.digits.len() != self.precision as usize {
                    return Err(Error::Parse("digit count does not match precision".into()));
                }
                PadicScalar::from_digits(ctx, v, &self.digits)
            }
        }
    }
}

impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PadicScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = ScalarJson::deserialize(deserializer)?;
        raw.into_scalar().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::embed_rational;

    #[test]
    fn zero_and_unit_round_trip() {
        let ctx = PrimeContext::new(7, 12).unwrap();
        for x in [PadicScalar::zero(ctx), embed_rational(-3, 49, ctx).unwrap()] {
            let s = serde_json::to_string(&x).unwrap();
            let back: PadicScalar = serde_json::from_str(&s).unwrap();
            assert_eq!(back, x);
        }
        let zero = serde_json::to_string(&PadicScalar::zero(ctx)).unwrap();
        assert_eq!(zero, r#"{"p":7,"valuation":null,"digits":[],"precision":0}"#);
    }

    #[test]
    fn rejects_inconsistent_documents() {
        let bad = [
            r#"{"p":7,"valuation":0,"digits":[1,2],"precision":3}"#,
            r#"{"p":7,"valuation":0,"digits":[0,2],"precision":2}"#,
            r#"{"p":7,"valuation":0,"digits":[9],"precision":1}"#,
            r#"{"p":4,"valuation":0,"digits":[1],"precision":1}"#,
            r#"{"p":7,"valuation":null,"digits":[1],"precision":1}"#,
        ];
        for doc in bad {
            assert!(serde_json::from_str::<PadicScalar>(doc).is_err(), "{doc}");
        }
    }
}
