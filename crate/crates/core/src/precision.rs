//! Retry-with-doubling policy for computations that lose precision.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{PrimeContext, MAX_PRECISION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionInfo {
    pub requested: u32,
    pub working: u32,
    pub retries: u32,
}

/// Runs `f` at the context precision, doubling on precision loss until
/// [`MAX_PRECISION`] is exceeded.
pub fn with_precision_retry<T>(
    ctx: PrimeContext,
    mut f: impl FnMut(PrimeContext) -> Result<T>,
) -> Result<(T, PrecisionInfo)> {
    let requested = ctx.precision();
    let mut working = requested;
    let mut retries = 0;
    loop {
        match f(ctx.with_precision(working)?) {
            Ok(v) => {
                return Ok((
                    v,
                    PrecisionInfo {
                        requested,
                        working,
                        retries,
                    },
                ))
            }
            Err(e) if e.is_precision_loss() => {
                if working >= MAX_PRECISION {
                    return Err(Error::PrecisionCapExhausted(working));
                }
                working = (working * 2).min(MAX_PRECISION);
                retries += 1;
            }
            Err(e) => return Err(e),
        }
    }
}
