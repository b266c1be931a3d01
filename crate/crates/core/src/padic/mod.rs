//! Capped relative precision arithmetic in Q_p, p odd.

mod context;
mod json;
mod scalar;
mod square;

pub(crate) use context::pow_mod;
pub use context::{is_prime, legendre, sqrt_mod_prime, PrimeContext, DEFAULT_PRECISION, MAX_PRECISION};
pub use json::ScalarJson;
pub use scalar::{arith, cmp_valuation, embed_rational, ArithOp, PadicScalar, Sum};
pub use square::{
    class_vector_label, hensel_sqrt, hilbert_on_classes, hilbert_symbol, unit_square_class, SquareClass, UnitClass,
};
