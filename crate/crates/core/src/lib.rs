//! Cartan and polar decompositions of `GL(n, Q_p)` for odd `p`.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic`] - capped relative precision scalars, square classes, Hilbert
//!   symbols and Hensel square roots.
//! * [`plinalg`] - matrices over Q_p: elimination with valuation pivoting,
//!   Smith/Cartan factorisation `g = k1 * diag(p^a) * k2`, Hermite forms of
//!   lattices and simultaneous diagonalisation of ultrametric norms.
//! * [`quadform`] - sup-norm preserving diagonalisation of quadratic forms,
//!   invariants, value representation and isometries between equivalent forms.
//! * [`polar`] - the `G = K A H` witness for `H = O(q0)`.
//! * [`building`] - vertex classes of the Bruhat–Tits building, the
//!   duality involution, apartments and the boundedness experiment.
//! * [`cli`] - the command-line front end.

pub mod building;
pub mod cli;
pub mod error;
pub mod padic;
pub mod plinalg;
pub mod polar;
pub mod precision;
pub mod quadform;

pub use error::{Error, Result};
pub use padic::{PadicScalar, PrimeContext, SquareClass};
pub use plinalg::PMatrix;
pub use quadform::QuadraticForm;
