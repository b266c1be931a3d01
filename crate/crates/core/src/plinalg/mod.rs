//! Linear algebra over Q_p.

mod elim;
mod hnf;
mod matrix;
mod norm;
mod smith;

pub use elim::{determinant, inverse, is_integral_unit, plu_eliminate, PluDecomposition};
pub use hnf::hnf_lattice;
pub use matrix::PMatrix;
pub use norm::{diagonalize_norm_pair, UltraNorm};
pub use smith::{
    centered, centered_norm, scaled_centered_norm_sq, smith_cartan, smith_cartan_ordered, CartanFactors,
    ExponentOrder,
};
