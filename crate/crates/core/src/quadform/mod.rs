//! Quadratic forms over Q_p, p odd.

mod form;
mod represent;
mod witt;

pub(crate) use form::diagonalize_gram;
pub use form::{
    diagonalize_sup, find_max_vector, form_invariants, invariants_of_diagonal, square_class_split, FormInvariants,
    QuadraticForm, SupDiagonalization,
};
pub use represent::represent_value;
pub use witt::{isometry_agreement, witt_isometry};
