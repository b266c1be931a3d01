//! The `G = K A H` decomposition for `G = GL(n, Q_p)` and `H = O(q0)`.

mod kah;
mod space;

pub use kah::{
    displacement, kah_decompose, verify_witness, witness_usage_stats, Check, ClassUsage, KahWitness, WitnessReport,
    MEMBERSHIP_SLACK, RECONSTRUCT_SLACK,
};
pub use space::{ClassWitness, SymmetricSpaceContext, WITNESS_PRECISION};
