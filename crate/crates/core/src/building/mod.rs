//! Vertex classes of the Bruhat-Tits building of `GL(n, Q_p)`, the duality
//! involution, apartments and the boundedness experiment.

mod apartment;
mod experiment;
mod lattice;

pub use apartment::{distance_to_sigma_apartment, NearestPoint, SigmaApartmentRef};
pub use experiment::{
    quasi_density_experiment, sample_element, ExperimentConfig, ExperimentReport, GapStats, HistogramBin,
    SampleModel, SampleRecord, CONJUGACY_NOTE, SAMPLE_DIGITS,
};
pub use lattice::{distance, relative_position, sigma_dual, LatticeClass};
