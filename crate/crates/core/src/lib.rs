//! Random density matrices under the measure induced by the superfidelity
//! distance `d_G = √(2 − 2G)`, `G(ρ, σ) = tr ρσ + √(1 − tr ρ²)√(1 − tr σ²)`.
//!
//! * [`qstate`]: density matrices, spectra, Ginibre and Haar primitives.
//! * [`similarity`]: fidelity, superfidelity, distances and line elements.
//! * [`eigendensities`]: eigenvalue densities, normalization constants,
//!   purity statistics.
//! * [`samplers`]: HS, Bures and superfidelity-measure samplers.
//! * [`statlab`]: Monte-Carlo, goodness-of-fit and quadrature tools.

pub mod eigendensities;
pub mod error;
pub mod qstate;
pub mod rng;
pub mod samplers;
pub mod similarity;
pub mod statlab;

pub use eigendensities::{MeasureKind, NormalizationEstimate};
pub use error::{Error, Result};
pub use qstate::{DensityMatrix, EigenvalueVector, TangentDirection, UnitaryMatrix};
pub use rng::RngStream;
pub use samplers::RejectionReport;
pub use statlab::{GofResult, SampleBatch};
