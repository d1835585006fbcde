//! Statistical verification toolkit: Monte-Carlo means, goodness-of-fit
//! tests and the simplex quadrature oracle.

mod gof;
mod mc;
pub mod quadrature;

pub use gof::{
    chi_square_from_counts, chi_square_gof, chi_square_simplex3, kolmogorov_sf, ks_test,
    ks_two_sample, ordered_simplex3_coords, GofResult, CHI2_MIN_EXPECTED, KS_MIN_SAMPLES,
};
pub use mc::{mc_mean, mc_variance, RunningMean};
pub use quadrature::{simplex_quadrature, QuadResult};

use crate::eigendensities::MeasureKind;
use crate::error::{Error, Result};
use crate::qstate::EigenvalueVector;

/// Spectra and purities of a batch of sampled states, with provenance.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub measure: MeasureKind,
    pub dim: usize,
    pub seed: u64,
    pub eigen_records: Vec<EigenvalueVector>,
    pub purity_records: Vec<f64>,
}

impl SampleBatch {
    pub fn new(
        measure: MeasureKind,
        dim: usize,
        seed: u64,
        eigen_records: Vec<EigenvalueVector>,
        purity_records: Vec<f64>,
    ) -> Result<Self> {
        if eigen_records.is_empty() || eigen_records.len() != purity_records.len() {
            return Err(Error::InvalidArgument("batch records must be nonempty and aligned".into()));
        }
        let floor = 1.0 / dim as f64 - 1e-12;
        if let Some(p) = purity_records.iter().find(|p| !(floor..=1.0 + 1e-12).contains(*p)) {
            return Err(Error::InvalidArgument(format!("purity {p} outside [1/N, 1]")));
        }
        if let Some(e) = eigen_records.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, e.dim()));
        }
        Ok(Self { measure, dim, seed, eigen_records, purity_records })
    }

    pub fn len(&self) -> usize {
        self.purity_records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.purity_records.is_empty()
    }

    /// Eigenvalue number `k` (0 = largest) of every record.
    pub fn eigen_column(&self, k: usize) -> Vec<f64> {
        self.eigen_records.iter().map(|e| e.as_slice()[k]).collect()
    }
}
