//! Joint eigenvalue densities of the Hilbert–Schmidt, Bures and
//! superfidelity-induced measures, their normalization constants, and
//! purity statistics.
//!
//! All densities are with respect to the unordered simplex measure
//! described in [`crate::statlab::quadrature`]. They are symmetric in the
//! eigenvalues; inputs are sorted internally so that permuted arguments give
//! bit-identical results.

mod constants;
mod grid;
mod qubit;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use constants::{
    c_bures_quadrature, c_g_exact, c_g_jensen_bound, c_g_monte_carlo, c_g_quadrature, c_g_series,
    c_hs, hurwitz_zeta, inverse_mixedness_mean_hs, projective_unitary_volume, purity_mean_hs,
    purity_moment_hs, purity_variance_hs, series_coefficient, EstimateMethod, McMean,
    MomentSource, NormalizationEstimate, SeriesEstimate, SeriesTail, MC_MIN_SAMPLES,
};
pub use grid::{density_grid_qutrit, GridPoint, QutritGrid};
pub use qubit::{cdf_g2, pdf_g2_marginal};

use crate::error::{Error, Result};
use crate::qstate::TRACE_TOL;

/// Which measure on density matrices a density, constant or sample refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "hs")]
    HilbertSchmidt,
    #[serde(rename = "bures")]
    Bures,
    #[serde(rename = "g")]
    SuperfidelityG,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] =
        [MeasureKind::HilbertSchmidt, MeasureKind::Bures, MeasureKind::SuperfidelityG];

    pub fn tag(self) -> &'static str {
        match self {
            MeasureKind::HilbertSchmidt => "hs",
            MeasureKind::Bures => "bures",
            MeasureKind::SuperfidelityG => "g",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

fn sorted_simplex_point(eigs: &[f64]) -> Result<Vec<f64>> {
    if eigs.len() < 2 {
        return Err(Error::InvalidDimension(eigs.len()));
    }
    if let Some(v) = eigs.iter().find(|v| !(0.0..=1.0 + TRACE_TOL).contains(*v)) {
        return Err(Error::InvalidEigenvalues(format!("value {v} outside [0, 1]")));
    }
    let sum: f64 = eigs.iter().sum();
    if (sum - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidEigenvalues(format!("values sum to {sum}")));
    }
    let mut v = eigs.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

fn vandermonde_sq(v: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = v[i] - v[j];
            p *= d * d;
        }
    }
    p
}

fn log_vandermonde_sq(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            s += 2.0 * (v[i] - v[j]).abs().ln();
        }
    }
    s
}

/// `1 − Σλ² = 2Σ_{i<j} λᵢλⱼ` on the simplex; the pairwise form keeps full
/// relative accuracy near pure states.
fn mixedness(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            s += v[i] * v[j];
        }
    }
    2.0 * s
}

/// `∏_{i<j} (λᵢ − λⱼ)²`.
pub fn density_hs_unnormalized(eigs: &[f64]) -> Result<f64> {
    Ok(vandermonde_sq(&sorted_simplex_point(eigs)?))
}

/// `∏_{i<j} (λᵢ − λⱼ)² / √(1 − Σλᵢ²)`; diverges (integrably) at pure states.
pub fn density_g_unnormalized(eigs: &[f64]) -> Result<f64> {
    let v = sorted_simplex_point(eigs)?;
    let s = mixedness(&v);
    if s <= 0.0 {
        return Err(Error::Singular(format!("pure state, 1 - sum lambda^2 = {s:e}")));
    }
    Ok(vandermonde_sq(&v) / s.sqrt())
}

/// `∏_{i<j} (λᵢ − λⱼ)²/(λᵢ + λⱼ) / √(λ₁⋯λ_N)`; diverges on the boundary.
pub fn density_bures_unnormalized(eigs: &[f64]) -> Result<f64> {
    let v = sorted_simplex_point(eigs)?;
    if v[v.len() - 1] <= 0.0 {
        return Err(Error::Singular("zero eigenvalue".into()));
    }
    let mut p = 1.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = v[i] - v[j];
            p *= d * d / (v[i] + v[j]);
        }
    }
    Ok(p / v.iter().product::<f64>().sqrt())
}

/// Natural log of [`density_hs_unnormalized`]; `-∞` on coinciding eigenvalues.
pub fn log_density_hs_unnormalized(eigs: &[f64]) -> Result<f64> {
    Ok(log_vandermonde_sq(&sorted_simplex_point(eigs)?))
}

/// Natural log of [`density_g_unnormalized`].
pub fn log_density_g_unnormalized(eigs: &[f64]) -> Result<f64> {
    let v = sorted_simplex_point(eigs)?;
    let s = mixedness(&v);
    if s <= 0.0 {
        return Err(Error::Singular(format!("pure state, 1 - sum lambda^2 = {s:e}")));
    }
    Ok(log_vandermonde_sq(&v) - 0.5 * s.ln())
}

/// Natural log of [`density_bures_unnormalized`].
pub fn log_density_bures_unnormalized(eigs: &[f64]) -> Result<f64> {
    let v = sorted_simplex_point(eigs)?;
    if v[v.len() - 1] <= 0.0 {
        return Err(Error::Singular("zero eigenvalue".into()));
    }
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            s += 2.0 * (v[i] - v[j]).abs().ln() - (v[i] + v[j]).ln();
        }
    }
    Ok(s - 0.5 * v.iter().map(|x| x.ln()).sum::<f64>())
}

/// Dispatch on the measure.
pub fn density_unnormalized(measure: MeasureKind, eigs: &[f64]) -> Result<f64> {
    match measure {
        MeasureKind::HilbertSchmidt => density_hs_unnormalized(eigs),
        MeasureKind::Bures => density_bures_unnormalized(eigs),
        MeasureKind::SuperfidelityG => density_g_unnormalized(eigs),
    }
}

/// `lim_{λ_k → 0} √λ_k · ρ_Bures(λ)`, the coefficient of the inverse-square-root
/// divergence on the face `λ_k = 0`. Zero where a second eigenvalue vanishes.
pub fn bures_edge_coefficient(eigs: &[f64], k: usize) -> Result<f64> {
    if k >= eigs.len() {
        return Err(Error::InvalidArgument(format!("face index {k} out of range")));
    }
    let mut rest: Vec<f64> = eigs.to_vec();
    let zero = rest.remove(k);
    if zero.abs() > TRACE_TOL {
        return Err(Error::InvalidArgument(format!("lambda_{k} = {zero} is not on the face")));
    }
    let mut full = rest.clone();
    full.push(0.0);
    let full = sorted_simplex_point(&full)?;
    if rest.iter().any(|v| *v <= 0.0) {
        return Ok(0.0);
    }
    let mut p = 1.0;
    for i in 0..full.len() {
        for j in i + 1..full.len() {
            let d = full[i] - full[j];
            p *= d * d / (full[i] + full[j]);
        }
    }
    Ok(p / rest.iter().product::<f64>().sqrt())
}
