//! Random-state generators: Hilbert–Schmidt, Bures, and the superfidelity
//! measure (exact inverse-CDF sampling for qubits, rejection against Bures
//! proposals for larger dimensions).

mod batch;
mod rejection;

use num_complex::Complex64;
use rand::Rng;

pub use batch::{sample_batch, BatchOutput};
pub use rejection::{
    audit_envelope, default_budget, density_ratio_g_bures, log_density_ratio_g_bures,
    rejection_constant_c, sup_density_ratio_unnormalized, EnvelopeAudit, GRejectionSampler,
    RejectionReport, AUDIT_PROBES, AUDIT_REL_TOL,
};

use crate::eigendensities::cdf_g2;
use crate::error::{Error, Result};
use crate::qstate::{compose_state, ginibre, haar_unitary, CMatrix, DensityMatrix, EigenvalueVector};

/// `|cdf − u|` at which [`invert_cdf_g2`] stops.
pub const INVERT_TOL: f64 = 1e-12;
/// Bisection iteration cap for [`invert_cdf_g2`].
pub const INVERT_MAX_ITER: u32 = 80;

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

/// Hilbert–Schmidt state `GG†/tr GG†` with `G` Ginibre.
pub fn sample_hs<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(dim)?;
    Ok(DensityMatrix::from_gram(&ginibre(dim, rng)?))
}

/// Purity of a Hilbert–Schmidt state without forming the state:
/// `‖GG†‖²_F / (tr GG†)²`. Consumes the RNG exactly like [`sample_hs`].
pub fn hs_purity<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<f64> {
    check_dim(dim)?;
    let g = ginibre(dim, rng)?;
    let w = &g * g.adjoint();
    let tr: f64 = w.diagonal().iter().map(|z| z.re).sum();
    let sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    Ok(sq / (tr * tr))
}

/// Bures state `(I + U)GG†(I + U†)` normalized, with `U` Haar and `G` Ginibre.
pub fn sample_bures<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let u = haar_unitary(dim, rng)?;
    let g = ginibre(dim, rng)?;
    let a = (CMatrix::identity(dim, dim) + u.matrix()) * g;
    Ok(DensityMatrix::from_gram(&a))
}

/// Inverse of [`cdf_g2`] by bisection. The CDF is flat at `t = 1/2`, which
/// rules out Newton steps near the centre.
pub fn invert_cdf_g2(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain { value: u, domain: "[0, 1]" });
    }
    if u == 0.0 || u == 1.0 {
        return Ok(u);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut mid = 0.5;
    for _ in 0..INVERT_MAX_ITER {
        mid = 0.5 * (lo + hi);
        let f = cdf_g2(mid)?;
        if (f - u).abs() <= INVERT_TOL {
            break;
        }
        if f < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Exact qubit sampler for the superfidelity measure: eigenvalue by inverse
/// transform, eigenbasis Haar.
pub fn sample_g_qubit<R: Rng + ?Sized>(rng: &mut R) -> Result<DensityMatrix> {
    let u: f64 = rng.random();
    let t = invert_cdf_g2(u)?;
    let eigs = EigenvalueVector::new(vec![t, 1.0 - t])?;
    compose_state(&eigs, &haar_unitary(2, rng)?)
}

/// Expectation `⟨ψ|ρ|ψ⟩`.
pub fn expectation(rho: &DensityMatrix, psi: &[Complex64]) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), psi.len()));
    }
    let m = rho.matrix();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            s += psi[i].conj() * m[(i, j)] * psi[j];
        }
    }
    Ok(s.re)
}
