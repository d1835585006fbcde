//! Fidelity, superfidelity, the distances they induce, and line elements.
//!
//! Line elements follow the convention `g(dρ, dρ) = ½ · d²/dt² d²(ρ, ρ + t dρ)`
//! at `t = 0`. [`fd_second_derivative`] returns the raw second derivative;
//! [`fd_line_element`] halves it so it can be compared with
//! [`line_element_g`] and [`line_element_bprime`] directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{
    check_dims, frobenius_sq, hermitian_eigen, hermitize, trace_product, CMatrix, DensityMatrix,
    TangentDirection,
};

/// Eigenvalues below this are treated as exact zeros before taking square
/// roots. A round-off eigenvalue of 1e-16 would otherwise add 1e-8 to `tr|√ρ√σ|`.
pub const SQRT_NOISE_FLOOR: f64 = 1e-13;

/// Radicands `1 − tr ρ²` down to `-RADICAND_TOL` are treated as round-off.
pub const RADICAND_TOL: f64 = 1e-12;

/// `1 − Σλ²` below this makes the superfidelity line element singular.
pub const PURE_STATE_TOL: f64 = 1e-10;

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-3;
/// How many times the step is halved when `ρ ± h dρ` leaves the state space.
pub const FD_MAX_SHRINKS: u32 = 4;

fn floored_sqrt(x: f64) -> f64 {
    if x < SQRT_NOISE_FLOOR {
        0.0
    } else {
        x.sqrt()
    }
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let mut scaled = vectors.clone();
    for (j, v) in values.iter().enumerate() {
        let r = floored_sqrt(*v);
        for i in 0..m.nrows() {
            scaled[(i, j)] *= r;
        }
    }
    hermitize(&(scaled * vectors.adjoint()))
}

/// Uhlmann fidelity `F = (tr|√ρ √σ|)² = (Σ √μ)²` with `μ` the spectrum of `√ρ σ √ρ`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let s = psd_sqrt(rho.matrix());
    let inner = hermitize(&(&s * sigma.matrix() * &s));
    let (mu, _) = hermitian_eigen(&inner);
    let root_sum: f64 = mu.iter().map(|m| floored_sqrt(*m)).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// `1 − tr ρ²`, with round-off around zero (either sign) mapped to zero: a
/// pure state assembled as `UΛU†` typically carries `|1 − tr ρ²| ~ 1e-16`,
/// whose square root would perturb `G` at the 1e-8 level.
fn mixedness(rho: &DensityMatrix) -> f64 {
    let r = 1.0 - frobenius_sq(rho.matrix());
    if r < SQRT_NOISE_FLOOR && r >= -RADICAND_TOL {
        0.0
    } else {
        r.max(0.0)
    }
}

/// `G(ρ, σ) = tr ρσ + √(1 − tr ρ²) √(1 − tr σ²)`.
pub fn superfidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let g = trace_product(rho.matrix(), sigma.matrix())
        + mixedness(rho).sqrt() * mixedness(sigma).sqrt();
    Ok(g.clamp(0.0, 1.0))
}

/// `d_G² = 2 − 2G`, evaluated as `‖ρ − σ‖²_F + (√(1 − tr ρ²) − √(1 − tr σ²))²`.
///
/// The two forms agree algebraically; the second is the squared Euclidean
/// distance between the lifts `ρ ↦ (ρ, √(1 − tr ρ²))`, vanishes exactly at
/// `ρ = σ` and carries no cancellation for nearby states.
pub fn dist_g_sq(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let diff = frobenius_sq(&(rho.matrix() - sigma.matrix()));
    let lift = mixedness(rho).sqrt() - mixedness(sigma).sqrt();
    Ok(diff + lift * lift)
}

/// `d_G = √(2 − 2G)`.
pub fn dist_g(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(dist_g_sq(rho, sigma)?.sqrt())
}

/// Bures distance `√(2 − 2√F)`.
pub fn dist_bures(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((2.0 - 2.0 * f.sqrt()).max(0.0).sqrt())
}

/// `2(1 − F)`, the squared distance whose line element is [`line_element_bprime`].
pub fn dist_bprime_sq(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(2.0 * (1.0 - fidelity(rho, sigma)?))
}

/// Squared infinitesimal length along a tangent direction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LineElementValue(f64);

impl LineElementValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `(Σ λᵢ ⟨i|dρ|i⟩)² / (1 − Σ λᵢ²) + Σ ⟨i|dρ²|i⟩` in the eigenbasis of `ρ`.
pub fn line_element_g(rho: &DensityMatrix, drho: &TangentDirection) -> Result<LineElementValue> {
    check_dims(rho.dim(), drho.dim())?;
    let (lambda, basis) = hermitian_eigen(rho.matrix());
    let s = 1.0 - lambda.iter().map(|l| l * l).sum::<f64>();
    if s <= PURE_STATE_TOL {
        return Err(Error::Singular(format!("state is pure (1 - tr rho^2 = {s:e})")));
    }
    let rotated = basis.adjoint() * drho.matrix() * &basis;
    let weighted: f64 = lambda
        .iter()
        .enumerate()
        .map(|(i, l)| l * rotated[(i, i)].re)
        .sum();
    // Σ ⟨i|dρ²|i⟩ = tr dρ², independent of the basis.
    let second = frobenius_sq(drho.matrix());
    Ok(LineElementValue(weighted * weighted / s + second))
}

/// `Σᵢⱼ |⟨i|dρ|j⟩|² / (λᵢ + λⱼ)` in the eigenbasis of `ρ`.
pub fn line_element_bprime(
    rho: &DensityMatrix,
    drho: &TangentDirection,
) -> Result<LineElementValue> {
    check_dims(rho.dim(), drho.dim())?;
    let (lambda, basis) = hermitian_eigen(rho.matrix());
    let rotated = basis.adjoint() * drho.matrix() * &basis;
    let n = rho.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let num = rotated[(i, j)].norm_sqr();
            let den = lambda[i] + lambda[j];
            if den <= 1e-12 {
                if num.sqrt() > 1e-12 {
                    return Err(Error::Singular(format!(
                        "lambda_{i} + lambda_{j} = {den:e} with nonzero tangent entry"
                    )));
                }
                continue;
            }
            acc += num / den;
        }
    }
    Ok(LineElementValue(acc))
}

fn shifted(rho: &DensityMatrix, drho: &TangentDirection, t: f64) -> Result<DensityMatrix> {
    DensityMatrix::new(rho.matrix() + drho.matrix() * Complex64::new(t, 0.0))
}

/// Central second difference `[f(h) − 2f(0) + f(−h)] / h²` of
/// `f(t) = metric_sq(ρ, ρ + t dρ)`. The step is halved (up to
/// [`FD_MAX_SHRINKS`] times) while `ρ ± h dρ` is not a valid state.
pub fn fd_second_derivative<F>(
    metric_sq: F,
    rho: &DensityMatrix,
    drho: &TangentDirection,
    h: f64,
) -> Result<f64>
where
    F: Fn(&DensityMatrix, &DensityMatrix) -> Result<f64>,
{
    check_dims(rho.dim(), drho.dim())?;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step h = {h} must be positive")));
    }
    let mut step = h;
    for attempt in 0..=FD_MAX_SHRINKS {
        if attempt > 0 {
            step *= 0.5;
        }
        let (plus, minus) = match (shifted(rho, drho, step), shifted(rho, drho, -step)) {
            (Ok(p), Ok(m)) => (p, m),
            _ => continue,
        };
        let f0 = metric_sq(rho, rho)?;
        let fp = metric_sq(rho, &plus)?;
        let fm = metric_sq(rho, &minus)?;
        return Ok((fp - 2.0 * f0 + fm) / (step * step));
    }
    Err(Error::StepSize { attempts: FD_MAX_SHRINKS + 1, h: step })
}

/// Half of [`fd_second_derivative`]: the finite-difference line element.
pub fn fd_line_element<F>(
    metric_sq: F,
    rho: &DensityMatrix,
    drho: &TangentDirection,
    h: f64,
) -> Result<f64>
where
    F: Fn(&DensityMatrix, &DensityMatrix) -> Result<f64>,
{
    Ok(0.5 * fd_second_derivative(metric_sq, rho, drho, h)?)
}
