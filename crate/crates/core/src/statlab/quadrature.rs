//! Adaptive Gauss–Kronrod quadrature and the eigenvalue-simplex integrator.
//!
//! Simplex convention: eigenvalues are unordered and the measure is
//! `dλ₁ … dλ_{N−1}` with `λ_N = 1 − Σ λᵢ`. Under this convention the
//! Hilbert–Schmidt constants come out as `C₂ = 3`, `C₃ = 1680`.
//!
//! The integrator substitutes `λᵢ = xᵢ²` with `x` on the positive orthant of
//! the unit sphere. The Jacobian carries a factor `∏ xᵢ`, which cancels the
//! `1/√λᵢ` edge singularities of the Bures density and tames the
//! `1/√(1 − Σλ²)` vertex behaviour of the superfidelity density.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

// 15-point Kronrod nodes (non-negative half) and weights; every other node
// from index 1 is a 7-point Gauss node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 2000 }
    }
}

fn check(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(vec![x]))
    }
}

fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = check(center, f(center)?)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let f1 = check(center - dx, f(center - dx)?)?;
        let f2 = check(center + dx, f(center + dx)?)?;
        kronrod += WGK[k] * (f1 + f2);
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    Ok(QuadResult { value: kronrod * half, error: ((kronrod - gauss) * half).abs() })
}

struct Segment {
    a: f64,
    b: f64,
    est: QuadResult,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive G7–K15 quadrature of `f` over `[a, b]`: the segment with
/// the largest error estimate is bisected until the summed error meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let first = kronrod15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    let mut total = first;
    heap.push(Segment { a, b, est: first });
    let mut splits = 0;
    while total.error > opts.abs_tol.max(opts.rel_tol * total.value.abs()) {
        if splits >= opts.max_subdivisions {
            return Err(Error::QuadratureDiverged { estimate: total.value, error: total.error });
        }
        let seg = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            return Err(Error::QuadratureDiverged { estimate: total.value, error: total.error });
        }
        let left = kronrod15(&mut f, seg.a, mid)?;
        let right = kronrod15(&mut f, mid, seg.b)?;
        heap.push(Segment { a: seg.a, b: mid, est: left });
        heap.push(Segment { a: mid, b: seg.b, est: right });
        splits += 1;
        // Re-summing avoids drift from repeated subtraction.
        total = heap.iter().fold(QuadResult { value: 0.0, error: 0.0 }, |acc, s| QuadResult {
            value: acc.value + s.est.value,
            error: acc.error + s.est.error,
        });
    }
    Ok(total)
}

/// Iterated adaptive quadrature over the rectangle `[x0, x1] × [y0, y1]`.
pub fn integrate_2d<F>(
    f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    opts: QuadOptions,
) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let width = (x1 - x0).abs().max(f64::MIN_POSITIVE);
    let inner_opts = QuadOptions {
        abs_tol: 0.1 * opts.abs_tol / width,
        rel_tol: 0.1 * opts.rel_tol,
        max_subdivisions: opts.max_subdivisions,
    };
    integrate(|x| Ok(integrate(|y| f(x, y), y0, y1, inner_opts)?.value), x0, x1, opts)
}

/// Eigenvalues `(sin²θ cos²φ, sin²θ sin²φ, cos²θ)` and the Jacobian
/// `dλ₁ dλ₂ = 4 sin³θ cosθ sinφ cosφ dθ dφ`.
pub fn sphere_to_simplex3(theta: f64, phi: f64) -> ([f64; 3], f64) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let lambda = [st * st * cp * cp, st * st * sp * sp, ct * ct];
    let jac = 4.0 * st * st * st * ct * sp * cp;
    (lambda, jac)
}

/// Inverse of [`sphere_to_simplex3`] for a simplex point.
pub fn simplex3_to_sphere(lambda: &[f64]) -> (f64, f64) {
    let theta = lambda[2].max(0.0).sqrt().clamp(0.0, 1.0).acos();
    let phi = lambda[1].max(0.0).sqrt().atan2(lambda[0].max(0.0).sqrt());
    (theta, phi)
}

/// `∫_Δ f(λ) dλ` over the eigenvalue simplex for `N ∈ {2, 3}`, to absolute
/// accuracy `tolerance`.
pub fn simplex_quadrature<F>(f: F, dim: usize, tolerance: f64) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> f64,
{
    let opts = QuadOptions { abs_tol: tolerance, rel_tol: 0.0, max_subdivisions: 4000 };
    match dim {
        2 => integrate(
            |theta| {
                let (s, c) = theta.sin_cos();
                let lambda = [s * s, c * c];
                let v = f(&lambda);
                if !v.is_finite() {
                    return Err(Error::NonFinite(lambda.to_vec()));
                }
                Ok(v * (2.0 * theta).sin())
            },
            0.0,
            FRAC_PI_2,
            opts,
        ),
        3 => integrate_2d(
            |theta, phi| {
                let (lambda, jac) = sphere_to_simplex3(theta, phi);
                if jac == 0.0 {
                    return Ok(0.0);
                }
                let v = f(&lambda);
                if !v.is_finite() {
                    return Err(Error::NonFinite(lambda.to_vec()));
                }
                Ok(v * jac)
            },
            (0.0, FRAC_PI_2),
            (0.0, FRAC_PI_2),
            opts,
        ),
        n => Err(Error::UnsupportedDimension(n, "simplex quadrature")),
    }
}
