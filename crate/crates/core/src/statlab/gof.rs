//! Kolmogorov–Smirnov and Pearson χ² goodness-of-fit tests with asymptotic
//! p-values.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::quadrature::{integrate, integrate_2d, QuadOptions};
use crate::error::{Error, Result};

/// Smallest sample the KS routines accept.
pub const KS_MIN_SAMPLES: usize = 50;
/// Minimum expected count per χ² bin; sparser bins are merged with neighbours.
pub const CHI2_MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Sample size for KS, number of bins after merging for χ².
    pub bins_or_n: usize,
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        let y = (-PI * PI / (8.0 * lambda * lambda)).exp();
        let s = y + y.powi(9) + y.powi(25) + y.powi(49);
        1.0 - (2.0 * PI).sqrt() / lambda * s
    } else {
        let x = (-2.0 * lambda * lambda).exp();
        2.0 * (x - x.powi(4) + x.powi(9) - x.powi(16))
    };
    p.clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let root = n_eff.sqrt();
    kolmogorov_sf((root + 0.12 + 0.11 / root) * d)
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// One-sample KS test of `samples` against a continuous `cdf`.
pub fn ks_test<F>(samples: &[f64], cdf: F) -> Result<GofResult>
where
    F: Fn(f64) -> f64,
{
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "KS test needs at least {KS_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let xs = sorted_finite(samples)?;
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let mut prev = cdf(lo);
    for k in 1..=1000 {
        let x = lo + (hi - lo) * k as f64 / 1000.0;
        let v = cdf(x);
        if !v.is_finite() || v < prev - 1e-12 {
            return Err(Error::InvalidArgument(format!("cdf is not monotone near {x}")));
        }
        prev = v;
    }
    let n = xs.len() as f64;
    let d = xs.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        acc.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    });
    Ok(GofResult { statistic: d, p_value: ks_p_value(d, n), bins_or_n: xs.len() })
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<GofResult> {
    if a.len() < KS_MIN_SAMPLES || b.len() < KS_MIN_SAMPLES {
        return Err(Error::InvalidArgument("KS test needs at least 50 samples per side".into()));
    }
    let xs = sorted_finite(a)?;
    let ys = sorted_finite(b)?;
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let n_eff = n * m / (n + m);
    Ok(GofResult { statistic: d, p_value: ks_p_value(d, n_eff), bins_or_n: xs.len() + ys.len() })
}

/// Pearson χ² from observed counts and expected cell probabilities (summing
/// to one). Adjacent cells are merged, in order, until each merged cell
/// expects at least [`CHI2_MIN_EXPECTED`] counts.
pub fn chi_square_from_counts(observed: &[u64], probs: &[f64]) -> Result<GofResult> {
    if observed.len() != probs.len() {
        return Err(Error::DimensionMismatch(observed.len(), probs.len()));
    }
    if observed.len() < 2 {
        return Err(Error::InvalidArgument("chi-square test needs at least two bins".into()));
    }
    let n: u64 = observed.iter().sum();
    let n = n as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        obs_acc += o as f64;
        exp_acc += p * n;
        if exp_acc >= CHI2_MIN_EXPECTED {
            cells.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    if exp_acc > 0.0 || obs_acc > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs_acc;
                last.1 += exp_acc;
            }
            None => cells.push((obs_acc, exp_acc)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::InvalidArgument("fewer than two bins after merging".into()));
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = (cells.len() - 1) as f64;
    let dist = ChiSquared::new(dof).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(GofResult { statistic: stat, p_value: dist.sf(stat).clamp(0.0, 1.0), bins_or_n: cells.len() })
}

/// χ² test of 1-D `samples` against `density` on `support = (a, b)` with
/// `bins` equal-width bins. The density is normalized by quadrature, so it
/// need not integrate to one.
pub fn chi_square_gof<F>(samples: &[f64], density: F, bins: usize, support: (f64, f64)) -> Result<GofResult>
where
    F: Fn(f64) -> f64,
{
    if bins < 2 {
        return Err(Error::InvalidArgument("chi-square test needs at least two bins".into()));
    }
    let (a, b) = support;
    if !(b > a) {
        return Err(Error::InvalidArgument(format!("empty support ({a}, {b})")));
    }
    let opts = QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_subdivisions: 2000 };
    let width = (b - a) / bins as f64;
    let mass: Vec<f64> = (0..bins)
        .map(|k| {
            let lo = a + k as f64 * width;
            integrate(|x| Ok(density(x)), lo, lo + width, opts).map(|r| r.value)
        })
        .collect::<Result<_>>()?;
    let total: f64 = mass.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::InvalidArgument(format!("density integral is {total}")));
    }
    let probs: Vec<f64> = mass.iter().map(|m| m / total).collect();
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if !(a..=b).contains(&x) {
            return Err(Error::InvalidArgument(format!("sample {x} outside support")));
        }
        let k = (((x - a) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    chi_square_from_counts(&counts, &probs)
}

/// Coordinates of an ordered qutrit spectrum `λ₁ ≥ λ₂ ≥ λ₃` on the unit
/// square: `s = 3λ₃`, `t = (λ₂ − λ₃) / ((1 − 3λ₃)/2)`.
pub fn ordered_simplex3_coords(lambda: &[f64]) -> (f64, f64) {
    let a = lambda[2];
    let span = 0.5 * (1.0 - 3.0 * a);
    let t = if span > 0.0 { ((lambda[1] - a) / span).clamp(0.0, 1.0) } else { 0.0 };
    ((3.0 * a).clamp(0.0, 1.0), t)
}

fn ordered_simplex3_point(s: f64, t: f64) -> ([f64; 3], f64) {
    let a = s / 3.0;
    let span = 0.5 * (1.0 - 3.0 * a);
    let l2 = a + t * span;
    // dλ₂ dλ₃ = span · (1/3) ds dt
    ([1.0 - a - l2, l2, a], span / 3.0)
}

/// χ² test of descending qutrit spectra against a symmetric eigenvalue
/// density, binned on a `bins × bins` grid over the ordered chamber
/// (see [`ordered_simplex3_coords`]). The density is normalized by
/// quadrature over the chamber.
pub fn chi_square_simplex3<F>(spectra: &[Vec<f64>], density: F, bins: usize) -> Result<GofResult>
where
    F: Fn(&[f64]) -> f64,
{
    if bins < 2 {
        return Err(Error::InvalidArgument("chi-square test needs at least two bins per axis".into()));
    }
    let opts = QuadOptions { abs_tol: 1e-11, rel_tol: 1e-9, max_subdivisions: 2000 };
    let h = 1.0 / bins as f64;
    let mut mass = Vec::with_capacity(bins * bins);
    for i in 0..bins {
        for j in 0..bins {
            let r = integrate_2d(
                |s, t| {
                    let (lambda, jac) = ordered_simplex3_point(s, t);
                    let v = density(&lambda);
                    if v.is_finite() {
                        Ok(v * jac)
                    } else {
                        Err(Error::NonFinite(lambda.to_vec()))
                    }
                },
                (i as f64 * h, (i + 1) as f64 * h),
                (j as f64 * h, (j + 1) as f64 * h),
                opts,
            )?;
            mass.push(r.value);
        }
    }
    let total: f64 = mass.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::InvalidArgument(format!("density integral is {total}")));
    }
    let probs: Vec<f64> = mass.iter().map(|m| m / total).collect();
    let mut counts = vec![0u64; bins * bins];
    for lam in spectra {
        if lam.len() != 3 {
            return Err(Error::DimensionMismatch(3, lam.len()));
        }
        let (s, t) = ordered_simplex3_coords(lam);
        let i = ((s / h) as usize).min(bins - 1);
        let j = ((t / h) as usize).min(bins - 1);
        counts[i * bins + j] += 1;
    }
    chi_square_from_counts(&counts, &probs)
}
