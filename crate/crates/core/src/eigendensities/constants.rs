use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::{density_bures_unnormalized, density_g_unnormalized, MeasureKind};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::hs_purity;
use crate::statlab::{simplex_quadrature, RunningMean};

/// Smallest sample count accepted by the Monte-Carlo estimators.
pub const MC_MIN_SAMPLES: u64 = 1000;

/// Purities at or above `1 − PURE_CUTOFF` are discarded by the estimators
/// that evaluate `1/√(1 − tr ρ²)`.
const PURE_CUTOFF: f64 = 1e-14;

/// Discard fraction above which the Monte-Carlo estimate is flagged unstable.
const DISCARD_WARN_FRACTION: f64 = 1e-4;

/// Samples drawn per forked RNG stream. Fixed so that results do not depend
/// on the thread count.
const MC_CHUNK: u64 = 8192;

const QUAD_TOL_2: f64 = 1e-12;
const QUAD_TOL_3: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    Exact,
    JensenUpperBound,
    Series,
    MonteCarlo,
    Quadrature,
}

impl EstimateMethod {
    pub fn is_upper_bound(self) -> bool {
        self == EstimateMethod::JensenUpperBound
    }
}

/// A normalization constant `C_N` (reciprocal of the simplex integral of an
/// unnormalized density), or a bound on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationEstimate {
    pub measure: MeasureKind,
    pub dim: usize,
    pub value: f64,
    pub method: EstimateMethod,
    pub std_error: Option<f64>,
    pub terms_or_samples: u64,
}

impl NormalizationEstimate {
    fn new(measure: MeasureKind, dim: usize, value: f64, method: EstimateMethod, n: u64) -> Self {
        Self { measure, dim, value, method, std_error: None, terms_or_samples: n }
    }

    /// `"upper_bound"` for bounds, `"value"` otherwise.
    pub fn kind(&self) -> &'static str {
        if self.method.is_upper_bound() {
            "upper_bound"
        } else {
            "value"
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

fn ln_c_hs(dim: usize) -> f64 {
    let n = dim as f64;
    let mut s = ln_gamma(n * n);
    for k in 1..=dim {
        s -= ln_gamma(k as f64) + ln_gamma(k as f64 + 1.0);
    }
    s
}

/// `C_N^HS = Γ(N²) / ∏_{k=1}^N Γ(k)Γ(k+1)`.
pub fn c_hs(dim: usize) -> Result<NormalizationEstimate> {
    check_dim(dim)?;
    let mut value = ln_c_hs(dim).exp();
    // Integer-valued; remove the rounding that log-gamma introduces.
    if value < 1e15 {
        value = value.round();
    }
    Ok(NormalizationEstimate::new(MeasureKind::HilbertSchmidt, dim, value, EstimateMethod::Exact, 0))
}

/// Closed forms `C₂ᴳ = (2√2/3π)·C₂ᴴˢ` and `C₃ᴳ = (432√2/317π)·C₃ᴴˢ`.
pub fn c_g_exact(dim: usize) -> Result<NormalizationEstimate> {
    let factor = match dim {
        2 => 2.0 * 2f64.sqrt() / (3.0 * PI),
        3 => 432.0 * 2f64.sqrt() / (317.0 * PI),
        n => return Err(Error::UnsupportedDimension(n, "closed-form C_G (use jensen, series, mc)")),
    };
    let value = factor * c_hs(dim)?.value;
    Ok(NormalizationEstimate::new(MeasureKind::SuperfidelityG, dim, value, EstimateMethod::Exact, 0))
}

/// Upper bound `C_N^G ≤ C_N^HS·√(1 − 2N/(N²+1))` from Jensen's inequality
/// applied to `E_HS[1/√(1 − tr ρ²)]`.
pub fn c_g_jensen_bound(dim: usize) -> Result<NormalizationEstimate> {
    let hs = c_hs(dim)?.value;
    let value = hs * (1.0 - purity_mean_hs(dim)?).sqrt();
    Ok(NormalizationEstimate::new(
        MeasureKind::SuperfidelityG,
        dim,
        value,
        EstimateMethod::JensenUpperBound,
        0,
    ))
}

fn quadrature_constant(
    measure: MeasureKind,
    dim: usize,
    density: fn(&[f64]) -> Result<f64>,
) -> Result<NormalizationEstimate> {
    let tol = match dim {
        2 => QUAD_TOL_2,
        3 => QUAD_TOL_3,
        n => return Err(Error::UnsupportedDimension(n, "simplex quadrature")),
    };
    // Boundary points where the density is singular carry zero weight after
    // the sphere substitution, so they are mapped to 0.
    let r = simplex_quadrature(|l| density(l).unwrap_or(0.0), dim, tol)?;
    Ok(NormalizationEstimate::new(measure, dim, 1.0 / r.value, EstimateMethod::Quadrature, 0))
}

/// `C_N^G` as the reciprocal of the adaptive simplex integral, `N ∈ {2, 3}`.
pub fn c_g_quadrature(dim: usize) -> Result<NormalizationEstimate> {
    quadrature_constant(MeasureKind::SuperfidelityG, dim, density_g_unnormalized)
}

/// `C_N^B` (Bures) as the reciprocal of the adaptive simplex integral, `N ∈ {2, 3}`.
pub fn c_bures_quadrature(dim: usize) -> Result<NormalizationEstimate> {
    quadrature_constant(MeasureKind::Bures, dim, density_bures_unnormalized)
}

/// A Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McMean {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub discarded: u64,
}

/// Runs `samples` HS purity draws in fixed-size chunks, each on its own
/// forked stream, and merges per-chunk accumulators in chunk order.
fn hs_purity_chunks<T, F>(dim: usize, samples: u64, rng: &RngStream, init: T, f: F) -> Result<Vec<T>>
where
    T: Clone + Send + Sync,
    F: Fn(&mut T, f64) + Sync,
{
    check_dim(dim)?;
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut stream = rng.fork(c);
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = init.clone();
            for _ in 0..n {
                f(&mut acc, hs_purity(dim, &mut stream)?);
            }
            Ok(acc)
        })
        .collect()
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    Ok(())
}

/// `E_HS[1/√(1 − tr ρ²)]`; near-pure draws are discarded and counted.
pub fn inverse_mixedness_mean_hs(dim: usize, samples: u64, rng: &RngStream) -> Result<McMean> {
    check_samples(samples)?;
    let parts = hs_purity_chunks(dim, samples, rng, (RunningMean::new(), 0u64), |acc, p| {
        if p >= 1.0 - PURE_CUTOFF {
            acc.1 += 1;
        } else {
            acc.0.push(1.0 / (1.0 - p).sqrt());
        }
    })?;
    let mut total = RunningMean::new();
    let mut discarded = 0;
    for (m, d) in &parts {
        total.merge(m);
        discarded += d;
    }
    if discarded as f64 > DISCARD_WARN_FRACTION * samples as f64 {
        log::warn!(
            "unstable estimate: {discarded} of {samples} HS draws (N = {dim}) were numerically pure"
        );
    }
    if total.count() < 2 {
        return Err(Error::InvalidArgument("every draw was discarded".into()));
    }
    Ok(McMean { mean: total.mean(), std_error: total.std_error(), samples: total.count(), discarded })
}

/// `C_N^G = C_N^HS / E_HS[1/√(1 − tr ρ²)]`, with the standard error carried
/// through the reciprocal by the delta method.
pub fn c_g_monte_carlo(dim: usize, samples: u64, rng: &RngStream) -> Result<NormalizationEstimate> {
    let e = inverse_mixedness_mean_hs(dim, samples, rng)?;
    let hs = c_hs(dim)?.value;
    let mut est = NormalizationEstimate::new(
        MeasureKind::SuperfidelityG,
        dim,
        hs / e.mean,
        EstimateMethod::MonteCarlo,
        e.samples,
    );
    est.std_error = Some(hs * e.std_error / (e.mean * e.mean));
    Ok(est)
}

/// `E_HS[tr ρ²] = 2N/(N²+1)`.
pub fn purity_mean_hs(dim: usize) -> Result<f64> {
    check_dim(dim)?;
    let n = dim as f64;
    Ok(2.0 * n / (n * n + 1.0))
}

/// `Var_HS[tr ρ²] = 2(N²−1)² / ((N²+1)²(N²+2)(N²+3))`.
pub fn purity_variance_hs(dim: usize) -> Result<f64> {
    check_dim(dim)?;
    let q = (dim * dim) as f64;
    Ok(2.0 * (q - 1.0).powi(2) / ((q + 1.0).powi(2) * (q + 2.0) * (q + 3.0)))
}

/// Monte-Carlo `E_HS[(tr ρ²)^k]`.
pub fn purity_moment_hs(dim: usize, k: u32, rng: &RngStream, samples: u64) -> Result<McMean> {
    if k == 0 {
        return Err(Error::InvalidArgument("moment order must be at least 1".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let parts = hs_purity_chunks(dim, samples, rng, RunningMean::new(), |acc, p| acc.push(p.powi(k as i32)))?;
    let mut total = RunningMean::new();
    parts.iter().for_each(|m| total.merge(m));
    Ok(McMean { mean: total.mean(), std_error: total.std_error(), samples, discarded: 0 })
}

/// `Υ_N = π^{N(N−1)/2} / ∏_{d=1}^{N−1} d!`, the volume of the flag manifold
/// `U(N)/U(1)^N` in the normalization used by the eigen-decomposition.
pub fn projective_unitary_volume(dim: usize) -> Result<f64> {
    check_dim(dim)?;
    let n = dim as f64;
    let mut ln = 0.5 * n * (n - 1.0) * PI.ln();
    for d in 1..dim {
        ln -= ln_gamma(d as f64 + 1.0);
    }
    Ok(ln.exp())
}

/// `(2k−1)!!/(k!·2^k)`, the coefficient of `x^k` in `(1 − x)^{−1/2}`.
pub fn series_coefficient(k: usize) -> f64 {
    (1..=k).fold(1.0, |c, j| c * (2 * j - 1) as f64 / (2 * j) as f64)
}

/// Hurwitz zeta `ζ(s, q) = Σ_{n≥0} (n + q)^{−s}` for `s > 1`, `q > 0`, by
/// direct summation followed by Euler–Maclaurin.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if !(s > 1.0) || !(q > 0.0) {
        return Err(Error::Domain { value: s, domain: "s > 1, q > 0" });
    }
    const DIRECT: usize = 16;
    let mut sum: f64 = (0..DIRECT).map(|n| (n as f64 + q).powf(-s)).sum();
    let x = q + DIRECT as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // B₂ⱼ/(2j)! for j = 1..4.
    const B: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1_209_600.0];
    let mut rising = s;
    let mut xp = x.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * xp;
        let a = s + (2 * j + 1) as f64;
        rising *= a * (a + 1.0);
        xp /= x * x;
    }
    Ok(sum)
}

/// Where the purity moments in the series come from.
#[derive(Debug, Clone, Copy)]
pub enum MomentSource<'a> {
    /// Mean and variance formulas; valid only up to `k = 2`.
    ClosedForm,
    MonteCarlo { samples: u64, rng: &'a RngStream },
}

/// Treatment of the series remainder beyond `k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesTail {
    /// Plain partial sum.
    None,
    /// Terms behave like `A·k^{−α}(1 + B/k)` with `α = (N−1)² + 1/2`, which
    /// follows from the HS density of `1 − tr ρ²` near zero. `A` and `B` are
    /// fitted to the last two terms and the remainder is summed in closed
    /// form with Hurwitz zeta functions.
    PowerLaw,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesEstimate {
    pub estimate: NormalizationEstimate,
    /// Partial sums of `1/C_N^G`, for `k_max = 0, 1, …`.
    pub partial_sums: Vec<f64>,
    /// Magnitude of the `k_max` term of `1/C_N^G`.
    pub last_term: f64,
    /// Remainder added by the tail model (0 for [`SeriesTail::None`]).
    pub tail: f64,
}

fn series_moments(dim: usize, k_max: usize, source: MomentSource<'_>) -> Result<Vec<f64>> {
    match source {
        MomentSource::ClosedForm => {
            if k_max > 2 {
                return Err(Error::UnvalidatedClosedForm { dim, k: 3 });
            }
            let m = purity_mean_hs(dim)?;
            let v = purity_variance_hs(dim)?;
            Ok([1.0, m, m * m + v][..=k_max].to_vec())
        }
        MomentSource::MonteCarlo { samples, rng } => {
            check_samples(samples)?;
            let parts = hs_purity_chunks(dim, samples, rng, vec![0.0; k_max + 1], |acc, p| {
                let mut pk = 1.0;
                for a in acc.iter_mut() {
                    *a += pk;
                    pk *= p;
                }
            })?;
            let mut sums = vec![0.0; k_max + 1];
            for part in &parts {
                sums.iter_mut().zip(part).for_each(|(s, p)| *s += p);
            }
            Ok(sums.into_iter().map(|s| s / samples as f64).collect())
        }
    }
}

/// `1/C_N^G = (1/C_N^HS)·Σ_k (2k−1)!!/(k!2^k)·E_HS[(tr ρ²)^k]`, truncated at
/// `k_max` and optionally tail-corrected.
pub fn c_g_series(
    dim: usize,
    k_max: usize,
    source: MomentSource<'_>,
    tail: SeriesTail,
) -> Result<SeriesEstimate> {
    check_dim(dim)?;
    if k_max < 1 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let hs = c_hs(dim)?.value;
    let moments = series_moments(dim, k_max, source)?;
    let terms: Vec<f64> = moments.iter().enumerate().map(|(k, m)| series_coefficient(k) * m / hs).collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let last_term = terms[k_max];
    let remainder = match tail {
        SeriesTail::None => 0.0,
        SeriesTail::PowerLaw if k_max < 2 => 0.0,
        SeriesTail::PowerLaw => {
            let alpha = ((dim - 1) * (dim - 1)) as f64 + 0.5;
            let (k1, k2) = ((k_max - 1) as f64, k_max as f64);
            // Solve t_k·k^α = A + A·B/k at k1, k2.
            let (y1, y2) = (terms[k_max - 1] * k1.powf(alpha), terms[k_max] * k2.powf(alpha));
            let ab = (y1 - y2) / (1.0 / k1 - 1.0 / k2);
            let a = y2 - ab / k2;
            let q = k2 + 1.0;
            (a * hurwitz_zeta(alpha, q)? + ab * hurwitz_zeta(alpha + 1.0, q)?).max(0.0)
        }
    };
    let total = partial_sums[k_max] + remainder;
    Ok(SeriesEstimate {
        estimate: NormalizationEstimate::new(
            MeasureKind::SuperfidelityG,
            dim,
            1.0 / total,
            EstimateMethod::Series,
            k_max as u64,
        ),
        partial_sums,
        last_term,
        tail: remainder,
    })
}
