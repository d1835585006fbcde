use rand::Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::sample_bures;
use crate::error::{Error, Result};
use crate::qstate::{spectrum, DensityMatrix};
use crate::rng::RngStream;

/// Random simplex probes used by the envelope audit.
pub const AUDIT_PROBES: usize = 100_000;
/// Relative slack allowed above the closed-form supremum.
pub const AUDIT_REL_TOL: f64 = 1e-9;

const AUDIT_SEED: u64 = 0x5eed_a0d1;
const POLISH_STARTS: usize = 16;
const POLISH_STEPS: usize = 2000;

/// Proposal and acceptance bookkeeping of the rejection sampler.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionReport {
    pub proposed: u64,
    pub accepted: u64,
    /// The bound constant `c` of the normalized acceptance test, for reference.
    pub bound_constant: f64,
    /// Supremum `M` of the unnormalized density ratio used by the sampler.
    pub envelope_sup: f64,
    pub empirical_rate: f64,
}

impl RejectionReport {
    fn new(bound_constant: f64, envelope_sup: f64) -> Self {
        Self { proposed: 0, accepted: 0, bound_constant, envelope_sup, empirical_rate: 0.0 }
    }

    fn refresh(&mut self) {
        self.empirical_rate =
            if self.proposed == 0 { 0.0 } else { self.accepted as f64 / self.proposed as f64 };
    }

    /// Adds the counts of `other`.
    pub fn merge(&mut self, other: &RejectionReport) {
        self.proposed += other.proposed;
        self.accepted += other.accepted;
        self.refresh();
    }
}

/// Natural log of the ratio of the unnormalized superfidelity and Bures
/// densities, `√(λ₁⋯λ_N)·∏_{i<j}(λᵢ+λⱼ) / √(1 − Σλᵢ²)`.
pub fn log_density_ratio_g_bures(eigs: &[f64]) -> Result<f64> {
    if eigs.len() < 2 {
        return Err(Error::InvalidDimension(eigs.len()));
    }
    if let Some(v) = eigs.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidEigenvalues(format!("negative value {v}")));
    }
    let mut v = eigs.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    // 1 − Σλ² = 2Σ_{i<j} λᵢλⱼ, accurate near pure states.
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            s += 2.0 * v[i] * v[j];
        }
    }
    if s <= 0.0 {
        return Err(Error::Singular("pure state".into()));
    }
    let mut l = 0.5 * v.iter().map(|x| x.ln()).sum::<f64>() - 0.5 * s.ln();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            l += (v[i] + v[j]).ln();
        }
    }
    Ok(l)
}

/// See [`log_density_ratio_g_bures`].
pub fn density_ratio_g_bures(eigs: &[f64]) -> Result<f64> {
    Ok(log_density_ratio_g_bures(eigs)?.exp())
}

fn ln_sup_ratio(dim: usize) -> f64 {
    let n = dim as f64;
    -0.5 * n * n.ln() + 0.5 * n * (n - 1.0) * (2.0 / n).ln() - 0.5 * (1.0 - 1.0 / n).ln()
}

/// The density ratio at the maximally mixed state,
/// `N^{−N/2}(2/N)^{N(N−1)/2} / √(1 − 1/N)`, taken as its supremum over the
/// simplex. [`audit_envelope`] checks this numerically.
pub fn sup_density_ratio_unnormalized(dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(ln_sup_ratio(dim).exp())
}

/// `c = √((N²−N)/(N²+1))·Γ(N²)·π^{N/2} / (∏Γ(i)·2^{N(N−1)/2}·Γ(N²/2)·N^{N²/2})`,
/// the constant of the acceptance test `u ≤ f_G/(c f_B)` written with the
/// Jensen bound on `C_N^G`. Evaluated in log space.
pub fn rejection_constant_c(dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let n = dim as f64;
    let q = n * n;
    let mut l = 0.5 * ((q - n) / (q + 1.0)).ln() + ln_gamma(q) + 0.5 * n * std::f64::consts::PI.ln()
        - 0.5 * n * (n - 1.0) * 2f64.ln()
        - ln_gamma(q / 2.0)
        - 0.5 * q * n.ln();
    for i in 1..=dim {
        l -= ln_gamma(i as f64);
    }
    Ok(l.exp())
}

/// Outcome of the randomized search for ratios above the closed-form supremum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeAudit {
    pub dim: usize,
    pub probes: usize,
    pub bound: f64,
    pub max_ratio: f64,
    pub argmax: Vec<f64>,
}

fn dirichlet_one<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn probe<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let x = dirichlet_one(dim, rng);
    if rng.random::<bool>() {
        return x;
    }
    // Pull towards the centre on a log-uniform scale in [1e-4, 1].
    let s = 10f64.powf(-4.0 * rng.random::<f64>());
    let c = 1.0 / dim as f64;
    x.into_iter().map(|v| (1.0 - s) * c + s * v).collect()
}

fn ln_ratio_or_neg_inf(l: &[f64]) -> f64 {
    log_density_ratio_g_bures(l).unwrap_or(f64::NEG_INFINITY)
}

/// Random simplex search plus local hill-climbing for ratios exceeding
/// [`sup_density_ratio_unnormalized`]. Fails with
/// [`Error::EnvelopeAudit`] if any point exceeds the bound by more than
/// [`AUDIT_REL_TOL`].
pub fn audit_envelope<R: Rng + ?Sized>(dim: usize, probes: usize, rng: &mut R) -> Result<EnvelopeAudit> {
    let bound = sup_density_ratio_unnormalized(dim)?;
    let ln_bound = bound.ln();
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(POLISH_STARTS + 1);
    for _ in 0..probes {
        let p = probe(dim, rng);
        let l = ln_ratio_or_neg_inf(&p);
        if best.len() < POLISH_STARTS || l > best[best.len() - 1].0 {
            best.push((l, p));
            best.sort_by(|a, b| b.0.total_cmp(&a.0));
            best.truncate(POLISH_STARTS);
        }
    }
    for (l, p) in best.iter_mut() {
        let mut step = 0.05;
        let mut fails = 0;
        for _ in 0..POLISH_STEPS {
            let mut d: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
            let mean = d.iter().sum::<f64>() / dim as f64;
            d.iter_mut().for_each(|x| *x -= mean);
            let mut q: Vec<f64> = p.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let total: f64 = q.iter().sum();
            q.iter_mut().for_each(|v| *v /= total);
            let lq = if q.iter().all(|v| *v > 0.0) { ln_ratio_or_neg_inf(&q) } else { f64::NEG_INFINITY };
            if lq > *l {
                *l = lq;
                *p = q;
                fails = 0;
            } else {
                fails += 1;
                if fails >= 20 {
                    step *= 0.5;
                    fails = 0;
                }
            }
            if step < 1e-12 {
                break;
            }
        }
    }
    best.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (ln_max, argmax) = best.into_iter().next().unwrap_or((f64::NEG_INFINITY, vec![]));
    let max_ratio = ln_max.exp();
    if ln_max - ln_bound > AUDIT_REL_TOL.ln_1p() {
        return Err(Error::EnvelopeAudit { observed: max_ratio, bound });
    }
    Ok(EnvelopeAudit { dim, probes, bound, max_ratio, argmax })
}

/// Default proposal budget per accepted sample; `None` where the sampler is
/// too inefficient for a default and the caller must choose.
pub fn default_budget(dim: usize) -> Option<u64> {
    (dim <= 4).then_some(10_000)
}

/// Superfidelity-measure sampler by rejection from Bures proposals, using the
/// unnormalized density ratio and its audited supremum as the envelope.
#[derive(Debug, Clone)]
pub struct GRejectionSampler {
    dim: usize,
    ln_sup: f64,
    audit: EnvelopeAudit,
    bound_constant: f64,
}

impl GRejectionSampler {
    /// Builds the sampler after auditing the envelope with a fixed internal
    /// seed and [`AUDIT_PROBES`] probes.
    pub fn new(dim: usize) -> Result<Self> {
        let mut rng = RngStream::new(AUDIT_SEED, dim as u64);
        Self::with_audit(dim, AUDIT_PROBES, &mut rng)
    }

    pub fn with_audit<R: Rng + ?Sized>(dim: usize, probes: usize, rng: &mut R) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidArgument(format!(
                "rejection sampling needs N >= 3 (got {dim}); use the exact qubit sampler"
            )));
        }
        let audit = audit_envelope(dim, probes, rng)?;
        Ok(Self { dim, ln_sup: audit.bound.ln(), audit, bound_constant: rejection_constant_c(dim)? })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn audit(&self) -> &EnvelopeAudit {
        &self.audit
    }

    pub fn empty_report(&self) -> RejectionReport {
        RejectionReport::new(self.bound_constant, self.audit.bound)
    }

    /// Draws Bures proposals until one is accepted or `max_proposals` are used.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_proposals: u64,
    ) -> Result<(DensityMatrix, RejectionReport)> {
        if max_proposals == 0 {
            return Err(Error::InvalidArgument("max_proposals must be at least 1".into()));
        }
        let mut report = self.empty_report();
        while report.proposed < max_proposals {
            let rho = sample_bures(self.dim, rng)?;
            let eigs = spectrum(&rho)?;
            let ln_r = ln_ratio_or_neg_inf(eigs.as_slice());
            let u: f64 = rng.random();
            report.proposed += 1;
            // u ≤ r/M, compared in log space.
            if u > 0.0 && u.ln() <= ln_r - self.ln_sup {
                report.accepted += 1;
                report.refresh();
                return Ok((rho, report));
            }
        }
        report.refresh();
        Err(Error::BudgetExhausted(report))
    }
}
