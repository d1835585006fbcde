use rayon::prelude::*;

use super::{default_budget, sample_bures, sample_g_qubit, sample_hs, GRejectionSampler, RejectionReport};
use crate::eigendensities::MeasureKind;
use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;
use crate::rng::RngStream;

/// States of a batch in sample-index order, with the merged rejection report
/// when the rejection sampler was used.
#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub states: Vec<DensityMatrix>,
    pub report: Option<RejectionReport>,
}

fn shard_sizes(count: usize, workers: usize) -> Vec<usize> {
    (0..workers).map(|w| count / workers + usize::from(w < count % workers)).collect()
}

/// Draws `count` states split into `workers` contiguous shards; shard `w`
/// uses stream `(seed, w)`. Output depends only on the arguments.
///
/// For the superfidelity measure, `N = 2` uses the exact qubit sampler and
/// `N ≥ 3` the rejection sampler with `max_proposals` per accepted state
/// (defaulting to [`default_budget`]).
pub fn sample_batch(
    measure: MeasureKind,
    dim: usize,
    count: usize,
    seed: u64,
    workers: usize,
    max_proposals: Option<u64>,
) -> Result<BatchOutput> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if count == 0 || workers == 0 {
        return Err(Error::InvalidArgument("count and workers must be at least 1".into()));
    }
    let rejection = if measure == MeasureKind::SuperfidelityG && dim >= 3 {
        let budget = max_proposals.or(default_budget(dim)).ok_or_else(|| {
            Error::InvalidArgument(format!("N = {dim} needs an explicit proposal budget"))
        })?;
        Some((GRejectionSampler::new(dim)?, budget))
    } else {
        None
    };
    let shards: Vec<Result<(Vec<DensityMatrix>, Option<RejectionReport>)>> = shard_sizes(count, workers)
        .into_par_iter()
        .enumerate()
        .map(|(w, n)| {
            let mut rng = RngStream::new(seed, w as u64);
            let mut states = Vec::with_capacity(n);
            let mut report = rejection.as_ref().map(|(s, _)| s.empty_report());
            for _ in 0..n {
                let rho = match (&rejection, measure) {
                    (Some((sampler, budget)), _) => {
                        let (rho, r) = sampler.sample(&mut rng, *budget)?;
                        if let Some(total) = report.as_mut() {
                            total.merge(&r);
                        }
                        rho
                    }
                    (None, MeasureKind::HilbertSchmidt) => sample_hs(dim, &mut rng)?,
                    (None, MeasureKind::Bures) => sample_bures(dim, &mut rng)?,
                    (None, MeasureKind::SuperfidelityG) => sample_g_qubit(&mut rng)?,
                };
                states.push(rho);
            }
            Ok((states, report))
        })
        .collect();
    let mut states = Vec::with_capacity(count);
    let mut report: Option<RejectionReport> = None;
    for shard in shards {
        let (s, r) = shard?;
        states.extend(s);
        match (report.as_mut(), r) {
            (Some(total), Some(r)) => total.merge(&r),
            (None, r) => report = r,
            _ => {}
        }
    }
    Ok(BatchOutput { states, report })
}
