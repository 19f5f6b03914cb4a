//! Monte Carlo tomography experiments: sample click data from a true
//! state and estimate the empirical risk, as an independent check on the
//! exact enumeration engine.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{CountVector, PointEstimator};
use crate::pom::SymmetricPOM;
use crate::risk::pairwise_sum;
use crate::rng::CounterRng;
use crate::state::{squared_error, ProbVector};

/// Reproducible experiment settings.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: usize,
    pub n: u64,
}

impl SimConfig {
    pub fn new(seed: u64, trials: usize, n: u64) -> Result<Self> {
        if trials < 1 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if n < 1 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        Ok(SimConfig { seed, trials, n })
    }
}

/// One multinomial draw of N clicks; deterministic in `(true_p, n, seed)`.
pub fn sample_counts(true_p: &ProbVector, n: u64, seed: u64) -> CountVector {
    sample_counts_stream(true_p, n, seed, 0)
}

fn sample_counts_stream(true_p: &ProbVector, n: u64, seed: u64, stream: u64) -> CountVector {
    assert!(n >= 1, "sample_counts needs N >= 1");
    let mut rng = CounterRng::stream(seed, stream);
    let mut counts = vec![0u64; true_p.len()];
    for _ in 0..n {
        counts[rng.next_category(true_p.as_slice())] += 1;
    }
    CountVector::new(counts).expect("N >= 1 clicks recorded")
}

/// Empirical risk estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EmpiricalRisk {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

/// Mean squared error over independent simulated experiments.
///
/// Trial `t` draws its data from the `(seed, t)` stream, so runs are
/// bitwise reproducible at any thread count.  Each distinct count vector
/// is estimated once and reused across the trials that produced it.
pub fn empirical_risk(
    estimator: &dyn PointEstimator,
    true_p: &ProbVector,
    pom: &SymmetricPOM,
    config: &SimConfig,
) -> Result<EmpiricalRisk> {
    if true_p.len() != pom.num_outcomes() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities vs {} outcomes",
            true_p.len(),
            pom.num_outcomes()
        )));
    }
    let trials = config.trials;
    let all_counts: Vec<CountVector> = (0..trials as u64)
        .map(|t| sample_counts_stream(true_p, config.n, config.seed, t))
        .collect();

    let mut distinct: BTreeMap<&[u64], f64> = BTreeMap::new();
    for cv in &all_counts {
        distinct.entry(cv.counts()).or_insert(0.0);
    }
    let keys: Vec<&[u64]> = distinct.keys().copied().collect();
    let errors: Vec<f64> = keys
        .par_iter()
        .map(|&key| {
            let cv = CountVector::new(key.to_vec())?;
            let p_hat = estimator.estimate(&cv)?;
            Ok(squared_error(&p_hat, true_p, pom))
        })
        .collect::<Result<_>>()?;
    for (key, err) in keys.into_iter().zip(errors) {
        *distinct.get_mut(key).unwrap() = err;
    }

    let per_trial: Vec<f64> = all_counts.iter().map(|cv| distinct[cv.counts()]).collect();
    let mean = pairwise_sum(&per_trial) / trials as f64;
    let std_err = if trials > 1 {
        let centered: Vec<f64> = per_trial.iter().map(|e| (e - mean) * (e - mean)).collect();
        (pairwise_sum(&centered) / (trials as f64 * (trials as f64 - 1.0))).sqrt()
    } else {
        0.0
    };
    Ok(EmpiricalRisk {
        mean,
        std_err,
        trials,
    })
}
