//! Point estimators: maps from click counts to outcome probabilities.
//!
//! The classical family covers maximum likelihood (`nu_k`), add-beta, and
//! the constant-risk minimax estimator `a_N/K + nu_k b_N`.  The quantum
//! family corrects the classical minimax seed for physicality by admixing
//! the maximally mixed state, optionally keeping a slack `epsilon` so the
//! output stays full-rank, and includes the purity-constrained maximum
//! likelihood estimator for the qubit tetrahedron.

use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add3, dot3, norm3, scale3};
use crate::pom::{tetrahedron_directions, SymmetricPOM};
use crate::rng::CounterRng;
use crate::state::{reconstruct_unchecked, ProbVector, PROB_TOL};

/// Samples per deterministic chunk of the Monte Carlo mean estimator.
pub const MEAN_MC_CHUNK: usize = 65536;

/// Click counts from N repetitions of a K-outcome measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    /// Requires at least one recorded click (`N >= 1`) and `K >= 2`.
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 detectors, got {}",
                counts.len()
            )));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyData);
        }
        Ok(CountVector { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total number of clicks N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Relative frequencies `nu_k = n_k / N`.
    pub fn freqs(&self) -> Vec<f64> {
        let n = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    pub fn freq_sum_sq(&self) -> f64 {
        let n = self.total as f64;
        self.counts
            .iter()
            .map(|&c| {
                let nu = c as f64 / n;
                nu * nu
            })
            .sum()
    }
}

impl TryFrom<Vec<u64>> for CountVector {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        CountVector::new(v)
    }
}

impl From<CountVector> for Vec<u64> {
    fn from(c: CountVector) -> Vec<u64> {
        c.counts
    }
}

/// The N-dependent weights of the classical minimax estimator:
/// `a_N = 1/(1 + sqrt(N))` on the uniform center and
/// `b_N = 1/(1 + 1/sqrt(N))` on the observed frequencies; `a_N + b_N = 1`.
#[derive(Clone, Copy, Debug)]
pub struct MinimaxCoefficients {
    pub uniform_weight: f64,
    pub frequency_weight: f64,
}

impl MinimaxCoefficients {
    pub fn new(n: u64) -> Self {
        let sqrt_n = (n as f64).sqrt();
        MinimaxCoefficients {
            uniform_weight: 1.0 / (1.0 + sqrt_n),
            frequency_weight: 1.0 / (1.0 + 1.0 / sqrt_n),
        }
    }
}

/// Declarative description of one estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// Classical maximum likelihood: `p_hat_k = nu_k`.
    MlClassical,
    /// Add-beta: `p_hat_k = (n_k + beta)/(N + K beta)`.
    AddBeta { beta: f64 },
    /// Constant-risk minimax estimator for the K-sided die.
    ClassicalMinimax,
    /// Classical minimax seed admixed with the maximally mixed state until
    /// the purity target `(1/3)(1 - epsilon)` is met (qubit SIC).
    QuantumMinimax {
        epsilon: f64,
        #[serde(default)]
        variant_bn: bool,
    },
    /// Purity-constrained qubit ML (the exact quantum ML estimator).
    MlQuantum,
    /// Qubit ML restricted to purities `<= (1/3)(1 - epsilon)`.
    MlQuantumEpsilon { epsilon: f64 },
    /// Monte Carlo mean estimator for the power prior `f(p) = (prod p_k)^(beta-1)`,
    /// optionally cut to the physical purity window.
    MeanMc {
        beta: f64,
        samples: usize,
        seed: u64,
        #[serde(default)]
        indicator: bool,
    },
}

impl EstimatorSpec {
    /// Checks the parameter ranges of the spec itself.
    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorSpec::AddBeta { beta } => check_beta(beta),
            EstimatorSpec::QuantumMinimax { epsilon, .. }
            | EstimatorSpec::MlQuantumEpsilon { epsilon } => check_epsilon(epsilon),
            EstimatorSpec::MeanMc { beta, samples, .. } => {
                check_beta(beta)?;
                if samples < 1000 {
                    return Err(Error::InvalidArgument(format!(
                        "mean estimator needs at least 1000 samples, got {samples}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Anything that maps click counts to a probability vector.
pub trait PointEstimator: Sync {
    fn estimate(&self, counts: &CountVector) -> Result<ProbVector>;
}

impl PointEstimator for EstimatorSpec {
    fn estimate(&self, counts: &CountVector) -> Result<ProbVector> {
        match *self {
            EstimatorSpec::MlClassical => Ok(estimate_ml_classical(counts)),
            EstimatorSpec::AddBeta { beta } => estimate_add_beta(counts, beta),
            EstimatorSpec::ClassicalMinimax => Ok(estimate_classical_minimax(counts)),
            EstimatorSpec::QuantumMinimax { epsilon, variant_bn } => {
                estimate_quantum_minimax(counts, epsilon, variant_bn)
            }
            EstimatorSpec::MlQuantum => estimate_ml_quantum(counts, 0.0),
            EstimatorSpec::MlQuantumEpsilon { epsilon } => estimate_ml_quantum(counts, epsilon),
            EstimatorSpec::MeanMc {
                beta,
                samples,
                seed,
                indicator,
            } => estimate_mean_mc(counts, beta, samples, seed, indicator).map(|r| r.p_hat),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..=0.25).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "epsilon must lie in [0, 1/4], got {epsilon}"
        )))
    }
}

/// Classical maximum likelihood: the relative frequencies.
pub fn estimate_ml_classical(counts: &CountVector) -> ProbVector {
    ProbVector::new(counts.freqs()).expect("frequencies form a probability vector")
}

/// Add-beta estimator `p_hat_k = (n_k + beta)/(N + K beta)`.
pub fn estimate_add_beta(counts: &CountVector, beta: f64) -> Result<ProbVector> {
    check_beta(beta)?;
    let n = counts.total() as f64;
    let k = counts.len() as f64;
    let denom = n + k * beta;
    let probs = counts.counts().iter().map(|&c| (c as f64 + beta) / denom).collect();
    ProbVector::new(probs)
}

/// The constant-risk minimax estimator for the K-sided die:
/// `p_hat_k = a_N/K + nu_k b_N`.  Coincides with add-beta at
/// `beta = sqrt(N)/K` and is full-rank for every finite N.
pub fn estimate_classical_minimax(counts: &CountVector) -> ProbVector {
    let coeff = MinimaxCoefficients::new(counts.total());
    let k = counts.len() as f64;
    let center = coeff.uniform_weight / k;
    let probs = counts
        .freqs()
        .into_iter()
        .map(|nu| center + nu * coeff.frequency_weight)
        .collect();
    ProbVector::new(probs).expect("minimax map preserves the simplex")
}

/// An admixing correction: the mixing weight and the corrected vector.
#[derive(Clone, Debug, Serialize)]
pub struct AdmixResult {
    pub lambda: f64,
    pub p_hat: ProbVector,
}

/// Admixes the maximally mixed state into the classical-minimax seed for
/// qubit SIC counts until `sum p_hat^2 <= (1/3)(1 - epsilon)`.
///
/// The seed is `p_{k,0} = a_N/4 + nu_k b_N`; when it violates the target,
/// `lambda` solves `(1-lambda)^2 b_N^2 (sum nu^2 - 1/4) = (1-4 epsilon)/12`
/// with the root keeping `1 - lambda >= 0`.
pub fn admix_lambda_qubit(counts: &CountVector, epsilon: f64) -> Result<AdmixResult> {
    let coeff = MinimaxCoefficients::new(counts.total());
    admix_with_weights(counts, epsilon, coeff.uniform_weight, coeff.frequency_weight)
}

fn admix_with_weights(counts: &CountVector, epsilon: f64, a: f64, b: f64) -> Result<AdmixResult> {
    check_epsilon(epsilon)?;
    if counts.len() != 4 {
        return Err(Error::InvalidArgument(format!(
            "the qubit admix estimator needs K = 4 counts, got K = {}",
            counts.len()
        )));
    }
    let seed: Vec<f64> = counts.freqs().into_iter().map(|nu| a / 4.0 + nu * b).collect();
    let sum_sq0: f64 = seed.iter().map(|p| p * p).sum();
    let target = (1.0 - epsilon) / 3.0;
    if sum_sq0 <= target {
        return Ok(AdmixResult {
            lambda: 0.0,
            p_hat: ProbVector::new(seed)?,
        });
    }
    let excess = counts.freq_sum_sq() - 0.25;
    // sum_sq0 = 1/4 + b^2 (sum nu^2 - 1/4) > target >= 1/4 forces excess > 0.
    assert!(excess > 0.0, "purity excess must be positive when the target is violated");
    let ratio = ((1.0 - 4.0 * epsilon) / 12.0) / (b * b * excess);
    let lambda = (1.0 - ratio.sqrt().min(1.0)).clamp(0.0, 1.0);
    let p_hat = seed
        .into_iter()
        .map(|p| (1.0 - lambda) * p + lambda / 4.0)
        .collect();
    Ok(AdmixResult {
        lambda,
        p_hat: ProbVector::new(p_hat)?,
    })
}

/// Admixes just enough of the maximally mixed state to make the
/// reconstruction of `p0` positive semidefinite, for any IC POM.
///
/// With `mu` the smallest eigenvalue of the reconstruction, the minimal
/// weight is `lambda = |mu| / (1/d + |mu|)` when `mu < 0`, else zero.
pub fn admix_physical_general(p0: &ProbVector, pom: &SymmetricPOM) -> Result<AdmixResult> {
    if !pom.is_informationally_complete() {
        return Err(Error::NotInformationallyComplete {
            k: pom.num_outcomes(),
            needed: pom.dim() * pom.dim(),
        });
    }
    let rho0 = reconstruct_unchecked(p0, pom)?;
    let mu = rho0.min_eigenvalue();
    let d = pom.dim() as f64;
    // The maximally mixed state clicks uniformly: tr{Pi_k}/d = 1/K,
    // which is 1/d^2 for a SIC.
    let mixed = 1.0 / pom.num_outcomes() as f64;
    let lambda = if mu >= 0.0 { 0.0 } else { -mu / (1.0 / d - mu) };
    let p_hat = p0
        .as_slice()
        .iter()
        .map(|p| (1.0 - lambda) * p + lambda * mixed)
        .collect();
    Ok(AdmixResult {
        lambda,
        p_hat: ProbVector::new(p_hat)?,
    })
}

/// The quantum minimax estimator for qubit SIC counts: classical minimax
/// seed plus the epsilon-aware admixing of [`admix_lambda_qubit`].
///
/// With `variant_bn`, the frequency weight is replaced by
/// `b = sqrt(1 - 4 epsilon)` (and `a = 1 - b`), which makes the admixing
/// weight depend on the frequencies alone.
pub fn quantum_minimax_full(counts: &CountVector, epsilon: f64, variant_bn: bool) -> Result<AdmixResult> {
    if variant_bn {
        check_epsilon(epsilon)?;
        let b = (1.0 - 4.0 * epsilon).sqrt();
        admix_with_weights(counts, epsilon, 1.0 - b, b)
    } else {
        admix_lambda_qubit(counts, epsilon)
    }
}

/// [`quantum_minimax_full`] without the mixing weight.
pub fn estimate_quantum_minimax(counts: &CountVector, epsilon: f64, variant_bn: bool) -> Result<ProbVector> {
    quantum_minimax_full(counts, epsilon, variant_bn).map(|r| r.p_hat)
}

const ML_GRADIENT_TOL: f64 = 1e-10;
const ML_MAX_ITERATIONS: usize = 10_000;

/// Purity-constrained maximum likelihood for qubit tetrahedron counts.
///
/// Maximizes `sum_k n_k log p_k(s)` with `p_k = (1 + a_k . s)/4` over the
/// Bloch ball `|s| <= sqrt(1 - 4 epsilon)`, equivalent to
/// `sum p^2 <= (1/3)(1 - epsilon)`.  When the frequencies are feasible
/// they are returned unchanged; otherwise projected gradient ascent from
/// the center finds the boundary maximizer.
pub fn estimate_ml_quantum(counts: &CountVector, epsilon: f64) -> Result<ProbVector> {
    check_epsilon(epsilon)?;
    if counts.len() != 4 {
        return Err(Error::InvalidArgument(format!(
            "the qubit ML estimator needs K = 4 counts, got K = {}",
            counts.len()
        )));
    }
    let dirs = tetrahedron_directions();
    let nu = counts.freqs();
    let radius = (1.0 - 4.0 * epsilon).sqrt();

    // s with tetrahedron probabilities equal to nu; feasible iff |s| <= radius.
    let mut s_nu = [0.0; 3];
    for (k, &a) in dirs.iter().enumerate() {
        s_nu = add3(s_nu, scale3(a, 3.0 * nu[k]));
    }
    if norm3(s_nu) <= radius {
        return ProbVector::new(nu);
    }

    let objective = |s: [f64; 3]| -> f64 {
        let mut f = 0.0;
        for (k, &a) in dirs.iter().enumerate() {
            if nu[k] > 0.0 {
                f += nu[k] * (1.0 + dot3(a, s)).ln();
            }
        }
        f
    };
    let gradient = |s: [f64; 3]| -> [f64; 3] {
        let mut g = [0.0; 3];
        for (k, &a) in dirs.iter().enumerate() {
            if nu[k] > 0.0 {
                g = add3(g, scale3(a, nu[k] / (1.0 + dot3(a, s))));
            }
        }
        g
    };
    let project = |s: [f64; 3]| -> [f64; 3] {
        let n = norm3(s);
        if n > radius {
            scale3(s, radius / n)
        } else {
            s
        }
    };

    let mut s = [0.0; 3];
    let mut f = objective(s);
    let mut step = 1.0;
    for _ in 0..ML_MAX_ITERATIONS {
        let g = gradient(s);
        let ns = norm3(s);
        let pg = if ns >= radius * (1.0 - 1e-12) && ns > 0.0 {
            let unit = scale3(s, 1.0 / ns);
            let radial = dot3(g, unit);
            if radial > 0.0 {
                add3(g, scale3(unit, -radial))
            } else {
                g
            }
        } else {
            g
        };
        if norm3(pg) < ML_GRADIENT_TOL {
            break;
        }
        let mut t = step;
        let mut accepted = false;
        while t > 1e-18 {
            let cand = project(add3(s, scale3(g, t)));
            let fc = objective(cand);
            if fc > f {
                s = cand;
                f = fc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (2.0 * t).min(1.0);
    }

    let probs = dirs.iter().map(|&a| (1.0 + dot3(a, s)) / 4.0).collect();
    ProbVector::new(probs)
}

/// Monte Carlo mean estimate with per-component standard errors.
#[derive(Clone, Debug, Serialize)]
pub struct MeanMcResult {
    pub p_hat: ProbVector,
    pub std_err: Vec<f64>,
    /// Fraction of samples kept by the physicality indicator (1 when off).
    pub acceptance: f64,
}

#[derive(Clone)]
struct MeanMcAccumulator {
    accepted: u64,
    weighted: Vec<f64>,
    weighted_sq: Vec<f64>,
}

/// Monte Carlo evaluation of the mean estimator for the power prior.
///
/// Samples are drawn from the Dirichlet density with parameters
/// `n_k + beta`, which is the normalized integrand without the indicator;
/// with `indicator`, the qubit physicality cut `sum p^2 <= 1/3` is applied
/// as self-normalized importance sampling and the acceptance rate is
/// reported.  Sampling is chunked so that parallel runs reproduce exactly.
pub fn estimate_mean_mc(
    counts: &CountVector,
    beta: f64,
    samples: usize,
    seed: u64,
    indicator: bool,
) -> Result<MeanMcResult> {
    check_beta(beta)?;
    if samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "mean estimator needs at least 1000 samples, got {samples}"
        )));
    }
    if indicator && counts.len() != 4 {
        return Err(Error::InvalidArgument(
            "the physicality indicator applies to qubit SIC counts (K = 4)".into(),
        ));
    }
    let k = counts.len();
    let alphas: Vec<f64> = counts.counts().iter().map(|&n| n as f64 + beta).collect();
    let num_chunks = samples.div_ceil(MEAN_MC_CHUNK);

    let accumulators: Vec<MeanMcAccumulator> = (0..num_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = CounterRng::stream(seed, chunk as u64);
            let gammas: Vec<Gamma<f64>> = alphas
                .iter()
                .map(|&a| Gamma::new(a, 1.0).expect("alpha > 0"))
                .collect();
            let size = MEAN_MC_CHUNK.min(samples - chunk * MEAN_MC_CHUNK);
            let mut acc = MeanMcAccumulator {
                accepted: 0,
                weighted: vec![0.0; k],
                weighted_sq: vec![0.0; k],
            };
            let mut draw = vec![0.0; k];
            for _ in 0..size {
                let mut total = 0.0;
                for (i, gamma) in gammas.iter().enumerate() {
                    let x = gamma.sample(&mut rng);
                    draw[i] = x;
                    total += x;
                }
                for x in &mut draw {
                    *x /= total;
                }
                let keep = !indicator || draw.iter().map(|x| x * x).sum::<f64>() <= 1.0 / 3.0;
                if keep {
                    acc.accepted += 1;
                    for i in 0..k {
                        acc.weighted[i] += draw[i];
                        acc.weighted_sq[i] += draw[i] * draw[i];
                    }
                }
            }
            acc
        })
        .collect();

    // Fixed-order combination keeps the result thread-count independent.
    let mut accepted = 0u64;
    let mut weighted = vec![0.0; k];
    let mut weighted_sq = vec![0.0; k];
    for acc in &accumulators {
        accepted += acc.accepted;
        for i in 0..k {
            weighted[i] += acc.weighted[i];
            weighted_sq[i] += acc.weighted_sq[i];
        }
    }

    if accepted == 0 {
        return Err(Error::DegeneratePosterior {
            samples,
            acceptance: 0.0,
        });
    }
    let w = accepted as f64;
    let mean: Vec<f64> = weighted.iter().map(|x| x / w).collect();
    let std_err: Vec<f64> = (0..k)
        .map(|i| {
            let var_sum = (weighted_sq[i] - 2.0 * mean[i] * weighted[i] + mean[i] * mean[i] * w).max(0.0);
            var_sum.sqrt() / w
        })
        .collect();
    Ok(MeanMcResult {
        p_hat: ProbVector::new(mean)?,
        std_err,
        acceptance: w / samples as f64,
    })
}

/// Purity of an estimate against the add-beta closed form; exposed for
/// cross-checks at the crate level.
pub fn minimax_purity_bound(k: usize, n: u64) -> f64 {
    let b = MinimaxCoefficients::new(n).frequency_weight;
    1.0 - (1.0 - 1.0 / k as f64) * (1.0 - b * b)
}

/// Largest frequency purity for which the classical-minimax seed is
/// already physical at epsilon = 0: `1/4 + 1/(12 b_N^2)`.
pub fn physical_freq_purity_limit(n: u64) -> f64 {
    let b = MinimaxCoefficients::new(n).frequency_weight;
    0.25 + 1.0 / (12.0 * b * b)
}

/// Log-likelihood `sum_k n_k ln p_k` (terms with `n_k = 0` skipped);
/// `-inf` when a counted outcome has zero probability.
pub fn log_likelihood(counts: &CountVector, p: &ProbVector) -> f64 {
    assert_eq!(counts.len(), p.len(), "log_likelihood: length mismatch");
    let mut acc = 0.0;
    for (&n, &pk) in counts.counts().iter().zip(p.as_slice()) {
        if n > 0 {
            if pk <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += n as f64 * pk.ln();
        }
    }
    acc
}

/// Rejects probability vectors whose entries dip below `-1e-12` or whose
/// sum strays from one; used by property tests.
pub fn is_valid_prob_vector(p: &ProbVector) -> bool {
    p.as_slice().iter().all(|&x| x >= -PROB_TOL) && (p.as_slice().iter().sum::<f64>() - 1.0).abs() <= PROB_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pom::{build_pom, PomKind, Rotation};
    use crate::state::tetrahedron_bloch;
    use proptest::prelude::*;

    fn counts(v: &[u64]) -> CountVector {
        CountVector::new(v.to_vec()).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn empty_counts_are_rejected() {
        assert!(matches!(CountVector::new(vec![0, 0, 0, 0]), Err(Error::EmptyData)));
    }

    #[test]
    fn ml_classical_examples() {
        let p = estimate_ml_classical(&counts(&[3, 1, 0, 0]));
        assert_eq!(p.as_slice(), &[0.75, 0.25, 0.0, 0.0]);
        let p = estimate_ml_classical(&counts(&[1, 0]));
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
        let p = estimate_ml_classical(&counts(&[5, 5]));
        assert_eq!(p.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn add_beta_examples() {
        let p = estimate_add_beta(&counts(&[1, 0]), 1.0).unwrap();
        assert_close(p.get(0), 2.0 / 3.0, 1e-15);
        assert_close(p.get(1), 1.0 / 3.0, 1e-15);

        let p = estimate_add_beta(&counts(&[4, 0, 0, 0]), 0.5).unwrap();
        assert_close(p.get(0), 0.75, 1e-15);
        for k in 1..4 {
            assert_close(p.get(k), 1.0 / 12.0, 1e-15);
        }

        assert!(estimate_add_beta(&counts(&[1, 1]), 0.0).is_err());
        assert!(estimate_add_beta(&counts(&[1, 1]), -0.5).is_err());
    }

    #[test]
    fn minimax_coefficients_sum_to_one() {
        for n in [1u64, 2, 5, 10, 100, 10_000] {
            let c = MinimaxCoefficients::new(n);
            assert!((c.uniform_weight + c.frequency_weight - 1.0).abs() < 1e-15);
            assert!(c.uniform_weight > 0.0 && c.uniform_weight < 1.0);
            assert!(c.frequency_weight > 0.0 && c.frequency_weight < 1.0);
        }
    }

    #[test]
    fn classical_minimax_examples() {
        let p = estimate_classical_minimax(&counts(&[1, 0]));
        assert_close(p.get(0), 0.75, 1e-15);
        assert_close(p.get(1), 0.25, 1e-15);

        let p = estimate_classical_minimax(&counts(&[4, 0, 0, 0]));
        assert_close(p.get(0), 0.75, 1e-15);
        assert_close(p.get(1), 1.0 / 12.0, 1e-15);

        let p = estimate_classical_minimax(&counts(&[2, 2, 2, 2]));
        for k in 0..4 {
            assert_close(p.get(k), 0.25, 1e-15);
        }
    }

    #[test]
    fn classical_minimax_matches_add_beta_at_special_beta() {
        let mut rng = CounterRng::new(21);
        for _ in 0..100 {
            let k = 2 + (rng.next_u64_value() % 5) as usize;
            let n = 1 + rng.next_u64_value() % 50;
            let mut c = vec![0u64; k];
            for _ in 0..n {
                let idx = (rng.next_u64_value() % k as u64) as usize;
                c[idx] += 1;
            }
            let cv = counts(&c);
            let beta = (cv.total() as f64).sqrt() / k as f64;
            let minimax = estimate_classical_minimax(&cv);
            let addb = estimate_add_beta(&cv, beta).unwrap();
            for i in 0..k {
                assert_close(minimax.get(i), addb.get(i), 1e-14);
            }
        }
    }

    #[test]
    fn admix_worked_example() {
        let result = admix_lambda_qubit(&counts(&[4, 0, 0, 0]), 0.0).unwrap();
        assert_close(result.lambda, 0.5, 1e-12);
        assert_close(result.p_hat.get(0), 0.5, 1e-12);
        for k in 1..4 {
            assert_close(result.p_hat.get(k), 1.0 / 6.0, 1e-12);
        }
        assert_close(result.p_hat.sum_sq(), 1.0 / 3.0, 1e-12);
    }

    #[test]
    fn admix_uniform_counts_are_untouched() {
        for eps in [0.0, 0.1, 0.25] {
            let result = admix_lambda_qubit(&counts(&[1, 1, 1, 1]), eps).unwrap();
            assert_eq!(result.lambda, 0.0);
            for k in 0..4 {
                assert_close(result.p_hat.get(k), 0.25, 1e-15);
            }
        }
    }

    #[test]
    fn admix_with_slack_example() {
        // (1 - lambda)^2 = (0.84/12) / ((4/9)(3/4)) = 0.21
        let result = admix_lambda_qubit(&counts(&[4, 0, 0, 0]), 0.04).unwrap();
        assert_close(result.lambda, 1.0 - 0.21f64.sqrt(), 1e-12);
        assert_close(result.p_hat.get(0), 0.25 + 0.5 * 0.21f64.sqrt(), 1e-12);
        assert_close(result.p_hat.sum_sq(), 0.32, 1e-12);
    }

    #[test]
    fn admix_epsilon_range_is_enforced() {
        assert!(admix_lambda_qubit(&counts(&[1, 0, 0, 0]), -0.01).is_err());
        assert!(admix_lambda_qubit(&counts(&[1, 0, 0, 0]), 0.26).is_err());
    }

    #[test]
    fn admix_general_examples() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        // Physical input stays untouched.
        let p = ProbVector::uniform(4);
        let r = admix_physical_general(&p, &pom).unwrap();
        assert_eq!(r.lambda, 0.0);
        assert_eq!(r.p_hat.as_slice(), p.as_slice());

        // Vertex input: eigenvalues {2, -1}, lambda = 1/(1/2 + 1) = 2/3.
        let p = ProbVector::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = admix_physical_general(&p, &pom).unwrap();
        assert_close(r.lambda, 2.0 / 3.0, 1e-12);
        assert_close(r.p_hat.get(0), 0.5, 1e-12);
        for k in 1..4 {
            assert_close(r.p_hat.get(k), 1.0 / 6.0, 1e-12);
        }
    }

    #[test]
    fn admix_general_requires_ic() {
        let trine = build_pom(PomKind::Trine, &Rotation::identity()).unwrap();
        let err = admix_physical_general(&ProbVector::uniform(3), &trine);
        assert!(matches!(err, Err(Error::NotInformationallyComplete { .. })));
    }

    #[test]
    fn spectral_and_purity_lambda_agree() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        let mut rng = CounterRng::new(31);
        for _ in 0..1000 {
            let n = 1 + rng.next_u64_value() % 20;
            let mut c = vec![0u64; 4];
            for _ in 0..n {
                c[(rng.next_u64_value() % 4) as usize] += 1;
            }
            let cv = counts(&c);
            let seed = estimate_classical_minimax(&cv);
            let spectral = admix_physical_general(&seed, &pom).unwrap();
            let purity = admix_lambda_qubit(&cv, 0.0).unwrap();
            assert!(
                (spectral.lambda - purity.lambda).abs() < 1e-10,
                "counts {c:?}: {} vs {}",
                spectral.lambda,
                purity.lambda
            );
        }
    }

    #[test]
    fn quantum_minimax_at_full_slack_is_uniform() {
        let r = quantum_minimax_full(&counts(&[4, 0, 0, 0]), 0.25, false).unwrap();
        assert_close(r.lambda, 1.0, 1e-15);
        for k in 0..4 {
            assert_close(r.p_hat.get(k), 0.25, 1e-15);
        }
    }

    #[test]
    fn quantum_minimax_zero_slack_matches_plain_admix() {
        for c in [[4, 0, 0, 0], [2, 1, 1, 0], [3, 1, 0, 0], [1, 1, 1, 1]] {
            let cv = counts(&c);
            let a = estimate_quantum_minimax(&cv, 0.0, false).unwrap();
            let b = admix_lambda_qubit(&cv, 0.0).unwrap().p_hat;
            assert_eq!(a.as_slice(), b.as_slice());
        }
    }

    #[test]
    fn variant_bn_lambda_depends_only_on_frequencies() {
        // With b^2 = 1 - 4 eps, the mixing weight solves
        // (1-lambda)^2 = 1/(12 (sum nu^2 - 1/4)) for triggered data.
        for eps in [0.01, 0.05, 0.2] {
            let cv = counts(&[4, 0, 0, 0]);
            let r = quantum_minimax_full(&cv, eps, true).unwrap();
            let expected = 1.0 - (1.0f64 / (12.0 * (1.0 - 0.25))).sqrt().min(1.0);
            assert_close(r.lambda, expected, 1e-12);
        }
    }

    #[test]
    fn ml_quantum_feasible_frequencies_pass_through() {
        // sum nu^2 = 0.3 <= 1/3: unmodified.
        let cv = counts(&[4, 3, 2, 1]);
        assert!(cv.freq_sum_sq() <= 1.0 / 3.0);
        let p = estimate_ml_quantum(&cv, 0.0).unwrap();
        for (got, want) in p.as_slice().iter().zip(cv.freqs()) {
            assert_close(*got, want, 1e-12);
        }
    }

    #[test]
    fn ml_quantum_single_detector() {
        let p = estimate_ml_quantum(&counts(&[1, 0, 0, 0]), 0.0).unwrap();
        assert_close(p.get(0), 0.5, 1e-7);
        for k in 1..4 {
            assert_close(p.get(k), 1.0 / 6.0, 1e-7);
        }
    }

    #[test]
    fn ml_quantum_single_detector_with_slack() {
        let p = estimate_ml_quantum(&counts(&[1, 0, 0, 0]), 0.04).unwrap();
        assert_close(p.get(0), (1.0 + 0.84f64.sqrt()) / 4.0, 1e-7);
    }

    #[test]
    fn ml_quantum_beats_random_feasible_states() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        let mut rng = CounterRng::new(41);
        for _ in 0..100 {
            let n = 1 + rng.next_u64_value() % 10;
            let mut c = vec![0u64; 4];
            for _ in 0..n {
                c[(rng.next_u64_value() % 4) as usize] += 1;
            }
            let cv = counts(&c);
            let p_hat = estimate_ml_quantum(&cv, 0.0).unwrap();
            let best = log_likelihood(&cv, &p_hat);
            for _ in 0..1000 {
                // Random feasible Bloch vector.
                let v = loop {
                    let v = [
                        2.0 * rng.next_f64() - 1.0,
                        2.0 * rng.next_f64() - 1.0,
                        2.0 * rng.next_f64() - 1.0,
                    ];
                    if norm3(v) <= 1.0 {
                        break v;
                    }
                };
                let p = crate::state::qubit_probs(&crate::state::BlochVector(v), &pom).unwrap();
                let ll = log_likelihood(&cv, &p);
                assert!(
                    ll <= best + 1e-9,
                    "counts {c:?}: random {ll} beats optimum {best}"
                );
            }
        }
    }

    #[test]
    fn ml_quantum_output_radius_respects_slack() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        for eps in [0.0, 0.05, 0.25] {
            let p = estimate_ml_quantum(&counts(&[7, 1, 0, 0]), eps).unwrap();
            let s = tetrahedron_bloch(&p, &pom).unwrap();
            assert!(s.norm() <= (1.0 - 4.0 * eps).sqrt() + 1e-10);
        }
    }

    #[test]
    fn mean_mc_matches_add_beta_closed_form() {
        let cv = counts(&[1, 0]);
        let r = estimate_mean_mc(&cv, 1.0, 200_000, 5, false).unwrap();
        assert_eq!(r.acceptance, 1.0);
        for (k, expected) in [2.0 / 3.0, 1.0 / 3.0].iter().enumerate() {
            assert!(
                (r.p_hat.get(k) - expected).abs() < 3.0 * r.std_err[k],
                "component {k}: {} vs {expected} (se {})",
                r.p_hat.get(k),
                r.std_err[k]
            );
        }
    }

    #[test]
    fn mean_mc_symmetric_counts_with_indicator() {
        let r = estimate_mean_mc(&counts(&[2, 2, 2, 2]), 1.0, 100_000, 6, true).unwrap();
        assert!(r.acceptance > 0.1);
        for k in 0..4 {
            assert!((r.p_hat.get(k) - 0.25).abs() < 3.0 * r.std_err[k]);
        }
    }

    #[test]
    fn mean_mc_is_deterministic() {
        let cv = counts(&[3, 1, 0, 2]);
        let a = estimate_mean_mc(&cv, 0.5, 100_000, 7, true).unwrap();
        let b = estimate_mean_mc(&cv, 0.5, 100_000, 7, true).unwrap();
        assert_eq!(a.p_hat.as_slice(), b.p_hat.as_slice());
        assert_eq!(a.std_err, b.std_err);
    }

    #[test]
    fn mean_mc_parameter_checks() {
        let cv = counts(&[1, 0, 0, 0]);
        assert!(estimate_mean_mc(&cv, 0.0, 10_000, 1, false).is_err());
        assert!(estimate_mean_mc(&cv, 1.0, 10, 1, false).is_err());
    }

    #[test]
    fn purity_grows_with_n_and_respects_bound() {
        let mut last = 0.0;
        for n in [1u64, 4, 16, 100] {
            let cv = counts(&[n, 0, 0, 0]);
            let p = estimate_classical_minimax(&cv);
            let sq = p.sum_sq();
            assert!(sq > last, "purity must increase with N");
            // Single-detector data attains the bound exactly.
            assert_close(sq, minimax_purity_bound(4, n), 1e-13);
            last = sq;
        }
        // Mixed data stays strictly below the bound.
        let cv = counts(&[3, 1, 0, 0]);
        assert!(estimate_classical_minimax(&cv).sum_sq() < minimax_purity_bound(4, 4));
    }

    #[test]
    fn classical_minimax_approaches_ml() {
        let mut last = f64::INFINITY;
        for n in [1u64, 100, 10_000] {
            let cv = counts(&[n, 0, 0, 0]);
            let mm = estimate_classical_minimax(&cv);
            let ml = estimate_ml_classical(&cv);
            let sup: f64 = mm
                .as_slice()
                .iter()
                .zip(ml.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(sup < last, "sup-norm must decrease with N");
            last = sup;
        }
    }

    #[test]
    fn estimator_spec_json_round_trip() {
        let spec = EstimatorSpec::QuantumMinimax {
            epsilon: 0.05,
            variant_bn: false,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"quantum_minimax","epsilon":0.05,"variant_bn":false}"#);
        let back: EstimatorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    proptest! {
        #[test]
        fn estimators_output_valid_probabilities(raw in proptest::collection::vec(0u64..30, 4), eps in 0.0f64..0.25) {
            prop_assume!(raw.iter().sum::<u64>() > 0);
            let cv = CountVector::new(raw).unwrap();
            for spec in [
                EstimatorSpec::MlClassical,
                EstimatorSpec::AddBeta { beta: 0.7 },
                EstimatorSpec::ClassicalMinimax,
                EstimatorSpec::QuantumMinimax { epsilon: eps, variant_bn: false },
                EstimatorSpec::QuantumMinimax { epsilon: eps, variant_bn: true },
                EstimatorSpec::MlQuantum,
                EstimatorSpec::MlQuantumEpsilon { epsilon: eps },
            ] {
                let p = spec.estimate(&cv).unwrap();
                prop_assert!(is_valid_prob_vector(&p));
            }
        }

        #[test]
        fn quantum_minimax_respects_purity_target(raw in proptest::collection::vec(0u64..30, 4), eps in 0.0f64..0.25) {
            prop_assume!(raw.iter().sum::<u64>() > 0);
            let cv = CountVector::new(raw).unwrap();
            let p = estimate_quantum_minimax(&cv, eps, false).unwrap();
            prop_assert!(p.sum_sq() <= (1.0 - eps) / 3.0 + 1e-12);
        }
    }
}
