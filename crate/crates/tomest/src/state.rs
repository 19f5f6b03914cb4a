//! States as density operators, Bloch vectors, and outcome-probability
//! vectors, with conversions and physicality tests.
//!
//! For a qubit probed by the tetrahedron SIC-POM the probabilities carry
//! the whole state, and physicality is a purity window:
//! `1/4 <= sum_k p_k^2 <= 1/3`.  For the classical die every probability
//! vector is physical; in higher dimensions the spectral test on the
//! reconstructed operator decides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add3, norm3, scale3, HermitianOperator};
use crate::pom::{PomKind, SymmetricPOM};

/// Slack for probability-vector invariants and purity comparisons.
pub const PROB_TOL: f64 = 1e-12;
/// Slack for eigenvalue-based physicality; spectra accumulate more float
/// error than quadratic sums.
pub const EIG_TOL: f64 = 1e-10;

/// K nonnegative reals summing to one.
///
/// Entries within `-1e-12` of zero are accepted and clamped to exactly
/// zero, since they arise from float subtraction in estimator pipelines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a probability vector needs at least 2 entries, got {}",
                probs.len()
            )));
        }
        let mut clamped = probs;
        for p in &mut clamped {
            if !p.is_finite() {
                return Err(Error::InvalidArgument("non-finite probability".into()));
            }
            if *p < 0.0 {
                if *p < -PROB_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "negative probability {p:e}"
                    )));
                }
                *p = 0.0;
            }
        }
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(ProbVector(clamped))
    }

    pub fn uniform(len: usize) -> Self {
        ProbVector(vec![1.0 / len as f64; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// `sum_k p_k^2`, the purity of the matching SIC reconstruction.
    pub fn sum_sq(&self) -> f64 {
        self.0.iter().map(|p| p * p).sum()
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVector::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Vec<f64> {
        p.0
    }
}

/// A real 3-vector `s` with `rho = (1 + s . sigma)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn norm(&self) -> f64 {
        norm3(self.0)
    }

    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + PROB_TOL
    }

    pub fn to_density(&self) -> DensityOperator {
        let [x, y, z] = self.0;
        DensityOperator {
            op: HermitianOperator::from_pauli(0.5, [x / 2.0, y / 2.0, z / 2.0]),
        }
    }
}

/// A Hermitian unit-trace operator; possibly non-positive, so physicality
/// is a predicate rather than an invariant.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidArgument(format!(
                "density operator trace is {trace}, expected 1"
            )));
        }
        Ok(DensityOperator { op })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            op: HermitianOperator::scaled_identity(dim, 1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.op.min_eigenvalue()
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= -EIG_TOL
    }

    /// `tr{rho^2}`.
    pub fn purity(&self) -> f64 {
        self.op.hs_inner(&self.op)
    }

    /// The Bloch vector of a qubit operator.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.op.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Bloch vector requires d = 2, operator has d = {}",
                self.op.dim()
            )));
        }
        let x = self.op.get(0, 1).re + self.op.get(1, 0).re;
        let y = self.op.get(1, 0).im - self.op.get(0, 1).im;
        let z = self.op.get(0, 0).re - self.op.get(1, 1).re;
        Ok(BlochVector([x, y, z]))
    }
}

/// Born's rule `p_k = tr{Pi_k rho}`.
pub fn born_probs(state: &DensityOperator, pom: &SymmetricPOM) -> Result<ProbVector> {
    if state.dim() != pom.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs POM dimension {}",
            state.dim(),
            pom.dim()
        )));
    }
    let probs: Vec<f64> = pom.outcomes().iter().map(|pi| pi.hs_inner(state.op())).collect();
    ProbVector::new(probs)
}

/// Inverts Born's rule through the dual frame: `rho = sum_k p_k Lambda_k`.
///
/// The result is Hermitian with unit trace but may be non-positive;
/// check physicality separately.
pub fn reconstruct_state(p: &ProbVector, pom: &SymmetricPOM) -> Result<DensityOperator> {
    if !pom.is_informationally_complete() {
        return Err(Error::NotInformationallyComplete {
            k: pom.num_outcomes(),
            needed: pom.dim() * pom.dim(),
        });
    }
    reconstruct_unchecked(p, pom)
}

/// The standard-form reconstruction without the IC gate; for a non-IC
/// S-POM this is the canonical (minimal) operator compatible with `p`.
pub(crate) fn reconstruct_unchecked(p: &ProbVector, pom: &SymmetricPOM) -> Result<DensityOperator> {
    if p.len() != pom.num_outcomes() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities vs {} outcomes",
            p.len(),
            pom.num_outcomes()
        )));
    }
    let op = HermitianOperator::weighted_sum(p.as_slice(), pom.duals());
    DensityOperator::new(op)
}

/// Outcome of a physicality test.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhysicalityReport {
    pub physical: bool,
    /// `sum_k p_k^2`.
    pub sum_sq: f64,
    /// Smallest eigenvalue of the reconstructed operator.
    pub min_eig: f64,
}

/// Does `p` correspond to a physical state under this POM?
///
/// Die data are always physical; for the qubit SIC-POM the purity window
/// upper bound `sum p^2 <= 1/3` is necessary and sufficient; otherwise the
/// spectrum of the reconstruction decides.
pub fn check_physical(p: &ProbVector, pom: &SymmetricPOM) -> PhysicalityReport {
    assert_eq!(p.len(), pom.num_outcomes(), "check_physical: length mismatch");
    let sum_sq = p.sum_sq();
    match pom.kind() {
        PomKind::ClassicalDie(_) => {
            let min_eig = p.as_slice().iter().cloned().fold(f64::INFINITY, f64::min);
            PhysicalityReport {
                physical: true,
                sum_sq,
                min_eig,
            }
        }
        _ => {
            let rho = reconstruct_unchecked(p, pom).expect("lengths already checked");
            let min_eig = rho.min_eigenvalue();
            let physical = if pom.dim() == 2 && pom.is_informationally_complete() {
                sum_sq <= 1.0 / 3.0 + PROB_TOL
            } else {
                min_eig >= -EIG_TOL
            };
            PhysicalityReport {
                physical,
                sum_sq,
                min_eig,
            }
        }
    }
}

/// Squared Hilbert-Schmidt distance between the SIC reconstructions of two
/// probability vectors:
/// `tr{(rho_hat - rho)^2} = (K-1)K/((d-1)d) sum_k (p_hat_k - p_k)^2`.
pub fn squared_error(p_hat: &ProbVector, p: &ProbVector, pom: &SymmetricPOM) -> f64 {
    assert_eq!(p_hat.len(), p.len(), "squared_error: length mismatch");
    assert_eq!(p.len(), pom.num_outcomes(), "squared_error: POM mismatch");
    let sum: f64 = p_hat
        .as_slice()
        .iter()
        .zip(p.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    error_prefactor(pom) * sum
}

/// `(K-1)K/((d-1)d)`; equals 1 for the classical die.
pub fn error_prefactor(pom: &SymmetricPOM) -> f64 {
    let k = pom.num_outcomes() as f64;
    let d = pom.dim() as f64;
    (k - 1.0) * k / ((d - 1.0) * d)
}

/// Fast path for qubit kinds: `p_k = (1 + e_k . s)/K` from the stored
/// directions.  Valid whenever `|s| <= 1`.
pub fn qubit_probs(s: &BlochVector, pom: &SymmetricPOM) -> Result<ProbVector> {
    let dirs = pom.directions().ok_or_else(|| {
        Error::InvalidArgument("POM has no Bloch directions (not a qubit kind)".into())
    })?;
    let k = pom.num_outcomes() as f64;
    let probs = dirs
        .iter()
        .map(|&e| (1.0 + crate::linalg::dot3(e, s.0)) / k)
        .collect();
    ProbVector::new(probs)
}

/// The Bloch vector whose tetrahedron probabilities equal `p`
/// (`s = 3 sum_k p_k a_k`); inverse of [`qubit_probs`] for K = 4.
pub fn tetrahedron_bloch(p: &ProbVector, pom: &SymmetricPOM) -> Result<BlochVector> {
    let dirs = pom.directions().ok_or_else(|| {
        Error::InvalidArgument("POM has no Bloch directions (not a qubit kind)".into())
    })?;
    if p.len() != 4 || dirs.len() != 4 {
        return Err(Error::DimensionMismatch(
            "tetrahedron inversion needs K = 4".into(),
        ));
    }
    let mut s = [0.0; 3];
    for (pk, &e) in p.as_slice().iter().zip(dirs) {
        s = add3(s, scale3(e, 3.0 * pk));
    }
    Ok(BlochVector(s))
}
