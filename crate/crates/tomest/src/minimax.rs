//! Outer minimax optimizations: the purity slack `epsilon_N` for the
//! quantum estimators, and the worst-case-beta scan that recovers the
//! classical minimax choice `beta = sqrt(N)/K`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::EstimatorSpec;
use crate::optim::golden_section_min;
use crate::pom::{build_pom, PomKind, Rotation, SymmetricPOM};
use crate::risk::{enumerate_outcomes, risk_extrema_with, GridSpec, OutcomeEnumeration, RiskContext};
use crate::rng::CounterRng;
use crate::state::ProbVector;

/// Estimator families parameterized by the purity slack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonFamily {
    /// Classical-minimax seed with epsilon-aware admixing.
    QuantumMinimax,
    /// Qubit ML restricted to the shrunk purity ball.
    MlQuantum,
}

impl EpsilonFamily {
    pub fn spec(&self, epsilon: f64) -> EstimatorSpec {
        match self {
            EpsilonFamily::QuantumMinimax => EstimatorSpec::QuantumMinimax {
                epsilon,
                variant_bn: false,
            },
            EpsilonFamily::MlQuantum => EstimatorSpec::MlQuantumEpsilon { epsilon },
        }
    }
}

/// Search controls for [`optimize_epsilon`].
#[derive(Clone, Copy, Debug)]
pub struct SearchSpec {
    /// Coarse scan points before the golden-section stage.
    pub scan_points: usize,
    /// Golden-section bracket width at which the search stops.
    pub tol: f64,
    /// Upper end of the slack range; the purity target `(1/3)(1-eps)`
    /// reaches the uniform floor 1/4 at eps = 1/4.
    pub eps_max: f64,
    pub grid: GridSpec,
}

impl Default for SearchSpec {
    fn default() -> Self {
        SearchSpec {
            scan_points: 16,
            tol: 1e-4,
            eps_max: 0.25,
            grid: GridSpec::default(),
        }
    }
}

/// Outcome of one epsilon optimization.
#[derive(Clone, Debug, Serialize)]
pub struct EpsilonResult {
    pub n: u64,
    pub epsilon_star: f64,
    pub max_risk_at_star: f64,
    pub max_risk_at_zero: f64,
    /// Every probed `(epsilon, max risk)` pair, scan and golden stages.
    pub trace: Vec<(f64, f64)>,
}

/// Minimizes the worst-case risk over the slack:
/// `min_{eps in [0, 1/4]} max_rho R_N`.
///
/// A coarse scan (which always includes both endpoints) brackets the
/// minimum before golden-section refinement, guarding against shallow
/// local dips; the full probe trace is returned for auditing.
pub fn optimize_epsilon(family: EpsilonFamily, n: u64, search: &SearchSpec) -> Result<EpsilonResult> {
    let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity())?;
    let enumeration = enumerate_outcomes(n, pom.num_outcomes())?;
    optimize_epsilon_with(family, &pom, &enumeration, search)
}

pub(crate) fn optimize_epsilon_with(
    family: EpsilonFamily,
    pom: &SymmetricPOM,
    enumeration: &OutcomeEnumeration,
    search: &SearchSpec,
) -> Result<EpsilonResult> {
    if search.scan_points < 2 {
        return Err(Error::InvalidArgument("scan needs at least 2 points".into()));
    }
    let n = enumeration.n();
    let mut trace: Vec<(f64, f64)> = Vec::new();
    let probe = |eps: f64| -> Result<f64> {
        let ctx = RiskContext::new(&family.spec(eps), pom, enumeration)?;
        let surface = risk_extrema_with(&ctx, &search.grid)?;
        Ok(surface.extrema.max_risk)
    };

    // Coarse scan over [0, eps_max], endpoints included.
    let m = search.scan_points;
    for i in 0..m {
        let eps = search.eps_max * i as f64 / (m - 1) as f64;
        let value = probe(eps)?;
        trace.push((eps, value));
    }
    let max_risk_at_zero = trace[0].1;
    let best_idx = (0..m)
        .min_by(|&a, &b| trace[a].1.total_cmp(&trace[b].1))
        .expect("scan is nonempty");
    let lo = trace[best_idx.saturating_sub(1)].0;
    let hi = trace[(best_idx + 1).min(m - 1)].0;

    if hi > lo {
        let mut inner_err = None;
        golden_section_min(
            |eps| match probe(eps) {
                Ok(v) => {
                    trace.push((eps, v));
                    v
                }
                Err(e) => {
                    inner_err = Some(e);
                    f64::INFINITY
                }
            },
            lo,
            hi,
            search.tol,
            |_, _| {},
        );
        if let Some(e) = inner_err {
            return Err(e);
        }
    }

    // The answer is the best point actually probed, so the endpoints can
    // never beat it.
    let &(epsilon_star, max_risk_at_star) = trace
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("trace is nonempty");
    Ok(EpsilonResult {
        n,
        epsilon_star,
        max_risk_at_star,
        max_risk_at_zero,
        trace,
    })
}

/// Result of a worst-case-beta scan.
#[derive(Clone, Debug, Serialize)]
pub struct BetaSearchResult {
    pub beta_star: f64,
    /// `(beta, worst-case risk)` for every grid point.
    pub worst_risks: Vec<(f64, f64)>,
}

/// For each beta on the grid, evaluates the worst-case risk of the
/// add-beta estimator on the K-sided die over probe states (all K
/// vertices, the uniform state, and `random_probes` random states), and
/// returns the minimizing beta.
pub fn worst_case_beta_classical(
    k: usize,
    n: u64,
    beta_grid: &[f64],
    random_probes: usize,
    seed: u64,
) -> Result<BetaSearchResult> {
    if beta_grid.is_empty() {
        return Err(Error::InvalidArgument("beta grid is empty".into()));
    }
    if beta_grid.iter().any(|&b| b <= 0.0) {
        return Err(Error::InvalidArgument("beta grid must be positive".into()));
    }
    let pom = build_pom(PomKind::ClassicalDie(k), &Rotation::identity())?;
    let enumeration = enumerate_outcomes(n, k)?;

    let mut probes: Vec<ProbVector> = Vec::with_capacity(k + 1 + random_probes);
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        probes.push(ProbVector::new(v)?);
    }
    probes.push(ProbVector::uniform(k));
    for i in 0..random_probes {
        let mut rng = CounterRng::stream(seed, i as u64);
        let mut v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.next_f64()).ln()).collect();
        let total: f64 = v.iter().sum();
        for x in &mut v {
            *x /= total;
        }
        probes.push(ProbVector::new(v)?);
    }

    let mut worst_risks = Vec::with_capacity(beta_grid.len());
    let mut scratch = Vec::new();
    for &beta in beta_grid {
        let ctx = RiskContext::new(&EstimatorSpec::AddBeta { beta }, &pom, &enumeration)?;
        let worst = probes
            .iter()
            .map(|p| ctx.risk_at_with(p, &mut scratch))
            .fold(f64::NEG_INFINITY, f64::max);
        worst_risks.push((beta, worst));
    }
    let &(beta_star, _) = worst_risks
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is nonempty");
    Ok(BetaSearchResult {
        beta_star,
        worst_risks,
    })
}
