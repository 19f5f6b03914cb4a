//! Exact risk by enumeration over every data set, average risk over
//! discrete priors, and risk extrema over the state space.
//!
//! The risk of an estimator at a true state is the likelihood-weighted
//! squared error summed over all count vectors.  Likelihoods are handled
//! in log space and the sums use fixed-order pairwise reduction, so
//! parallel and serial runs agree bitwise.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{CountVector, PointEstimator};
use crate::linalg::scale3;
use crate::optim::NelderMead;
use crate::pom::{PomKind, SymmetricPOM};
use crate::rng::CounterRng;
use crate::state::{error_prefactor, qubit_probs, BlochVector, ProbVector};

/// Hard cap on the number of enumerated count vectors.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Every composition of N clicks into K detectors, with multinomial
/// weights precomputed in log space.
#[derive(Clone, Debug)]
pub struct OutcomeEnumeration {
    n: u64,
    k: usize,
    counts: Vec<u64>,
    log_multinomials: Vec<f64>,
}

/// `C(n + k - 1, k - 1)` as u128.
pub fn composition_count(n: u64, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..k as u128 {
        acc = acc * (n as u128 + i) / i;
    }
    acc
}

/// Enumerates all count vectors for N clicks over K detectors
/// (first coordinate descending), guarded to desk scale.
pub fn enumerate_outcomes(n: u64, k: usize) -> Result<OutcomeEnumeration> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if k < 2 {
        return Err(Error::InvalidArgument("K must be at least 2".into()));
    }
    let cardinality = composition_count(n, k);
    if n > 200 || k > 6 || cardinality > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            n,
            k,
            cardinality,
            limit: ENUMERATION_LIMIT,
        });
    }
    let num = cardinality as usize;

    // ln(n!) by exact recurrence; n <= 200 keeps this in range.
    let mut ln_fact = vec![0.0f64; n as usize + 1];
    for i in 1..=n as usize {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }

    let mut counts = Vec::with_capacity(num * k);
    let mut log_multinomials = Vec::with_capacity(num);
    let mut row = vec![0u64; k];
    fill_compositions(n, 0, &mut row, &mut |r| {
        counts.extend_from_slice(r);
        let mut lm = ln_fact[n as usize];
        for &c in r {
            lm -= ln_fact[c as usize];
        }
        log_multinomials.push(lm);
    });
    debug_assert_eq!(log_multinomials.len(), num);

    Ok(OutcomeEnumeration {
        n,
        k,
        counts,
        log_multinomials,
    })
}

fn fill_compositions(remaining: u64, idx: usize, row: &mut Vec<u64>, emit: &mut impl FnMut(&[u64])) {
    if idx == row.len() - 1 {
        row[idx] = remaining;
        emit(row);
        return;
    }
    for value in (0..=remaining).rev() {
        row[idx] = value;
        fill_compositions(remaining - value, idx + 1, row, emit);
    }
}

impl OutcomeEnumeration {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.log_multinomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_multinomials.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.counts[i * self.k..(i + 1) * self.k]
    }

    pub fn log_multinomial(&self, i: usize) -> f64 {
        self.log_multinomials[i]
    }

    /// `sum_D L(D|p)`; equals 1 by the multinomial theorem.
    pub fn total_likelihood(&self, p: &ProbVector) -> f64 {
        let ln_p: Vec<f64> = log_probs(p);
        let mut terms = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let lt = self.log_term(i, &ln_p);
            terms.push(if lt.is_finite() { lt.exp() } else { 0.0 });
        }
        pairwise_sum(&terms)
    }

    fn log_term(&self, i: usize, ln_p: &[f64]) -> f64 {
        let mut lt = self.log_multinomials[i];
        for (j, &ln) in ln_p.iter().enumerate() {
            let n = self.counts[i * self.k + j];
            if n > 0 {
                if ln == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                lt += n as f64 * ln;
            }
        }
        lt
    }
}

fn log_probs(p: &ProbVector) -> Vec<f64> {
    p.as_slice()
        .iter()
        .map(|&x| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY })
        .collect()
}

/// Fixed-order pairwise summation; deterministic regardless of threading.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// A reusable exact-risk evaluator: the estimator is applied to every
/// count vector once, after which risks at different true states share
/// the table.
pub struct RiskContext<'a> {
    pom: &'a SymmetricPOM,
    enumeration: &'a OutcomeEnumeration,
    prefactor: f64,
    estimates: Vec<f64>, // row-major, len = enumeration.len() * k
}

impl<'a> RiskContext<'a> {
    pub fn new(
        estimator: &dyn PointEstimator,
        pom: &'a SymmetricPOM,
        enumeration: &'a OutcomeEnumeration,
    ) -> Result<Self> {
        if enumeration.k() != pom.num_outcomes() {
            return Err(Error::DimensionMismatch(format!(
                "enumeration over K = {} vs POM with K = {}",
                enumeration.k(),
                pom.num_outcomes()
            )));
        }
        let k = enumeration.k();
        let rows: Vec<ProbVector> = (0..enumeration.len())
            .into_par_iter()
            .map(|i| {
                let counts = CountVector::new(enumeration.row(i).to_vec())?;
                estimator.estimate(&counts)
            })
            .collect::<Result<_>>()?;
        let mut estimates = Vec::with_capacity(enumeration.len() * k);
        for row in rows {
            estimates.extend_from_slice(row.as_slice());
        }
        Ok(RiskContext {
            pom,
            enumeration,
            prefactor: error_prefactor(pom),
            estimates,
        })
    }

    pub fn enumeration(&self) -> &OutcomeEnumeration {
        self.enumeration
    }

    /// Exact risk at a true state, with caller-provided scratch space.
    pub fn risk_at_with(&self, p: &ProbVector, scratch: &mut Vec<f64>) -> f64 {
        let k = self.enumeration.k();
        let ln_p = log_probs(p);
        let num = self.enumeration.len();
        scratch.clear();
        scratch.reserve(num);
        let mut max_log = f64::NEG_INFINITY;
        for i in 0..num {
            let lt = self.enumeration.log_term(i, &ln_p);
            if lt > max_log {
                max_log = lt;
            }
            scratch.push(lt);
        }
        // Some detector has p > 0, so the all-clicks-there term is finite.
        debug_assert!(max_log.is_finite());
        let ps = p.as_slice();
        for i in 0..num {
            let lt = scratch[i];
            scratch[i] = if lt == f64::NEG_INFINITY {
                0.0
            } else {
                let mut err = 0.0;
                for j in 0..k {
                    let d = self.estimates[i * k + j] - ps[j];
                    err += d * d;
                }
                (lt - max_log).exp() * self.prefactor * err
            };
        }
        max_log.exp() * pairwise_sum(scratch)
    }

    pub fn risk_at(&self, p: &ProbVector) -> f64 {
        let mut scratch = Vec::new();
        self.risk_at_with(p, &mut scratch)
    }
}

/// Risk of `estimator` at `true_p` for N copies:
/// `R_N = sum_D L(D|p) * squared_error(estimate(D), p)`.
pub fn risk_exact(
    estimator: &dyn PointEstimator,
    true_p: &ProbVector,
    pom: &SymmetricPOM,
    n: u64,
) -> Result<f64> {
    let enumeration = enumerate_outcomes(n, pom.num_outcomes())?;
    let ctx = RiskContext::new(estimator, pom, &enumeration)?;
    Ok(ctx.risk_at(true_p))
}

/// A finitely supported prior over true states.
#[derive(Clone, Debug)]
pub struct DiscretePrior {
    states: Vec<ProbVector>,
    weights: Vec<f64>,
}

impl DiscretePrior {
    pub fn new(states: Vec<ProbVector>, weights: Vec<f64>) -> Result<Self> {
        if states.is_empty() || states.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} states vs {} weights",
                states.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("negative prior weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "prior weights sum to {sum}, expected 1"
            )));
        }
        let k = states[0].len();
        if states.iter().any(|s| s.len() != k) {
            return Err(Error::InvalidArgument("prior states differ in length".into()));
        }
        Ok(DiscretePrior { states, weights })
    }

    pub fn uniform(states: Vec<ProbVector>) -> Result<Self> {
        let w = 1.0 / states.len() as f64;
        let weights = vec![w; states.len()];
        DiscretePrior::new(states, weights)
    }

    pub fn states(&self) -> &[ProbVector] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Prior-weighted risk `F_N = sum_i w_i R_N(estimator, p_i)`.
pub fn average_risk(
    estimator: &dyn PointEstimator,
    prior: &DiscretePrior,
    pom: &SymmetricPOM,
    n: u64,
) -> Result<f64> {
    let enumeration = enumerate_outcomes(n, pom.num_outcomes())?;
    let ctx = RiskContext::new(estimator, pom, &enumeration)?;
    Ok(average_risk_with(&ctx, prior))
}

pub(crate) fn average_risk_with(ctx: &RiskContext<'_>, prior: &DiscretePrior) -> f64 {
    let mut scratch = Vec::new();
    let terms: Vec<f64> = prior
        .states
        .iter()
        .zip(&prior.weights)
        .map(|(p, &w)| w * ctx.risk_at_with(p, &mut scratch))
        .collect();
    pairwise_sum(&terms)
}

/// A probed true state: a Bloch vector for qubit kinds, a probability
/// vector for the classical die.
#[derive(Clone, Debug, Serialize)]
pub enum StatePoint {
    #[serde(rename = "bloch")]
    Bloch(BlochVector),
    #[serde(rename = "probs")]
    Probs(ProbVector),
}

#[derive(Clone, Debug, Serialize)]
pub struct RiskExtrema {
    pub max_state: StatePoint,
    pub max_risk: f64,
    pub min_state: StatePoint,
    pub min_risk: f64,
}

/// Risk evaluated over a grid of true states, with refined extrema.
#[derive(Clone, Debug, Serialize)]
pub struct RiskSurface {
    pub grid: Vec<(StatePoint, f64)>,
    pub extrema: RiskExtrema,
}

impl RiskSurface {
    /// CSV rows `sx,sy,sz,risk` (qubit) or `p1,..,pK,risk` (die).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.grid.first() {
            Some((StatePoint::Probs(p), _)) => {
                for i in 1..=p.len() {
                    out.push_str(&format!("p{i},"));
                }
                out.push_str("risk\n");
            }
            _ => out.push_str("sx,sy,sz,risk\n"),
        }
        for (state, risk) in &self.grid {
            match state {
                StatePoint::Bloch(b) => {
                    out.push_str(&format!("{},{},{},{risk}\n", b.0[0], b.0[1], b.0[2]));
                }
                StatePoint::Probs(p) => {
                    for x in p.as_slice() {
                        out.push_str(&format!("{x},"));
                    }
                    out.push_str(&format!("{risk}\n"));
                }
            }
        }
        out
    }
}

/// How to probe the state space when looking for risk extrema.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    /// Bloch-ball radii (qubit kinds).
    pub radii: usize,
    /// Fibonacci-sphere directions per radius (qubit kinds).
    pub directions: usize,
    /// Random simplex probes (die).
    pub random_probes: usize,
    /// Seed for the random simplex probes.
    pub seed: u64,
    /// Refine the best and worst grid points with Nelder-Mead.
    pub refine: bool,
    pub nelder_mead: NelderMead,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radii: 25,
            directions: 162,
            random_probes: 2000,
            seed: 7,
            refine: true,
            nelder_mead: NelderMead::default(),
        }
    }
}

/// Evenly spread unit vectors by the golden-angle spiral.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden_angle * i as f64;
            [r * theta.cos(), r * theta.sin(), z]
        })
        .collect()
}

/// Scans the state space, then refines the best and worst grid points.
///
/// Qubit kinds scan the Bloch ball (center + radii x directions); the
/// classical die scans the probability simplex (vertices, uniform, random
/// probes).  Refinement runs Nelder-Mead on the appropriate coordinates.
pub fn risk_extrema(
    estimator: &dyn PointEstimator,
    pom: &SymmetricPOM,
    n: u64,
    grid: &GridSpec,
) -> Result<RiskSurface> {
    let enumeration = enumerate_outcomes(n, pom.num_outcomes())?;
    let ctx = RiskContext::new(estimator, pom, &enumeration)?;
    risk_extrema_with(&ctx, grid)
}

pub(crate) fn risk_extrema_with(ctx: &RiskContext<'_>, grid: &GridSpec) -> Result<RiskSurface> {
    let pom = ctx.pom;
    match pom.kind() {
        PomKind::ClassicalDie(_) => die_extrema(ctx, grid),
        _ => qubit_extrema(ctx, grid),
    }
}

fn qubit_extrema(ctx: &RiskContext<'_>, grid: &GridSpec) -> Result<RiskSurface> {
    let pom = ctx.pom;
    if pom.directions().is_none() {
        return Err(Error::InvalidArgument(
            "risk scan needs Bloch directions or a classical die".into(),
        ));
    }
    let mut points: Vec<BlochVector> = vec![BlochVector([0.0, 0.0, 0.0])];
    let sphere = fibonacci_sphere(grid.directions);
    for i in 1..=grid.radii {
        let r = i as f64 / grid.radii as f64;
        for &dir in &sphere {
            points.push(BlochVector(scale3(dir, r)));
        }
    }

    let risks: Vec<f64> = points
        .par_iter()
        .map_init(Vec::new, |scratch, s| {
            let p = qubit_probs(s, pom).expect("grid point inside the Bloch ball");
            ctx.risk_at_with(p_ref(&p), scratch)
        })
        .collect();

    let (mut min_idx, mut max_idx) = (0usize, 0usize);
    for i in 1..risks.len() {
        if risks[i] < risks[min_idx] {
            min_idx = i;
        }
        if risks[i] > risks[max_idx] {
            max_idx = i;
        }
    }

    let mut min_state = points[min_idx];
    let mut min_risk = risks[min_idx];
    let mut max_state = points[max_idx];
    let mut max_risk = risks[max_idx];

    if grid.refine {
        let project = |v: &mut Vec<f64>| {
            let norm = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
            if norm > 1.0 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
            }
        };
        let mut scratch = Vec::new();
        {
            let objective = |v: &[f64]| {
                let s = BlochVector([v[0], v[1], v[2]]);
                let p = qubit_probs(&s, pom).expect("projected into the ball");
                ctx.risk_at_with(&p, &mut scratch)
            };
            let (x, fx) = grid
                .nelder_mead
                .minimize(objective, project, &min_state.0, 0.1);
            if fx < min_risk {
                min_risk = fx;
                min_state = BlochVector([x[0], x[1], x[2]]);
            }
        }
        {
            let objective = |v: &[f64]| {
                let s = BlochVector([v[0], v[1], v[2]]);
                let p = qubit_probs(&s, pom).expect("projected into the ball");
                -ctx.risk_at_with(&p, &mut scratch)
            };
            let (x, fx) = grid
                .nelder_mead
                .minimize(objective, project, &max_state.0, 0.1);
            if -fx > max_risk {
                max_risk = -fx;
                max_state = BlochVector([x[0], x[1], x[2]]);
            }
        }
    }

    Ok(RiskSurface {
        grid: points
            .into_iter()
            .zip(risks)
            .map(|(s, r)| (StatePoint::Bloch(s), r))
            .collect(),
        extrema: RiskExtrema {
            max_state: StatePoint::Bloch(max_state),
            max_risk,
            min_state: StatePoint::Bloch(min_state),
            min_risk,
        },
    })
}

// The borrow checker wants an explicit reborrow inside map_init.
fn p_ref(p: &ProbVector) -> &ProbVector {
    p
}

fn die_extrema(ctx: &RiskContext<'_>, grid: &GridSpec) -> Result<RiskSurface> {
    let k = ctx.pom.num_outcomes();
    let mut points: Vec<ProbVector> = Vec::with_capacity(k + 1 + grid.random_probes);
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        points.push(ProbVector::new(v)?);
    }
    points.push(ProbVector::uniform(k));
    for i in 0..grid.random_probes {
        let mut rng = CounterRng::stream(grid.seed, i as u64);
        // Exponential spacings give a uniform draw from the simplex.
        let mut v: Vec<f64> = (0..k).map(|_| -(1.0 - rng.next_f64()).ln()).collect();
        let total: f64 = v.iter().sum();
        for x in &mut v {
            *x /= total;
        }
        points.push(ProbVector::new(v)?);
    }

    let risks: Vec<f64> = points
        .par_iter()
        .map_init(Vec::new, |scratch, p| ctx.risk_at_with(p, scratch))
        .collect();

    let (mut min_idx, mut max_idx) = (0usize, 0usize);
    for i in 1..risks.len() {
        if risks[i] < risks[min_idx] {
            min_idx = i;
        }
        if risks[i] > risks[max_idx] {
            max_idx = i;
        }
    }

    let mut min_state = points[min_idx].clone();
    let mut min_risk = risks[min_idx];
    let mut max_state = points[max_idx].clone();
    let mut max_risk = risks[max_idx];

    if grid.refine {
        let project = |v: &mut Vec<f64>| {
            for x in v.iter_mut() {
                if *x < 0.0 {
                    *x = 0.0;
                }
            }
            let total: f64 = v.iter().sum();
            if total <= 0.0 {
                let u = 1.0 / v.len() as f64;
                for x in v.iter_mut() {
                    *x = u;
                }
            } else {
                for x in v.iter_mut() {
                    *x /= total;
                }
            }
        };
        let mut scratch = Vec::new();
        {
            let objective = |v: &[f64]| {
                let p = ProbVector::new(v.to_vec()).expect("projected onto the simplex");
                ctx.risk_at_with(&p, &mut scratch)
            };
            let (x, fx) = grid
                .nelder_mead
                .minimize(objective, project, min_state.as_slice(), 0.05);
            if fx < min_risk {
                min_risk = fx;
                min_state = ProbVector::new(x)?;
            }
        }
        {
            let objective = |v: &[f64]| {
                let p = ProbVector::new(v.to_vec()).expect("projected onto the simplex");
                -ctx.risk_at_with(&p, &mut scratch)
            };
            let (x, fx) = grid
                .nelder_mead
                .minimize(objective, project, max_state.as_slice(), 0.05);
            if -fx > max_risk {
                max_risk = -fx;
                max_state = ProbVector::new(x)?;
            }
        }
    }

    Ok(RiskSurface {
        grid: points
            .into_iter()
            .zip(risks)
            .map(|(p, r)| (StatePoint::Probs(p), r))
            .collect(),
        extrema: RiskExtrema {
            max_state: StatePoint::Probs(max_state),
            max_risk,
            min_state: StatePoint::Probs(min_state),
            min_risk,
        },
    })
}
