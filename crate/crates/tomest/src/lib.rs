//! Minimax point estimators for quantum state tomography.
//!
//! This crate builds symmetric measurements (the qubit tetrahedron
//! SIC-POM, trine, von Neumann, and the classical K-sided die), turns
//! click counts into point estimates, and measures estimators by their
//! exact mean-squared-error risk, enumerated over every possible data
//! set.
//!
//! The estimator family of interest starts from the constant-risk
//! minimax rule for the classical die,
//! `p_hat_k = a_N/K + nu_k b_N`, corrects it for quantum physicality by
//! admixing the maximally mixed state, and keeps the result full-rank
//! through a purity slack `epsilon_N` chosen by minimizing the
//! worst-case risk.
//!
//! # Quick start
//!
//! ```
//! use tomest::{build_pom, CountVector, PomKind, Rotation};
//! use tomest::estimator::quantum_minimax_full;
//!
//! let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity())?;
//! let counts = CountVector::new(vec![4, 0, 0, 0])?;
//! let result = quantum_minimax_full(&counts, 0.0, false)?;
//! assert!((result.lambda - 0.5).abs() < 1e-12);
//! assert!((result.p_hat.get(0) - 0.5).abs() < 1e-12);
//! # let _ = pom;
//! # Ok::<(), tomest::Error>(())
//! ```
//!
//! The guide under `book/` walks through the concepts chapter by
//! chapter; its code snippets run as doc-tests of the `tomest-guide`
//! crate.

pub mod error;
pub mod estimator;
pub mod figures;
pub mod linalg;
pub mod minimax;
pub mod optim;
pub mod pom;
pub mod risk;
pub mod rng;
pub mod sim;
pub mod state;

pub use error::{Error, Result};
pub use estimator::{
    estimate_add_beta, estimate_classical_minimax, estimate_ml_classical, estimate_ml_quantum,
    estimate_quantum_minimax, CountVector, EstimatorSpec, MinimaxCoefficients, PointEstimator,
};
pub use figures::{emit_figure_data, FigureId, FigureParams, FigureTable};
pub use linalg::HermitianOperator;
pub use minimax::{optimize_epsilon, worst_case_beta_classical, EpsilonFamily, EpsilonResult, SearchSpec};
pub use pom::{build_pom, dual_frame, validate_spom, PomKind, Rotation, SymmetricPOM, ValidationReport};
pub use risk::{
    average_risk, enumerate_outcomes, risk_exact, risk_extrema, DiscretePrior, GridSpec,
    OutcomeEnumeration, RiskContext, RiskSurface,
};
pub use rng::CounterRng;
pub use sim::{empirical_risk, sample_counts, SimConfig};
pub use state::{
    born_probs, check_physical, qubit_probs, reconstruct_state, squared_error, BlochVector,
    DensityOperator, ProbVector,
};
