//! Numeric tables behind the paper-style figures: likelihood narrowing
//! with N, risk extrema versus N for the estimator families, and the
//! optimized slack `epsilon_N` versus N.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimax::{optimize_epsilon_with, EpsilonFamily, SearchSpec};
use crate::pom::{build_pom, PomKind, Rotation};
use crate::risk::{enumerate_outcomes, risk_extrema_with, RiskContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
}

/// A rectangular table of named numeric columns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FigureTable {
    pub figure_id: FigureId,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    fn new(figure_id: FigureId, columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        for row in &rows {
            if row.len() != columns.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row has {} entries, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("non-finite table entry".into()));
            }
        }
        Ok(FigureTable {
            figure_id,
            columns,
            rows,
        })
    }

    /// Comma-separated with a header row and LF line endings; floats print
    /// in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(figure_id: FigureId, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty CSV".into()))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(str::parse::<f64>).collect();
            rows.push(row.map_err(|e| Error::InvalidArgument(format!("bad CSV cell: {e}")))?);
        }
        FigureTable::new(figure_id, columns, rows)
    }
}

/// Likelihood-vs-p curves for single-detector coin data `D_N ~ {N, 0}`.
#[derive(Clone, Debug)]
pub struct Fig1Params {
    pub n_values: Vec<u64>,
    pub grid_points: usize,
}

impl Default for Fig1Params {
    fn default() -> Self {
        Fig1Params {
            n_values: vec![1, 2, 5, 10, 100],
            grid_points: 201,
        }
    }
}

/// Risk extrema per N for the four qubit estimator families.
#[derive(Clone, Debug)]
pub struct Fig2Params {
    pub n_values: Vec<u64>,
    pub search: SearchSpec,
}

impl Default for Fig2Params {
    fn default() -> Self {
        Fig2Params {
            n_values: vec![1, 2, 4, 7, 10, 15, 20, 30, 50, 100],
            search: SearchSpec::default(),
        }
    }
}

/// Optimized slack per N for both epsilon families.
#[derive(Clone, Debug)]
pub struct Fig3Params {
    pub n_values: Vec<u64>,
    pub search: SearchSpec,
}

impl Default for Fig3Params {
    fn default() -> Self {
        Fig3Params {
            n_values: vec![1, 2, 4, 7, 10, 15, 20, 30, 50, 100],
            search: SearchSpec::default(),
        }
    }
}

/// Parameters for [`emit_figure_data`].
#[derive(Clone, Debug)]
pub enum FigureParams {
    Fig1(Fig1Params),
    Fig2(Fig2Params),
    Fig3(Fig3Params),
}

pub fn emit_figure_data(params: &FigureParams) -> Result<FigureTable> {
    match params {
        FigureParams::Fig1(p) => emit_fig1(p),
        FigureParams::Fig2(p) => emit_fig2(p),
        FigureParams::Fig3(p) => emit_fig3(p),
    }
}

/// `L_N(p) = p^N`, normalized to peak 1 at p = 1.
pub fn emit_fig1(params: &Fig1Params) -> Result<FigureTable> {
    if params.grid_points < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
    }
    if params.n_values.iter().any(|&n| n < 1) {
        return Err(Error::InvalidArgument("N values must be at least 1".into()));
    }
    let mut columns = vec!["p".to_string()];
    columns.extend(params.n_values.iter().map(|n| format!("L_{n}")));
    let rows = (0..params.grid_points)
        .map(|i| {
            let p = i as f64 / (params.grid_points - 1) as f64;
            let mut row = vec![p];
            row.extend(params.n_values.iter().map(|&n| p.powi(n as i32)));
            row
        })
        .collect();
    FigureTable::new(FigureId::Fig1, columns, rows)
}

/// Min and max risk over qubit states for: exact quantum ML, the admixed
/// minimax estimator at zero slack, the same at its optimized slack, and
/// epsilon-restricted ML at its optimized slack.
pub fn emit_fig2(params: &Fig2Params) -> Result<FigureTable> {
    let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity())?;
    let columns: Vec<String> = [
        "N",
        "ml_quantum_min",
        "ml_quantum_max",
        "quantum_minimax0_min",
        "quantum_minimax0_max",
        "quantum_minimax_star_min",
        "quantum_minimax_star_max",
        "ml_quantum_eps_min",
        "ml_quantum_eps_max",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();

    let mut rows = Vec::with_capacity(params.n_values.len());
    for &n in &params.n_values {
        let enumeration = enumerate_outcomes(n, 4)?;
        let eps_mm = optimize_epsilon_with(EpsilonFamily::QuantumMinimax, &pom, &enumeration, &params.search)?;
        let eps_ml = optimize_epsilon_with(EpsilonFamily::MlQuantum, &pom, &enumeration, &params.search)?;

        let surface_of = |spec: crate::estimator::EstimatorSpec| -> Result<(f64, f64)> {
            let ctx = RiskContext::new(&spec, &pom, &enumeration)?;
            let s = risk_extrema_with(&ctx, &params.search.grid)?;
            Ok((s.extrema.min_risk, s.extrema.max_risk))
        };
        let ml = surface_of(EpsilonFamily::MlQuantum.spec(0.0))?;
        let mm0 = surface_of(EpsilonFamily::QuantumMinimax.spec(0.0))?;
        let mm_star = surface_of(EpsilonFamily::QuantumMinimax.spec(eps_mm.epsilon_star))?;
        let ml_star = surface_of(EpsilonFamily::MlQuantum.spec(eps_ml.epsilon_star))?;

        rows.push(vec![
            n as f64, ml.0, ml.1, mm0.0, mm0.1, mm_star.0, mm_star.1, ml_star.0, ml_star.1,
        ]);
    }
    FigureTable::new(FigureId::Fig2, columns, rows)
}

/// Optimized slack `epsilon_N` per N for both families.
pub fn emit_fig3(params: &Fig3Params) -> Result<FigureTable> {
    let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity())?;
    let columns: Vec<String> = ["N", "epsilon_quantum_minimax", "epsilon_ml_quantum"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::with_capacity(params.n_values.len());
    for &n in &params.n_values {
        let enumeration = enumerate_outcomes(n, 4)?;
        let mm = optimize_epsilon_with(EpsilonFamily::QuantumMinimax, &pom, &enumeration, &params.search)?;
        let ml = optimize_epsilon_with(EpsilonFamily::MlQuantum, &pom, &enumeration, &params.search)?;
        rows.push(vec![n as f64, mm.epsilon_star, ml.epsilon_star]);
    }
    FigureTable::new(FigureId::Fig3, columns, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_single_toss_is_a_straight_line() {
        let table = emit_fig1(&Fig1Params {
            n_values: vec![1],
            grid_points: 11,
        })
        .unwrap();
        assert_eq!(table.columns, vec!["p", "L_1"]);
        for row in &table.rows {
            assert!((row[1] - row[0]).abs() < 1e-15);
        }
        let last = table.rows.last().unwrap();
        assert_eq!(last[0], 1.0);
        assert_eq!(last[1], 1.0);
    }

    #[test]
    fn fig1_curves_peak_at_one() {
        let table = emit_fig1(&Fig1Params::default()).unwrap();
        let last = table.rows.last().unwrap();
        for &value in &last[1..] {
            assert_eq!(value, 1.0);
        }
        // Larger N decays faster at p = 0.5.
        let mid = &table.rows[table.rows.len() / 2];
        for pair in mid[1..].windows(2) {
            assert!(pair[1] < pair[0]);
        }
    }

    #[test]
    fn csv_round_trip() {
        let table = emit_fig1(&Fig1Params {
            n_values: vec![1, 2],
            grid_points: 5,
        })
        .unwrap();
        let csv = table.to_csv();
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
        let back = FigureTable::from_csv(FigureId::Fig1, &csv).unwrap();
        assert_eq!(back.columns, table.columns);
        assert_eq!(back.rows, table.rows);
    }

    #[test]
    fn rejects_non_finite_rows() {
        let err = FigureTable::new(
            FigureId::Fig1,
            vec!["a".into()],
            vec![vec![f64::INFINITY]],
        );
        assert!(err.is_err());
    }
}
