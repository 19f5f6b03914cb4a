//! Symmetric probability operator measurements (S-POMs) and their dual
//! frames.
//!
//! An S-POM with K outcomes on a d-level system obeys
//! `tr{Pi_j Pi_k} = (d/K)[w d_jk + (1-w)(1-d_jk)/(K-1)]` with a single
//! symmetry parameter `1/K <= w <= 1`.  The rank-1 qubit kinds (von
//! Neumann, trine, tetrahedron) have `w = d/K`; the classical K-sided die
//! is the orthogonal projective measurement with `w = 1`.  The dual frame
//! `Lambda_k`, defined by `tr{Pi_j Lambda_k} = d_jk`, inverts Born's rule:
//! `rho = sum_k p_k Lambda_k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{add3, dot3, HermitianOperator};

/// Geometric identities of the closed-form constructions hold to near
/// machine precision; everything is validated against this.
pub const GEOMETRY_TOL: f64 = 1e-12;

/// The measurement families this crate constructs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PomKind {
    /// Projective qubit measurement along one axis (K = 2).
    VonNeumann,
    /// Three coplanar qubit directions at 120 degrees (K = 3).
    Trine,
    /// The qubit SIC-POM: four directions along regular-tetrahedron legs.
    Tetrahedron,
    /// Classical K-sided die: orthogonal rank-1 projectors in dimension K.
    ClassicalDie(usize),
}

impl PomKind {
    pub fn dim(&self) -> usize {
        match self {
            PomKind::ClassicalDie(k) => *k,
            _ => 2,
        }
    }

    pub fn num_outcomes(&self) -> usize {
        match self {
            PomKind::VonNeumann => 2,
            PomKind::Trine => 3,
            PomKind::Tetrahedron => 4,
            PomKind::ClassicalDie(k) => *k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PomKind::VonNeumann => "von_neumann",
            PomKind::Trine => "trine",
            PomKind::Tetrahedron => "tetrahedron",
            PomKind::ClassicalDie(_) => "die",
        }
    }
}

/// A proper rotation of the Bloch ball, used to orient the qubit kinds.
#[derive(Clone, Copy, Debug)]
pub struct Rotation([[f64; 3]; 3]);

impl Rotation {
    const ORTHOGONALITY_TOL: f64 = 1e-10;

    pub fn identity() -> Self {
        Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    /// Checks orthogonality and determinant +1 before accepting the matrix.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (dot - expected).abs() > Self::ORTHOGONALITY_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "orientation is not orthogonal: column dot ({i},{j}) = {dot}"
                    )));
                }
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (det - 1.0).abs() > Self::ORTHOGONALITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "orientation determinant is {det}, expected +1"
            )));
        }
        Ok(Rotation(m))
    }

    /// Rotation by `angle` radians about a coordinate axis (0 = x, 1 = y, 2 = z).
    pub fn about_axis(axis: usize, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let m = match axis {
            0 => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
            1 => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
            2 => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            _ => panic!("axis must be 0, 1, or 2"),
        };
        Rotation(m)
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }
}

/// A symmetric POM together with its standard dual frame.
///
/// Immutable after construction; cheap to share read-only across threads.
#[derive(Clone, Debug)]
pub struct SymmetricPOM {
    kind: PomKind,
    dim: usize,
    num_outcomes: usize,
    symmetry: f64,
    outcomes: Vec<HermitianOperator>,
    duals: Vec<HermitianOperator>,
    directions: Option<Vec<[f64; 3]>>,
}

impl SymmetricPOM {
    pub fn kind(&self) -> PomKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_outcomes(&self) -> usize {
        self.num_outcomes
    }

    /// The symmetry parameter w of the outcome Gram matrix.
    pub fn symmetry(&self) -> f64 {
        self.symmetry
    }

    pub fn outcomes(&self) -> &[HermitianOperator] {
        &self.outcomes
    }

    pub fn duals(&self) -> &[HermitianOperator] {
        &self.duals
    }

    /// Unit Bloch directions of the outcomes; present for qubit kinds only.
    pub fn directions(&self) -> Option<&[[f64; 3]]> {
        self.directions.as_deref()
    }

    /// True when every state is recoverable from the outcome probabilities.
    pub fn is_informationally_complete(&self) -> bool {
        matches!(self.kind, PomKind::ClassicalDie(_)) || self.num_outcomes == self.dim * self.dim
    }

    /// Assembles a POM from parts, checking shapes but not the geometric
    /// identities; run [`validate_spom`] for those.
    pub fn from_parts(
        kind: PomKind,
        symmetry: f64,
        outcomes: Vec<HermitianOperator>,
        duals: Vec<HermitianOperator>,
        directions: Option<Vec<[f64; 3]>>,
    ) -> Result<Self> {
        let dim = kind.dim();
        let num_outcomes = kind.num_outcomes();
        if outcomes.len() != num_outcomes || duals.len() != num_outcomes {
            return Err(Error::DimensionMismatch(format!(
                "expected {num_outcomes} outcomes and duals, got {} and {}",
                outcomes.len(),
                duals.len()
            )));
        }
        if let Some(dirs) = &directions {
            if dirs.len() != num_outcomes {
                return Err(Error::DimensionMismatch(format!(
                    "expected {num_outcomes} directions, got {}",
                    dirs.len()
                )));
            }
        }
        for op in outcomes.iter().chain(duals.iter()) {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "operator dimension {} does not match POM dimension {dim}",
                    op.dim()
                )));
            }
        }
        Ok(Self {
            kind,
            dim,
            num_outcomes,
            symmetry,
            outcomes,
            duals,
            directions,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("POM serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("unparseable POM JSON: {e}")))
    }
}

/// The direction columns for the rank-1 qubit kinds: z-axis pair for K = 2,
/// the symmetric trine for K = 3, regular-tetrahedron legs for K = 4.
fn canonical_directions(kind: PomKind) -> Vec<[f64; 3]> {
    match kind {
        PomKind::VonNeumann => vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        PomKind::Trine => {
            let s = 1.0 / 6.0_f64.sqrt();
            vec![
                [2.0 * s, -s, -s],
                [-s, 2.0 * s, -s],
                [-s, -s, 2.0 * s],
            ]
        }
        PomKind::Tetrahedron => {
            let s = 1.0 / 3.0_f64.sqrt();
            vec![
                [s, -s, -s],
                [-s, s, -s],
                [-s, -s, s],
                [s, s, s],
            ]
        }
        PomKind::ClassicalDie(_) => unreachable!("die has no Bloch directions"),
    }
}

/// Tetrahedron legs in the reference orientation, shared with the
/// qubit estimators.
pub(crate) fn tetrahedron_directions() -> [[f64; 3]; 4] {
    let s = 1.0 / 3.0_f64.sqrt();
    [[s, -s, -s], [-s, s, -s], [-s, -s, s], [s, s, s]]
}

/// Constructs a POM of the requested kind.
///
/// For qubit kinds the outcomes are `Pi_k = (1 + e_k . sigma)/K` with the
/// canonical directions rotated by `orientation`; the die ignores the
/// orientation and uses the basis projectors `|k><k|`.
pub fn build_pom(kind: PomKind, orientation: &Rotation) -> Result<SymmetricPOM> {
    match kind {
        PomKind::ClassicalDie(k) => {
            if k < 2 {
                return Err(Error::InvalidArgument(format!(
                    "a die needs at least 2 faces, got {k}"
                )));
            }
            let mut outcomes = Vec::with_capacity(k);
            for i in 0..k {
                let mut diag = vec![0.0; k];
                diag[i] = 1.0;
                outcomes.push(HermitianOperator::from_diagonal(&diag));
            }
            let duals = outcomes.clone();
            SymmetricPOM::from_parts(kind, 1.0, outcomes, duals, None)
        }
        _ => {
            let k = kind.num_outcomes();
            let directions: Vec<[f64; 3]> = canonical_directions(kind)
                .into_iter()
                .map(|e| orientation.apply(e))
                .collect();
            let outcomes: Vec<HermitianOperator> = directions
                .iter()
                .map(|&e| {
                    let inv_k = 1.0 / k as f64;
                    HermitianOperator::from_pauli(inv_k, [e[0] * inv_k, e[1] * inv_k, e[2] * inv_k])
                })
                .collect();
            let w = 2.0 / k as f64; // rank-1: w = d/K
            let duals = duals_from_parts(2, k, w, &outcomes)?;
            SymmetricPOM::from_parts(kind, w, outcomes, duals, Some(directions))
        }
    }
}

/// The standard dual frame
/// `Lambda_k = 1/d + (K-1)K/((wK-1)d) (Pi_k - 1/K)`.
///
/// For the tetrahedron this reduces to `Lambda_k = 6 Pi_k - 1`; for the
/// die, `Lambda_k = Pi_k`.
pub fn dual_frame(pom: &SymmetricPOM) -> Result<Vec<HermitianOperator>> {
    duals_from_parts(pom.dim, pom.num_outcomes, pom.symmetry, &pom.outcomes)
}

fn duals_from_parts(
    dim: usize,
    num_outcomes: usize,
    symmetry: f64,
    outcomes: &[HermitianOperator],
) -> Result<Vec<HermitianOperator>> {
    let d = dim as f64;
    let k = num_outcomes as f64;
    let denom = symmetry * k - 1.0;
    if denom <= 1e-12 {
        return Err(Error::DegenerateFrame(denom));
    }
    let coeff = (k - 1.0) * k / (denom * d);
    Ok(outcomes
        .iter()
        .map(|pi| {
            pi.sub(&HermitianOperator::scaled_identity(dim, 1.0 / k))
                .scale(coeff)
                .add_scaled_identity(1.0 / d)
        })
        .collect())
}

/// One named check of [`validate_spom`].
#[derive(Clone, Debug, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    /// Largest residual observed by the check (0 when exactly satisfied).
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Verifies the geometric identities of an S-POM and reports per-check
/// residuals.  Failures are report entries, never errors.
pub fn validate_spom(pom: &SymmetricPOM) -> ValidationReport {
    let d = pom.dim;
    let k = pom.num_outcomes;
    let df = d as f64;
    let kf = k as f64;
    let w = pom.symmetry;
    let mut checks = Vec::new();

    // Outcome positivity.
    let mut worst_neg: f64 = 0.0;
    for pi in &pom.outcomes {
        let min = pi.min_eigenvalue();
        worst_neg = worst_neg.max(-min);
    }
    checks.push(ValidationCheck {
        name: "positivity".into(),
        passed: worst_neg <= GEOMETRY_TOL,
        residual: worst_neg.max(0.0),
        detail: None,
    });

    // Completeness: sum_k Pi_k = 1.
    let sum = HermitianOperator::weighted_sum(&vec![1.0; k], &pom.outcomes);
    let completeness = sum.sub(&HermitianOperator::identity(d)).max_abs_entry();
    checks.push(ValidationCheck {
        name: "completeness".into(),
        passed: completeness <= GEOMETRY_TOL,
        residual: completeness,
        detail: None,
    });

    // Gram matrix and outcome traces against the symmetry form.
    let mut gram_res: f64 = 0.0;
    for (j, pj) in pom.outcomes.iter().enumerate() {
        gram_res = gram_res.max((pj.trace() - df / kf).abs());
        for (l, pl) in pom.outcomes.iter().enumerate() {
            let expected = if j == l {
                df / kf * w
            } else {
                df / kf * (1.0 - w) / (kf - 1.0)
            };
            gram_res = gram_res.max((pj.hs_inner(pl) - expected).abs());
        }
    }
    checks.push(ValidationCheck {
        name: "gram".into(),
        passed: gram_res <= GEOMETRY_TOL,
        residual: gram_res,
        detail: None,
    });

    // Dual duality: tr{Pi_j Lambda_l} = d_jl.
    let mut dual_res: f64 = 0.0;
    for (j, pj) in pom.outcomes.iter().enumerate() {
        for (l, ll) in pom.duals.iter().enumerate() {
            let expected = if j == l { 1.0 } else { 0.0 };
            dual_res = dual_res.max((pj.hs_inner(ll) - expected).abs());
        }
    }
    checks.push(ValidationCheck {
        name: "duality".into(),
        passed: dual_res <= GEOMETRY_TOL,
        residual: dual_res,
        detail: None,
    });

    // Pyramid rank: the K edge vectors Pi_k - 1/K span a (K-1)-dimensional
    // space.  Their Gram matrix must have K-1 equal eigenvalues
    // c K/(K-1) with c = (d/K)(wK-1)/K, and a single zero.
    let edges: Vec<HermitianOperator> = pom
        .outcomes
        .iter()
        .map(|pi| pi.sub(&HermitianOperator::scaled_identity(d, 1.0 / kf)))
        .collect();
    let mut gram_entries = Vec::with_capacity(k * k);
    for ei in &edges {
        for ej in &edges {
            gram_entries.push(Complex64::new(ei.hs_inner(ej), 0.0));
        }
    }
    let gram = HermitianOperator::from_entries(k, gram_entries)
        .expect("edge Gram matrix is symmetric by construction");
    let eig = gram.eigenvalues();
    let rank_tol = 1e-9;
    let rank = eig.iter().filter(|&&x| x > rank_tol).count();
    let c = (df / kf) * (w * kf - 1.0) / kf;
    let expected_nonzero = c * kf / (kf - 1.0);
    let mut pyramid_res = eig[0].abs(); // smallest eigenvalue should vanish
    for &x in &eig[1..] {
        pyramid_res = pyramid_res.max((x - expected_nonzero).abs());
    }
    checks.push(ValidationCheck {
        name: "pyramid_rank".into(),
        passed: rank == k - 1 && pyramid_res <= GEOMETRY_TOL,
        residual: pyramid_res,
        detail: Some(format!("rank={rank}")),
    });

    // Direction identities: sum_k e_k = 0 and
    // e_j . e_k = d_jk - (1 - d_jk)/(K-1).
    if let Some(dirs) = &pom.directions {
        let mut res: f64 = 0.0;
        let mut total = [0.0; 3];
        for &e in dirs {
            total = add3(total, e);
        }
        res = res.max(total[0].abs()).max(total[1].abs()).max(total[2].abs());
        for (j, &ej) in dirs.iter().enumerate() {
            for (l, &el) in dirs.iter().enumerate() {
                let expected = if j == l { 1.0 } else { -1.0 / (kf - 1.0) };
                res = res.max((dot3(ej, el) - expected).abs());
            }
        }
        checks.push(ValidationCheck {
            name: "directions".into(),
            passed: res <= GEOMETRY_TOL,
            residual: res,
            detail: None,
        });
    }

    // Symmetry parameter range 1/K <= w <= 1.
    let range_res = (1.0 / kf - w).max(w - 1.0).max(0.0);
    checks.push(ValidationCheck {
        name: "symmetry_range".into(),
        passed: range_res <= GEOMETRY_TOL,
        residual: range_res,
        detail: None,
    });

    ValidationReport { checks }
}

// On-disk layout: {"kind":"tetrahedron","dim":2,"K":4,"w":0.5,
// "directions":[[..],..],"outcomes":[[[re,im],..],..],"duals":[..]}
#[derive(Serialize, Deserialize)]
struct PomJson {
    kind: String,
    dim: usize,
    #[serde(rename = "K")]
    k: usize,
    w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    directions: Option<Vec<[f64; 3]>>,
    outcomes: Vec<Vec<[f64; 2]>>,
    duals: Vec<Vec<[f64; 2]>>,
}

impl Serialize for SymmetricPOM {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PomJson {
            kind: self.kind.name().to_string(),
            dim: self.dim,
            k: self.num_outcomes,
            w: self.symmetry,
            directions: self.directions.clone(),
            outcomes: self.outcomes.iter().map(|m| m.to_pairs()).collect(),
            duals: self.duals.iter().map(|m| m.to_pairs()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricPOM {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = PomJson::deserialize(deserializer)?;
        let kind = match raw.kind.as_str() {
            "von_neumann" => PomKind::VonNeumann,
            "trine" => PomKind::Trine,
            "tetrahedron" => PomKind::Tetrahedron,
            "die" => PomKind::ClassicalDie(raw.k),
            other => return Err(D::Error::custom(format!("unknown POM kind {other:?}"))),
        };
        if kind.dim() != raw.dim {
            return Err(D::Error::custom(format!(
                "kind {} implies dimension {}, file says {}",
                raw.kind,
                kind.dim(),
                raw.dim
            )));
        }
        let parse = |mats: Vec<Vec<[f64; 2]>>| -> std::result::Result<Vec<HermitianOperator>, D::Error> {
            mats.into_iter()
                .map(|m| HermitianOperator::from_pairs(raw.dim, &m).map_err(D::Error::custom))
                .collect()
        };
        let outcomes = parse(raw.outcomes)?;
        let duals = parse(raw.duals)?;
        SymmetricPOM::from_parts(kind, raw.w, outcomes, duals, raw.directions).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm3;

    fn all_kinds() -> Vec<PomKind> {
        vec![
            PomKind::VonNeumann,
            PomKind::Trine,
            PomKind::Tetrahedron,
            PomKind::ClassicalDie(4),
            PomKind::ClassicalDie(6),
        ]
    }

    #[test]
    fn tetrahedron_directions_match_reference_columns() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        let s = 1.0 / 3.0_f64.sqrt();
        let expected = [[s, -s, -s], [-s, s, -s], [-s, -s, s], [s, s, s]];
        for (got, want) in pom.directions().unwrap().iter().zip(expected) {
            for i in 0..3 {
                assert!((got[i] - want[i]).abs() < 1e-15);
            }
        }
        // a_j . a_k = 4/3 d_jk - 1/3
        let dirs = pom.directions().unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let expected = if j == k { 1.0 } else { -1.0 / 3.0 };
                assert!((dot3(dirs[j], dirs[k]) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn die_outcomes_are_basis_projectors() {
        let pom = build_pom(PomKind::ClassicalDie(4), &Rotation::identity()).unwrap();
        assert!((pom.symmetry() - 1.0).abs() < 1e-15);
        for (k, pi) in pom.outcomes().iter().enumerate() {
            for i in 0..4 {
                for j in 0..4 {
                    let expected = if i == k && j == k { 1.0 } else { 0.0 };
                    assert!((pi.get(i, j).re - expected).abs() < 1e-15);
                    assert!(pi.get(i, j).im.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn die_requires_two_faces() {
        assert!(build_pom(PomKind::ClassicalDie(1), &Rotation::identity()).is_err());
    }

    #[test]
    fn bad_orientation_is_rejected() {
        let m = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.1], [0.0, 0.0, 1.0]];
        assert!(Rotation::new(m).is_err());
        // Reflection: orthogonal but determinant -1.
        let refl = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]];
        assert!(Rotation::new(refl).is_err());
    }

    #[test]
    fn tetrahedron_dual_is_six_pi_minus_one() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        for (pi, lambda) in pom.outcomes().iter().zip(pom.duals()) {
            let expected = pi.scale(6.0).add_scaled_identity(-1.0);
            assert!(lambda.sub(&expected).max_abs_entry() < 1e-14);
        }
    }

    #[test]
    fn die_dual_equals_outcome() {
        let pom = build_pom(PomKind::ClassicalDie(5), &Rotation::identity()).unwrap();
        for (pi, lambda) in pom.outcomes().iter().zip(pom.duals()) {
            assert!(lambda.sub(pi).max_abs_entry() < 1e-15);
        }
    }

    #[test]
    fn tetrahedron_dual_gram() {
        // tr{Lambda_j Lambda_k} = 5 d_jk - (1 - d_jk), from expanding
        // 36 tr{Pi_j Pi_k} - 6 tr{Pi_j} - 6 tr{Pi_k} + tr{1}.
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let expected = if j == k { 5.0 } else { -1.0 };
                let got = pom.duals()[j].hs_inner(&pom.duals()[k]);
                assert!((got - expected).abs() < 1e-13, "({j},{k}): {got}");
            }
        }
    }

    #[test]
    fn all_kinds_validate_clean() {
        for kind in all_kinds() {
            let pom = build_pom(kind, &Rotation::identity()).unwrap();
            let report = validate_spom(&pom);
            assert!(report.all_passed(), "{kind:?}: {report:?}");
            assert!(report.max_residual() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn duality_is_exact_for_all_kinds() {
        for kind in all_kinds() {
            let pom = build_pom(kind, &Rotation::identity()).unwrap();
            let duals = dual_frame(&pom).unwrap();
            for (j, pi) in pom.outcomes().iter().enumerate() {
                for (l, lambda) in duals.iter().enumerate() {
                    let expected = if j == l { 1.0 } else { 0.0 };
                    assert!((pi.hs_inner(lambda) - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rank_one_kinds_are_subnormalized_projectors() {
        // Pi_k^2 = (d/K) Pi_k for the rank-1 qubit kinds.
        for kind in [PomKind::VonNeumann, PomKind::Trine, PomKind::Tetrahedron] {
            let pom = build_pom(kind, &Rotation::identity()).unwrap();
            let ratio = pom.dim() as f64 / pom.num_outcomes() as f64;
            for pi in pom.outcomes() {
                // tr{Pi^2} must equal (d/K) tr{Pi} and eigenvalues {0, d/K}.
                assert!((pi.hs_inner(pi) - ratio * pi.trace()).abs() < 1e-14);
                let eig = pi.eigenvalues();
                assert!(eig[0].abs() < 1e-13);
                assert!((eig[1] - ratio).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn scaled_pyramid_edges_have_unit_norm() {
        for kind in all_kinds() {
            let pom = build_pom(kind, &Rotation::identity()).unwrap();
            let d = pom.dim() as f64;
            let k = pom.num_outcomes() as f64;
            let scale = k / ((pom.symmetry() * k - 1.0) * d).sqrt();
            for pi in pom.outcomes() {
                let edge = pi
                    .sub(&HermitianOperator::scaled_identity(pom.dim(), 1.0 / k))
                    .scale(scale);
                assert!((edge.frobenius_norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_leaves_gram_invariant() {
        let base = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        let rot = Rotation::about_axis(2, 0.7);
        let rotated = build_pom(PomKind::Tetrahedron, &rot).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let a = base.outcomes()[j].hs_inner(&base.outcomes()[k]);
                let b = rotated.outcomes()[j].hs_inner(&rotated.outcomes()[k]);
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(validate_spom(&rotated).all_passed());
        for e in rotated.directions().unwrap() {
            assert!((norm3(*e) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_outcome_fails_completeness() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        let mut outcomes = pom.outcomes().to_vec();
        outcomes[0] = outcomes[0].scale(1.01);
        let tweaked = SymmetricPOM::from_parts(
            PomKind::Tetrahedron,
            pom.symmetry(),
            outcomes,
            pom.duals().to_vec(),
            pom.directions().map(|d| d.to_vec()),
        )
        .unwrap();
        let report = validate_spom(&tweaked);
        assert!(!report.check("completeness").unwrap().passed);
    }

    #[test]
    fn trine_pyramid_rank_is_two() {
        let pom = build_pom(PomKind::Trine, &Rotation::identity()).unwrap();
        let report = validate_spom(&pom);
        let check = report.check("pyramid_rank").unwrap();
        assert!(check.passed);
        assert_eq!(check.detail.as_deref(), Some("rank=2"));
    }

    #[test]
    fn degenerate_pom_has_no_dual_frame() {
        // Outcomes 1/K: w = 1/K exactly, so wK - 1 = 0.
        let k = 3;
        let outcomes: Vec<_> = (0..k)
            .map(|_| HermitianOperator::scaled_identity(2, 1.0 / k as f64))
            .collect();
        let pom = SymmetricPOM::from_parts(
            PomKind::Trine,
            1.0 / k as f64,
            outcomes.clone(),
            outcomes,
            None,
        )
        .unwrap();
        assert!(matches!(dual_frame(&pom), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn json_round_trip() {
        for kind in [PomKind::Tetrahedron, PomKind::ClassicalDie(4)] {
            let pom = build_pom(kind, &Rotation::identity()).unwrap();
            let text = pom.to_json();
            let back = SymmetricPOM::from_json(&text).unwrap();
            assert_eq!(back.kind(), pom.kind());
            assert!((back.symmetry() - pom.symmetry()).abs() < 1e-15);
            for (a, b) in pom.outcomes().iter().zip(back.outcomes()) {
                assert!(a.sub(b).max_abs_entry() < 1e-15);
            }
            assert!(validate_spom(&back).all_passed());
        }
    }

    #[test]
    fn tetrahedron_json_has_expected_fields() {
        let pom = build_pom(PomKind::Tetrahedron, &Rotation::identity()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&pom.to_json()).unwrap();
        assert_eq!(value["kind"], "tetrahedron");
        assert_eq!(value["dim"], 2);
        assert_eq!(value["K"], 4);
        assert_eq!(value["w"], 0.5);
        assert_eq!(value["directions"].as_array().unwrap().len(), 4);
    }
}
