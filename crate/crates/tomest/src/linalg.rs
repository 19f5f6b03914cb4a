//! Dense complex Hermitian matrices at qubit-to-few-level scale (d <= 8),
//! with a self-contained cyclic Jacobi eigensolver.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Convergence target for the Jacobi sweeps (off-diagonal Frobenius norm).
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// A d x d complex matrix equal to its own conjugate transpose.
///
/// Stored dense and row-major; all measurement outcomes, dual-frame
/// operators, and statistical operators in this crate live here.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    /// Builds from row-major entries, verifying hermiticity entrywise.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim} = {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                let diff = entries[i * dim + j] - entries[j * dim + i].conj();
                if diff.norm() > HERMITICITY_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not Hermitian: |A[{i},{j}] - conj(A[{j},{i}])| = {:e}",
                        diff.norm()
                    )));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// `c * 1` for real `c`.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(c, 0.0);
        }
        m
    }

    /// Qubit operator `w0 * 1 + v . sigma` in the Pauli basis.
    pub fn from_pauli(w0: f64, v: [f64; 3]) -> Self {
        let [x, y, z] = v;
        Self {
            dim: 2,
            entries: vec![
                Complex64::new(w0 + z, 0.0),
                Complex64::new(x, -y),
                Complex64::new(x, y),
                Complex64::new(w0 - z, 0.0),
            ],
        }
    }

    /// Diagonal matrix from real values.
    pub fn from_diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * dim + i] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).sum()
    }

    /// Hilbert-Schmidt inner product `tr{A B}`; real for Hermitian pairs.
    pub fn hs_inner(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "hs_inner: dimension mismatch");
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                // tr{AB} = sum_ij A_ij B_ji; B_ji = conj(B_ij).
                acc += (self.entries[i * d + j] * other.entries[j * d + i]).re;
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry (real and imaginary parts considered jointly).
    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "add: dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self { dim: self.dim, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "sub: dimension mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self { dim: self.dim, entries }
    }

    pub fn scale(&self, c: f64) -> Self {
        let entries = self.entries.iter().map(|a| a * c).collect();
        Self { dim: self.dim, entries }
    }

    /// `A + c * 1`.
    pub fn add_scaled_identity(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] += c;
        }
        m
    }

    /// Weighted sum `sum_k w_k A_k`; all operators must share a dimension.
    pub fn weighted_sum(weights: &[f64], ops: &[Self]) -> Self {
        assert_eq!(weights.len(), ops.len(), "weighted_sum: length mismatch");
        assert!(!ops.is_empty(), "weighted_sum: no operators");
        let mut acc = Self::zeros(ops[0].dim);
        for (w, op) in weights.iter().zip(ops) {
            for (a, b) in acc.entries.iter_mut().zip(&op.entries) {
                *a += b * *w;
            }
        }
        acc
    }

    /// Eigenvalues in ascending order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen_system().0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Full eigensystem: ascending eigenvalues and the matching unitary of
    /// column eigenvectors (row-major, column j is eigenvector j).
    pub fn eigen_system(&self) -> (Vec<f64>, Vec<Complex64>) {
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut v = Self::identity(d).entries;

        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a, d) < JACOBI_TOL {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let g = a[p * d + q];
                    let gn = g.norm();
                    if gn < 1e-300 {
                        continue;
                    }
                    let phase = g / gn;
                    let alpha = a[p * d + p].re;
                    let beta = a[q * d + q].re;
                    let theta = (beta - alpha) / (2.0 * gn);
                    let t = if theta == 0.0 {
                        1.0
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let sp = phase * s; // s * e^{i phi}
                    // Columns: A <- A R with R_pp = c, R_pq = sp, R_qp = -conj(sp), R_qq = c.
                    for i in 0..d {
                        let aip = a[i * d + p];
                        let aiq = a[i * d + q];
                        a[i * d + p] = aip * c - aiq * sp.conj();
                        a[i * d + q] = aip * sp + aiq * c;
                    }
                    // Rows: A <- R^H A.
                    for j in 0..d {
                        let apj = a[p * d + j];
                        let aqj = a[q * d + j];
                        a[p * d + j] = apj * c - aqj * sp;
                        a[q * d + j] = apj * sp.conj() + aqj * c;
                    }
                    // Accumulate eigenvectors: V <- V R.
                    for i in 0..d {
                        let vip = v[i * d + p];
                        let viq = v[i * d + q];
                        v[i * d + p] = vip * c - viq * sp.conj();
                        v[i * d + q] = vip * sp + viq * c;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..d).collect();
        let diag: Vec<f64> = (0..d).map(|i| a[i * d + i].re).collect();
        order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

        let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let mut vectors = vec![Complex64::ZERO; d * d];
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..d {
                vectors[row * d + new_col] = v[row * d + old_col];
            }
        }
        (eigenvalues, vectors)
    }

    /// Row-major `[re, im]` pairs, the on-disk matrix layout.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.entries.iter().map(|e| [e.re, e.im]).collect()
    }

    pub fn from_pairs(dim: usize, pairs: &[[f64; 2]]) -> Result<Self> {
        let entries = pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Self::from_entries(dim, entries)
    }
}

fn off_diagonal_norm(a: &[Complex64], d: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a[i * d + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

// Small real 3-vector helpers shared by the Bloch-ball code paths.

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn scale3(a: [f64; 3], c: f64) -> [f64; 3] {
    [a[0] * c, a[1] * c, a[2] * c]
}

pub(crate) fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let entries = vec![c(1.0, 0.0), c(0.5, 0.0), c(0.4, 0.0), c(1.0, 0.0)];
        assert!(HermitianOperator::from_entries(2, entries).is_err());
    }

    #[test]
    fn pauli_eigenvalues() {
        for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            let sigma = HermitianOperator::from_pauli(0.0, v);
            let eig = sigma.eigenvalues();
            assert!((eig[0] + 1.0).abs() < 1e-13);
            assert!((eig[1] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn eigen_system_reconstructs_matrix() {
        // Deterministic pseudo-random Hermitian 5x5.
        let d = 5;
        let mut x = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut entries = vec![Complex64::ZERO; d * d];
        for i in 0..d {
            entries[i * d + i] = c(next(), 0.0);
            for j in (i + 1)..d {
                let z = c(next(), next());
                entries[i * d + j] = z;
                entries[j * d + i] = z.conj();
            }
        }
        let m = HermitianOperator::from_entries(d, entries).unwrap();
        let (eig, vecs) = m.eigen_system();

        // A v_j = lambda_j v_j for every column.
        for j in 0..d {
            for i in 0..d {
                let mut av = Complex64::ZERO;
                for k in 0..d {
                    av += m.get(i, k) * vecs[k * d + j];
                }
                let diff = av - vecs[i * d + j] * eig[j];
                assert!(diff.norm() < 1e-11, "residual {:e}", diff.norm());
            }
        }
        // Eigenvalue sum equals the trace.
        let sum: f64 = eig.iter().sum();
        assert!((sum - m.trace()).abs() < 1e-11);
        // Ascending order.
        for w in eig.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn hs_inner_matches_direct_trace() {
        let a = HermitianOperator::from_pauli(0.5, [0.1, -0.2, 0.7]);
        let b = HermitianOperator::from_pauli(0.25, [0.3, 0.0, -0.4]);
        // tr{(w0 + v.sigma)(u0 + u.sigma)} = 2(w0 u0 + v.u)
        let expected = 2.0 * (0.5 * 0.25 + 0.1 * 0.3 + 0.2 * 0.0 + 0.7 * -0.4);
        assert!((a.hs_inner(&b) - expected).abs() < 1e-14);
    }

    #[test]
    fn pairs_round_trip() {
        let a = HermitianOperator::from_pauli(0.5, [0.1, -0.2, 0.7]);
        let back = HermitianOperator::from_pairs(2, &a.to_pairs()).unwrap();
        assert_eq!(a, back);
    }
}
