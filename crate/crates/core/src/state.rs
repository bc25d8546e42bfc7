//! Two-qubit density matrices and small dense linear-algebra helpers.
//!
//! Basis ordering everywhere is |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with σz|↑⟩ = +|↑⟩;
//! the first tensor factor is qubit A.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as round-off and set to zero.
pub const CLAMP_TOL: f64 = 1e-9;
/// Eigenvalues below `-NOT_POSITIVE_TOL` reject the matrix outright.
pub const NOT_POSITIVE_TOL: f64 = 1e-6;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("matrix is not Hermitian: max deviation {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("trace {trace} differs from 1")]
    BadTrace { trace: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> Matrix2<C64> {
    Matrix2::identity()
}

pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> Matrix2<C64> {
    Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// Kronecker product `a ⊗ b` of two single-qubit operators.
pub fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    let mut out = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Clamps tiny negative eigenvalues to zero. Fails below `-NOT_POSITIVE_TOL`.
pub fn clamp_spectrum(values: &mut [f64]) -> Result<(), StateError> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -NOT_POSITIVE_TOL {
        return Err(StateError::NotPositive { min_eigenvalue: min });
    }
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(m: &DMatrix<C64>) -> Result<DMatrix<C64>, StateError> {
    let (values, vectors) = hermitian_eigen(m);
    let mut values: Vec<f64> = values.iter().copied().collect();
    clamp_spectrum(&mut values)?;
    // Rounding noise on zero eigenvalues would otherwise surface as its square root.
    let floor = 64.0 * f64::EPSILON * values.iter().cloned().fold(0.0, f64::max);
    for v in values.iter_mut() {
        if *v <= floor {
            *v = 0.0;
        }
    }
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, v) in values.iter().enumerate() {
        let s = v.sqrt();
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    Ok(&scaled * vectors.adjoint())
}

pub fn max_hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Matrix4<C64>,
}

impl TwoQubitState {
    /// Validates Hermiticity and trace, then repairs round-off negativity
    /// (eigenvalues down to `-NOT_POSITIVE_TOL`) by clamping and renormalising.
    pub fn new(matrix: Matrix4<C64>) -> Result<Self, StateError> {
        let dense = DMatrix::from_iterator(4, 4, matrix.iter().copied());
        let dev = max_hermitian_deviation(&dense);
        if dev > HERMITIAN_TOL {
            return Err(StateError::NotHermitian { deviation: dev });
        }
        let herm = (matrix + matrix.adjoint()) * c(0.5, 0.0);
        let trace = herm.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(StateError::BadTrace { trace });
        }
        let dense = DMatrix::from_iterator(4, 4, herm.iter().copied());
        let (values, vectors) = hermitian_eigen(&dense);
        if values[0] >= 0.0 {
            return Ok(Self {
                matrix: herm / c(trace, 0.0),
            });
        }
        let mut values: Vec<f64> = values.iter().copied().collect();
        clamp_spectrum(&mut values)?;
        let total: f64 = values.iter().sum();
        let mut rebuilt = Matrix4::<C64>::zeros();
        for (k, v) in values.iter().enumerate() {
            let col = vectors.column(k);
            for i in 0..4 {
                for j in 0..4 {
                    rebuilt[(i, j)] += col[i] * col[j].conj() * (v / total);
                }
            }
        }
        let rebuilt = (rebuilt + rebuilt.adjoint()) * c(0.5, 0.0);
        Ok(Self { matrix: rebuilt })
    }

    /// Builds ρ = ¼[𝟙 + m(σz⊗𝟙 + 𝟙⊗σz) + xx σx⊗σx + yy σy⊗σy + zz σz⊗σz].
    pub fn from_correlators(sigma_z: f64, xx: f64, yy: f64, zz: f64) -> Result<Self, StateError> {
        let id = identity2();
        let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
        let m = Matrix4::<C64>::identity()
            + (kron2(&sz, &id) + kron2(&id, &sz)) * c(sigma_z, 0.0)
            + kron2(&sx, &sx) * c(xx, 0.0)
            + kron2(&sy, &sy) * c(yy, 0.0)
            + kron2(&sz, &sz) * c(zz, 0.0);
        Self::new(m * c(0.25, 0.0))
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Matrix4::identity() * c(0.25, 0.0),
        }
    }

    /// Projector onto a normalised (or normalisable) pure state.
    pub fn pure(amplitudes: [C64; 4]) -> Self {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj() / (norm * norm);
            }
        }
        Self { matrix: m }
    }

    /// `a ⊗ b` for single-qubit density matrices.
    pub fn product(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Result<Self, StateError> {
        Self::new(kron2(a, b))
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_iterator(4, 4, self.matrix.iter().copied())
    }

    /// Exchanges the roles of qubits A and B.
    pub fn swapped(&self) -> Self {
        const PERM: [usize; 4] = [0, 2, 1, 3];
        let mut m = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(PERM[i], PERM[j])] = self.matrix[(i, j)];
            }
        }
        Self { matrix: m }
    }

    /// Conjugates by a local unitary `u_a ⊗ u_b`.
    pub fn conjugated(&self, u_a: &Matrix2<C64>, u_b: &Matrix2<C64>) -> Self {
        let u = kron2(u_a, u_b);
        Self {
            matrix: u * self.matrix * u.adjoint(),
        }
    }

    /// Reduced state of qubit A (trace over B).
    pub fn marginal_a(&self) -> Matrix2<C64> {
        let mut out = Matrix2::zeros();
        for a in 0..2 {
            for c_ in 0..2 {
                for b in 0..2 {
                    out[(a, c_)] += self.matrix[(2 * a + b, 2 * c_ + b)];
                }
            }
        }
        out
    }

    /// Reduced state of qubit B (trace over A).
    pub fn marginal_b(&self) -> Matrix2<C64> {
        let mut out = Matrix2::zeros();
        for b in 0..2 {
            for d in 0..2 {
                for a in 0..2 {
                    out[(b, d)] += self.matrix[(2 * a + b, 2 * a + d)];
                }
            }
        }
        out
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.to_dmatrix())
    }

    pub fn purity(&self) -> f64 {
        (self.matrix * self.matrix).trace().re
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.matrix - other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Expectation value Tr[ρ O] for a two-qubit observable.
    pub fn expectation(&self, op: &Matrix4<C64>) -> C64 {
        (self.matrix * op).trace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        assert_eq!(x * y, z * c(0.0, 1.0));
        assert_eq!(x * x, identity2());
    }

    #[test]
    fn kron_ordering_matches_basis() {
        // σz ⊗ 𝟙 is +1 on |↑·⟩ (indices 0, 1) and -1 on |↓·⟩.
        let m = kron2(&pauli_z(), &identity2());
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn correlators_identity_case() {
        let s = TwoQubitState::from_correlators(0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(s.max_abs_diff(&TwoQubitState::maximally_mixed()) < 1e-15);
    }

    #[test]
    fn correlators_product_down_down() {
        let s = TwoQubitState::from_correlators(-1.0, 0.0, 0.0, 1.0).unwrap();
        let m = s.matrix();
        assert!((m[(3, 3)].re - 1.0).abs() < 1e-15);
        assert!((s.trace() - 1.0).abs() < 1e-15);
        assert!((s.purity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clamps_small_negative_and_rejects_large() {
        let eps = 1e-10;
        let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(
            c(0.5 + eps, 0.0),
            c(0.5, 0.0),
            c(-eps, 0.0),
            c(0.0, 0.0),
        ));
        let s = TwoQubitState::new(m).unwrap();
        assert!(s.eigenvalues()[0] >= -1e-15);
        assert!((s.trace() - 1.0).abs() < 1e-14);

        let bad = Matrix4::from_diagonal(&nalgebra::Vector4::new(
            c(0.6, 0.0),
            c(0.5, 0.0),
            c(-0.1, 0.0),
            c(0.0, 0.0),
        ));
        assert!(matches!(TwoQubitState::new(bad), Err(StateError::NotPositive { .. })));
    }

    #[test]
    fn rejects_non_hermitian_and_bad_trace() {
        let mut m = Matrix4::identity() * c(0.25, 0.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(TwoQubitState::new(m), Err(StateError::NotHermitian { .. })));
        let m = Matrix4::identity() * c(0.3, 0.0);
        assert!(matches!(TwoQubitState::new(m), Err(StateError::BadTrace { .. })));
    }

    #[test]
    fn marginals_and_swap() {
        let a = Matrix2::new(c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0));
        let b = Matrix2::new(c(0.4, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0));
        let s = TwoQubitState::product(&a, &b).unwrap();
        assert!((s.marginal_a() - a).norm() < 1e-15);
        assert!((s.marginal_b() - b).norm() < 1e-15);
        let t = s.swapped();
        assert!((t.marginal_a() - b).norm() < 1e-15);
        assert!((t.marginal_b() - a).norm() < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)],
        );
        let s = psd_sqrt(&m).unwrap();
        assert!((&s * &s - &m).norm() < 1e-14);
    }
}
