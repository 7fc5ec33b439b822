//! Dense complex linear algebra at the three dimensions the simulator uses:
//! single qubits (2), the two-qubit system (4) and system plus ancilla (16).
//!
//! Eigendecomposition and SVD are delegated to `nalgebra`; this module pins
//! ordering, phase conventions and the PSD clamping floor on top of it.

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{QslError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Absolute Hermiticity tolerance, scaled by `max(1, max|A_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues down to this floor are treated as round-off and clamped to zero.
pub const PSD_FLOOR: f64 = -1e-10;

const ALLOWED_DIMS: [usize; 3] = [2, 4, 16];

fn check_dim(dim: usize) -> Result<()> {
    if ALLOWED_DIMS.contains(&dim) {
        Ok(())
    } else {
        Err(QslError::BadDim(format!("dimension {dim} not in {{2, 4, 16}}")))
    }
}

/// Square complex matrix of dimension 2, 4 or 16.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { data: DMatrix::zeros(dim, dim) })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { data: DMatrix::identity(dim, dim) })
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(QslError::BadDim(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { data: DMatrix::from_row_slice(dim, dim, entries) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        check_dim(diag.len())?;
        let n = diag.len();
        Ok(Self {
            data: DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO }),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { data: DMatrix::from_fn(dim, dim, f) })
    }

    /// Outer product |u><v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(QslError::BadDim(format!("outer product of lengths {} and {}", u.len(), v.len())));
        }
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// Wraps an nalgebra matrix, checking the dimension.
    pub fn from_dmatrix(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(QslError::BadDim(format!("{}x{} is not square", data.nrows(), data.ncols())));
        }
        check_dim(data.nrows())?;
        Ok(Self { data })
    }

    // Internal constructor for results whose dimension is already known-good.
    pub(crate) fn wrap(data: DMatrix<C64>) -> Self {
        debug_assert!(data.is_square() && ALLOWED_DIMS.contains(&data.nrows()));
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.data.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self::wrap(self.data.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::wrap(&self.data * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// max_ij |A_ij - conj(A_ji)|.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                err = err.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// (A + A†)/2.
    pub fn hermitized(&self) -> Self {
        Self::wrap((&self.data + self.data.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.data[(i, j)] * v[j]).sum()).collect()
    }

    /// Largest entrywise distance to another matrix of the same dimension.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.data - &other.data).iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.data[idx]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in product");
        ComplexMatrix::wrap(&self.data * &rhs.data)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sum");
        ComplexMatrix::wrap(&self.data + &rhs.data)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in difference");
        ComplexMatrix::wrap(&self.data - &rhs.data)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::wrap(-&self.data)
    }
}

/// Pauli matrices and single-qubit identity.
pub mod pauli {
    use super::*;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::identity(2, 2))
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]))
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::wrap(DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]))
    }
}

/// Tensor product A ⊗ B. Only products landing on 4 or 16 are representable.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (m, n) = (a.dim(), b.dim());
    check_dim(m * n)?;
    Ok(ComplexMatrix::wrap(a.data.kronecker(&b.data)))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending. Each eigenvector is rescaled so that
/// its largest-magnitude component (first one, on ties) is real and positive.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.data.column(k).iter().copied().collect()
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// V f(Λ) V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors.data;
        let mut out = DMatrix::<C64>::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            let col = v.column(k);
            for i in 0..n {
                let ci = col[i] * w;
                for j in 0..n {
                    out[(i, j)] += ci * col[j].conj();
                }
            }
        }
        ComplexMatrix::wrap(out)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = a.hermiticity_error();
    if deviation > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(QslError::NonHermitian { deviation });
    }
    let eig = SymmetricEigen::new(a.hermitized().data);
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let max_mag = col.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        let pivot = col
            .iter()
            .position(|z| z.norm() >= max_mag - 1e-12)
            .expect("eigenvector has a largest component");
        let phase = col[pivot].conj() / col[pivot].norm();
        for i in 0..n {
            vectors[(i, dst)] = col[i] * phase;
        }
    }
    Ok(HermitianEigen { values, vectors: ComplexMatrix::wrap(vectors) })
}

/// Principal square root of a positive semidefinite matrix.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    sqrt_from_eigen(&eig)
}

pub(crate) fn sqrt_from_eigen(eig: &HermitianEigen) -> Result<ComplexMatrix> {
    let min = eig.min_value();
    if min < PSD_FLOOR {
        return Err(QslError::NotPsd { min_eigenvalue: min });
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Singular values in descending order.
///
/// Hermitian inputs use |eigenvalues|; anything else goes through an SVD.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = if a.is_hermitian() {
        hermitian_eig(a)
            .expect("checked Hermitian")
            .values
            .iter()
            .map(|x| x.abs())
            .collect()
    } else {
        a.data.singular_values().iter().copied().collect()
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// The operator, trace and Hilbert-Schmidt norms of one matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MatrixNorms {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
}

impl MatrixNorms {
    pub fn of(a: &ComplexMatrix) -> Self {
        let sv = singular_values(a);
        Self {
            op: sv.first().copied().unwrap_or(0.0),
            tr: sv.iter().sum(),
            hs: hs_norm(a),
        }
    }
}

impl Add for MatrixNorms {
    type Output = MatrixNorms;
    fn add(self, rhs: MatrixNorms) -> MatrixNorms {
        MatrixNorms { op: self.op + rhs.op, tr: self.tr + rhs.tr, hs: self.hs + rhs.hs }
    }
}

pub fn op_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian matrix W M W† held in factored form, with W an n×m block of
/// column vectors and M an m×m Hermitian coefficient matrix, m ≤ n.
#[derive(Clone, Debug)]
pub struct LowRankHermitian {
    vectors: DMatrix<C64>,
    coeffs: DMatrix<C64>,
}

impl LowRankHermitian {
    pub fn new(vectors: Vec<Vec<C64>>, coeffs: DMatrix<C64>) -> Result<Self> {
        let m = vectors.len();
        let n = vectors.first().map_or(0, Vec::len);
        if m == 0 || m > n || vectors.iter().any(|v| v.len() != n) || coeffs.shape() != (m, m) {
            return Err(QslError::BadDim(format!("{m} factor vectors with {:?} coefficients", coeffs.shape())));
        }
        let w = DMatrix::from_fn(n, m, |i, k| vectors[k][i]);
        Ok(Self { vectors: w, coeffs })
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_dmatrix(&self.vectors * &self.coeffs * self.vectors.adjoint())
    }

    /// Nonzero eigenvalues of W M W†, via R M R† from a thin QR of W.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let r = self.vectors.clone().qr().r();
        let core = &r * &self.coeffs * r.adjoint();
        let core = (&core + core.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(core).eigenvalues.iter().copied().collect()
    }

    pub fn norms(&self) -> MatrixNorms {
        let ev = self.eigenvalues();
        MatrixNorms {
            op: ev.iter().fold(0.0, |m, x| m.max(x.abs())),
            tr: ev.iter().map(|x| x.abs()).sum(),
            hs: ev.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

/// Uhlmann fidelity [Tr √(√σ ρ √σ)]² of two PSD matrices.
///
/// Evaluated as the squared trace norm of √ρ√σ, which has the same value but
/// avoids squaring small eigenvalues. Clamped to [0, 1].
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let sr = sqrt_psd(rho)?;
    let ss = sqrt_psd(sigma)?;
    Ok(fidelity_from_roots(&sr, &ss))
}

pub(crate) fn fidelity_from_roots(sqrt_rho: &ComplexMatrix, sqrt_sigma: &ComplexMatrix) -> f64 {
    let prod = &sqrt_rho.data * &sqrt_sigma.data;
    let nuclear: f64 = prod.singular_values().iter().sum();
    (nuclear * nuclear).clamp(0.0, 1.0)
}

/// Which factor of a system ⊗ ancilla operator survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Ancilla,
}

/// Partial trace of a 16×16 operator on system(4) ⊗ ancilla(4).
///
/// Basis index is `4 * system + ancilla`.
pub fn partial_trace(x: &ComplexMatrix, keep: Subsystem) -> Result<ComplexMatrix> {
    if x.dim() != 16 {
        return Err(QslError::BadDim(format!("partial trace needs 16x16, got {0}x{0}", x.dim())));
    }
    let out = DMatrix::from_fn(4, 4, |i, j| {
        (0..4)
            .map(|k| match keep {
                Subsystem::System => x.data[(4 * i + k, 4 * j + k)],
                Subsystem::Ancilla => x.data[(4 * k + i, 4 * k + j)],
            })
            .sum()
    });
    Ok(ComplexMatrix::wrap(out))
}
