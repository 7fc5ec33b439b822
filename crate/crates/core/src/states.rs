//! Two-qubit states: validation, the initial states of the two scenarios,
//! their separable reference states, and spectral purification.
//!
//! Computational basis ordering is |q1 q2> with index `2*q1 + q2`; atomic
//! levels map as |g> -> |0>, |e> -> |1>. The Bell state |ψ+> is
//! (|01> + |10>)/√2.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{QslError, Result};
use crate::linalg::{self, hermitian_eig, kron, pauli, ComplexMatrix, Subsystem, C64, ZERO};

pub const STATE_HERMITIAN_TOL: f64 = 1e-10;
pub const STATE_TRACE_TOL: f64 = 1e-10;
pub const STATE_MIN_EIGENVALUE: f64 = -1e-8;
pub const BELL_DIAGONAL_TOL: f64 = 1e-8;

/// A validated two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(QslError::BadDim(format!("density matrix must be 4x4, got {0}x{0}", matrix.dim())));
        }
        let herm = matrix.hermiticity_error();
        if herm > STATE_HERMITIAN_TOL {
            return Err(QslError::InvalidState(format!("Hermiticity violated by {herm:.3e}")));
        }
        let matrix = matrix.hermitized();
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > STATE_TRACE_TOL {
            return Err(QslError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eig(&matrix)?.min_value();
        if min < STATE_MIN_EIGENVALUE {
            return Err(QslError::InvalidState(format!("min eigenvalue {min:.3e} is negative")));
        }
        Ok(Self { matrix })
    }

    /// |ψ><ψ| for a (not necessarily normalized) amplitude vector.
    pub fn from_pure(amplitudes: &[C64; 4]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(QslError::InvalidState("zero state vector".into()));
        }
        let n = norm2.sqrt();
        let v: Vec<C64> = amplitudes.iter().map(|z| z / n).collect();
        Self::new(ComplexMatrix::outer(&v, &v)?)
    }

    pub fn from_diagonal(populations: [f64; 4]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(&populations)?)
    }

    pub fn maximally_mixed() -> Self {
        Self::from_diagonal([0.25; 4]).expect("I/4 is a state")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigen(&self) -> linalg::HermitianEigen {
        hermitian_eig(&self.matrix).expect("validated state is Hermitian")
    }

    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        linalg::fidelity(&self.matrix, &other.matrix)
    }

    /// U ρ U†.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(&(u * &self.matrix) * &u.adjoint())
    }
}

/// Initial states of the two scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitialState {
    BellPsiPlus,
    G1E2,
}

impl InitialState {
    pub fn state(self) -> DensityMatrix {
        match self {
            InitialState::BellPsiPlus => bell_psi_plus(),
            InitialState::G1E2 => state_g1e2(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitialState::BellPsiPlus => "bell-psi-plus",
            InitialState::G1E2 => "g1e2",
        }
    }
}

/// (|01> + |10>)/√2.
pub fn bell_psi_plus() -> DensityMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    DensityMatrix::from_pure(&[ZERO, s, s, ZERO]).expect("Bell state is valid")
}

/// |g1 e2> = |01>.
pub fn state_g1e2() -> DensityMatrix {
    DensityMatrix::from_diagonal([0.0, 1.0, 0.0, 0.0]).expect("product state is valid")
}

/// ½(|01><01| + |10><10|), the closest separable state to |ψ+> and to its
/// dephased descendants.
pub fn separable_oun_sigma() -> DensityMatrix {
    DensityMatrix::from_diagonal([0.0, 0.5, 0.5, 0.0]).expect("diagonal mixture is valid")
}

/// Diagonal separable family used for the collective-decay scenarios.
///
/// `G1E2`: x|00><00| + (1-x)|11><11|; `BellPsiPlus`: x|01><01| + (1-x)|11><11|.
pub fn separable_collective_sigma(kind: InitialState, x: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&x) {
        return Err(QslError::BadMixingParameter(x));
    }
    let pops = match kind {
        InitialState::G1E2 => [x, 0.0, 0.0, 1.0 - x],
        InitialState::BellPsiPlus => [0.0, x, 0.0, 1.0 - x],
    };
    DensityMatrix::from_diagonal(pops)
}

/// Pure state on system(4) ⊗ ancilla(4).
#[derive(Clone, Debug, PartialEq)]
pub struct PurifiedState {
    vector: Vec<C64>,
}

impl PurifiedState {
    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |ψ><ψ| as a 16×16 operator.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector, &self.vector).expect("16-dimensional")
    }

    /// Partial trace over the ancilla.
    pub fn reduce(&self) -> ComplexMatrix {
        linalg::partial_trace(&self.projector(), Subsystem::System).expect("16-dimensional")
    }
}

/// Spectral purification Σᵢ √λᵢ |eᵢ> ⊗ |i>, eigenpairs in descending order.
pub fn purify(rho: &DensityMatrix) -> Result<PurifiedState> {
    let eig = hermitian_eig(rho.matrix())?;
    let mut vector = vec![ZERO; 16];
    for (i, &lam) in eig.values.iter().enumerate() {
        let w = lam.max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for (s, e) in eig.vector(i).into_iter().enumerate() {
            vector[4 * s + i] = e * w;
        }
    }
    let norm = vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in vector.iter_mut() {
        *z /= norm;
    }
    Ok(PurifiedState { vector })
}

/// Correlation coefficients cᵢ = tr(ρ σᵢ⊗σᵢ) of a Bell-diagonal state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellDiagonalCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalCoeffs {
    /// Validates the coefficients describe a PSD Bell-diagonal state.
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        const SLACK: f64 = 1e-12;
        for c in [c1, c2, c3] {
            if !c.is_finite() || c.abs() > 1.0 + SLACK {
                return Err(QslError::Domain(format!("correlation coefficient {c} outside [-1, 1]")));
            }
        }
        let coeffs = Self { c1, c2, c3 };
        let weights = coeffs.bell_weights();
        if weights.iter().any(|&w| w < -SLACK) {
            return Err(QslError::Domain(format!(
                "coefficients ({c1}, {c2}, {c3}) give Bell weights {weights:?}"
            )));
        }
        Ok(coeffs)
    }

    /// Weights on (|ψ->, |ψ+>, |φ->, |φ+>).
    pub fn bell_weights(&self) -> [f64; 4] {
        let Self { c1, c2, c3 } = *self;
        [
            0.25 * (1.0 - c1 - c2 - c3),
            0.25 * (1.0 + c1 + c2 - c3),
            0.25 * (1.0 - c1 + c2 + c3),
            0.25 * (1.0 + c1 - c2 + c3),
        ]
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// ¼(I + Σ cᵢ σᵢ⊗σᵢ).
    pub fn to_matrix(&self) -> ComplexMatrix {
        let terms = correlators();
        let mut m = ComplexMatrix::identity(4).expect("dim 4");
        for (c, op) in self.as_array().iter().zip(terms.iter()) {
            m = &m + &op.scale_real(*c);
        }
        m.scale_real(0.25)
    }
}

fn correlators() -> [ComplexMatrix; 3] {
    [
        kron(&pauli::x(), &pauli::x()).expect("dim 4"),
        kron(&pauli::y(), &pauli::y()).expect("dim 4"),
        kron(&pauli::z(), &pauli::z()).expect("dim 4"),
    ]
}

pub fn bell_coeffs(rho: &DensityMatrix) -> Result<BellDiagonalCoeffs> {
    let [xx, yy, zz] = correlators();
    let c = |op: &ComplexMatrix| (rho.matrix() * op).trace().re;
    let raw = BellDiagonalCoeffs { c1: c(&xx), c2: c(&yy), c3: c(&zz) };
    let deviation = raw.to_matrix().max_abs_diff(rho.matrix());
    if deviation > BELL_DIAGONAL_TOL {
        return Err(QslError::NotBellDiagonal { deviation });
    }
    BellDiagonalCoeffs::new(raw.c1, raw.c2, raw.c3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_state_is_pure_rank_one() {
        let rho = bell_psi_plus();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        let eig = rho.eigen();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!(eig.values[1..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn g1e2_is_projector_on_01() {
        let rho = state_g1e2();
        let want = ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(rho.matrix(), &want);
    }

    #[test]
    fn invalid_states_are_rejected() {
        let not_unit = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.5, -0.5, 0.0, 0.0]).unwrap();
        assert!(DensityMatrix::new(negative).is_err());
        let two = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(DensityMatrix::new(two), Err(QslError::BadDim(_))));
    }

    #[test]
    fn collective_sigma_family() {
        let s = separable_collective_sigma(InitialState::G1E2, 1.0).unwrap();
        assert_eq!(s, DensityMatrix::from_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap());
        for kind in [InitialState::G1E2, InitialState::BellPsiPlus] {
            let s = separable_collective_sigma(kind, 0.0).unwrap();
            assert_eq!(s, DensityMatrix::from_diagonal([0.0, 0.0, 0.0, 1.0]).unwrap());
        }
        assert!(matches!(
            separable_collective_sigma(InitialState::G1E2, 1.2),
            Err(QslError::BadMixingParameter(_))
        ));
        assert!(separable_collective_sigma(InitialState::BellPsiPlus, -0.1).is_err());
    }

    #[test]
    fn oun_sigma_overlap_with_bell_is_half() {
        let f = bell_psi_plus().fidelity(&separable_oun_sigma()).unwrap();
        // direct overlap <ψ+|σ|ψ+> = ½(½ + ½)
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn purification_of_pure_bell_state() {
        let psi = purify(&bell_psi_plus()).unwrap();
        let s = FRAC_1_SQRT_2;
        // |ψ+> ⊗ |a0>: amplitudes on (|01>,a0) = index 4 and (|10>,a0) = index 8
        for (k, z) in psi.vector().iter().enumerate() {
            let want = if k == 4 || k == 8 { s } else { 0.0 };
            assert!((z.norm() - want).abs() < 1e-12, "component {k}");
        }
    }

    #[test]
    fn purification_of_maximally_mixed_state() {
        let psi = purify(&DensityMatrix::maximally_mixed()).unwrap();
        let nonzero: Vec<f64> = psi.vector().iter().map(|z| z.norm()).filter(|m| *m > 1e-12).collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|m| (m - 0.5).abs() < 1e-12));
        assert!(psi.reduce().max_abs_diff(DensityMatrix::maximally_mixed().matrix()) < 1e-12);
    }

    #[test]
    fn bell_coefficients() {
        let c = bell_coeffs(&bell_psi_plus()).unwrap();
        assert!((c.c1 - 1.0).abs() < 1e-14);
        assert!((c.c2 - 1.0).abs() < 1e-14);
        assert!((c.c3 + 1.0).abs() < 1e-14);
        let c = bell_coeffs(&DensityMatrix::maximally_mixed()).unwrap();
        assert_eq!(c.as_array().map(|v| v.abs() < 1e-15), [true; 3]);
        assert!(matches!(bell_coeffs(&state_g1e2()), Err(QslError::NotBellDiagonal { .. })));
    }

    #[test]
    fn bell_coeffs_reconstruct_mixtures() {
        // mixture of the four Bell states with weights w
        let w = [0.1, 0.4, 0.3, 0.2];
        let s = FRAC_1_SQRT_2;
        let basis: [[f64; 4]; 4] = [
            [0.0, s, -s, 0.0],
            [0.0, s, s, 0.0],
            [s, 0.0, 0.0, -s],
            [s, 0.0, 0.0, s],
        ];
        let mut m = ComplexMatrix::zeros(4).unwrap();
        for (wk, b) in w.iter().zip(basis.iter()) {
            let v: Vec<C64> = b.iter().map(|&x| C64::new(x, 0.0)).collect();
            m = &m + &ComplexMatrix::outer(&v, &v).unwrap().scale_real(*wk);
        }
        let rho = DensityMatrix::new(m).unwrap();
        let c = bell_coeffs(&rho).unwrap();
        assert!(c.to_matrix().max_abs_diff(rho.matrix()) < 1e-10);
        let weights = c.bell_weights();
        for (a, b) in weights.iter().zip(w.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
