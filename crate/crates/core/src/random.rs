//! Seeded random ensembles used by the property suites and self-test.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, C64};
use crate::states::DensityMatrix;

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Random Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, dim);
    ComplexMatrix::from_dmatrix((&g + g.adjoint()) * C64::new(0.5, 0.0)).expect("supported dimension")
}

/// Random positive semidefinite matrix G G† of the given rank.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, rank);
    ComplexMatrix::from_dmatrix(&g * g.adjoint()).expect("supported dimension")
}

/// Random two-qubit density matrix of the given rank (1..=4).
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> DensityMatrix {
    let p = psd(rng, 4, rank);
    let tr = p.trace().re;
    DensityMatrix::new(p.scale_real(1.0 / tr)).expect("normalized Gram matrix is a state")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(q).expect("supported dimension")
}
