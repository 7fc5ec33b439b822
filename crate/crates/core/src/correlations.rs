//! Concurrence, Bures entanglement and Bures discord, and the change of a
//! correlation measure between two instants.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{QslError, Result};
use crate::linalg::{self, hermitian_eig, kron, pauli, ComplexMatrix};
use crate::states::{BellDiagonalCoeffs, DensityMatrix};

/// Upper end of the Bures entanglement and discord scales, 1 − 1/√2.
pub const MAX_BURES_CORRELATION: f64 = 1.0 - FRAC_1_SQRT_2;

/// Concurrences this close to 1 are round-off of a maximally entangled state.
const UNIT_SNAP: f64 = 1e-14;
const DOMAIN_SLACK: f64 = 1e-12;
const SQRT_ARG_FLOOR: f64 = -1e-12;

/// ρ̃ = (σy⊗σy) ρ* (σy⊗σy).
pub fn spin_flip(rho: &DensityMatrix) -> ComplexMatrix {
    let yy = kron(&pauli::y(), &pauli::y()).expect("dim 4");
    &(&yy * &rho.matrix().conj()) * &yy
}

fn concurrence_from_kappas(mut kappa: Vec<f64>) -> f64 {
    kappa.sort_by(|a, b| b.total_cmp(a));
    let c = kappa[0] - kappa[1..].iter().sum::<f64>();
    if c > 1.0 - UNIT_SNAP {
        1.0
    } else {
        c.max(0.0)
    }
}

/// Wootters concurrence C = max{0, κ₁−κ₂−κ₃−κ₄}.
///
/// The κᵢ are computed as singular values of √Λ V†(σy⊗σy)V* √Λ, where
/// ρ = VΛV†. This matrix has the same singular values as √ρ√ρ̃, i.e. the
/// eigenvalues of √(√ρ ρ̃ √ρ), without squaring small eigenvalues of ρ.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let eig = hermitian_eig(rho.matrix())?;
    if eig.min_value() < linalg::PSD_FLOOR {
        return Err(QslError::NotPsd { min_eigenvalue: eig.min_value() });
    }
    let v = eig.vectors.as_dmatrix();
    let yy = kron(&pauli::y(), &pauli::y()).expect("dim 4");
    let w = v.adjoint() * yy.as_dmatrix() * v.map(|z| z.conj());
    let roots: Vec<f64> = eig.values.iter().map(|l| l.max(0.0).sqrt()).collect();
    let tau = DMatrix::from_fn(4, 4, |i, j| w[(i, j)] * (roots[i] * roots[j]));
    Ok(concurrence_from_kappas(tau.singular_values().iter().copied().collect()))
}

/// Concurrence from the eigenvalues of √ρ ρ̃ √ρ directly.
///
/// Loses roughly half the significant digits for nearly pure states; kept as
/// an independent cross-check of [`concurrence`].
pub fn concurrence_sandwich(rho: &DensityMatrix) -> Result<f64> {
    let s = linalg::sqrt_psd(rho.matrix())?;
    let r = &(&s * &spin_flip(rho)) * &s;
    let eig = hermitian_eig(&r.hermitized())?;
    Ok(concurrence_from_kappas(eig.values.iter().map(|l| l.max(0.0).sqrt()).collect()))
}

fn check_unit_interval(name: &str, v: f64) -> Result<f64> {
    if !v.is_finite() || !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&v) {
        return Err(QslError::Domain(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(v.clamp(0.0, 1.0))
}

/// Fidelity of separability F_P = ½(1 + √(1 − C²)).
pub fn separable_fidelity_from_concurrence(c: f64) -> Result<f64> {
    let c = check_unit_interval("concurrence", c)?;
    Ok(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

/// Bures measure 1 − √F for a maximal fidelity F to the reference set.
pub fn bures_from_fidelity(f: f64) -> Result<f64> {
    let f = check_unit_interval("fidelity", f)?;
    Ok(1.0 - f.sqrt())
}

/// Bures entanglement E = 1 − √((1 + √(1 − C²))/2).
pub fn bures_entanglement(c: f64) -> Result<f64> {
    bures_from_fidelity(separable_fidelity_from_concurrence(c)?)
}

fn clamped_sqrt(arg: f64) -> Result<f64> {
    if arg < SQRT_ARG_FLOOR {
        return Err(QslError::Domain(format!("negative square-root argument {arg:.3e} in b_max")));
    }
    Ok(arg.max(0.0).sqrt())
}

/// b_max over the three cyclic arrangements of the correlation coefficients.
pub fn b_max(c: &BellDiagonalCoeffs) -> Result<f64> {
    let [c1, c2, c3] = c.as_array();
    let term = |a: f64, b: f64, d: f64| -> Result<f64> {
        Ok(clamped_sqrt((1.0 + a).powi(2) - (b - d).powi(2))? + clamped_sqrt((1.0 - a).powi(2) - (b + d).powi(2))?)
    };
    let best = term(c1, c2, c3)?.max(term(c2, c1, c3)?).max(term(c3, c1, c2)?);
    Ok(0.5 * best)
}

/// Bures discord of a Bell-diagonal state, 1 − √((1 + b_max)/2).
pub fn bures_discord_bell_diagonal(c: &BellDiagonalCoeffs) -> Result<f64> {
    let b = b_max(c)?;
    if b > 1.0 + DOMAIN_SLACK {
        return Err(QslError::Domain(format!("b_max = {b} exceeds 1")));
    }
    Ok(1.0 - (0.5 * (1.0 + b.min(1.0))).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Decay,
    Creation,
}

/// Change of a correlation measure between the initial and a later state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationAmount {
    pub initial: f64,
    pub final_value: f64,
    pub change: f64,
    pub direction: Direction,
}

pub fn correlation_change(initial: f64, final_value: f64) -> Result<CorrelationAmount> {
    for (name, v) in [("initial", initial), ("final", final_value)] {
        if !v.is_finite() || !(-1e-9..=MAX_BURES_CORRELATION + 1e-9).contains(&v) {
            return Err(QslError::Domain(format!(
                "{name} correlation {v} outside [0, {MAX_BURES_CORRELATION}]"
            )));
        }
    }
    let direction = if initial >= final_value { Direction::Decay } else { Direction::Creation };
    Ok(CorrelationAmount { initial, final_value, change: (initial - final_value).abs(), direction })
}
