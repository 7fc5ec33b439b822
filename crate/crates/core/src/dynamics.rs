//! Fixed-step RK4 integration of ρ̇ = L_t ρ on a uniform grid, and
//! quadrature of sampled integrands on that grid.

use crate::channels::Generator;
use crate::error::{QslError, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, PSD_FLOOR};
use crate::states::DensityMatrix;

/// States whose minimum eigenvalue falls below this before clamping abort the run.
pub const DIVERGENCE_FLOOR: f64 = -1e-4;
const GRID_TOL: f64 = 1e-12;

/// Grid points per unit of evolution time.
pub const STEPS_PER_UNIT_TIME: f64 = 2000.0;

/// Default number of steps for a driving time `tau`: 2000 per unit time,
/// rounded up to an even count of at least 10.
pub fn default_steps(tau: f64) -> usize {
    let n = (STEPS_PER_UNIT_TIME * tau).ceil().max(10.0) as usize;
    n + n % 2
}

/// States on a uniform time grid 0 = t₀ < … < t_N = τ.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Largest eigenvalue magnitude removed by clamping over the run.
    pub max_clamp: f64,
    /// Largest |Tr ρ − 1| observed after a step, before renormalization.
    pub max_trace_drift: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }
}

struct Cleaned {
    state: DensityMatrix,
    clamp: f64,
    trace_drift: f64,
}

fn clean(raw: &ComplexMatrix, time: f64) -> Result<Cleaned> {
    let mut m = raw.hermitized();
    let trace_drift = (m.trace().re - 1.0).abs();
    let eig = hermitian_eig(&m)?;
    let min = eig.min_value();
    if min < DIVERGENCE_FLOOR {
        return Err(QslError::IntegrationDiverged { time, min_eigenvalue: min });
    }
    let mut clamp = 0.0;
    if min < PSD_FLOOR {
        clamp = -min;
        m = eig.reconstruct_with(|x| x.max(0.0));
    }
    let tr = m.trace().re;
    let state = DensityMatrix::new(m.scale_real(1.0 / tr))?;
    Ok(Cleaned { state, clamp, trace_drift })
}

/// Integrates ρ̇ = L_t ρ from ρ₀ over [0, τ] with `steps` classical RK4 steps.
///
/// Each stored state is re-Hermitized, has eigenvalues below −1e−10
/// clamped to zero, and is renormalized to unit trace.
pub fn evolve(gen: &Generator, rho0: &DensityMatrix, tau: f64, steps: usize) -> Result<Trajectory> {
    if steps < 10 || !steps.is_multiple_of(2) {
        return Err(QslError::BadSteps(steps));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(QslError::BadParams(format!("driving time must be positive, got {tau}")));
    }
    let h = tau / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(rho0.clone());
    let (mut max_clamp, mut max_trace_drift) = (0.0_f64, 0.0_f64);

    let mut rho = rho0.matrix().clone();
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = gen.apply(t, &rho)?;
        let k2 = gen.apply(t + 0.5 * h, &(&rho + &k1.scale_real(0.5 * h)))?;
        let k3 = gen.apply(t + 0.5 * h, &(&rho + &k2.scale_real(0.5 * h)))?;
        let k4 = gen.apply(t + h, &(&rho + &k3.scale_real(h)))?;
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
        let next = &rho + &incr.scale_real(h / 6.0);

        let t_next = (k + 1) as f64 * h;
        let cleaned = clean(&next, t_next)?;
        max_clamp = max_clamp.max(cleaned.clamp);
        max_trace_drift = max_trace_drift.max(cleaned.trace_drift);
        rho = cleaned.state.matrix().clone();
        times.push(t_next);
        states.push(cleaned.state);
    }
    Ok(Trajectory { times, states, max_clamp, max_trace_drift })
}

fn check_grid(values: &[f64], times: &[f64]) -> Result<f64> {
    if values.len() != times.len() {
        return Err(QslError::GridMismatch(format!(
            "{} values on {} grid points",
            values.len(),
            times.len()
        )));
    }
    if times.len() < 2 {
        return Err(QslError::GridMismatch("need at least two grid points".into()));
    }
    let n = times.len() - 1;
    let h = (times[n] - times[0]) / n as f64;
    if !(h.is_finite() && h > 0.0) {
        return Err(QslError::GridMismatch("grid must be strictly increasing".into()));
    }
    let scale = (times[n] - times[0]).abs().max(1.0);
    for (k, &t) in times.iter().enumerate() {
        if (t - times[0] - k as f64 * h).abs() > GRID_TOL * scale {
            return Err(QslError::GridMismatch(format!("grid not uniform at index {k}")));
        }
    }
    Ok(h)
}

/// Cumulative integrals I_k = ∫_{t₀}^{t_k} f dt on a uniform grid of spacing `h`.
///
/// Composite Simpson on an even number of intervals; an odd count ends with
/// a 3/8-rule panel over the last three intervals (trapezoid for k = 1).
pub fn cumulative_integrals(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut even = vec![0.0; n];
    let mut k = 2;
    while k < n {
        even[k] = even[k - 2] + h / 3.0 * (values[k - 2] + 4.0 * values[k - 1] + values[k]);
        k += 2;
    }
    (0..n)
        .map(|k| match k {
            0 => 0.0,
            1 => 0.5 * h * (values[0] + values[1]),
            _ if k % 2 == 0 => even[k],
            _ => {
                even[k - 3]
                    + 3.0 * h / 8.0
                        * (values[k - 3] + 3.0 * values[k - 2] + 3.0 * values[k - 1] + values[k])
            }
        })
        .collect()
}

/// (1/τ) ∫₀^τ f dt by composite Simpson quadrature.
pub fn time_average(values: &[f64], times: &[f64]) -> Result<f64> {
    let h = check_grid(values, times)?;
    let span = times[times.len() - 1] - times[0];
    Ok(cumulative_integrals(values, h)[values.len() - 1] / span)
}

/// (1/τ) ∫₀^τ f dt by the trapezoid rule.
pub fn trapezoid_average(values: &[f64], times: &[f64]) -> Result<f64> {
    let h = check_grid(values, times)?;
    let n = values.len() - 1;
    let inner: f64 = values[1..n].iter().sum();
    Ok(h * (0.5 * (values[0] + values[n]) + inner) / (times[n] - times[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{oun_decoherence_function, Channel, OunParams};
    use crate::states::bell_psi_plus;

    fn grid(n: usize, tau: f64) -> Vec<f64> {
        (0..=n).map(|k| tau * k as f64 / n as f64).collect()
    }

    #[test]
    fn idle_generator_keeps_state() {
        let rho0 = bell_psi_plus();
        let traj = evolve(&Channel::Idle.generator(), &rho0, 1.0, 10).unwrap();
        assert_eq!(traj.len(), 11);
        for s in &traj.states {
            assert!(s.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
        }
    }

    #[test]
    fn bad_steps() {
        let gen = Channel::Idle.generator();
        assert!(matches!(evolve(&gen, &bell_psi_plus(), 1.0, 8), Err(QslError::BadSteps(8))));
        assert!(matches!(evolve(&gen, &bell_psi_plus(), 1.0, 11), Err(QslError::BadSteps(11))));
    }

    #[test]
    fn oun_bell_coherence_follows_decoherence_function() {
        let p = OunParams::new(1.0, 0.1).unwrap();
        let traj = evolve(&Channel::Oun(p).generator(), &bell_psi_plus(), 1.0, 2000).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let pt = oun_decoherence_function(&p, *t).unwrap();
            assert!((s.matrix()[(1, 2)].re - 0.5 * pt * pt).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn time_average_references() {
        let t = grid(10, 2.0);
        assert!((time_average(&[3.5; 11], &t).unwrap() - 3.5).abs() < 1e-14);
        let t = grid(2000, 1.0);
        let ramp: Vec<f64> = t.clone();
        assert!((time_average(&ramp, &t).unwrap() - 0.5).abs() < 1e-14);
        let sine: Vec<f64> = t.iter().map(|x| (std::f64::consts::PI * x).sin()).collect();
        assert!((time_average(&sine, &t).unwrap() - 2.0 / std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn cumulative_integrals_on_odd_nodes() {
        // cubic integrand: both Simpson and the 3/8 panel are exact
        let h = 0.1;
        let f: Vec<f64> = (0..12).map(|k| (k as f64 * h).powi(3)).collect();
        let cum = cumulative_integrals(&f, h);
        for (k, value) in cum.iter().enumerate().skip(2) {
            let t = k as f64 * h;
            assert!((value - t.powi(4) / 4.0).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn grid_errors() {
        let t = grid(4, 1.0);
        assert!(matches!(time_average(&[1.0; 4], &t), Err(QslError::GridMismatch(_))));
        let bent = vec![0.0, 0.1, 0.5, 0.6, 1.0];
        assert!(matches!(time_average(&[1.0; 5], &bent), Err(QslError::GridMismatch(_))));
    }

    #[test]
    fn default_step_counts() {
        assert_eq!(default_steps(1.0), 2000);
        assert_eq!(default_steps(2.5), 5000);
        assert_eq!(default_steps(0.001), 10);
        assert_eq!(default_steps(0.0013), 10);
        assert_eq!(default_steps(0.00555), 12);
    }
}
