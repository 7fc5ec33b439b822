//! The two decoherence channels and their generators.
//!
//! * Ornstein-Uhlenbeck dephasing acting identically on both qubits with
//!   rate γ(t) = κ(1 − e^{−λt})/4.
//! * Two identical atoms coupled to a common vacuum: collective damping
//!   Λ₁₂ and dipole-dipole coupling M₁₂ on top of single-atom emission Λ.
//!
//! Generators act on 4×4 system operators and, as L ⊗ id, on 16×16
//! operators of system ⊗ ancilla. Closed-form trajectories for the scenario
//! initial states live here as well; the tests and the self-test compare the
//! integrator against them.

use nalgebra::DMatrix;

use crate::error::{QslError, Result};
use crate::linalg::{kron, pauli, ComplexMatrix, LowRankHermitian, C64, I, ONE, ZERO};
use crate::states::DensityMatrix;

/// Parameters of the Ornstein-Uhlenbeck dephasing channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OunParams {
    /// Coupling strength κ (inverse time).
    pub kappa: f64,
    /// Inverse reservoir correlation time λ.
    pub lambda: f64,
}

impl OunParams {
    pub fn new(kappa: f64, lambda: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(QslError::BadParams(format!("kappa must be positive and finite, got {kappa}")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(QslError::BadParams(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(Self { kappa, lambda })
    }

    // t + (e^{−λt} − 1)/λ, accurate for small λt
    fn memory_integral(&self, t: f64) -> f64 {
        t + (-self.lambda * t).exp_m1() / self.lambda
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(QslError::BadParams(format!("time must be finite and non-negative, got {t}")))
    }
}

/// p_t = exp(−κ/2 {t + (e^{−λt} − 1)/λ}).
pub fn oun_decoherence_function(p: &OunParams, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((-0.5 * p.kappa * p.memory_integral(t)).exp())
}

/// γ(t) = −ṗ_t/(2p_t) = κ(1 − e^{−λt})/4.
pub fn oun_rate(p: &OunParams, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(-0.25 * p.kappa * (-p.lambda * t).exp_m1())
}

/// Fidelity of separability of the dephased |ψ+>:
/// ½(1 + √(1 − exp(−2κ(t + (e^{−λt} − 1)/λ)))).
pub fn oun_bell_separable_fidelity(p: &OunParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let decay = (-2.0 * p.kappa * p.memory_integral(t)).exp();
    Ok(0.5 * (1.0 + (1.0 - decay).max(0.0).sqrt()))
}

/// Parameters of the collective two-atom model (identical atoms).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollectiveParams {
    /// Single-atom spontaneous emission rate Λ.
    pub emission: f64,
    /// Collective damping Λ₁₂.
    pub collective_damping: f64,
    /// Dipole-dipole coupling M₁₂.
    pub dipole_coupling: f64,
    /// Atomic transition frequency ω.
    pub frequency: f64,
}

impl CollectiveParams {
    pub fn new(emission: f64, collective_damping: f64, dipole_coupling: f64, frequency: f64) -> Result<Self> {
        if !(emission.is_finite() && emission > 0.0) {
            return Err(QslError::BadParams(format!("Lambda must be positive and finite, got {emission}")));
        }
        if !collective_damping.is_finite() || collective_damping.abs() > emission {
            return Err(QslError::BadParams(format!(
                "|Lambda12| = {} must not exceed Lambda = {emission}",
                collective_damping.abs()
            )));
        }
        if !dipole_coupling.is_finite() {
            return Err(QslError::BadParams(format!("M12 must be finite, got {dipole_coupling}")));
        }
        if !(frequency.is_finite() && frequency >= 0.0) {
            return Err(QslError::BadParams(format!("omega must be finite and non-negative, got {frequency}")));
        }
        Ok(Self { emission, collective_damping, dipole_coupling, frequency })
    }

    /// Λ = 1, Λ₁₂ = 0.95Λ, M₁₂ = 4.65Λ, ω-term off.
    pub fn reference() -> Self {
        Self::new(1.0, 0.95, 4.65, 0.0).expect("reference parameters are valid")
    }
}

/// Collective damping Λ₁₂ and dipole-dipole coupling M₁₂ of two identical
/// atoms a distance r apart (μ₀r in units of the inverse wavenumber), with
/// `d_dot_r` the cosine between dipole and interatomic axis.
pub fn collective_couplings(mu0_r: f64, d_dot_r: f64, emission: f64) -> Result<(f64, f64)> {
    if !(mu0_r.is_finite() && mu0_r > 0.0) {
        return Err(QslError::BadGeometry(format!("mu0_r must be positive, got {mu0_r}")));
    }
    if !(d_dot_r.is_finite() && d_dot_r.abs() <= 1.0) {
        return Err(QslError::BadGeometry(format!("d.r must lie in [-1, 1], got {d_dot_r}")));
    }
    if !(emission.is_finite() && emission > 0.0) {
        return Err(QslError::BadParams(format!("Lambda must be positive, got {emission}")));
    }
    let x = mu0_r;
    let (s, c) = x.sin_cos();
    let transverse = 1.0 - d_dot_r * d_dot_r;
    let longitudinal = 1.0 - 3.0 * d_dot_r * d_dot_r;
    let damping =
        1.5 * emission * (transverse * s / x + longitudinal * (c / (x * x) - s / (x * x * x)));
    let coupling =
        0.75 * emission * (-transverse * c / x + longitudinal * (s / (x * x) - c / (x * x * x)));
    Ok((damping, coupling))
}

/// Concurrence of the collective evolution of |g1 e2>:
/// e^{−tΛ} |sin(2tM₁₂) + i sinh(tΛ₁₂)|.
pub fn collective_g1e2_concurrence(p: &CollectiveParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let a = (2.0 * t * p.dipole_coupling).sin();
    let b = (t * p.collective_damping).sinh();
    Ok((-t * p.emission).exp() * a.hypot(b))
}

pub fn collective_g1e2_separable_fidelity(p: &CollectiveParams, t: f64) -> Result<f64> {
    let c = collective_g1e2_concurrence(p, t)?;
    Ok(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

/// ½(1 + √(1 − e^{−2t(Λ+Λ₁₂)})) for the collective evolution of |ψ+>.
pub fn collective_psi_plus_separable_fidelity(p: &CollectiveParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let decay = (-2.0 * t * (p.emission + p.collective_damping)).exp();
    Ok(0.5 * (1.0 + (1.0 - decay).max(0.0).sqrt()))
}

/// Mixing parameter x = e^{−tΛ} F_P / (e^{tΛ} − cosh(tΛ₁₂)) proposed for the
/// |g1 e2> family. Not finite at t = 0.
pub fn collective_g1e2_sigma_mixing(p: &CollectiveParams, t: f64, fp: f64) -> f64 {
    (-t * p.emission).exp() * fp / ((t * p.emission).exp() - (t * p.collective_damping).cosh())
}

/// Mixing parameter x = 4 e^{t(Λ+Λ₁₂)} F_P proposed for the |ψ+> family.
pub fn collective_psi_plus_sigma_mixing(p: &CollectiveParams, t: f64, fp: f64) -> f64 {
    4.0 * (t * (p.emission + p.collective_damping)).exp() * fp
}

/// Decoherence channel selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Channel {
    Oun(OunParams),
    Collective(CollectiveParams),
    /// L = 0; useful as a baseline.
    Idle,
}

impl Channel {
    pub fn generator(&self) -> Generator {
        Generator::new(*self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Channel::Oun(_) => "oun",
            Channel::Collective(_) => "collective",
            Channel::Idle => "idle",
        }
    }
}

#[derive(Clone, Debug)]
enum Rate {
    Constant(f64),
    Dephasing(OunParams),
}

impl Rate {
    fn at(&self, t: f64) -> f64 {
        match self {
            Rate::Constant(r) => *r,
            Rate::Dephasing(p) => -0.25 * p.kappa * (-p.lambda * t).exp_m1(),
        }
    }
}

#[derive(Clone, Debug)]
struct Jump {
    rate: Rate,
    op: ComplexMatrix,
    op_dag: ComplexMatrix,
    op_dag_op: ComplexMatrix,
}

#[derive(Clone, Debug)]
struct OperatorSet {
    hamiltonian: Option<ComplexMatrix>,
    jumps: Vec<Jump>,
}

impl OperatorSet {
    fn lifted(&self) -> OperatorSet {
        let id = ComplexMatrix::identity(4).expect("dim 4");
        let lift = |m: &ComplexMatrix| kron(m, &id).expect("dim 16");
        OperatorSet {
            hamiltonian: self.hamiltonian.as_ref().map(lift),
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    rate: j.rate.clone(),
                    op: lift(&j.op),
                    op_dag: lift(&j.op_dag),
                    op_dag_op: lift(&j.op_dag_op),
                })
                .collect(),
        }
    }

    fn apply(&self, t: f64, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.dim()).expect("supported dimension");
        if let Some(h) = &self.hamiltonian {
            let comm = &(h * x) - &(x * h);
            out = &out + &comm.scale(-I);
        }
        for j in &self.jumps {
            let r = j.rate.at(t);
            if r == 0.0 {
                continue;
            }
            let sandwich = &(&j.op * x) * &j.op_dag;
            let anti = &(&j.op_dag_op * x) + &(x * &j.op_dag_op);
            let term = &sandwich - &anti.scale_real(0.5);
            out = &out + &term.scale_real(r);
        }
        out
    }
}

impl OperatorSet {
    /// Image of |v><v| as W M W† with W = [v, Hv, J₁v, J₁†J₁v, …].
    fn apply_pure(&self, t: f64, v: &[C64]) -> LowRankHermitian {
        let mut vectors = vec![v.to_vec()];
        let mut entries: Vec<(usize, usize, C64)> = Vec::new();
        if let Some(h) = &self.hamiltonian {
            vectors.push(h.apply(v));
            let hv = vectors.len() - 1;
            entries.push((hv, 0, -I));
            entries.push((0, hv, I));
        }
        for j in &self.jumps {
            let r = j.rate.at(t);
            if r == 0.0 {
                continue;
            }
            vectors.push(j.op.apply(v));
            let jv = vectors.len() - 1;
            vectors.push(j.op_dag_op.apply(v));
            let kv = vectors.len() - 1;
            entries.push((jv, jv, C64::new(r, 0.0)));
            entries.push((kv, 0, C64::new(-0.5 * r, 0.0)));
            entries.push((0, kv, C64::new(-0.5 * r, 0.0)));
        }
        let m = vectors.len();
        let mut coeffs = DMatrix::<C64>::zeros(m, m);
        for (a, b, z) in entries {
            coeffs[(a, b)] += z;
        }
        LowRankHermitian::new(vectors, coeffs).expect("at most 2 + 2·jumps factors")
    }
}

fn jump(rate: Rate, op: ComplexMatrix) -> Jump {
    let op_dag = op.adjoint();
    let op_dag_op = &op_dag * &op;
    Jump { rate, op, op_dag, op_dag_op }
}

/// Time-dependent generator L_t of ρ̇ = L_t ρ in Lindblad form
/// −i[H, ρ] + Σ_k r_k(t) (A_k ρ A_k† − ½{A_k†A_k, ρ}).
#[derive(Clone, Debug)]
pub struct Generator {
    channel: Channel,
    system: OperatorSet,
    extended: OperatorSet,
}

fn lowering() -> ComplexMatrix {
    // S⁻ = |g><e| = |0><1|
    ComplexMatrix::from_row_slice(2, &[ZERO, ONE, ZERO, ZERO]).expect("dim 2")
}

fn on_first(op: &ComplexMatrix) -> ComplexMatrix {
    kron(op, &pauli::identity()).expect("dim 4")
}

fn on_second(op: &ComplexMatrix) -> ComplexMatrix {
    kron(&pauli::identity(), op).expect("dim 4")
}

impl Generator {
    pub fn new(channel: Channel) -> Self {
        let system = match channel {
            Channel::Idle => OperatorSet { hamiltonian: None, jumps: vec![] },
            Channel::Oun(p) => OperatorSet {
                hamiltonian: None,
                jumps: vec![
                    jump(Rate::Dephasing(p), on_first(&pauli::z())),
                    jump(Rate::Dephasing(p), on_second(&pauli::z())),
                ],
            },
            Channel::Collective(p) => {
                let s1m = on_first(&lowering());
                let s2m = on_second(&lowering());
                let s1p = s1m.adjoint();
                let s2p = s2m.adjoint();
                // S^z = ½(|e><e| − |g><g|) = −σz/2
                let sz = pauli::z().scale_real(-0.5);
                let energy = &on_first(&sz) + &on_second(&sz);
                let exchange = &(&s1p * &s2m) + &(&s2p * &s1m);
                let h = &energy.scale_real(p.frequency) + &exchange.scale_real(p.dipole_coupling);
                // Diagonalized damping matrix [[Λ, Λ₁₂], [Λ₁₂, Λ]]:
                // symmetric channel at Λ+Λ₁₂, antisymmetric at Λ−Λ₁₂.
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let sym = (&s1m + &s2m).scale_real(s);
                let anti = (&s1m - &s2m).scale_real(s);
                OperatorSet {
                    hamiltonian: Some(h),
                    jumps: vec![
                        jump(Rate::Constant(p.emission + p.collective_damping), sym),
                        jump(Rate::Constant(p.emission - p.collective_damping), anti),
                    ],
                }
            }
        };
        let extended = system.lifted();
        Self { channel, system, extended }
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    /// L_t applied to a 4×4 operator, or L_t ⊗ id applied to a 16×16 one.
    pub fn apply(&self, t: f64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        match x.dim() {
            4 => Ok(self.system.apply(t, x)),
            16 => Ok(self.extended.apply(t, x)),
            d => Err(QslError::BadDim(format!("generator acts on 4x4 or 16x16, got {d}x{d}"))),
        }
    }

    /// L_t (or L_t ⊗ id) applied to the pure projector |v><v|, in factored form.
    pub fn apply_pure(&self, t: f64, v: &[C64]) -> Result<LowRankHermitian> {
        match v.len() {
            4 => Ok(self.system.apply_pure(t, v)),
            16 => Ok(self.extended.apply_pure(t, v)),
            d => Err(QslError::BadDim(format!("generator acts on vectors of length 4 or 16, got {d}"))),
        }
    }

    pub fn apply_state(&self, t: f64, rho: &DensityMatrix) -> ComplexMatrix {
        self.system.apply(t, rho.matrix())
    }

    /// Whether the generator is identically zero.
    pub fn is_idle(&self) -> bool {
        matches!(self.channel, Channel::Idle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::MatrixNorms;
    use crate::states::{bell_psi_plus, state_g1e2};

    #[test]
    fn decoherence_function_limits() {
        let p = OunParams::new(1.0, 0.1).unwrap();
        assert_eq!(oun_decoherence_function(&p, 0.0).unwrap(), 1.0);
        let weak = OunParams::new(1e-14, 0.1).unwrap();
        for t in [0.5, 1.0, 10.0] {
            assert!((oun_decoherence_function(&weak, t).unwrap() - 1.0).abs() < 1e-12);
        }
        // λt = 50: e^{−λt} is negligible, p_t → exp(−κ(t − 1/λ)/2)
        let p = OunParams::new(0.3, 2.0).unwrap();
        let t = 25.0;
        let asymptotic = (-0.5 * p.kappa * (t - 1.0 / p.lambda)).exp();
        assert!((oun_decoherence_function(&p, t).unwrap() - asymptotic).abs() < 1e-10);
        assert!(oun_decoherence_function(&p, -1.0).is_err());
    }

    #[test]
    fn decoherence_function_strictly_decreasing() {
        let p = OunParams::new(1.0, 0.1).unwrap();
        let mut prev = oun_decoherence_function(&p, 0.0).unwrap();
        for k in 1..200 {
            let now = oun_decoherence_function(&p, 0.05 * k as f64).unwrap();
            assert!(now < prev);
            prev = now;
        }
    }

    #[test]
    fn rate_matches_central_difference() {
        let p = OunParams::new(1.0, 0.1).unwrap();
        let t = 0.7;
        let h = 1e-5;
        let pt = |s: f64| oun_decoherence_function(&p, s).unwrap();
        let derivative = (pt(t + h) - pt(t - h)) / (2.0 * h);
        let fd = -derivative / (2.0 * pt(t));
        assert!((oun_rate(&p, t).unwrap() - fd).abs() < 1e-6);
        assert_eq!(oun_rate(&p, 0.0).unwrap(), 0.0);
        assert!((oun_rate(&p, 1e4).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(OunParams::new(0.0, 1.0).is_err());
        assert!(OunParams::new(1.0, -1.0).is_err());
        assert!(CollectiveParams::new(1.0, 1.5, 0.0, 0.0).is_err());
        assert!(CollectiveParams::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(CollectiveParams::new(1.0, -1.0, 3.0, 0.0).is_ok());
    }

    #[test]
    fn dephasing_fixes_diagonal_states() {
        let gen = Channel::Oun(OunParams::new(2.0, 0.5).unwrap()).generator();
        let rho = DensityMatrix::from_diagonal([0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(gen.apply_state(1.3, &rho).max_abs() < 1e-15);
    }

    #[test]
    fn dephasing_damps_bell_coherence_at_four_gamma() {
        let p = OunParams::new(1.0, 0.1).unwrap();
        let gen = Channel::Oun(p).generator();
        let t = 0.8;
        let d = gen.apply_state(t, &bell_psi_plus());
        let gamma = oun_rate(&p, t).unwrap();
        assert!((d[(1, 2)] - C64::new(-4.0 * gamma * 0.5, 0.0)).norm() < 1e-15);
        assert!(d[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn factored_pure_image_matches_dense() {
        let v: Vec<C64> = (0..16).map(|k| C64::new((k as f64).sin(), (0.3 * k as f64).cos())).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.into_iter().map(|z| z / norm).collect();
        let projector = ComplexMatrix::outer(&v, &v).unwrap();
        for ch in [
            Channel::Oun(OunParams::new(1.3, 0.4).unwrap()),
            Channel::Collective(CollectiveParams::new(1.0, 0.95, 4.65, 0.7).unwrap()),
        ] {
            let gen = ch.generator();
            let dense = gen.apply(0.9, &projector).unwrap();
            let factored = gen.apply_pure(0.9, &v).unwrap();
            assert!(factored.to_dense().unwrap().max_abs_diff(&dense) < 1e-13);
            let (a, b) = (MatrixNorms::of(&dense), factored.norms());
            assert!((a.op - b.op).abs() < 1e-12 && (a.tr - b.tr).abs() < 1e-12 && (a.hs - b.hs).abs() < 1e-12);
        }
        assert!(Channel::Idle.generator().apply_pure(0.0, &v[..3]).is_err());
    }

    #[test]
    fn vacuum_is_stationary() {
        let gen = Channel::Collective(CollectiveParams::new(1.0, 0.95, 4.65, 2.0).unwrap()).generator();
        let gg = DensityMatrix::from_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(gen.apply_state(0.3, &gg).max_abs() < 1e-15);
    }

    #[test]
    fn single_excitation_decays_at_lambda() {
        // d/dt <01|ρ|01> = −Λ for |01> (population leaves through both channels)
        let p = CollectiveParams::new(1.0, 0.5, 0.0, 0.0).unwrap();
        let d = p.generator_for_test().apply_state(0.0, &state_g1e2());
        assert!((d[(1, 1)].re + 1.0).abs() < 1e-14);
        assert!((d[(0, 0)].re - 1.0).abs() < 1e-14);
        // collective damping transfers coherence to |10>
        assert!((d[(1, 2)].re + 0.25).abs() < 1e-14);
    }

    impl CollectiveParams {
        fn generator_for_test(&self) -> Generator {
            Channel::Collective(*self).generator()
        }
    }

    #[test]
    fn coupling_small_distance_limit() {
        // Taylor expansion at d ⊥ r: Λ₁₂/Λ = 1 − x²/5 + O(x⁴)
        for x in [1e-2, 3e-3] {
            let (damping, _) = collective_couplings(x, 0.0, 1.0).unwrap();
            assert!((damping - (1.0 - x * x / 5.0)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn coupling_at_pi() {
        // sin π = 0, cos π = −1 evaluated by hand:
        // Λ₁₂ = 1.5 (−1/π²), M₁₂ = 0.75 (1/π + 1/π³)
        let (damping, coupling) = collective_couplings(std::f64::consts::PI, 0.0, 1.0).unwrap();
        let pi = std::f64::consts::PI;
        assert!((damping - 1.5 * (-1.0 / (pi * pi))).abs() < 1e-12);
        assert!((coupling - 0.75 * (1.0 / pi + 1.0 / pi.powi(3))).abs() < 1e-12);
    }

    #[test]
    fn coupling_at_reference_distance() {
        let (damping, coupling) = collective_couplings(0.08, 0.0, 1.0).unwrap();
        assert!((damping - 0.999).abs() < 1e-3);
        assert!(coupling < -1000.0);
        assert!(collective_couplings(0.0, 0.0, 1.0).is_err());
        assert!(collective_couplings(0.1, 1.5, 1.0).is_err());
    }

    #[test]
    fn extended_generator_rejects_other_dims() {
        let gen = Channel::Idle.generator();
        let two = pauli::z();
        assert!(gen.apply(0.0, &two).is_err());
    }
}
