//! Speed-limit times for the change of Bures entanglement and discord.
//!
//! Both bounds share the form τ ≥ 2ΔQ(1 − (2Q₀ ∓ ΔQ)/2) / K, where K is
//! the time average of ‖(L_t⊗id)|ψ_ρ⟩⟨ψ_ρ|‖ + ‖(L_t⊗id)|φ_σ⟩⟨φ_σ|‖ over
//! spectral purifications of the evolving state ρ_t and of its closest
//! separable state σ_t, for the operator, trace and Hilbert-Schmidt norms.

use rayon::prelude::*;

use crate::channels::{
    collective_g1e2_sigma_mixing, collective_psi_plus_sigma_mixing, Channel, Generator,
};
use crate::correlations::{
    bures_discord_bell_diagonal, bures_entanglement, concurrence, correlation_change,
    separable_fidelity_from_concurrence, CorrelationAmount, Direction,
};
use crate::dynamics::{cumulative_integrals, evolve, Trajectory};
use crate::error::{QslError, Result};
use crate::linalg::{fidelity_from_roots, sqrt_psd, ComplexMatrix, MatrixNorms};
use crate::states::{
    bell_coeffs, purify, separable_collective_sigma, separable_oun_sigma, DensityMatrix,
    InitialState,
};

/// K values at or below this count as "no dynamics".
pub const K_FLOOR: f64 = 1e-14;
/// Slack allowed when a mixing formula is audited against the grid optimum.
pub const SIGMA_AUDIT_TOL: f64 = 1e-4;
const SIGMA_GRID_POINTS: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Entanglement,
    Discord,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Entanglement => "entanglement",
            Measure::Discord => "discord",
        }
    }
}

/// Norms of the generator images of both purified projectors at one node.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormSample {
    pub rho: MatrixNorms,
    pub sigma: MatrixNorms,
}

impl NormSample {
    pub fn total(&self) -> MatrixNorms {
        self.rho + self.sigma
    }
}

fn generator_image_norms(gen: &Generator, t: f64, state: &DensityMatrix) -> Result<MatrixNorms> {
    let psi = purify(state)?;
    Ok(gen.apply_pure(t, psi.vector())?.norms())
}

/// Per-node norms of (L_t⊗id) applied to the purifications of ρ_t and σ_t.
pub fn norm_integrands(
    gen: &Generator,
    traj: &Trajectory,
    sigma: &[DensityMatrix],
) -> Result<Vec<NormSample>> {
    if sigma.len() != traj.len() {
        return Err(QslError::GridMismatch(format!(
            "{} separable states for {} trajectory nodes",
            sigma.len(),
            traj.len()
        )));
    }
    traj.times
        .iter()
        .zip(&traj.states)
        .zip(sigma)
        .map(|((&t, rho), s)| {
            Ok(NormSample {
                rho: generator_image_norms(gen, t, rho)?,
                sigma: generator_image_norms(gen, t, s)?,
            })
        })
        .collect()
}

/// How the separable state at a node was chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaSource {
    /// A fixed state, optimal for the whole trajectory.
    Fixed,
    /// The closed-form mixing parameter, which passed the audit.
    Formula,
    /// The best mixing parameter found by grid search and refinement.
    GridSearch,
}

#[derive(Clone, Debug)]
pub struct SigmaNode {
    pub sigma: DensityMatrix,
    /// Mixing parameter of the diagonal family, when one is used.
    pub mixing: Option<f64>,
    /// The closed-form mixing parameter at this node, possibly outside [0, 1].
    pub formula_mixing: Option<f64>,
    pub source: SigmaSource,
    /// F(ρ_t, σ_t).
    pub fidelity: f64,
}

struct FamilyFit {
    x: f64,
    fidelity: f64,
}

fn family_fidelity(sqrt_rho: &ComplexMatrix, kind: InitialState, x: f64) -> f64 {
    let diag = match kind {
        InitialState::G1E2 => [x.sqrt(), 0.0, 0.0, (1.0 - x).sqrt()],
        InitialState::BellPsiPlus => [0.0, x.sqrt(), 0.0, (1.0 - x).sqrt()],
    };
    let root = ComplexMatrix::from_real_diagonal(&diag).expect("dim 4");
    fidelity_from_roots(sqrt_rho, &root)
}

/// Maximizes F over the diagonal family: a uniform grid, then golden-section
/// search around the best grid point (√F is concave in x). Ties go to larger x.
fn best_family_member(sqrt_rho: &ComplexMatrix, kind: InitialState) -> FamilyFit {
    let f = |x: f64| family_fidelity(sqrt_rho, kind, x);
    let n = SIGMA_GRID_POINTS - 1;
    let mut best = FamilyFit { x: 0.0, fidelity: f64::NEG_INFINITY };
    for j in 0..=n {
        let x = j as f64 / n as f64;
        let v = f(x);
        if v >= best.fidelity {
            best = FamilyFit { x, fidelity: v };
        }
    }
    let width = 1.0 / n as f64;
    let (mut a, mut b) = ((best.x - width).max(0.0), (best.x + width).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let v = f(x);
    if v > best.fidelity {
        best = FamilyFit { x, fidelity: v };
    }
    best
}

/// Closest separable state at every trajectory node.
///
/// The dephasing channel keeps ½(|01⟩⟨01| + |10⟩⟨10|) optimal throughout.
/// For collective decay the closed-form mixing parameter is used only if it
/// lies in [0, 1] and its fidelity is within 1e−4 of the best member of the
/// diagonal family; otherwise the best member is used.
pub fn closest_separable_trajectory(
    channel: &Channel,
    initial: InitialState,
    traj: &Trajectory,
) -> Result<Vec<SigmaNode>> {
    let fixed = |sigma: DensityMatrix| -> Result<Vec<SigmaNode>> {
        traj.states
            .iter()
            .map(|rho| {
                Ok(SigmaNode {
                    fidelity: rho.fidelity(&sigma)?,
                    sigma: sigma.clone(),
                    mixing: None,
                    formula_mixing: None,
                    source: SigmaSource::Fixed,
                })
            })
            .collect()
    };
    match (channel, initial) {
        (Channel::Oun(_), InitialState::BellPsiPlus) | (Channel::Idle, InitialState::BellPsiPlus) => {
            fixed(separable_oun_sigma())
        }
        (Channel::Idle, InitialState::G1E2) => fixed(InitialState::G1E2.state()),
        (Channel::Oun(_), InitialState::G1E2) => Err(QslError::UnsupportedScenario(
            "no closest separable state for |g1 e2> under dephasing".into(),
        )),
        (Channel::Collective(p), kind) => traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, rho)| {
                let sqrt_rho = sqrt_psd(rho.matrix())?;
                let fp = separable_fidelity_from_concurrence(concurrence(rho)?)?;
                let formula = match kind {
                    InitialState::G1E2 => collective_g1e2_sigma_mixing(p, t, fp),
                    InitialState::BellPsiPlus => collective_psi_plus_sigma_mixing(p, t, fp),
                };
                let best = best_family_member(&sqrt_rho, kind);
                let formula_fit = (formula.is_finite() && (0.0..=1.0).contains(&formula))
                    .then(|| family_fidelity(&sqrt_rho, kind, formula))
                    .filter(|&f| f >= best.fidelity - SIGMA_AUDIT_TOL);
                let (x, fidelity, source) = match formula_fit {
                    Some(f) => (formula, f, SigmaSource::Formula),
                    None => (best.x, best.fidelity, SigmaSource::GridSearch),
                };
                Ok(SigmaNode {
                    sigma: separable_collective_sigma(kind, x)?,
                    mixing: Some(x),
                    formula_mixing: Some(formula),
                    source,
                    fidelity,
                })
            })
            .collect(),
    }
}

/// Time averages of the summed norm integrands.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KAverages {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
}

impl KAverages {
    fn min(&self) -> f64 {
        self.op.min(self.tr).min(self.hs)
    }
}

/// K over [0, t_k] for every end node k; at k = 0 the integrand itself.
pub fn running_k_averages(samples: &[NormSample], times: &[f64]) -> Result<Vec<KAverages>> {
    if samples.len() != times.len() || times.len() < 2 {
        return Err(QslError::GridMismatch(format!(
            "{} samples on {} grid points",
            samples.len(),
            times.len()
        )));
    }
    let h = times[1] - times[0];
    let totals: Vec<MatrixNorms> = samples.iter().map(NormSample::total).collect();
    let cum = |f: fn(&MatrixNorms) -> f64| {
        cumulative_integrals(&totals.iter().map(f).collect::<Vec<_>>(), h)
    };
    let (op, tr, hs) = (cum(|m| m.op), cum(|m| m.tr), cum(|m| m.hs));
    Ok((0..times.len())
        .map(|k| {
            if k == 0 {
                KAverages { op: totals[0].op, tr: totals[0].tr, hs: totals[0].hs }
            } else {
                let span = times[k] - times[0];
                KAverages { op: op[k] / span, tr: tr[k] / span, hs: hs[k] / span }
            }
        })
        .collect())
}

/// 2ΔQ(1 − (2Q₀ ∓ ΔQ)/2), minus for decay and plus for creation.
pub fn correlation_factor(amount: &CorrelationAmount) -> f64 {
    let dq = amount.change;
    let q0 = amount.initial;
    match amount.direction {
        Direction::Decay => 2.0 * dq * (1.0 - (2.0 * q0 - dq) / 2.0),
        Direction::Creation => 2.0 * dq * (1.0 - (2.0 * q0 + dq) / 2.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QslResult {
    pub amount: CorrelationAmount,
    pub k: KAverages,
    pub tau_op: f64,
    pub tau_tr: f64,
    pub tau_hs: f64,
    pub tau_unified: f64,
    /// The driving time over which the change actually happened.
    pub tau_actual: f64,
}

fn tau_qc(amount: CorrelationAmount, k: KAverages, tau_actual: f64) -> Result<QslResult> {
    if k.min().is_nan() || k.min() <= K_FLOOR {
        return Err(QslError::NoDynamics);
    }
    let factor = correlation_factor(&amount);
    let (tau_op, tau_tr, tau_hs) = (factor / k.op, factor / k.tr, factor / k.hs);
    Ok(QslResult {
        amount,
        k,
        tau_op,
        tau_tr,
        tau_hs,
        tau_unified: tau_op.max(tau_tr).max(tau_hs),
        tau_actual,
    })
}

/// Minimum time for a change of Bures entanglement.
pub fn tau_qc_entanglement(amount: CorrelationAmount, k: KAverages, tau_actual: f64) -> Result<QslResult> {
    tau_qc(amount, k, tau_actual)
}

/// Minimum time for a change of Bures discord.
pub fn tau_qc_discord(amount: CorrelationAmount, k: KAverages, tau_actual: f64) -> Result<QslResult> {
    tau_qc(amount, k, tau_actual)
}

/// One channel, initial state, measure and driving time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub channel: Channel,
    pub initial: InitialState,
    pub measure: Measure,
    pub tau: f64,
    pub steps: usize,
}

/// Measures and speed limit at one grid node, treated as the end time.
#[derive(Clone, Copy, Debug)]
pub struct NodeSample {
    pub t: f64,
    pub concurrence: f64,
    pub e_bures: f64,
    /// Only defined for Bell-diagonal states outside the collective model.
    pub d_bures: Option<f64>,
    pub f_p: f64,
    pub norms: NormSample,
    pub result: QslResult,
}

#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub trajectory: Trajectory,
    pub sigma: Vec<SigmaNode>,
    pub nodes: Vec<NodeSample>,
}

impl ScenarioRun {
    /// The speed limit with the full driving time as end time.
    pub fn final_result(&self) -> &QslResult {
        &self.nodes.last().expect("trajectory has nodes").result
    }

    /// Nodes where the closest separable state came from the grid search.
    pub fn sigma_overrides(&self) -> usize {
        self.sigma.iter().filter(|s| s.source == SigmaSource::GridSearch).count()
    }
}

fn check_supported(s: &Scenario) -> Result<()> {
    if s.measure == Measure::Discord && matches!(s.channel, Channel::Collective(_)) {
        return Err(QslError::UnsupportedScenario(
            "discord speed limit is not available for the collective model".into(),
        ));
    }
    Ok(())
}

/// Evolves the scenario and evaluates the speed limit for every end time.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun> {
    check_supported(s)?;
    let gen = s.channel.generator();
    let rho0 = s.initial.state();
    let trajectory = evolve(&gen, &rho0, s.tau, s.steps)?;
    let sigma = closest_separable_trajectory(&s.channel, s.initial, &trajectory)?;
    let sigma_states: Vec<DensityMatrix> = sigma.iter().map(|n| n.sigma.clone()).collect();
    let norms = norm_integrands(&gen, &trajectory, &sigma_states)?;
    let ks = running_k_averages(&norms, &trajectory.times)?;

    let discord_defined = !matches!(s.channel, Channel::Collective(_));
    let mut measures = Vec::with_capacity(trajectory.len());
    for rho in &trajectory.states {
        let c = concurrence(rho)?;
        let d = if discord_defined {
            match bell_coeffs(rho) {
                Ok(coeffs) => Some(bures_discord_bell_diagonal(&coeffs)?),
                Err(QslError::NotBellDiagonal { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        measures.push((c, bures_entanglement(c)?, d, separable_fidelity_from_concurrence(c)?));
    }

    let q = |k: usize| -> Result<f64> {
        let (_, e, d, _) = measures[k];
        match s.measure {
            Measure::Entanglement => Ok(e),
            Measure::Discord => d.ok_or_else(|| {
                QslError::UnsupportedScenario(format!(
                    "discord undefined at t = {}: state is not Bell-diagonal",
                    trajectory.times[k]
                ))
            }),
        }
    };
    let q0 = q(0)?;
    let mut nodes = Vec::with_capacity(trajectory.len());
    for (k, &t) in trajectory.times.iter().enumerate() {
        let amount = correlation_change(q0, q(k)?)?;
        let result = match s.measure {
            Measure::Entanglement => tau_qc_entanglement(amount, ks[k], t),
            Measure::Discord => tau_qc_discord(amount, ks[k], t),
        };
        let result = match result {
            Err(QslError::NoDynamics) if amount.change <= K_FLOOR => QslResult {
                amount,
                k: ks[k],
                tau_op: 0.0,
                tau_tr: 0.0,
                tau_hs: 0.0,
                tau_unified: 0.0,
                tau_actual: t,
            },
            other => other?,
        };
        let (c, e, d, fp) = measures[k];
        nodes.push(NodeSample {
            t,
            concurrence: c,
            e_bures: e,
            d_bures: d,
            f_p: fp,
            norms: norms[k],
            result,
        });
    }
    Ok(ScenarioRun { scenario: *s, trajectory, sigma, nodes })
}

/// Runs independent scenarios on `jobs` worker threads (0 = rayon default).
/// Results come back in input order.
pub fn run_scenarios(scenarios: &[Scenario], jobs: usize) -> Vec<Result<ScenarioRun>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| scenarios.par_iter().map(run_scenario).collect())
}
