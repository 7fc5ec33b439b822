//! Reference checks shared by the acceptance test and `qslcorr selftest`.
//!
//! Each check returns a pass/fail verdict with a one-line detail string.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{
    collective_g1e2_concurrence, collective_psi_plus_separable_fidelity, oun_bell_separable_fidelity,
    Channel, CollectiveParams, OunParams,
};
use crate::correlations::{b_max, bures_discord_bell_diagonal, bures_entanglement, concurrence};
use crate::dynamics::evolve;
use crate::error::Result;
use crate::linalg::{fidelity, kron, partial_trace, MatrixNorms, Subsystem};
use crate::qsl::{run_scenario, Measure, Scenario};
use crate::random;
use crate::states::{bell_coeffs, bell_psi_plus, purify, BellDiagonalCoeffs, InitialState};

/// Seed of every randomized check.
pub const SEED: u64 = 20_240_917;
/// Randomized cases per property.
pub const PROPERTY_CASES: usize = 128;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from(name: &'static str, outcome: Result<(bool, String)>) -> Self {
        match outcome {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check { name, passed: false, detail: format!("error[{}]: {e}", e.code()) },
        }
    }
}

fn oun_reference() -> OunParams {
    OunParams::new(1.0, 0.1).expect("valid")
}

fn separable_fidelity(c: f64) -> f64 {
    0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt())
}

/// The scenarios every speed-limit invariant is checked on.
pub fn golden_scenarios() -> Vec<Scenario> {
    let oun = Channel::Oun(oun_reference());
    let coll = Channel::Collective(CollectiveParams::reference());
    let s = |channel, initial, measure| Scenario { channel, initial, measure, tau: 1.0, steps: 2000 };
    vec![
        s(oun, InitialState::BellPsiPlus, Measure::Entanglement),
        s(oun, InitialState::BellPsiPlus, Measure::Discord),
        s(coll, InitialState::BellPsiPlus, Measure::Entanglement),
        s(coll, InitialState::G1E2, Measure::Entanglement),
    ]
}

fn label(s: &Scenario) -> String {
    format!("{}/{}/{}", s.channel.name(), s.initial.name(), s.measure.name())
}

pub fn bell_reference_values() -> Check {
    Check::from("bell-reference-values", (|| {
        let bell = bell_psi_plus();
        let want = 1.0 - FRAC_1_SQRT_2;
        let e = bures_entanglement(concurrence(&bell)?)?;
        let d = bures_discord_bell_diagonal(&bell_coeffs(&bell)?)?;
        let err = (e - want).abs().max((d - want).abs());
        Ok((err <= 1e-10, format!("E = {e:.15}, D = {d:.15}, max error {err:.2e}")))
    })())
}

pub fn oun_closed_form() -> Check {
    Check::from("oun-closed-form", (|| {
        let p = oun_reference();
        let traj = evolve(&Channel::Oun(p).generator(), &bell_psi_plus(), 1.0, 2000)?;
        let (mut fp_err, mut ed_err) = (0.0_f64, 0.0_f64);
        for (&t, rho) in traj.times.iter().zip(&traj.states) {
            let c = concurrence(rho)?;
            fp_err = fp_err.max((separable_fidelity(c) - oun_bell_separable_fidelity(&p, t)?).abs());
            let e = bures_entanglement(c)?;
            let d = bures_discord_bell_diagonal(&bell_coeffs(rho)?)?;
            ed_err = ed_err.max((e - d).abs());
        }
        Ok((
            fp_err <= 1e-6 && ed_err <= 1e-8,
            format!("max |F_P - closed form| {fp_err:.2e}, max |E - D| {ed_err:.2e}"),
        ))
    })())
}

pub fn collective_closed_forms() -> Check {
    Check::from("collective-closed-forms", (|| {
        let p = CollectiveParams::reference();
        let gen = Channel::Collective(p).generator();
        let g1e2 = evolve(&gen, &InitialState::G1E2.state(), 1.0, 2000)?;
        let mut c_err = 0.0_f64;
        for (&t, rho) in g1e2.times.iter().zip(&g1e2.states) {
            c_err = c_err.max((concurrence(rho)? - collective_g1e2_concurrence(&p, t)?).abs());
        }
        let bell = evolve(&gen, &bell_psi_plus(), 1.0, 2000)?;
        let mut fp_err = 0.0_f64;
        for (&t, rho) in bell.times.iter().zip(&bell.states) {
            let fp = separable_fidelity(concurrence(rho)?);
            fp_err = fp_err.max((fp - collective_psi_plus_separable_fidelity(&p, t)?).abs());
        }
        Ok((
            c_err <= 1e-6 && fp_err <= 1e-6,
            format!("g1e2 max |C - closed form| {c_err:.2e}, psi+ max |F_P - closed form| {fp_err:.2e}"),
        ))
    })())
}

/// τ_op ≥ τ_hs ≥ τ_tr and τ_unified = τ_op at every end time of every
/// golden scenario.
pub fn bound_ordering() -> Check {
    Check::from("bound-ordering", (|| {
        let mut notes = Vec::new();
        let mut passed = true;
        for s in golden_scenarios() {
            let run = run_scenario(&s)?;
            let failures = run
                .nodes
                .iter()
                .filter(|n| {
                    let r = &n.result;
                    let slack = 1e-12 * r.tau_op.abs().max(1.0);
                    r.tau_op + slack < r.tau_hs
                        || r.tau_hs + slack < r.tau_tr
                        || (r.tau_unified - r.tau_op).abs() > slack
                })
                .count();
            passed &= failures == 0;
            notes.push(format!("{}: {failures}/{} nodes out of order", label(&s), run.nodes.len()));
        }
        Ok((passed, notes.join("; ")))
    })())
}

/// τ_unified ≤ t + 1e−6 at every end time t of every golden scenario.
pub fn bound_validity() -> Check {
    Check::from("bound-validity", (|| {
        let mut notes = Vec::new();
        let mut passed = true;
        for s in golden_scenarios() {
            let run = run_scenario(&s)?;
            let mut violations = 0;
            let mut worst: Option<(f64, f64)> = None;
            for n in &run.nodes {
                let excess = n.result.tau_unified - n.result.tau_actual;
                if excess > 1e-6 {
                    violations += 1;
                    if worst.is_none_or(|(tau, t)| excess > tau - t) {
                        worst = Some((n.result.tau_unified, n.t));
                    }
                }
            }
            passed &= violations == 0;
            let mut note = format!("{}: {violations}/{} end times violate", label(&s), run.nodes.len());
            if let Some((tau, t)) = worst {
                note.push_str(&format!(" (worst tau_QC = {tau:.4} at t = {t:.4})"));
            }
            notes.push(note);
        }
        Ok((passed, notes.join("; ")))
    })())
}

fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Interior strict local maxima of a series, as (index, value).
pub fn local_maxima(values: &[f64]) -> Vec<(usize, f64)> {
    (1..values.len().saturating_sub(1))
        .filter(|&k| values[k] > values[k - 1] && values[k] >= values[k + 1])
        .map(|k| (k, values[k]))
        .collect()
}

/// The dephasing κ-sweep decreases overall; the collective creation series
/// rises and falls under a decreasing envelope.
pub fn shape_checks() -> Check {
    Check::from("shape-checks", (|| {
        let count = 50;
        let kappas: Vec<f64> =
            (0..count).map(|j| 0.5 + 9.5 * j as f64 / (count - 1) as f64).collect();
        let mut taus = Vec::with_capacity(count);
        for &kappa in &kappas {
            let s = Scenario {
                channel: Channel::Oun(OunParams::new(kappa, 0.1 * kappa)?),
                initial: InitialState::BellPsiPlus,
                measure: Measure::Entanglement,
                tau: 1.0,
                steps: 2000,
            };
            taus.push(run_scenario(&s)?.final_result().tau_unified);
        }
        let slope = regression_slope(&kappas, &taus);

        let creation = run_scenario(&Scenario {
            channel: Channel::Collective(CollectiveParams::reference()),
            initial: InitialState::G1E2,
            measure: Measure::Entanglement,
            tau: 1.0,
            steps: 2000,
        })?;
        let series: Vec<f64> = creation.nodes.iter().map(|n| n.result.tau_unified).collect();
        let peaks = local_maxima(&series);
        let envelope_decreasing = peaks.windows(2).all(|w| w[1].1 < w[0].1);
        let peak_text: Vec<String> = peaks
            .iter()
            .map(|&(k, v)| format!("{v:.4}@{:.3}", creation.nodes[k].t))
            .collect();
        Ok((
            slope < 0.0 && peaks.len() >= 2 && envelope_decreasing,
            format!(
                "kappa-sweep slope {slope:.4}; creation peaks [{}], envelope {}",
                peak_text.join(", "),
                if envelope_decreasing { "decreasing" } else { "not decreasing" }
            ),
        ))
    })())
}

fn random_channel<R: Rng>(rng: &mut R) -> Channel {
    if rng.random_bool(0.5) {
        Channel::Oun(OunParams::new(rng.random_range(0.1..5.0), rng.random_range(0.01..2.0)).expect("valid"))
    } else {
        let emission = rng.random_range(0.1..2.0);
        Channel::Collective(
            CollectiveParams::new(
                emission,
                emission * rng.random_range(-1.0..1.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(0.0..3.0),
            )
            .expect("valid"),
        )
    }
}

fn random_bell_coeffs<R: Rng>(rng: &mut R) -> BellDiagonalCoeffs {
    // weights on ψ−, ψ+, φ−, φ+ and their correlation vectors
    const CORNERS: [[f64; 3]; 4] = [[-1.0, -1.0, -1.0], [1.0, 1.0, -1.0], [-1.0, 1.0, 1.0], [1.0, -1.0, 1.0]];
    let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut c = [0.0; 3];
    for (w, corner) in raw.iter().zip(CORNERS) {
        for i in 0..3 {
            c[i] += w / total * corner[i];
        }
    }
    BellDiagonalCoeffs::new(c[0], c[1], c[2]).expect("convex combination of Bell states")
}

fn property(name: &str, failures: usize, worst: f64) -> (bool, String) {
    (failures == 0, format!("{name}: {failures}/{PROPERTY_CASES} failed (worst {worst:.1e})"))
}

/// Randomized invariants, each over [`PROPERTY_CASES`] seeded cases.
pub fn property_suites() -> Check {
    Check::from("property-suites", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut results = Vec::new();

        let (mut fail, mut worst) = (0, 0.0_f64);
        for case in 0..PROPERTY_CASES {
            let dim = if case % 2 == 0 { 4 } else { 16 };
            let a = if case % 3 == 0 {
                let g = random::hermitian(&mut rng, dim);
                &g * &random::unitary(&mut rng, dim)
            } else {
                random::hermitian(&mut rng, dim)
            };
            let n = MatrixNorms::of(&a);
            let gap = (n.op - n.hs).max(n.hs - n.tr);
            worst = worst.max(gap);
            if gap > 1e-12 * n.tr.max(1.0) {
                fail += 1;
            }
        }
        results.push(property("norm ordering", fail, worst));

        let (mut fail, mut worst) = (0, 0.0_f64);
        for case in 0..PROPERTY_CASES {
            let rho = random::density_matrix(&mut rng, 1 + case % 4);
            let sigma = random::density_matrix(&mut rng, 1 + (case / 4) % 4);
            let asym = (fidelity(rho.matrix(), sigma.matrix())? - fidelity(sigma.matrix(), rho.matrix())?).abs();
            let selfdev = (rho.fidelity(&rho)? - 1.0).abs();
            let err = asym.max(selfdev);
            worst = worst.max(err);
            if err > 1e-10 {
                fail += 1;
            }
        }
        results.push(property("fidelity symmetry and self-fidelity", fail, worst));

        let (mut fail, mut worst) = (0, 0.0_f64);
        for case in 0..PROPERTY_CASES {
            let rho = random::density_matrix(&mut rng, 1 + case % 4);
            let psi = purify(&rho)?;
            let err = psi.reduce().max_abs_diff(rho.matrix()).max((psi.norm() - 1.0).abs());
            worst = worst.max(err);
            if err > 1e-10 {
                fail += 1;
            }
        }
        results.push(property("purification roundtrip", fail, worst));

        let (mut fail, mut worst) = (0, 0.0_f64);
        for _ in 0..PROPERTY_CASES {
            let gen = random_channel(&mut rng).generator();
            let t = rng.random_range(0.0..3.0);
            let x = random::hermitian(&mut rng, 4);
            let lx = gen.apply(t, &x)?;
            let err = lx.trace().norm().max(lx.hermiticity_error());
            worst = worst.max(err);
            if err > 1e-12 * x.max_abs().max(1.0) * 10.0 {
                fail += 1;
            }
        }
        results.push(property("generator trace and Hermiticity", fail, worst));

        let (mut fail, mut worst) = (0, 0.0_f64);
        for _ in 0..PROPERTY_CASES {
            let gen = random_channel(&mut rng).generator();
            let t = rng.random_range(0.0..3.0);
            let y = random::hermitian(&mut rng, 16);
            let lhs = partial_trace(&gen.apply(t, &y)?, Subsystem::System)?;
            let rhs = gen.apply(t, &partial_trace(&y, Subsystem::System)?)?;
            let err = lhs.max_abs_diff(&rhs);
            worst = worst.max(err);
            if err > 1e-10 {
                fail += 1;
            }
        }
        results.push(property("extended-generator partial trace", fail, worst));

        let (mut fail, mut worst) = (0, 0.0_f64);
        for case in 0..PROPERTY_CASES {
            let rho = random::density_matrix(&mut rng, 1 + case % 4);
            let u = kron(&random::unitary(&mut rng, 2), &random::unitary(&mut rng, 2))?;
            let e0 = bures_entanglement(concurrence(&rho)?)?;
            let e1 = bures_entanglement(concurrence(&rho.conjugated_by(&u)?)?)?;
            let err = (e0 - e1).abs();
            worst = worst.max(err);
            if err > 1e-9 {
                fail += 1;
            }
        }
        results.push(property("local-unitary invariance of E", fail, worst));

        let (mut fail, mut worst) = (0, 0.0_f64);
        for _ in 0..PROPERTY_CASES {
            let [a, b, c] = random_bell_coeffs(&mut rng).as_array();
            let reference = b_max(&BellDiagonalCoeffs::new(a, b, c)?)?;
            for [x, y, z] in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                let err = (b_max(&BellDiagonalCoeffs::new(x, y, z)?)? - reference).abs();
                worst = worst.max(err);
                if err > 1e-12 {
                    fail += 1;
                }
            }
        }
        results.push(property("b_max permutation symmetry", fail, worst));

        let passed = results.iter().all(|(ok, _)| *ok);
        let detail: Vec<String> = results.into_iter().map(|(_, d)| d).collect();
        Ok((passed, detail.join("; ")))
    })())
}

/// τ_QC stable under doubling the grid; RK4 error ratio under step halving.
pub fn convergence() -> Check {
    Check::from("convergence", (|| {
        let mut notes = Vec::new();
        let mut passed = true;
        for s in golden_scenarios() {
            let coarse = run_scenario(&s)?.final_result().tau_unified;
            let fine = run_scenario(&Scenario { steps: 2 * s.steps, ..s })?.final_result().tau_unified;
            let rel = (coarse - fine).abs() / fine.abs().max(f64::MIN_POSITIVE);
            passed &= rel < 1e-4;
            notes.push(format!("{}: rel change {rel:.1e}", label(&s)));
        }

        let gen = Channel::Collective(CollectiveParams::reference()).generator();
        let rho0 = InitialState::G1E2.state();
        let reference = evolve(&gen, &rho0, 1.0, 16000)?;
        let max_error = |steps: usize| -> Result<f64> {
            let traj = evolve(&gen, &rho0, 1.0, steps)?;
            let stride = 16000 / steps;
            Ok(traj
                .states
                .iter()
                .enumerate()
                .map(|(k, s)| s.matrix().max_abs_diff(reference.states[k * stride].matrix()))
                .fold(0.0, f64::max))
        };
        let (e1, e2) = (max_error(100)?, max_error(200)?);
        let ratio = e1 / e2;
        let order = ratio.log2();
        passed &= order >= 3.5 && ratio >= 12.0;
        notes.push(format!("RK4 error ratio {ratio:.2} (order {order:.2})"));
        Ok((passed, notes.join("; ")))
    })())
}

/// Every acceptance check, in order.
pub fn all_checks() -> Vec<Check> {
    vec![
        bell_reference_values(),
        oun_closed_form(),
        collective_closed_forms(),
        bound_ordering(),
        bound_validity(),
        shape_checks(),
        property_suites(),
        convergence(),
    ]
}
