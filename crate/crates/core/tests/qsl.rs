use qslcorr::channels::{Channel, CollectiveParams, OunParams};
use qslcorr::correlations::{correlation_change, Direction, MAX_BURES_CORRELATION};
use qslcorr::linalg::fidelity;
use qslcorr::qsl::{correlation_factor, run_scenario, Measure, Scenario, SigmaSource};
use qslcorr::states::{separable_collective_sigma, InitialState};

fn oun(kappa: f64, lambda: f64, steps: usize) -> Scenario {
    Scenario {
        channel: Channel::Oun(OunParams::new(kappa, lambda).unwrap()),
        initial: InitialState::BellPsiPlus,
        measure: Measure::Entanglement,
        tau: 1.0,
        steps,
    }
}

fn collective(initial: InitialState, steps: usize) -> Scenario {
    Scenario {
        channel: Channel::Collective(CollectiveParams::reference()),
        initial,
        measure: Measure::Entanglement,
        tau: 1.0,
        steps,
    }
}

#[test]
fn dephasing_bound_matches_closed_form() {
    // Both generator images have operator norm 2γ(t), so K_op·τ = X with
    // X = κ(τ + (e^{−λτ} − 1)/λ), and |ΔF_P| = ½√(1 − e^{−2X}).
    for kappa in [0.5, 1.0, 3.0, 10.0] {
        let lambda = 0.1 * kappa;
        let run = run_scenario(&oun(kappa, lambda, 2000)).unwrap();
        let x = kappa * (1.0 + (-lambda).exp_m1() / lambda);
        let want = 0.5 * (-(-2.0 * x).exp_m1()).sqrt() / x;
        let got = run.final_result().tau_op;
        assert!((got - want).abs() < 1e-9 * want, "kappa = {kappa}: {got} vs {want}");
        assert!((run.final_result().k.op - x).abs() < 1e-9);
    }
}

#[test]
fn correlation_factor_stays_in_unit_interval() {
    let n = 200;
    for i in 0..n {
        let q0 = MAX_BURES_CORRELATION * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let q = MAX_BURES_CORRELATION * j as f64 / (n - 1) as f64;
            let amount = correlation_change(q0, q).unwrap();
            let f = correlation_factor(&amount);
            assert!((0.0..=1.0).contains(&f), "Q0 = {q0}, Q = {q}: {f}");
            // the factor is the change of (1 − Q)², i.e. of the fidelity
            assert!((f - ((1.0 - q).powi(2) - (1.0 - q0).powi(2)).abs()).abs() < 1e-14);
        }
    }
}

#[test]
fn integrands_are_stable_under_grid_refinement() {
    for s in [oun(1.0, 0.1, 2000), collective(InitialState::BellPsiPlus, 2000), collective(InitialState::G1E2, 2000)] {
        let coarse = run_scenario(&s).unwrap();
        let fine = run_scenario(&Scenario { steps: 4000, ..s }).unwrap();
        for k in [0usize, 1, 10, 1000, 2000] {
            let a = coarse.nodes[k].norms.total();
            let b = fine.nodes[2 * k].norms.total();
            assert!(a.op.is_finite() && a.tr.is_finite() && a.hs.is_finite());
            assert!((a.op - b.op).abs() < 1e-8 * a.op.max(1.0), "node {k}");
            assert!((a.tr - b.tr).abs() < 1e-8 * a.tr.max(1.0), "node {k}");
        }
    }
}

#[test]
fn collective_sigma_is_the_best_family_member() {
    for initial in [InitialState::BellPsiPlus, InitialState::G1E2] {
        let run = run_scenario(&collective(initial, 200)).unwrap();
        for (node, sigma) in run.nodes.iter().zip(&run.sigma).step_by(7) {
            let rho = &run.trajectory.states[(node.t / run.trajectory.step()).round() as usize];
            let grid_best = (0..=100)
                .map(|j| {
                    let s = separable_collective_sigma(initial, j as f64 / 100.0).unwrap();
                    fidelity(rho.matrix(), s.matrix()).unwrap()
                })
                .fold(0.0, f64::max);
            assert!(sigma.fidelity >= grid_best - 1e-4, "t = {}", node.t);
            assert!(sigma.fidelity <= node.f_p + 1e-9, "t = {}", node.t);
            if sigma.source == SigmaSource::Formula {
                assert_eq!(sigma.mixing, sigma.formula_mixing);
            }
        }
    }
}

#[test]
fn diagonal_family_misses_the_initial_product_state() {
    // |g1 e2> has no weight on |gg> or |ee>, so every member of the family
    // is orthogonal to it even though the state itself is separable.
    let run = run_scenario(&collective(InitialState::G1E2, 100)).unwrap();
    assert_eq!(run.nodes[0].f_p, 1.0);
    assert!(run.sigma[0].fidelity < 1e-12);
    assert!(!run.sigma[0].mixing.unwrap().is_nan());
}

#[test]
fn directions_follow_the_measure() {
    let decay = run_scenario(&collective(InitialState::BellPsiPlus, 200)).unwrap();
    assert!(decay.nodes[1..].iter().all(|n| n.result.amount.direction == Direction::Decay));
    let creation = run_scenario(&collective(InitialState::G1E2, 200)).unwrap();
    assert!(creation.nodes[1..].iter().all(|n| n.result.amount.direction == Direction::Creation));
}

#[test]
fn idle_channel_gives_zero_bounds() {
    for initial in [InitialState::BellPsiPlus, InitialState::G1E2] {
        let s = Scenario { channel: Channel::Idle, initial, measure: Measure::Entanglement, tau: 0.5, steps: 20 };
        let run = run_scenario(&s).unwrap();
        assert!(run.nodes.iter().all(|n| n.result.tau_unified == 0.0 && n.result.k.op == 0.0));
    }
}

#[test]
fn dephasing_rejects_product_initial_state() {
    let s = Scenario { initial: InitialState::G1E2, ..oun(1.0, 0.1, 100) };
    assert!(run_scenario(&s).is_err());
}
