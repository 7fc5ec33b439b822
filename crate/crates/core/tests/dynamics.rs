use qslcorr::channels::{oun_decoherence_function, Channel, CollectiveParams, OunParams};
use qslcorr::dynamics::evolve;
use qslcorr::states::{bell_psi_plus, InitialState};

fn channels() -> Vec<Channel> {
    vec![
        Channel::Oun(OunParams::new(1.0, 0.1).unwrap()),
        Channel::Oun(OunParams::new(4.0, 2.0).unwrap()),
        Channel::Collective(CollectiveParams::reference()),
    ]
}

#[test]
fn trace_drift_stays_below_tolerance() {
    for ch in channels() {
        for initial in [InitialState::BellPsiPlus, InitialState::G1E2] {
            for tau in [1.0, 5.0] {
                let traj = evolve(&ch.generator(), &initial.state(), tau, 2000).unwrap();
                assert!(traj.max_trace_drift <= 1e-9, "{} {:?} tau = {tau}", ch.name(), initial);
                assert!(traj.max_clamp < 1e-8);
            }
        }
    }
}

#[test]
fn dephasing_never_increases_purity() {
    let traj = evolve(&channels()[1].generator(), &bell_psi_plus(), 5.0, 2000).unwrap();
    for w in traj.states.windows(2) {
        assert!(w[1].purity() <= w[0].purity() + 1e-15);
    }
}

#[test]
fn grid_is_uniform() {
    let traj = evolve(&channels()[0].generator(), &bell_psi_plus(), 2.5, 5000).unwrap();
    let h = traj.step();
    for (k, t) in traj.times.iter().enumerate() {
        assert!((t - k as f64 * h).abs() < 1e-12);
    }
    assert!((traj.duration() - 2.5).abs() < 1e-12);
}

#[test]
fn long_dephasing_run_tracks_closed_form() {
    let p = OunParams::new(4.0, 2.0).unwrap();
    let traj = evolve(&Channel::Oun(p).generator(), &bell_psi_plus(), 5.0, 10000).unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states).step_by(97) {
        let pt = oun_decoherence_function(&p, *t).unwrap();
        assert!((s.matrix()[(1, 2)].re - 0.5 * pt * pt).abs() < 1e-9);
    }
}

#[test]
fn rk4_is_fourth_order() {
    let gen = Channel::Collective(CollectiveParams::reference()).generator();
    let rho0 = bell_psi_plus();
    let reference = evolve(&gen, &rho0, 1.0, 16000).unwrap();
    let err = |n: usize| {
        let traj = evolve(&gen, &rho0, 1.0, n).unwrap();
        traj.states
            .iter()
            .enumerate()
            .map(|(k, s)| s.matrix().max_abs_diff(reference.states[k * (16000 / n)].matrix()))
            .fold(0.0, f64::max)
    };
    assert!(err(50) / err(100) >= 12.0);
}
