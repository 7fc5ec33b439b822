use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qslcorr::channels::{Channel, CollectiveParams, OunParams};
use qslcorr::correlations::{
    b_max, bures_discord_bell_diagonal, bures_entanglement, concurrence, concurrence_sandwich,
    MAX_BURES_CORRELATION,
};
use qslcorr::linalg::{fidelity, hermitian_eig, kron, partial_trace, MatrixNorms, Subsystem};
use qslcorr::random;
use qslcorr::states::{bell_coeffs, purify, BellDiagonalCoeffs};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn channel_strategy() -> impl Strategy<Value = Channel> {
    prop_oneof![
        (0.05..5.0f64, 0.01..3.0f64).prop_map(|(k, l)| Channel::Oun(OunParams::new(k, l).unwrap())),
        (0.1..2.0f64, -1.0..1.0f64, -10.0..10.0f64, 0.0..3.0f64).prop_map(|(e, r, m, w)| {
            Channel::Collective(CollectiveParams::new(e, e * r, m, w).unwrap())
        }),
    ]
}

fn bell_coeffs_strategy() -> impl Strategy<Value = BellDiagonalCoeffs> {
    prop::array::uniform4(0.0..1.0f64)
        .prop_filter("non-degenerate", |w| w.iter().sum::<f64>() > 1e-6)
        .prop_map(|w| {
            let total: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / total).collect();
            // ψ−, ψ+, φ−, φ+ have correlation vectors (−1,−1,−1), (1,1,−1), (−1,1,1), (1,−1,1)
            BellDiagonalCoeffs::new(
                -p[0] + p[1] - p[2] + p[3],
                -p[0] + p[1] + p[2] - p[3],
                -p[0] - p[1] + p[2] + p[3],
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_ordering(seed: u64, big: bool) {
        let a = random::hermitian(&mut rng(seed), if big { 16 } else { 4 });
        let n = MatrixNorms::of(&a);
        prop_assert!(n.op <= n.hs * (1.0 + 1e-12));
        prop_assert!(n.hs <= n.tr * (1.0 + 1e-12));
    }

    #[test]
    fn eigendecomposition_reconstructs(seed: u64) {
        let a = random::hermitian(&mut rng(seed), 16);
        let eig = hermitian_eig(&a).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&a) < 1e-12 * a.max_abs().max(1.0) * 16.0);
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn fidelity_symmetric_bounded_and_unit_on_self(seed: u64, r1 in 1usize..=4, r2 in 1usize..=4) {
        let mut g = rng(seed);
        let rho = random::density_matrix(&mut g, r1);
        let sigma = random::density_matrix(&mut g, r2);
        let f = fidelity(rho.matrix(), sigma.matrix()).unwrap();
        let b = fidelity(sigma.matrix(), rho.matrix()).unwrap();
        prop_assert!((f - b).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((rho.fidelity(&rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn purification_roundtrip(seed: u64, rank in 1usize..=4) {
        let rho = random::density_matrix(&mut rng(seed), rank);
        let psi = purify(&rho).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        prop_assert!(psi.reduce().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn concurrence_routes_agree(seed: u64, rank in 1usize..=4) {
        let rho = random::density_matrix(&mut rng(seed), rank);
        let c = concurrence(&rho).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!((c - concurrence_sandwich(&rho).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn entanglement_local_unitary_invariance(seed: u64, rank in 1usize..=4) {
        let mut g = rng(seed);
        let rho = random::density_matrix(&mut g, rank);
        let u = kron(&random::unitary(&mut g, 2), &random::unitary(&mut g, 2)).unwrap();
        let e0 = bures_entanglement(concurrence(&rho).unwrap()).unwrap();
        let e1 = bures_entanglement(concurrence(&rho.conjugated_by(&u).unwrap()).unwrap()).unwrap();
        prop_assert!((e0 - e1).abs() < 1e-9);
        prop_assert!((0.0..=MAX_BURES_CORRELATION + 1e-15).contains(&e0));
    }

    #[test]
    fn b_max_is_symmetric_and_bounded(c in bell_coeffs_strategy()) {
        let [a, b, d] = c.as_array();
        let reference = b_max(&c).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&reference));
        for [x, y, z] in [[a, d, b], [b, a, d], [b, d, a], [d, a, b], [d, b, a]] {
            let permuted = b_max(&BellDiagonalCoeffs::new(x, y, z).unwrap()).unwrap();
            prop_assert!((permuted - reference).abs() < 1e-12);
        }
        let discord = bures_discord_bell_diagonal(&c).unwrap();
        prop_assert!((0.0..=MAX_BURES_CORRELATION + 1e-15).contains(&discord));
    }

    #[test]
    fn bell_coefficients_roundtrip(c in bell_coeffs_strategy()) {
        let rho = qslcorr::states::DensityMatrix::new(c.to_matrix()).unwrap();
        let back = bell_coeffs(&rho).unwrap();
        for (x, y) in back.as_array().iter().zip(c.as_array()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(ch in channel_strategy(), seed: u64, t in 0.0..5.0f64) {
        let x = random::hermitian(&mut rng(seed), 4);
        let lx = ch.generator().apply(t, &x).unwrap();
        prop_assert!(lx.trace().norm() < 1e-11);
        prop_assert!(lx.hermiticity_error() < 1e-11);
    }

    #[test]
    fn extended_generator_commutes_with_partial_trace(ch in channel_strategy(), seed: u64, t in 0.0..5.0f64) {
        let gen = ch.generator();
        let y = random::hermitian(&mut rng(seed), 16);
        let lhs = partial_trace(&gen.apply(t, &y).unwrap(), Subsystem::System).unwrap();
        let rhs = gen.apply(t, &partial_trace(&y, Subsystem::System).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn factored_image_matches_dense(ch in channel_strategy(), seed: u64, rank in 1usize..=4, t in 0.0..5.0f64) {
        let gen = ch.generator();
        let psi = purify(&random::density_matrix(&mut rng(seed), rank)).unwrap();
        let dense = MatrixNorms::of(&gen.apply(t, &psi.projector()).unwrap());
        let fast = gen.apply_pure(t, psi.vector()).unwrap().norms();
        let scale = dense.tr.max(1.0);
        prop_assert!((dense.op - fast.op).abs() < 1e-11 * scale);
        prop_assert!((dense.tr - fast.tr).abs() < 1e-11 * scale);
        prop_assert!((dense.hs - fast.hs).abs() < 1e-11 * scale);
    }
}
