use proptest::prelude::*;

use qacd_core::ensembles::{
    default_layers, frame_potential, haar_frame_potential, qaoa_circuit, sample_brickwork, vqe_circuit, Ansatz,
    CircuitEnsemble, Gate, Max2Sat,
};
use qacd_core::linalg::CMatrix;
use qacd_core::montecarlo::{avg_tvd, trial, StatesProtocol};
use qacd_core::qobjects::{is_unitary, maximally_mixed};
use qacd_core::random::random_state;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}

#[test]
fn frame_potential_dominance() {
    for n in [2, 3] {
        let layers = default_layers(n);
        let ensembles = [
            CircuitEnsemble::haar(n, 1),
            CircuitEnsemble::brickwork(n, 2, 1).unwrap(),
            CircuitEnsemble::qaoa(n, layers, 1, 1),
            CircuitEnsemble::vqe(n, layers, 1),
        ];
        for ens in &ensembles {
            for k in [1u32, 2] {
                let e = frame_potential(ens, k, 4000, 17).unwrap();
                assert!(
                    e.estimate >= haar_frame_potential(k) - 3.0 * e.standard_error,
                    "{} d={} k={k}: {e:?}",
                    ens.label(),
                    ens.dim()
                );
            }
        }
    }
}

#[test]
fn haar_first_moment() {
    let e = frame_potential(&CircuitEnsemble::haar(2, 0), 1, 10_000, 3).unwrap();
    assert!((e.estimate - 1.0).abs() <= 3.0 * e.standard_error, "{e:?}");
}

#[test]
fn single_identity_element_gives_d_squared() {
    let ens = CircuitEnsemble::discrete(vec![(1.0, CMatrix::identity(2))], 0).unwrap();
    let e = frame_potential(&ens, 1, 10, 0).unwrap();
    assert_eq!(e.estimate, 4.0);
    assert_eq!(e.standard_error, 0.0);
}

#[test]
fn vqe_is_design_like_at_default_depth() {
    for n in [3, 4] {
        let e = frame_potential(&CircuitEnsemble::vqe(n, default_layers(n), 2), 2, 10_000, 9).unwrap();
        assert!((e.estimate - 2.0).abs() <= 0.2, "N={n}: {e:?}");
    }
}

#[test]
fn zero_angle_circuits() {
    let inst = Max2Sat::random(3, 4);
    let q = qaoa_circuit(&inst, &[0.0, 0.0], &[vec![0.0; 3], vec![0.0; 3]]).unwrap();
    assert!(max_diff(&q.to_matrix(), &CMatrix::identity(8)) < 1e-15);
    let v = vqe_circuit(3, 2, Ansatz::VqeZy, &[0.0; 12]).unwrap();
    let chain = vqe_circuit(3, 1, Ansatz::VqeY, &[0.0; 3]).unwrap().to_matrix();
    assert!(max_diff(&v.to_matrix(), &chain.matmul(&chain).unwrap()) < 1e-15);
    assert!(v.gates().iter().any(|g| matches!(g, Gate::Cx { .. })));
    assert!(max_diff(&sample_brickwork(3, 0, 1, 0).unwrap().to_matrix(), &CMatrix::identity(8)) == 0.0);
}

#[test]
fn sampled_unitaries_are_unitary_and_reproducible() {
    let layers = default_layers(3);
    for ens in [
        CircuitEnsemble::haar(3, 5),
        CircuitEnsemble::brickwork(3, 4, 5).unwrap(),
        CircuitEnsemble::qaoa(3, layers, 5, 6),
        CircuitEnsemble::vqe(3, layers, 5),
    ] {
        for i in 0..5 {
            let a = ens.sample(0, i).to_matrix();
            assert!(is_unitary(&a, 1e-9), "{}", ens.label());
            assert_eq!(a, ens.sample(0, i).to_matrix());
            assert_ne!(a, ens.sample(1, i).to_matrix());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trials_do_not_depend_on_evaluation_order(seed in any::<u64>(), order in Just((0u64..16).collect::<Vec<_>>()).prop_shuffle()) {
        let rho = random_state(4, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let p = StatesProtocol::new(&rho, &maximally_mixed(2)).unwrap();
        let ens = CircuitEnsemble::vqe(2, 3, 0).with_seed(seed);
        let mut values = vec![0.0; 16];
        for &i in &order {
            values[i as usize] = trial(&p, &ens, i).unwrap();
        }
        let est = avg_tvd(&p, &ens, 16, seed).unwrap();
        let direct = qacd_core::montecarlo::AvgTvdEstimate::from_samples(&values, seed).unwrap();
        prop_assert_eq!(est, direct);
    }
}
