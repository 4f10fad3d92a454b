mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use coherentnn::backprop::train;
use coherentnn::backprop::TrainConfig;
use coherentnn::cnet::{ActivationKind, InitScheme, Initializer};
use coherentnn::photonic::{
    compile_weight, decompose_unitary, diffractive_forward, modulation_chain, project_to_unitary, DiffractionOperator,
    MeshDecomposition, MziMesh,
};
use coherentnn::tasks::{gen_diffractive_samples, DiffractiveKind, DiffractiveSampleSpec};
use coherentnn::{Complex64, ComplexMatrix, Error};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn random_mesh(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> MziMesh {
    let units = MziMesh::rectangular_layout(n).iter().map(Vec::len).sum::<usize>();
    let phases: Vec<(f64, f64)> = (0..units)
        .map(|_| (r.gen_range(-PI..PI), r.gen_range(-PI..PI)))
        .collect();
    MziMesh::rectangular(n, &phases).unwrap()
}

#[test]
fn projection_matches_newton_polar_factor() {
    let mut r = rng(1);
    for n in [1, 2, 4, 7] {
        for _ in 0..10 {
            let w = random_matrix(&mut r, n, n, 1.0);
            let u = project_to_unitary(&w).unwrap();
            assert!(u.unitarity_defect() < 1e-12);
            assert!(u.max_abs_diff(&newton_polar(&w)) < 1e-10);
        }
    }
}

#[test]
fn projection_beats_random_unitaries() {
    let mut r = rng(2);
    let w = random_matrix(&mut r, 4, 4, 1.0);
    let best = project_to_unitary(&w).unwrap().frobenius_distance(&w);
    for _ in 0..100 {
        assert!(best <= haar_unitary(&mut r, 4).frobenius_distance(&w) + 1e-12);
    }
}

#[test]
fn projection_of_unitary_is_itself() {
    let mut r = rng(3);
    for _ in 0..20 {
        let u = haar_unitary(&mut r, 5);
        assert!(project_to_unitary(&u).unwrap().max_abs_diff(&u) < 1e-12);
        assert!(compile_weight(&u).unwrap().projection_distance < 1e-10);
    }
}

#[test]
fn decomposition_round_trips_random_meshes_with_phase_screens() {
    let mut r = rng(4);
    for _ in 0..100 {
        let mesh = random_mesh(&mut r, 4).matrix();
        assert!(mesh.unitarity_defect() < 1e-12);
        let screen: Vec<Complex64> = (0..4)
            .map(|_| Complex64::from_polar(1.0, r.gen_range(-PI..PI)))
            .collect();
        let u = ComplexMatrix::diagonal(&screen).matmul(&mesh).unwrap();
        let d = decompose_unitary(&u).unwrap();
        assert!(d.mesh.is_rectangular());
        assert_eq!(d.mesh.unit_count(), 6);
        assert!(d.reconstruction_error(&u) < 1e-10);
    }
}

#[test]
fn decomposition_of_haar_unitaries() {
    let mut r = rng(5);
    for n in [2, 3, 4, 5, 8, 16] {
        for _ in 0..10 {
            let u = haar_unitary(&mut r, n);
            let d = decompose_unitary(&u).unwrap();
            assert_eq!(d.mesh.unit_count(), n * (n - 1) / 2);
            assert_eq!(d.mesh.stages().len(), n);
            assert!(d.reconstruction_error(&u) < 1e-10, "n = {n}");
        }
    }
}

#[test]
fn decomposition_of_dft() {
    let f = unitary_dft(4);
    let d = decompose_unitary(&f).unwrap();
    assert!(d.reconstruction_error(&f) < 1e-8);
    let back = MeshDecomposition::from_json(&d.to_json()).unwrap();
    assert!(back.reconstruction_error(&f) < 1e-8);
}

#[test]
fn non_square_and_singular_weights_fail() {
    assert!(matches!(
        compile_weight(&ComplexMatrix::zeros(4, 3)),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        compile_weight(&ComplexMatrix::zeros(4, 4)),
        Err(Error::RankDeficient { .. })
    ));
}

#[test]
fn diffraction_closed_form_entries() {
    for (n, eps) in [(4, 0.3), (4, 1.0), (7, 0.0), (16, FRAC_1_SQRT_2)] {
        let d = DiffractionOperator::new(n, eps).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((d.matrix()[(i, j)] - diffraction_entry(n, eps, i, j)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn diffraction_expanded_form() {
    // W^{n^2 (1 - eps^2) / 2} W^{m^2 / 2} W^{-nm} / sqrt(N)
    let n = 4;
    for eps in [0.0, 0.2, 0.5, 0.9, 1.0] {
        let d = DiffractionOperator::new(n, eps).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * PI / n as f64);
        for i in 0..n {
            for j in 0..n {
                let e = w.powf(0.5 * (i * i) as f64 * (1.0 - eps * eps))
                    * w.powf(0.5 * (j * j) as f64)
                    * w.powf(-((i * j) as f64))
                    / (n as f64).sqrt();
                assert!((d.matrix()[(i, j)] - e).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn diffraction_unitary_and_factorized() {
    for n in [1, 2, 4, 16, 64, 256] {
        for eps in [0.0, 0.25, 0.5, FRAC_1_SQRT_2, 1.0] {
            let d = DiffractionOperator::new(n, eps).unwrap();
            assert!(d.matrix().unitarity_defect() < 1e-10, "N = {n}, eps = {eps}");
            let (a, f, b) = d.chirp_factors();
            assert!(a.iter().chain(b.iter()).all(|z| (z.norm() - 1.0).abs() < 1e-14));
            if n <= 64 {
                assert!(f.unitarity_defect() < 1e-12);
                assert!(f.max_abs_diff(&unitary_dft(n)) < 1e-12);
            }
            let rebuilt = ComplexMatrix::from_fn(n, n, |i, j| a[i] * f[(i, j)] * b[j]);
            assert!(rebuilt.max_abs_diff(d.matrix()) < 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mesh_synthesis_round_trip(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let u = random_mesh(&mut r, n).matrix();
        prop_assert!(u.unitarity_defect() < 1e-12);
        let d = decompose_unitary(&u).unwrap();
        prop_assert!(d.reconstruction_error(&u) < 1e-10);
    }

    #[test]
    fn modulation_chain_reproduces_network(seed in any::<u64>(), eps in 0.0f64..=1.0, kind in prop_oneof![Just(ActivationKind::Tanh), Just(ActivationKind::Sigmoid)]) {
        let n = 8;
        let op = Arc::new(DiffractionOperator::new(n, eps).unwrap());
        let net = Initializer::new(InitScheme::separate(), seed)
            .network(&[n, n, n], &[kind, kind])
            .unwrap();
        let spec = DiffractiveSampleSpec::new(DiffractiveKind::AmplitudePhase, n, seed).unwrap();
        for s in gen_diffractive_samples(&spec, 5, &op).unwrap() {
            let layers = match modulation_chain(&net, &op, &s.input) {
                Err(Error::NearZeroDivisor { .. }) => continue,
                other => other.unwrap(),
            };
            let optical = diffractive_forward(&layers, &s.input).unwrap();
            prop_assert!(optical.max_abs_diff(&net.predict(&s.input).unwrap()) < 1e-10);
        }
    }
}

#[test]
fn trained_network_round_trips_through_diffraction() {
    let n = 16;
    let op = Arc::new(DiffractionOperator::new(n, 0.5).unwrap());
    let spec = DiffractiveSampleSpec::new(DiffractiveKind::PhaseOnly, n, 2).unwrap();
    let data = gen_diffractive_samples(&spec, 60, &op).unwrap();
    let net = Initializer::new(InitScheme::separate(), 6)
        .network(&[n, n, n], &[ActivationKind::Tanh, ActivationKind::Tanh])
        .unwrap();
    let (net, curve) = train(&net, &data, &TrainConfig::new(0.1, 20)).unwrap();
    assert!(curve.final_loss().unwrap() < curve.first_loss().unwrap());
    for s in &data {
        let layers = modulation_chain(&net, &op, &s.input).unwrap();
        assert!(
            diffractive_forward(&layers, &s.input)
                .unwrap()
                .max_abs_diff(&net.predict(&s.input).unwrap())
                < 1e-10
        );
    }
}

#[test]
fn coupler_acts_on_basis_vector() {
    let m = coherentnn::photonic::coupler_matrix();
    let y = m.matvec(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!((y[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    assert!((y[1] - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
}
