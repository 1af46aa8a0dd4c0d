mod common;

use common::*;
use exchange_teleport::exchange::exchange_unitary;
use exchange_teleport::observables::{make_observable, measure_branches, ObservableKind};
use exchange_teleport::protocols::{prepared_pair, PrepOutcome, ProtocolSetup};
use exchange_teleport::universality::{build_xx, build_y_rotation, build_yx, build_z_rotation, evaluate};
use exchange_teleport::{r_gate, Axis, ExchangePulse, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

fn exchange_hamiltonian(phi_perp: f64, phi_z: f64) -> Dense {
    pauli_string(&[1, 1]).add(&pauli_string(&[2, 2])).scale(c(phi_perp, 0.0)).add(&pauli_string(&[3, 3]).scale(c(phi_z, 0.0)))
}

#[test]
fn pulse_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let (p, z) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let oracle = evolve(&exchange_hamiltonian(p, z), 1.0);
        assert!(from_lib(&exchange_unitary(p, z)).max_diff(&oracle) < 1e-10);
    }
}

#[test]
fn pulse_on_distant_pair_acts_on_those_spins() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let psi = StateVector::random(3, &mut rng);
    let pulse = ExchangePulse::new(2, 0, 0.4, -0.9).unwrap();
    let h = pauli_string(&[1, 0, 1]).add(&pauli_string(&[2, 0, 2])).scale(c(0.4, 0.0)).add(&pauli_string(&[3, 0, 3]).scale(c(-0.9, 0.0)));
    let expect = evolve(&h, 1.0).apply(&amps(&psi));
    let got = psi.apply(&pulse.unitary(), &pulse.targets()).unwrap();
    assert!(max_vec_diff(&amps(&got), &expect) < 1e-10);
}

#[test]
fn r_gates_match_series() {
    for (axis, sigma) in [(Axis::X, 1), (Axis::Z, 3)] {
        for dagger in [false, true] {
            assert!(from_lib(&r_gate(axis, dagger)).max_diff(&r_oracle(sigma, dagger)) < 1e-12);
        }
    }
}

fn singlet() -> Vec<C> {
    vec![c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)]
}

fn triplet0() -> Vec<C> {
    vec![c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0)]
}

fn direct_terms(a: C, b: C) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); 8];
    v[0b001] = a;
    v[0b110] = c(0.0, -1.0) * b;
    v
}

#[test]
fn three_spin_decomposition() {
    let r = C::from_polar(1.0, -FRAC_PI_4);
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..100 {
        let psi = StateVector::random(1, &mut rng);
        let (a, b) = (psi.amplitude(0), psi.amplitude(1));
        let lhs = psi.tensor(&prepared_pair(&ProtocolSetup::default(), PrepOutcome::Aligned).unwrap()).unwrap();

        let rz = r_oracle(3, false).apply(&[a, b]);
        let rzd = r_oracle(3, true).apply(&[a, b]);
        let t = kron_vec(&triplet0(), &rzd);
        let s = kron_vec(&singlet(), &rz);
        let d = direct_terms(a, b);
        let rhs: Vec<C> = (0..8).map(|k| d[k] * FRAC_1_SQRT_2 + r * 0.5 * t[k] - r.conj() * 0.5 * s[k]).collect();
        assert!(max_vec_diff(&amps(&lhs), &rhs) < 1e-10);
    }
}

#[test]
fn triplet_collapse_of_decomposition() {
    let r = C::from_polar(1.0, -FRAC_PI_4);
    let total = make_observable(ObservableKind::TotalSpinSq(0, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..100 {
        let psi = StateVector::random(1, &mut rng);
        let (a, b) = (psi.amplitude(0), psi.amplitude(1));
        let state = psi.tensor(&prepared_pair(&ProtocolSetup::default(), PrepOutcome::Aligned).unwrap()).unwrap();
        let branches = measure_branches(&state, &total).unwrap();
        let triplet = branches.iter().find(|b| b.outcome_index == 1).unwrap();
        assert!((triplet.record.probability - 0.75).abs() < 1e-12);

        let t = kron_vec(&triplet0(), &r_oracle(3, true).apply(&[a, b]));
        let d = direct_terms(a, b);
        let expect: Vec<C> = (0..8).map(|k| (r * t[k] + d[k] * 2f64.sqrt()) / 3f64.sqrt()).collect();
        assert!(phase_distance(&amps(&triplet.state), &expect) < 1e-10);
    }
}

#[test]
fn two_spin_builders_match_exponentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..50 {
        let (phi, phi_z) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let xx = from_lib(&evaluate(&build_xx(phi, phi_z), 2).unwrap());
        assert!(xx.phase_diff(&evolve(&pauli_string(&[1, 1]), phi)) < 1e-10);
        let yx = from_lib(&evaluate(&build_yx(phi, phi_z), 2).unwrap());
        assert!(yx.phase_diff(&evolve(&pauli_string(&[2, 1]), phi)) < 1e-10);
    }
    let yx = from_lib(&evaluate(&build_yx(0.7, 0.0), 2).unwrap());
    assert!(yx.phase_diff(&evolve(&pauli_string(&[2, 1]), 0.7)) < 1e-10);
}

#[test]
fn rotation_builders_match_direct_construction() {
    let phi = 1.234;
    let diag = Dense::from_rows(&[&[C::from_polar(1.0, -phi), c(0.0, 0.0)], &[c(0.0, 0.0), C::from_polar(1.0, phi)]]);
    let z = from_lib(&evaluate(&build_z_rotation(phi, 0.3), 2).unwrap());
    assert!(z.phase_diff(&diag.kron(&Dense::identity(2))) < 1e-10);

    let y = from_lib(&evaluate(&build_y_rotation(phi, -0.8), 2).unwrap());
    assert!(y.phase_diff(&evolve(&pauli(2), phi).kron(&Dense::identity(2))) < 1e-10);

    let full = from_lib(&evaluate(&build_z_rotation(PI, 0.0), 2).unwrap());
    assert!(full.phase_diff(&Dense::identity(4)) < 1e-10);
    let half = from_lib(&evaluate(&build_z_rotation(PI / 2.0, 0.0), 2).unwrap());
    assert!(half.phase_diff(&pauli_string(&[3, 0])) < 1e-10);
}

#[test]
fn hadamard_conjugates_z_gate_to_x_gate() {
    let h = Dense::from_rows(&[&[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], &[c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]]);
    for dagger in [false, true] {
        let via_z = h.mul(&from_lib(&r_gate(Axis::Z, dagger))).mul(&h);
        assert!(via_z.max_diff(&from_lib(&r_gate(Axis::X, dagger))) < 1e-12);
    }
}
