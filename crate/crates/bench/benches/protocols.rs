use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use exchange_teleport::observables::trial_stream;
use exchange_teleport::protocols::teleportation::{gate_teleport, DEFAULT_TRIAL_CAP};
use exchange_teleport::protocols::{enumerate_protocol_tree, teleport_rotation, CorrectionMode, DriverPolicy, ProtocolSetup, TreeSpec};
use exchange_teleport::qstate::gates;
use exchange_teleport::universality::euler_synthesize;
use exchange_teleport::{ExchangePulse, StateVector, UnitaryMatrix};

fn state_ops(c: &mut Criterion) {
    let mut rng = trial_stream(1, 0);
    let psi = StateVector::random(3, &mut rng);
    let pulse = ExchangePulse::new(0, 2, 0.3, 0.1).unwrap();
    let u = pulse.unitary();
    c.bench_function("apply_pulse_3q", |b| b.iter(|| black_box(&psi).apply(&u, &pulse.targets()).unwrap()));
}

fn protocols(c: &mut Criterion) {
    let setup = ProtocolSetup::default();
    let policy = DriverPolicy::new(30, CorrectionMode::Repeat).unwrap();
    let mut trial = 0u64;
    c.bench_function("rz_trial_30_cycles", |b| {
        b.iter(|| {
            let mut rng = trial_stream(2, trial);
            trial += 1;
            let psi = StateVector::random(1, &mut rng);
            teleport_rotation(&psi, &setup, &policy, &mut rng).unwrap()
        })
    });
    let h = gates::hadamard();
    c.bench_function("gate_teleport_trial", |b| {
        b.iter(|| {
            let mut rng = trial_stream(3, trial);
            trial += 1;
            gate_teleport(&StateVector::plus(), &h, DEFAULT_TRIAL_CAP, &mut rng).unwrap()
        })
    });
    let psi = StateVector::plus();
    c.bench_function("tree_8_cycles", |b| b.iter(|| enumerate_protocol_tree(&psi, &TreeSpec::new(setup, 8)).unwrap().stats()));
}

fn compiler(c: &mut Criterion) {
    let u = UnitaryMatrix::random(1, &mut trial_stream(4, 0));
    c.bench_function("euler_synthesize", |b| b.iter(|| euler_synthesize(black_box(&u), 0.2).unwrap()));
}

criterion_group!(benches, state_ops, protocols, compiler);
criterion_main!(benches);
