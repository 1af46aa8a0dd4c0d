use exchange_teleport::harness::{run_protocol_experiment, Check, RotationConfig, Verdict};
use exchange_teleport::protocols::{enumerate_protocol_tree, CorrectionMode, ProtocolSetup, TreeSpec};
use exchange_teleport::{Axis, StateVector};

#[test]
fn sampled_stop_distribution_matches_tree() {
    for axis in [Axis::Z, Axis::X] {
        for max_cycles in [1, 2, 3, 5] {
            let cfg = RotationConfig { trials: 20_000, max_cycles, seed: 9 + max_cycles as u64, phi_z0: 0.21, ..RotationConfig::new(axis) };
            let report = run_protocol_experiment(&cfg).unwrap();
            assert_eq!(report.verdict, Verdict::Pass, "{report}");
            let stops = report.rows.iter().filter(|r| r.quantity.starts_with("stopped_after_")).count();
            assert_eq!(stops, max_cycles);
            let sampled: f64 = report.rows.iter().filter(|r| r.quantity.starts_with("cycle1_branch_")).filter_map(|r| r.observed).sum();
            assert!((sampled - 1.0).abs() <= 1.0 / cfg.trials as f64);
        }
    }
}

#[test]
fn axes_share_exact_statistics() {
    let psi = StateVector::from_pairs(1, &[(0.8, 0.0), (0.0, 0.6)]).unwrap();
    for cycles in 1..=4 {
        let stats = |axis| {
            enumerate_protocol_tree(&psi, &TreeSpec::new(ProtocolSetup { axis, ..ProtocolSetup::default() }, cycles)).unwrap().stats()
        };
        let (z, x) = (stats(Axis::Z), stats(Axis::X));
        assert!((z.success_mass - x.success_mass).abs() < 1e-12);
        assert!((z.expected_measurements - x.expected_measurements).abs() < 1e-12);
        for k in 0..4 {
            assert!((z.first_cycle_branch_mass[k] - x.first_cycle_branch_mass[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn zz_campaign_always_succeeds_in_one_cycle() {
    let cfg = RotationConfig { trials: 5_000, correction: CorrectionMode::Zz, ..RotationConfig::new(Axis::Z) };
    let report = run_protocol_experiment(&cfg).unwrap();
    assert_eq!(report.success_rate, Some(1.0));
    assert_eq!(report.mean_cycles, Some(1.0));
    assert!(report.rows.iter().filter(|r| r.check == Check::Statistical).all(|r| r.pass));
}
