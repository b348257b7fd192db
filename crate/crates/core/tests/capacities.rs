use qsupermap::channels::{bit_flip, depolarizing};
use qsupermap::experiment::{CapacityType, ClassicalReadout, Family, Scenario};
use qsupermap::infotheory::{classical_capacity, quantum_capacity, OptimizerConfig};
use qsupermap::supermaps::SupermapKind;

fn h2(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
}

#[test]
fn seed_changes_do_not_move_the_optimum() {
    let scenario = Scenario::new(SupermapKind::CohOfSwitch, Family::MixedAlternating, 0.4);
    let values: Vec<f64> = (0..3)
        .map(|seed| {
            let cfg = OptimizerConfig { seed, restarts: 4, ..OptimizerConfig::default() };
            scenario.capacity(CapacityType::Quantum, ClassicalReadout::TargetBasis, &cfg).unwrap().value
        })
        .collect();
    for v in &values[1..] {
        assert!((v - values[0]).abs() < 1e-6, "{values:?}");
    }
}

#[test]
fn same_seed_is_bit_identical() {
    let scenario = Scenario::new(SupermapKind::SwitchOfCoh, Family::Depolarizing, 0.3);
    let cfg = OptimizerConfig { seed: 5, restarts: 4, ..OptimizerConfig::default() };
    let a = scenario.capacity(CapacityType::Classical, ClassicalReadout::FullHolevo, &cfg).unwrap();
    let b = scenario.capacity(CapacityType::Classical, ClassicalReadout::FullHolevo, &cfg).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.evaluations, b.evaluations);
}

#[test]
fn single_channel_reference_values() {
    let cfg = OptimizerConfig::default();
    for p in [0.05, 0.2, 0.45] {
        let q = quantum_capacity(&bit_flip(p).unwrap(), &cfg).unwrap();
        assert!((q.value - (1.0 - h2(p))).abs() < 1e-7);
        let c = classical_capacity(&depolarizing(p).unwrap(), &cfg).unwrap();
        assert!((c.value - (1.0 - h2(2.0 * p / 3.0))).abs() < 1e-7);
    }
}

#[test]
fn quantum_capacity_is_clamped_with_raw_value_kept() {
    let r = quantum_capacity(&depolarizing(0.5).unwrap(), &OptimizerConfig::default()).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(r.raw_value < 0.0);
}

#[test]
fn full_holevo_never_below_target_readout() {
    let cfg = OptimizerConfig { restarts: 4, ..OptimizerConfig::default() };
    for kind in [SupermapKind::Switch, SupermapKind::CoherentSup] {
        for p in [0.25, 0.75] {
            let s = Scenario::new(kind, Family::Depolarizing, p);
            let t = s.capacity(CapacityType::Classical, ClassicalReadout::TargetBasis, &cfg).unwrap();
            let f = s.capacity(CapacityType::Classical, ClassicalReadout::FullHolevo, &cfg).unwrap();
            assert!(f.value >= t.value - 1e-7, "{kind:?} p={p}: {} < {}", f.value, t.value);
        }
    }
}
