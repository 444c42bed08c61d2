mod common;

use common::*;
use pf_core::ga::DimsMode;
use pf_core::metrics::neighbor_accuracy;
use pf_core::{evolve, Error, GaConfig, MeasureKind, PuzzleType};

#[test]
fn oracle_solves_4x3_type1() {
    let bundle = noise_bundle(4, 3, 6, PuzzleType::Type1, 1);
    let t = scores(MeasureKind::Oracle, &bundle);
    let r = evolve(&bundle, &t, &GaConfig::default()).unwrap();
    let gt = bundle.ground_truth().unwrap();
    assert_eq!(
        neighbor_accuracy(&r.arrangement, gt, PuzzleType::Type1).unwrap(),
        1.0
    );
    assert_eq!(r.arrangement, gt.arrangement());
}

#[test]
fn oracle_solves_5x4_type2_without_dims() {
    let bundle = noise_bundle(5, 4, 6, PuzzleType::Type2, 2);
    let t = scores(MeasureKind::Oracle, &bundle);
    let cfg = GaConfig::default()
        .with_dims(DimsMode::Unknown)
        .with_seed(3);
    let r = evolve(&bundle, &t, &cfg).unwrap();
    let gt = bundle.ground_truth().unwrap();
    assert_eq!(
        neighbor_accuracy(&r.arrangement, gt, PuzzleType::Type2).unwrap(),
        1.0
    );
    let dims = (r.arrangement.rows(), r.arrangement.cols());
    assert!(dims == (5, 4) || dims == (4, 5), "{dims:?}");
}

#[test]
fn same_seed_same_report() {
    let bundle = natural_bundle("rocket", PuzzleType::Type2, 5);
    let t = scores(MeasureKind::Mgc, &bundle);
    let mut cfg = GaConfig::default().with_seed(77);
    cfg.stall_generations = 5;
    cfg.restarts = 2;
    let a = evolve(&bundle, &t, &cfg).unwrap();
    let b = evolve(&bundle, &t, &cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let other = evolve(&bundle, &t, &cfg.clone().with_seed(78)).unwrap();
    assert_ne!(a.trace, other.trace);
}

#[test]
fn elite_fitness_never_drops() {
    let bundle = natural_bundle("coffee", PuzzleType::Type1, 2);
    let t = scores(MeasureKind::SsdRgb, &bundle);
    let mut cfg = GaConfig::default().with_seed(1);
    cfg.restarts = 3;
    cfg.stall_generations = 10;
    let r = evolve(&bundle, &t, &cfg).unwrap();
    assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(*r.trace.last().unwrap(), r.fitness);
    assert_eq!(r.restart_fitness.len(), 3);
    assert_eq!(r.restart_fitness[r.best_restart], r.fitness);
    assert!(r.restart_fitness.iter().all(|&f| f <= r.fitness));
    assert!(r.arrangement.is_complete());
    assert_eq!(r.arrangement.len(), bundle.len());
    // stall stop: the last stall_generations entries did not improve
    let tail = &r.trace[r.trace.len() - 1 - cfg.stall_generations..];
    assert!(tail.iter().all(|&f| f == tail[0]));
}

#[test]
fn unknown_dims_give_rectangles_of_area_n() {
    for seed in 0..4 {
        let bundle = noise_bundle(3, 4, 5, PuzzleType::Type1, seed);
        let t = scores(MeasureKind::SsdRgb, &bundle);
        let mut cfg = GaConfig::default()
            .with_dims(DimsMode::Unknown)
            .with_seed(seed);
        cfg.stall_generations = 3;
        let r = evolve(&bundle, &t, &cfg).unwrap();
        assert_eq!(r.arrangement.rows() * r.arrangement.cols(), 12);
        assert!(r.arrangement.is_complete());
    }
}

#[test]
fn mismatched_tensor_is_rejected() {
    let bundle = noise_bundle(2, 3, 5, PuzzleType::Type1, 0);
    let other = noise_bundle(2, 2, 5, PuzzleType::Type1, 0);
    let t = scores(MeasureKind::Oracle, &other);
    assert!(evolve(&bundle, &t, &GaConfig::default()).is_err());
    let t2 = scores(
        MeasureKind::Oracle,
        &noise_bundle(2, 3, 5, PuzzleType::Type2, 0),
    );
    assert!(evolve(&bundle, &t2, &GaConfig::default()).is_err());
}

#[test]
fn bad_config_is_rejected() {
    let bundle = noise_bundle(2, 3, 5, PuzzleType::Type1, 0);
    let t = scores(MeasureKind::Oracle, &bundle);
    let cfg = GaConfig {
        skip_phase1_prob: 1.5,
        ..GaConfig::default()
    };
    assert!(matches!(
        evolve(&bundle, &t, &cfg),
        Err(Error::InvalidConfig(_))
    ));
}
