mod common;

use common::*;
use kgsim::fieldfile::FieldFile;
use kgsim::norms::{NormReport, ReportSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transforms_round_trip(seed in any::<u64>()) {
        prop_assert!(transform_round_trip(seed) <= 1e-12);
    }

    #[test]
    fn propagator_is_unitary(seed in any::<u64>()) {
        prop_assert!(propagator_unitarity(seed) <= 1e-12);
    }

    #[test]
    fn shells_sum_to_identity(seed in any::<u64>()) {
        prop_assert!(partition_of_unity(seed) <= 1e-12);
    }
}

#[test]
fn finite_band_ratios_bounded() {
    for seed in 0..3 {
        let r = finite_band_worst(seed);
        assert!(r <= 4.0, "seed {seed}: {r}");
    }
}

#[test]
fn bernstein_ratios_bounded() {
    for seed in 0..3 {
        let r = bernstein_worst(seed);
        assert!(r <= 16.0, "seed {seed}: {r}");
    }
}

#[test]
fn energy_equivalent_to_quadratic_part_at_small_data() {
    let (lo, hi) = energy_equivalence();
    assert!(lo >= 0.5 && hi <= 2.0, "[{lo}, {hi}]");
}

#[test]
fn linear_profile_is_stationary() {
    let d = profile_stationarity();
    assert!(d <= 1e-10, "{d:e}");
}

#[test]
fn nonlinear_deviation_is_quadratic_in_amplitude() {
    for r in deviation_scaling() {
        assert!((r - 4.0).abs() <= 0.8, "halving eps reduced the deviation by {r}");
    }
}

#[test]
fn physical_and_spectral_assembly_agree() {
    for seed in 0..2 {
        let gap = dual_path_gap(seed);
        assert!(gap <= 1e-10, "{gap:e}");
    }
}

#[test]
fn integrator_local_order_at_least_four_and_a_half() {
    let (order, errs) = integrator_local_order();
    assert!(order >= 4.5, "{order} from {errs:?}");
}

#[test]
fn field_file_round_trip() {
    let g = tiny_grid();
    let u = kgsim::linear::random_band_limited(&g, &mut rng(5));
    let udot = kgsim::linear::random_band_limited(&g, &mut rng(6));
    let file = FieldFile::from_fields(1.5, &u, &udot);
    let back = FieldFile::parse(&file.to_json()).unwrap();
    assert_eq!(back, file);
    let (_, u2, _) = back.to_fields().unwrap();
    assert!((&u2 - &u).l2_norm() <= 1e-13 * u.l2_norm());
}

#[test]
fn norm_report_json_round_trip() {
    let g = tiny_grid();
    let u = kgsim::linear::random_band_limited(&g, &mut rng(7)) * 1e-2;
    let udot = kgsim::linear::random_band_limited(&g, &mut rng(8)) * 1e-2;
    let c = kgsim::core::DyadicCutoffs::default();
    let r = kgsim::norms::norm_report(3.0, &u, &udot, &kgsim::core::NonlinearityCoeffs::mixed(), &c, &ReportSpec::default(), None).unwrap();
    assert!(r.all_finite_nonnegative());
    let text = serde_json::to_string(&r.to_json()).unwrap();
    let back = NormReport::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, r);
}
