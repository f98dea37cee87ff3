mod common;

use proptest::prelude::*;
use siegel_core::domain::in_fundamental_domain;
use siegel_core::geometry::{act, SiegelPoint};
use siegel_core::matrix::Mat;
use siegel_core::reduction::{reduction_height_survey, siegel_reduce, ReduceConfig};
use siegel_core::sample;
use siegel_core::Error;

fn max_diff(a: &SiegelPoint<f64>, b: &SiegelPoint<f64>) -> f64 {
    a.z().sub(&b.z()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn reduction_is_correct_and_idempotent(g in 1usize..=2, seed in any::<u64>()) {
        let cfg = ReduceConfig::default();
        let z = sample::point(g, &mut common::rng(seed));
        let r = siegel_reduce(&z, &cfg).unwrap();
        prop_assert!(r.report.in_domain);
        prop_assert!(max_diff(&act(&r.gamma, &z).unwrap(), &r.reduced_point) <= 1e-8);
        prop_assert!(r.imag_det_trace.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
        let again = siegel_reduce(&r.reduced_point, &cfg).unwrap();
        prop_assert!(again.gamma.is_identity() || *again.height_gamma.value() == 1.into());
        prop_assert!(max_diff(&again.reduced_point, &r.reduced_point) <= 1e-9);
    }

    #[test]
    fn two_routes_meet(g in 1usize..=2, seed in any::<u64>()) {
        let cfg = ReduceConfig::default();
        let mut rng = common::rng(seed);
        let z = sample::point(g, &mut rng);
        let m = sample::word(g, 4, &mut rng);
        let a = siegel_reduce(&z, &cfg).unwrap();
        let b = siegel_reduce(&act(&m, &z).unwrap(), &cfg).unwrap();
        // interior points only: the canonical representative is unique there
        prop_assume!(a.report.min_margin() > 1e-6);
        prop_assert!(max_diff(&a.reduced_point, &b.reduced_point) <= 1e-7);
    }

    #[test]
    fn genus_one_matches_classical_reduction(x in -20.0f64..20.0, ly in -6.0f64..2.0) {
        let y = 10f64.powf(ly);
        let z = SiegelPoint::new(Mat::from_vec(1, 1, vec![x]), Mat::from_vec(1, 1, vec![y])).unwrap();
        let r = siegel_reduce(&z, &ReduceConfig::default()).unwrap();
        let (ox, oy) = common::gauss_reduce_g1(x, y);
        let w = r.reduced_point.z()[(0, 0)];
        prop_assert!((w.re - ox).abs() <= 1e-8 && (w.im - oy).abs() <= 1e-8, "{} vs ({}, {})", w, ox, oy);
    }
}

#[test]
fn genus_three_reduction_lands_in_the_heuristic_domain() {
    let cfg = ReduceConfig::default();
    let mut rng = common::rng(11);
    for _ in 0..20 {
        let z = sample::point(3, &mut rng);
        let r = siegel_reduce(&z, &cfg).unwrap();
        assert!(r.report.heuristic);
        assert!(in_fundamental_domain(&r.reduced_point, 1e-9).in_domain);
        assert!(max_diff(&act(&r.gamma, &z).unwrap(), &r.reduced_point) <= 1e-8);
    }
}

#[test]
fn survey_fits() {
    let cfg = ReduceConfig::default();
    let mut rng = common::rng(12);
    let reduced: Vec<_> = (0..10)
        .map(|_| siegel_reduce(&sample::point(1, &mut rng), &cfg).unwrap().reduced_point)
        .collect();
    // already reduced samples all have H(gamma) = 1
    let flat = reduction_height_survey(&reduced, &cfg).unwrap();
    assert!(flat.slope.abs() < 1e-12);
    let deep: Vec<_> = (0..200).map(|_| sample::boundary_point(1, &mut rng, 5.0)).collect();
    let fit = reduction_height_survey(&deep, &cfg).unwrap();
    assert!(fit.slope.is_finite() && fit.slope > 0.0);
    assert!(matches!(reduction_height_survey(&deep[..1], &cfg), Err(Error::DegenerateFit(_))));
}
