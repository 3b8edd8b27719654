//! Property tests: structural facts about the metrics that must hold for
//! every score set, not just the fixtures.
//!
//! Generated vectors snap about half their values to one decimal place, so
//! exact ties within and across classes are the norm here rather than the
//! exception.

use proptest::prelude::*;

use spoofeval::calibration::{fit_monotone, CalibrationMap};
use spoofeval::detection::{
    compute_act_dcf, compute_cllr, compute_eer, compute_eer_rocch, compute_min_dcf, ErrorRateCurve,
};
use spoofeval::sasv::{compute_a_dcf, compute_min_a_dcf};
use spoofeval::{CmCostModel, SasvCostModel, SasvPartition};

fn scores(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-10.0..10.0f64, any::<bool>()), 1..max_len).prop_map(|pairs| {
        pairs
            .into_iter()
            .map(|(v, snap)| if snap { (v * 10.0).round() / 10.0 } else { v })
            .collect()
    })
}

/// Scores snapped to three decimals: coarse enough that a positive affine
/// transform can never collapse two distinct values into one float.
fn coarse_scores(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..max_len)
        .prop_map(|v| v.into_iter().map(|x| (x * 1e3).round() / 1e3).collect())
}

proptest! {
    #[test]
    fn dcf_minimum_is_bounded_and_below_the_actual(
        bona in scores(60),
        spoof in scores(60),
    ) {
        let model = CmCostModel::challenge_default();
        let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        let (min_dcf, _) = compute_min_dcf(&curve, &model);
        let act_dcf = compute_act_dcf(&bona, &spoof, &model).unwrap();

        // DCF is piecewise constant between observed scores, so the Bayes
        // threshold lands on a value the sweep also visits.
        prop_assert!(min_dcf >= 0.0);
        prop_assert!(min_dcf <= act_dcf);
        // Accept-everything costs exactly 1, reject-everything exactly beta.
        prop_assert!(min_dcf <= 1.0f64.min(model.beta));
    }

    #[test]
    fn error_rate_curve_is_monotone_with_pinned_endpoints(
        bona in scores(60),
        spoof in scores(60),
    ) {
        let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        let n = curve.len();
        prop_assert!(n >= 2);
        prop_assert_eq!(curve.thresholds()[0], f64::NEG_INFINITY);
        prop_assert_eq!(curve.thresholds()[n - 1], f64::INFINITY);
        prop_assert_eq!((curve.p_miss()[0], curve.p_fa()[0]), (0.0, 1.0));
        prop_assert_eq!((curve.p_miss()[n - 1], curve.p_fa()[n - 1]), (1.0, 0.0));
        for i in 1..n {
            prop_assert!(curve.thresholds()[i - 1] < curve.thresholds()[i]);
            prop_assert!(curve.p_miss()[i - 1] <= curve.p_miss()[i]);
            prop_assert!(curve.p_fa()[i - 1] >= curve.p_fa()[i]);
        }
    }

    #[test]
    fn rates_at_agrees_with_direct_counting(
        bona in scores(60),
        spoof in scores(60),
        tau in -12.0..12.0f64,
    ) {
        let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        for probe in [tau, bona[0], *spoof.last().unwrap()] {
            let (pm, pf) = curve.rates_at(probe);
            let miss = bona.iter().filter(|s| **s < probe).count() as f64
                / bona.len() as f64;
            let fa = spoof.iter().filter(|s| **s >= probe).count() as f64
                / spoof.len() as f64;
            prop_assert_eq!(pm, miss);
            prop_assert_eq!(pf, fa);
        }
    }

    #[test]
    fn eer_lies_between_rocch_and_one(
        bona in scores(60),
        spoof in scores(60),
    ) {
        let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        let (step, _) = compute_eer(&curve);
        let (hull, _) = compute_eer_rocch(&curve);
        prop_assert!((0.0..=1.0).contains(&step));
        // The convex hull lower-bounds the step curve at the crossing.
        prop_assert!(hull <= step + 1e-12, "hull {} vs step {}", hull, step);
        prop_assert!(hull >= 0.0);
    }

    #[test]
    fn rate_derived_metrics_ignore_positive_affine_rescaling(
        bona in coarse_scores(60),
        spoof in coarse_scores(60),
        scale in 0.1..10.0f64,
        offset in -5.0..5.0f64,
    ) {
        let model = CmCostModel::challenge_default();
        let map = |v: &[f64]| -> Vec<f64> {
            v.iter().map(|s| scale * s + offset).collect()
        };
        let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        let mapped = ErrorRateCurve::from_scores(&map(&bona), &map(&spoof)).unwrap();

        // Rank-preserving transforms leave every counted rate unchanged,
        // so the minimum DCF and the interpolated EER are bit-identical;
        // only thresholds move.
        let (a, _) = compute_min_dcf(&curve, &model);
        let (b, _) = compute_min_dcf(&mapped, &model);
        prop_assert_eq!(a.to_bits(), b.to_bits());
        let (ea, _) = compute_eer(&curve);
        let (eb, _) = compute_eer(&mapped);
        prop_assert_eq!(ea.to_bits(), eb.to_bits());
    }

    #[test]
    fn cllr_is_never_negative(
        bona in scores(60),
        spoof in scores(60),
    ) {
        prop_assert!(compute_cllr(&bona, &spoof).unwrap() >= 0.0);
    }

    #[test]
    fn a_dcf_minimum_is_bounded_by_the_trivial_policies(
        target in scores(40),
        nontarget in scores(40),
        spoof in scores(40),
    ) {
        let model = SasvCostModel::challenge_default();
        let partition = SasvPartition { target, nontarget, spoof };
        let (min_value, min_tau) = compute_min_a_dcf(&partition, &model).unwrap();
        prop_assert!(min_value >= 0.0);
        prop_assert!(min_value <= 1.0f64.min(model.alpha));
        // The reported threshold reproduces the reported value.
        let at_tau = compute_a_dcf(&partition, &model, min_tau).unwrap();
        prop_assert_eq!(min_value.to_bits(), at_tau.to_bits());
    }

    #[test]
    fn monotone_fit_is_order_preserving_and_cannot_lower_min_dcf(
        bona in scores(50),
        spoof in scores(50),
    ) {
        let model = CmCostModel::challenge_default();
        let map = fit_monotone(&bona, &spoof).unwrap();

        if let CalibrationMap::Monotone { breakpoints } = &map {
            for pair in breakpoints.windows(2) {
                prop_assert!(pair[0].score <= pair[1].score);
                prop_assert!(pair[0].llr <= pair[1].llr);
            }
        } else {
            prop_assert!(false, "fit_monotone returned a non-monotone map");
        }

        let mapped_bona = map.apply_all(&bona);
        let mapped_spoof = map.apply_all(&spoof);
        let raw = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        let mapped = ErrorRateCurve::from_scores(&mapped_bona, &mapped_spoof).unwrap();
        let (raw_min, _) = compute_min_dcf(&raw, &model);
        let (mapped_min, _) = compute_min_dcf(&mapped, &model);
        // A weakly monotone map can only merge thresholds, shrinking the
        // set of reachable operating points.
        prop_assert!(
            mapped_min >= raw_min - 1e-12,
            "mapped {} below raw {}",
            mapped_min,
            raw_min
        );
    }
}
