//! Release acceptance gate: eight binding criteria, one test per criterion.
//!
//! Every test ends by printing a single `acceptance N: PASS` line (visible
//! with `--nocapture`; under the default harness the per-test result line
//! carries the same verdict). Tolerances and budgets are pinned as named
//! constants here so a regression cannot quietly loosen the gate.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use spoofeval::calibration::fit_monotone;
use spoofeval::detection::{
    compute_act_dcf, compute_cllr, compute_eer, compute_min_dcf, ErrorRateCurve,
};
use spoofeval::io::keys::write_keys;
use spoofeval::io::report_fmt::read_report_json;
use spoofeval::io::scores::{write_scores, ScoreLayout};
use spoofeval::report::ConditionMetrics;
use spoofeval::sasv::{compute_concurrent_teer, compute_min_a_dcf};
use spoofeval::{CmCostModel, SasvCostModel, SasvPartition, ScoreChannel, TandemPartition, Track};
use spoofeval_oracle::{brute, synth};

/// 1: window around the published derived weights of the Track 2 model.
const DERIVED_WEIGHT_WINDOW: f64 = 0.005;
/// 2: engine-versus-oracle agreement on every counted metric.
const ORACLE_TOLERANCE: f64 = 1e-12;
/// 2: engine-versus-dense-grid agreement for the tandem EER.
const TEER_GRID_TOLERANCE: f64 = 1e-3;
/// 2: wall-clock budget for the whole oracle sweep.
const ORACLE_BUDGET: Duration = Duration::from_secs(300);
/// 5: how far above the minimum DCF the actual DCF may sit, relatively,
/// when the scores are ideally calibrated by construction.
const IDEAL_ACT_RELATIVE_SLACK: f64 = 0.05;
/// 5: after monotone recalibration the actual DCF must reach the minimum.
const PAV_ACT_SLACK: f64 = 1e-9;
/// 5: decimal places to which recalibration must leave the minimum DCF.
const MIN_DCF_DECIMALS: usize = 6;
/// 6: tandem EER agreement with the surviving subsystem's own EER.
const REDUCTION_TOLERANCE: f64 = 1e-9;
/// 7: wall-clock budget for one evaluation-scale CLI run.
const EVALUATION_BUDGET: Duration = Duration::from_secs(10);

fn pass(criterion: u32, detail: &str) {
    println!("acceptance {criterion}: PASS ({detail})");
}

/// A deterministic score-to-score map under test.
type ScoreMap = fn(f64) -> f64;

/// Rounds roughly every tenth score to one decimal, manufacturing exact
/// ties within and across classes.
fn inject_ties(values: &mut [f64], rng: &mut ChaCha12Rng) {
    for v in values.iter_mut() {
        if rng.gen::<f64>() < 0.1 {
            *v = (*v * 10.0).round() / 10.0;
        }
    }
}

/// Exact equality first: sweep thresholds may be infinite, and inf - inf
/// is NaN.
fn close(a: f64, b: f64, what: &str, seed: u64) {
    assert!(
        a == b || (a - b).abs() <= ORACLE_TOLERANCE,
        "{what} disagrees at seed {seed}: engine {a} vs oracle {b}"
    );
}

#[test]
fn acceptance_1_challenge_cost_constants() {
    let cm = CmCostModel::challenge_default();
    assert_eq!(cm.beta, 1.9, "default beta must be exactly 1.9");
    assert_eq!(
        cm.tau_bayes,
        -(1.9f64.ln()),
        "default Bayes threshold must be exactly -ln 1.9"
    );

    let sasv = SasvCostModel::challenge_default();
    assert!(
        (sasv.alpha - 1.58).abs() < DERIVED_WEIGHT_WINDOW,
        "alpha {} strays from 1.58 by more than {DERIVED_WEIGHT_WINDOW}",
        sasv.alpha
    );
    assert!(
        (sasv.gamma - 0.84).abs() < DERIVED_WEIGHT_WINDOW,
        "gamma {} strays from 0.84 by more than {DERIVED_WEIGHT_WINDOW}",
        sasv.gamma
    );
    pass(
        1,
        &format!(
            "beta 1.9 exact, tau_bayes {:.6}, alpha {:.4}, gamma {:.4}",
            cm.tau_bayes, sasv.alpha, sasv.gamma
        ),
    );
}

#[test]
fn acceptance_2_engines_match_brute_force_oracles() {
    let started = Instant::now();
    let cm_model = CmCostModel::challenge_default();
    let sasv_model = SasvCostModel::challenge_default();

    for seed in 0..1000u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x00AC_CE97);

        // Two-class detection metrics on one random set.
        let n_bona = rng.gen_range(3..=500);
        let n_spoof = rng.gen_range(3..=500);
        let mean_bona = rng.gen_range(-0.5..2.0);
        let mean_spoof = rng.gen_range(-2.0..0.5);
        let stddev = rng.gen_range(0.5..2.0);
        let data = synth::generate(&synth::two_class_track1(
            seed, n_bona, n_spoof, mean_bona, mean_spoof, stddev,
        ))
        .unwrap();
        // two_class_track1 lays out bona fide trials first, then spoofs.
        let cm = data.scores.channel(ScoreChannel::Cm).unwrap();
        let mut bona = cm[..n_bona].to_vec();
        let mut spoof = cm[n_bona..].to_vec();
        inject_ties(&mut bona, &mut rng);
        inject_ties(&mut spoof, &mut rng);

        let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        let (min_dcf, _) = compute_min_dcf(&curve, &cm_model);
        let act_dcf = compute_act_dcf(&bona, &spoof, &cm_model).unwrap();
        let (eer, _) = compute_eer(&curve);
        let cllr = compute_cllr(&bona, &spoof).unwrap();
        let oracle = brute::track1_metrics(&bona, &spoof, 1.0, 10.0, 0.05);
        close(min_dcf, oracle.min_dcf, "min DCF", seed);
        close(act_dcf, oracle.act_dcf, "act DCF", seed);
        close(eer, oracle.eer, "EER", seed);
        close(cllr, oracle.cllr, "Cllr", seed);

        // Three-class minimum a-DCF on an independently drawn partition.
        let counts = (
            rng.gen_range(3..=500),
            rng.gen_range(3..=500),
            rng.gen_range(3..=500),
        );
        let spread = rng.gen_range(0.8..1.6);
        let means = [[2.0, 1.5, 2.0], [-1.5, 1.0, -1.8], [0.5, -1.5, 0.3]];
        let tri = synth::generate(&synth::triplet_track2(
            seed ^ 0x3000_0000,
            counts,
            means,
            spread,
        ))
        .unwrap();
        let sasv = tri.scores.channel(ScoreChannel::Sasv).unwrap();
        let mut target = sasv[..counts.0].to_vec();
        let mut nontarget = sasv[counts.0..counts.0 + counts.1].to_vec();
        let mut spoofed = sasv[counts.0 + counts.1..].to_vec();
        inject_ties(&mut target, &mut rng);
        inject_ties(&mut nontarget, &mut rng);
        inject_ties(&mut spoofed, &mut rng);
        let partition = SasvPartition {
            target,
            nontarget,
            spoof: spoofed,
        };
        let (engine_min, _) = compute_min_a_dcf(&partition, &sasv_model).unwrap();
        let (oracle_min, _) = brute::min_a_dcf(
            &partition.target,
            &partition.nontarget,
            &partition.spoof,
            1.0,
            10.0,
            10.0,
            0.9405,
            0.0095,
            0.05,
        );
        close(engine_min, oracle_min, "min a-DCF", seed);
    }

    // Concurrent tandem EER against the dense grid, on smaller sets where
    // the grid covers every distinct threshold.
    let mut crossings = 0;
    for seed in 0..200u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x0000_7EE2);
        let counts = (
            rng.gen_range(10..=100),
            rng.gen_range(10..=100),
            rng.gen_range(10..=100),
        );
        let spread = rng.gen_range(0.9..1.5);
        let means = [[1.5, 1.2, 1.8], [-1.0, 1.0, -1.6], [0.8, -1.2, 0.9]];
        let tri = synth::generate(&synth::triplet_track2(
            seed ^ 0x4000_0000,
            counts,
            means,
            spread,
        ))
        .unwrap();
        let mut slice = |channel: ScoreChannel| {
            let v = tri.scores.channel(channel).unwrap();
            let mut t = v[..counts.0].to_vec();
            let mut n = v[counts.0..counts.0 + counts.1].to_vec();
            let mut s = v[counts.0 + counts.1..].to_vec();
            inject_ties(&mut t, &mut rng);
            inject_ties(&mut n, &mut rng);
            inject_ties(&mut s, &mut rng);
            (t, n, s)
        };
        let asv = slice(ScoreChannel::Asv);
        let cm = slice(ScoreChannel::Cm);
        let pair = |a: &[f64], c: &[f64]| {
            a.iter()
                .copied()
                .zip(c.iter().copied())
                .collect::<Vec<(f64, f64)>>()
        };
        let tandem = TandemPartition {
            target: pair(&asv.0, &cm.0),
            nontarget: pair(&asv.1, &cm.1),
            spoof: pair(&asv.2, &cm.2),
        };

        let grid = brute::grid_teer(&tandem.target, &tandem.nontarget, &tandem.spoof, 2000);
        match compute_concurrent_teer(&tandem) {
            Ok(found) => {
                let oracle = grid.common.unwrap_or_else(|| {
                    panic!("solver found a crossing at seed {seed}, the grid did not")
                });
                assert!(
                    (found.common_error - oracle).abs() <= TEER_GRID_TOLERANCE,
                    "tandem EER disagrees at seed {seed}: engine {} vs grid {oracle}",
                    found.common_error
                );
                crossings += 1;
            }
            Err(_) => assert!(
                grid.common.is_none(),
                "grid found a crossing at seed {seed}, the solver did not"
            ),
        }
    }
    assert!(
        crossings >= 140,
        "only {crossings} of 200 tandem sets crossed"
    );

    let elapsed = started.elapsed();
    assert!(
        elapsed < ORACLE_BUDGET,
        "oracle sweep took {elapsed:?}, budget {ORACLE_BUDGET:?}"
    );
    pass(
        2,
        &format!(
            "1000 detection + 1000 a-DCF + 200 tandem sets ({crossings} crossings) in {elapsed:.1?}"
        ),
    );
}

/// Strictly increasing piecewise-linear map with uneven slopes; the ends
/// extrapolate with the edge slopes.
fn rank_spline(s: f64) -> f64 {
    const KNOTS: [(f64, f64); 5] = [
        (-3.0, -7.0),
        (-1.0, -2.5),
        (0.0, -1.0),
        (1.0, 2.0),
        (3.0, 8.0),
    ];
    let (x0, y0) = KNOTS[0];
    if s < x0 {
        let slope = (KNOTS[1].1 - y0) / (KNOTS[1].0 - x0);
        return y0 + slope * (s - x0);
    }
    for window in KNOTS.windows(2) {
        let (ax, ay) = window[0];
        let (bx, by) = window[1];
        if s <= bx {
            return ay + (by - ay) / (bx - ax) * (s - ax);
        }
    }
    let (px, py) = KNOTS[3];
    let (lx, ly) = KNOTS[4];
    ly + (ly - py) / (lx - px) * (s - lx)
}

#[test]
fn acceptance_3_rank_preserving_maps_leave_metrics_bit_stable() {
    const TRANSFORMS: [(&str, ScoreMap); 5] = [
        ("affine", |s| 2.5 * s + 1.75),
        ("exp", f64::exp),
        ("cube", |s| s * s * s),
        ("softplus", |s| s.exp().ln_1p()),
        ("spline", rank_spline),
    ];
    let cm_model = CmCostModel::challenge_default();
    let sasv_model = SasvCostModel::challenge_default();

    for seed in 0..100u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x0B17_57AB);
        let n_bona = rng.gen_range(3..=300);
        let n_spoof = rng.gen_range(3..=300);
        let data = synth::generate(&synth::two_class_track1(
            seed,
            n_bona,
            n_spoof,
            rng.gen_range(-0.5..1.5),
            rng.gen_range(-1.5..0.5),
            rng.gen_range(0.5..1.5),
        ))
        .unwrap();
        let cm = data.scores.channel(ScoreChannel::Cm).unwrap();
        let mut bona = cm[..n_bona].to_vec();
        let mut spoof = cm[n_bona..].to_vec();
        inject_ties(&mut bona, &mut rng);
        inject_ties(&mut spoof, &mut rng);

        let counts = (
            rng.gen_range(10..=120),
            rng.gen_range(10..=120),
            rng.gen_range(10..=120),
        );
        let means = [[1.5, 1.2, 1.8], [-1.0, 1.0, -1.6], [0.8, -1.2, 0.9]];
        let tri = synth::generate(&synth::triplet_track2(
            seed ^ 0x5000_0000,
            counts,
            means,
            rng.gen_range(0.9..1.5),
        ))
        .unwrap();
        let mut slice = |channel: ScoreChannel| {
            let v = tri.scores.channel(channel).unwrap();
            let mut t = v[..counts.0].to_vec();
            let mut n = v[counts.0..counts.0 + counts.1].to_vec();
            let mut s = v[counts.0 + counts.1..].to_vec();
            inject_ties(&mut t, &mut rng);
            inject_ties(&mut n, &mut rng);
            inject_ties(&mut s, &mut rng);
            (t, n, s)
        };
        let sasv = slice(ScoreChannel::Sasv);
        let asv = slice(ScoreChannel::Asv);
        let cmt = slice(ScoreChannel::Cm);
        let partition = SasvPartition {
            target: sasv.0.clone(),
            nontarget: sasv.1.clone(),
            spoof: sasv.2.clone(),
        };
        let pair = |a: &[f64], c: &[f64]| {
            a.iter()
                .copied()
                .zip(c.iter().copied())
                .collect::<Vec<(f64, f64)>>()
        };
        let tandem = TandemPartition {
            target: pair(&asv.0, &cmt.0),
            nontarget: pair(&asv.1, &cmt.1),
            spoof: pair(&asv.2, &cmt.2),
        };

        let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
        let base_min_dcf = compute_min_dcf(&curve, &cm_model).0;
        let base_eer = compute_eer(&curve).0;
        let base_a_dcf = compute_min_a_dcf(&partition, &sasv_model).unwrap().0;
        let base_teer = compute_concurrent_teer(&tandem)
            .ok()
            .map(|found| found.common_error);

        for (name, f) in TRANSFORMS {
            let map = |v: &[f64]| v.iter().copied().map(f).collect::<Vec<f64>>();
            let curve_t = ErrorRateCurve::from_scores(&map(&bona), &map(&spoof)).unwrap();
            assert_eq!(
                compute_min_dcf(&curve_t, &cm_model).0.to_bits(),
                base_min_dcf.to_bits(),
                "min DCF drifts under {name} at seed {seed}"
            );
            assert_eq!(
                compute_eer(&curve_t).0.to_bits(),
                base_eer.to_bits(),
                "EER drifts under {name} at seed {seed}"
            );
            let partition_t = SasvPartition {
                target: map(&partition.target),
                nontarget: map(&partition.nontarget),
                spoof: map(&partition.spoof),
            };
            assert_eq!(
                compute_min_a_dcf(&partition_t, &sasv_model)
                    .unwrap()
                    .0
                    .to_bits(),
                base_a_dcf.to_bits(),
                "min a-DCF drifts under {name} at seed {seed}"
            );
            let remap = |pairs: &[(f64, f64)]| {
                pairs
                    .iter()
                    .map(|&(a, c)| (f(a), f(c)))
                    .collect::<Vec<(f64, f64)>>()
            };
            let tandem_t = TandemPartition {
                target: remap(&tandem.target),
                nontarget: remap(&tandem.nontarget),
                spoof: remap(&tandem.spoof),
            };
            let teer_t = compute_concurrent_teer(&tandem_t)
                .ok()
                .map(|found| found.common_error);
            match (base_teer, teer_t) {
                (Some(a), Some(b)) => assert_eq!(
                    a.to_bits(),
                    b.to_bits(),
                    "tandem EER drifts under {name} at seed {seed}"
                ),
                (None, None) => {}
                (a, b) => panic!(
                    "tandem crossing parity breaks under {name} at seed {seed}: {a:?} vs {b:?}"
                ),
            }
        }
    }
    pass(
        3,
        "min DCF, EER, min a-DCF, tandem EER bit-stable under 5 maps x 100 sets",
    );
}

#[test]
fn acceptance_4_degenerate_submissions_cost_exactly_one() {
    let model = CmCostModel::challenge_default();

    // Every score above the Bayes threshold: the rule accepts everything,
    // so the actual DCF is the accept-all cost of exactly 1.
    let bona: Vec<f64> = (0..57).map(|i| -0.2 + 0.11 * i as f64).collect();
    let spoof: Vec<f64> = (0..43).map(|i| -0.3 + 0.07 * i as f64).collect();
    assert!(bona.iter().chain(&spoof).all(|s| *s > model.tau_bayes));
    let act = compute_act_dcf(&bona, &spoof, &model).unwrap();
    assert_eq!(act, 1.0, "accept-everything actual DCF must be exactly 1");

    // All-zero scores: softplus(0) is ln 2 on both sides. The class sizes
    // are kept small enough that the running sums of equal values stay
    // exact, so the normalized cost is exactly 1.
    let cllr = compute_cllr(&[0.0; 16], &[0.0; 8]).unwrap();
    assert_eq!(cllr, 1.0, "all-zero Cllr must be exactly 1");

    pass(
        4,
        "act DCF 1.0 above threshold, Cllr 1.0 on zeros, both exact",
    );
}

#[test]
fn acceptance_5_monotone_calibration_restores_bayes_decisions() {
    let model = CmCostModel::challenge_default();
    let n = 1_000_000;
    let data = synth::generate(&synth::ideal_llr_track1(4242, n, n, 2.0)).unwrap();
    let cm = data.scores.channel(ScoreChannel::Cm).unwrap();
    let bona = cm[..n].to_vec();
    let spoof = cm[n..].to_vec();

    // Ideal LLR scores decide well at the Bayes threshold out of the box.
    let curve = ErrorRateCurve::from_scores(&bona, &spoof).unwrap();
    let (min_raw, _) = compute_min_dcf(&curve, &model);
    let act_raw = compute_act_dcf(&bona, &spoof, &model).unwrap();
    assert!(
        act_raw - min_raw <= IDEAL_ACT_RELATIVE_SLACK * min_raw,
        "ideal scores decide badly: act {act_raw} vs min {min_raw}"
    );

    // Order-preserving miscalibrations wreck the decisions; a monotone
    // refit restores them without moving the discrimination floor.
    let squashes: [(&str, ScoreMap); 2] = [
        ("linear squeeze", |s| 0.05 * s + 3.0),
        ("atan squash", |s| 0.8 * s.atan() + 1.0),
    ];
    for (name, squash) in squashes {
        let broken_bona: Vec<f64> = bona.iter().map(|&s| squash(s)).collect();
        let broken_spoof: Vec<f64> = spoof.iter().map(|&s| squash(s)).collect();
        let act_broken = compute_act_dcf(&broken_bona, &broken_spoof, &model).unwrap();
        assert_eq!(
            act_broken, 1.0,
            "{name} should push every score past the Bayes threshold"
        );

        let map = fit_monotone(&broken_bona, &broken_spoof).unwrap();
        let mapped_bona = map.apply_all(&broken_bona);
        let mapped_spoof = map.apply_all(&broken_spoof);
        let mapped_curve = ErrorRateCurve::from_scores(&mapped_bona, &mapped_spoof).unwrap();
        let (min_mapped, _) = compute_min_dcf(&mapped_curve, &model);
        let act_mapped = compute_act_dcf(&mapped_bona, &mapped_spoof, &model).unwrap();
        assert!(
            act_mapped <= min_mapped + PAV_ACT_SLACK,
            "{name}: recalibrated act DCF {act_mapped} exceeds min {min_mapped}"
        );
        assert_eq!(
            format!("{min_mapped:.prec$}", prec = MIN_DCF_DECIMALS),
            format!("{min_raw:.prec$}", prec = MIN_DCF_DECIMALS),
            "{name}: recalibration moved the minimum DCF"
        );
    }
    pass(
        5,
        &format!("raw act/min {act_raw:.6}/{min_raw:.6}; both squashes recalibrated to the floor"),
    );
}

#[test]
fn acceptance_6_tandem_eer_reduces_to_the_surviving_subsystem() {
    // Overlapping score material for whichever axis stays imperfect.
    let first = synth::generate(&synth::two_class_track1(61, 120, 150, 1.0, -1.0, 1.0)).unwrap();
    let cm = first.scores.channel(ScoreChannel::Cm).unwrap();
    let (v, w) = (cm[..120].to_vec(), cm[120..].to_vec());
    let second = synth::generate(&synth::two_class_track1(62, 130, 110, 1.0, -1.0, 1.0)).unwrap();
    let cm2 = second.scores.channel(ScoreChannel::Cm).unwrap();
    let (a, b) = (cm2[..130].to_vec(), cm2[130..].to_vec());

    // Perfect verification: targets at +100, nontargets at -100, spoofs
    // mimicking targets. Nontarget countermeasure scores copy the target
    // ones, so the countermeasure-only EER is the plain two-class EER of
    // (v, w). The tandem must reproduce it.
    let (eer_cm, _) = compute_eer(&ErrorRateCurve::from_scores(&v, &w).unwrap());
    assert!((0.02..0.5).contains(&eer_cm), "weak fixture: EER {eer_cm}");
    let asv_perfect = TandemPartition {
        target: v.iter().map(|&c| (100.0, c)).collect(),
        nontarget: v.iter().map(|&c| (-100.0, c)).collect(),
        spoof: w.iter().map(|&c| (100.0, c)).collect(),
    };
    let tandem = compute_concurrent_teer(&asv_perfect).unwrap();
    assert!(
        (tandem.common_error - eer_cm).abs() <= REDUCTION_TOLERANCE,
        "perfect verification: tandem EER {} vs countermeasure EER {eer_cm}",
        tandem.common_error
    );
    let teer_asv_perfect = tandem.common_error;

    // Perfect countermeasure: bona fide at +100, spoofs at -100, spoof
    // verification scores copying the targets'. The tandem must reproduce
    // the verification-only EER of (a, b).
    let (eer_asv, _) = compute_eer(&ErrorRateCurve::from_scores(&a, &b).unwrap());
    assert!(
        (0.02..0.5).contains(&eer_asv),
        "weak fixture: EER {eer_asv}"
    );
    let cm_perfect = TandemPartition {
        target: a.iter().map(|&s| (s, 100.0)).collect(),
        nontarget: b.iter().map(|&s| (s, 100.0)).collect(),
        spoof: a.iter().map(|&s| (s, -100.0)).collect(),
    };
    let tandem = compute_concurrent_teer(&cm_perfect).unwrap();
    assert!(
        (tandem.common_error - eer_asv).abs() <= REDUCTION_TOLERANCE,
        "perfect countermeasure: tandem EER {} vs verification EER {eer_asv}",
        tandem.common_error
    );

    pass(
        6,
        &format!(
            "tandem {:.6} == countermeasure {eer_cm:.6}; tandem {:.6} == verification {eer_asv:.6}",
            teer_asv_perfect, tandem.common_error
        ),
    );
}

#[test]
fn acceptance_7_evaluation_scale_runs_fast_and_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth::generate(&synth::table1_scale_track1(7)).unwrap();
    let keys = dir.path().join("keys.tsv");
    let scores = dir.path().join("scores.tsv");
    write_keys(&keys, &data.records, Track::One).unwrap();
    write_scores(&scores, &data.scores, ScoreLayout::Single(ScoreChannel::Cm)).unwrap();

    let evaluate = |jobs: &str, out: &Path| -> Duration {
        let started = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_spoofeval"))
            .args([
                "evaluate",
                "--track",
                "1",
                "--scores",
                scores.to_str().unwrap(),
                "--keys",
                keys.to_str().unwrap(),
                "--jobs",
                jobs,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("the binary should spawn");
        let elapsed = started.elapsed();
        assert!(status.success(), "evaluation failed with {status}");
        elapsed
    };

    let out_serial = dir.path().join("report_serial.tsv");
    let out_pooled = dir.path().join("report_threaded.tsv");
    let serial = evaluate("1", &out_serial);
    let threaded = evaluate("4", &out_pooled);
    assert!(
        serial < EVALUATION_BUDGET && threaded < EVALUATION_BUDGET,
        "evaluation too slow: {serial:?} serial, {threaded:?} threaded, budget {EVALUATION_BUDGET:?}"
    );

    let bytes_serial = std::fs::read(&out_serial).unwrap();
    let bytes_threaded = std::fs::read(&out_pooled).unwrap();
    assert_eq!(
        bytes_serial, bytes_threaded,
        "reports differ between --jobs 1 and --jobs 4"
    );

    // Pooled + 16 attacks + 12 codecs.
    let text = String::from_utf8(bytes_serial).unwrap();
    let rows = text
        .lines()
        .filter(|line| !line.is_empty() && !line.starts_with('#') && !line.starts_with("condition"))
        .count();
    assert_eq!(rows, 29, "expected 29 condition rows");

    pass(
        7,
        &format!("680,774 trials, 29 conditions: {serial:.2?} serial, {threaded:.2?} threaded"),
    );
}

#[test]
fn acceptance_8_sasv_only_submissions_carry_explicit_nulls() {
    let dir = tempfile::tempdir().unwrap();
    let means = [[2.0, 1.5, 2.0], [-1.5, 1.0, -1.8], [0.5, -1.5, 0.3]];
    let data = synth::generate(&synth::triplet_track2(83, (80, 70, 90), means, 1.0)).unwrap();
    let keys = dir.path().join("keys.tsv");
    let scores = dir.path().join("scores.tsv");
    write_keys(&keys, &data.records, Track::Two).unwrap();
    // Only the fused channel is submitted.
    write_scores(
        &scores,
        &data.scores,
        ScoreLayout::Single(ScoreChannel::Sasv),
    )
    .unwrap();

    let base = dir.path().join("report");
    let status = Command::new(env!("CARGO_BIN_EXE_spoofeval"))
        .args([
            "evaluate",
            "--track",
            "2",
            "--scores",
            scores.to_str().unwrap(),
            "--keys",
            keys.to_str().unwrap(),
            "--format",
            "both",
            "--out",
            base.to_str().unwrap(),
        ])
        .status()
        .expect("the binary should spawn");
    assert!(status.success(), "evaluation failed with {status}");

    let report = read_report_json(&dir.path().join("report.json")).unwrap();
    match report.pooled.metrics {
        ConditionMetrics::Track2(m) => {
            assert!(m.min_a_dcf.is_finite(), "a-DCF must be reported");
            assert!(m.min_tdcf.is_none(), "t-DCF must be absent");
            assert!(
                m.min_tdcf_threshold.is_none(),
                "t-DCF threshold must be absent"
            );
            assert!(m.teer.is_none(), "tandem EER must be absent");
            assert!(
                m.asv_operating_point.is_none(),
                "operating point must be absent"
            );
        }
        other => panic!("expected Track 2 pooled metrics, got {other:?}"),
    }
    // The JSON spells the absences out rather than omitting the keys.
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    for key in [
        "min_tdcf",
        "min_tdcf_threshold",
        "teer",
        "asv_operating_point",
    ] {
        assert!(
            json.contains(&format!("\"{key}\": null")),
            "JSON lacks an explicit null for {key}"
        );
    }

    let tsv = std::fs::read_to_string(dir.path().join("report.tsv")).unwrap();
    let pooled: Vec<&str> = tsv
        .lines()
        .find(|line| line.starts_with("pooled\t"))
        .expect("no pooled row")
        .split('\t')
        .collect();
    assert_eq!(pooled.len(), 18, "unexpected Track 2 column count");
    assert!(
        pooled[8..17].iter().all(|cell| *cell == "-"),
        "tandem cells should be dashes: {pooled:?}"
    );

    pass(
        8,
        "a-DCF reported; t-DCF and tandem EER are explicit nulls and dashes",
    );
}
