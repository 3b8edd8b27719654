//! Engine-versus-oracle agreement on seeded random score sets, and
//! statistical checks that the synthetic generator delivers what its
//! parameters promise.
//!
//! The oracles recount every threshold by brute force, so agreement here
//! means the engines' sweeps, tie handling, and interpolation match the
//! definitions rather than merely themselves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use spoofeval::detection::{
    compute_act_dcf, compute_cllr, compute_eer, compute_min_dcf, ErrorRateCurve,
};
use spoofeval::sasv::{
    compute_asv_operating_point, compute_concurrent_teer, compute_min_a_dcf, compute_min_tdcf_at,
    TdcfNormalization,
};
use spoofeval::{CmCostModel, SasvCostModel, SasvPartition, ScoreChannel, TandemPartition};
use spoofeval_oracle::{brute, synth};

const TOLERANCE: f64 = 1e-12;

/// Rounds roughly every tenth score to one decimal, manufacturing exact
/// ties within and across classes.
fn inject_ties(values: &mut [f64], rng: &mut ChaCha12Rng) {
    for v in values.iter_mut() {
        if rng.gen::<f64>() < 0.1 {
            *v = (*v * 10.0).round() / 10.0;
        }
    }
}

fn close(a: f64, b: f64, what: &str, seed: u64) {
    // Exact equality first: thresholds may be infinite when a sweep's
    // minimum sits at accept-everything, and inf - inf is NaN.
    assert!(
        a == b || (a - b).abs() <= TOLERANCE,
        "{what} disagrees at seed {seed}: engine {a} vs oracle {b}"
    );
}

#[test]
fn track1_engine_matches_brute_force_on_seeded_sets() {
    let model = CmCostModel::challenge_default();
    for seed in 0..80u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xA5A5_5A5A);
        let n_bona = rng.gen_range(3..=400);
        let n_spoof = rng.gen_range(3..=400);
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
        let (min_dcf, min_dcf_tau) = compute_min_dcf(&curve, &model);
        let act_dcf = compute_act_dcf(&bona, &spoof, &model).unwrap();
        let (eer, eer_tau) = compute_eer(&curve);
        let cllr = compute_cllr(&bona, &spoof).unwrap();

        let oracle = brute::track1_metrics(&bona, &spoof, 1.0, 10.0, 0.05);
        close(min_dcf, oracle.min_dcf, "min DCF", seed);
        close(
            min_dcf_tau,
            oracle.min_dcf_threshold,
            "min DCF threshold",
            seed,
        );
        close(act_dcf, oracle.act_dcf, "act DCF", seed);
        close(eer, oracle.eer, "EER", seed);
        close(eer_tau, oracle.eer_threshold, "EER threshold", seed);
        close(cllr, oracle.cllr, "Cllr", seed);
    }
}

/// Per-class channel slices of a triplet submission, in generation order.
struct TripletScores {
    sasv: (Vec<f64>, Vec<f64>, Vec<f64>),
    cm: (Vec<f64>, Vec<f64>, Vec<f64>),
    asv: (Vec<f64>, Vec<f64>, Vec<f64>),
}

fn triplet_slices(
    seed: u64,
    counts: (usize, usize, usize),
    means: [[f64; 3]; 3],
    stddev: f64,
    rng: &mut ChaCha12Rng,
) -> TripletScores {
    let data = synth::generate(&synth::triplet_track2(seed, counts, means, stddev)).unwrap();
    let mut split = |channel: ScoreChannel| {
        let values = data.scores.channel(channel).unwrap();
        let mut target = values[..counts.0].to_vec();
        let mut nontarget = values[counts.0..counts.0 + counts.1].to_vec();
        let mut spoof = values[counts.0 + counts.1..].to_vec();
        inject_ties(&mut target, rng);
        inject_ties(&mut nontarget, rng);
        inject_ties(&mut spoof, rng);
        (target, nontarget, spoof)
    };
    TripletScores {
        sasv: split(ScoreChannel::Sasv),
        cm: split(ScoreChannel::Cm),
        asv: split(ScoreChannel::Asv),
    }
}

#[test]
fn sasv_metrics_match_brute_force_on_seeded_sets() {
    let model = SasvCostModel::challenge_default();
    let mut degenerate_tdcf = 0;
    for seed in 0..60u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5A5A_A5A5);
        let counts = (
            rng.gen_range(3..=200),
            rng.gen_range(3..=200),
            rng.gen_range(3..=200),
        );
        let spread = rng.gen_range(0.8..1.6);
        let means = [[2.0, 1.5, 2.0], [-1.5, 1.0, -1.8], [0.5, -1.5, 0.3]];
        let scores = triplet_slices(seed, counts, means, spread, &mut rng);

        let partition = SasvPartition {
            target: scores.sasv.0.clone(),
            nontarget: scores.sasv.1.clone(),
            spoof: scores.sasv.2.clone(),
        };
        let (engine_min, engine_tau) = compute_min_a_dcf(&partition, &model).unwrap();
        let (oracle_min, oracle_tau) = brute::min_a_dcf(
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
        close(engine_tau, oracle_tau, "min a-DCF threshold", seed);

        let op = compute_asv_operating_point(&scores.asv.0, &scores.asv.1, &scores.asv.2).unwrap();
        let (pm, pf, pms, tau) =
            brute::asv_operating_point(&scores.asv.0, &scores.asv.1, &scores.asv.2);
        close(op.p_miss, pm, "ASV p_miss", seed);
        close(op.p_fa, pf, "ASV p_fa", seed);
        close(op.p_miss_spoof, pms, "ASV p_miss_spoof", seed);
        close(op.threshold, tau, "ASV threshold", seed);

        // Bona fide countermeasure trials pool target and nontarget.
        let mut cm_bona = scores.cm.0.clone();
        cm_bona.extend_from_slice(&scores.cm.1);
        for norm in [TdcfNormalization::Revised, TdcfNormalization::Original] {
            let engine = compute_min_tdcf_at(&cm_bona, &scores.cm.2, &op, &model, norm);
            let oracle = brute::min_tdcf(
                &cm_bona,
                &scores.cm.2,
                pm,
                pf,
                pms,
                1.0,
                10.0,
                10.0,
                0.9405,
                0.0095,
                0.05,
                norm,
            );
            match (engine, oracle) {
                (Ok((ev, et)), Some((ov, ot))) => {
                    close(ev, ov, "min t-DCF", seed);
                    close(et, ot, "min t-DCF threshold", seed);
                }
                (Err(_), None) => degenerate_tdcf += 1,
                (engine, oracle) => panic!(
                    "t-DCF degeneracy disagreement at seed {seed}: \
                     engine {engine:?} vs oracle {oracle:?}"
                ),
            }
        }
    }
    // The score means overlap enough that degeneracy should be rare.
    assert!(
        degenerate_tdcf <= 6,
        "{degenerate_tdcf} degenerate t-DCF sets"
    );
}

#[test]
fn concurrent_teer_matches_the_dense_grid_oracle() {
    let mut crossings = 0;
    for seed in 0..40u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x0F0F_F0F0);
        let counts = (
            rng.gen_range(30..=100),
            rng.gen_range(30..=100),
            rng.gen_range(30..=100),
        );
        let spread = rng.gen_range(0.9..1.5);
        // ASV separates speakers; the countermeasure separates humans from
        // spoofs; both overlap enough to keep the equal-error path interior.
        let means = [[1.5, 1.2, 1.8], [-1.0, 1.0, -1.6], [0.8, -1.2, 0.9]];
        let scores = triplet_slices(seed, counts, means, spread, &mut rng);
        let tandem = TandemPartition {
            target: scores
                .asv
                .0
                .iter()
                .copied()
                .zip(scores.cm.0.iter().copied())
                .collect(),
            nontarget: scores
                .asv
                .1
                .iter()
                .copied()
                .zip(scores.cm.1.iter().copied())
                .collect(),
            spoof: scores
                .asv
                .2
                .iter()
                .copied()
                .zip(scores.cm.2.iter().copied())
                .collect(),
        };

        let grid = brute::grid_teer(&tandem.target, &tandem.nontarget, &tandem.spoof, 2000);
        match compute_concurrent_teer(&tandem) {
            Ok(pair) => {
                let oracle = grid.common.unwrap_or_else(|| {
                    panic!("solver found a crossing at seed {seed}, the grid did not")
                });
                close(pair.common_error, oracle, "tandem EER", seed);
                crossings += 1;
            }
            Err(_) => assert!(
                grid.common.is_none(),
                "grid found a crossing at seed {seed}, the solver did not"
            ),
        }
    }
    assert!(crossings >= 30, "only {crossings} of 40 sets crossed");
}

#[test]
fn generated_scores_reproduce_the_designed_error_rate() {
    // Unit-variance classes at +/-2 overlap with EER = Phi(-2). At 200k
    // trials per class the sampling error of a rate is about 3.3e-4, so a
    // 2e-3 window is roughly six standard errors wide.
    let data = synth::generate(&synth::two_class_track1(
        11, 200_000, 200_000, 2.0, -2.0, 1.0,
    ))
    .unwrap();
    let cm = data.scores.channel(ScoreChannel::Cm).unwrap();
    let curve = ErrorRateCurve::from_scores(&cm[..200_000], &cm[200_000..]).unwrap();
    let (eer, _) = compute_eer(&curve);

    use statrs::distribution::ContinuousCDF;
    let phi_minus_two = statrs::distribution::Normal::new(0.0, 1.0)
        .unwrap()
        .cdf(-2.0);
    assert!(
        (eer - phi_minus_two).abs() < 2e-3,
        "EER {eer} vs designed {phi_minus_two}"
    );
}

#[test]
fn generated_labels_follow_their_probability_tables() {
    let mut spec = synth::two_class_track1(13, 30_000, 30_000, 1.0, -1.0, 1.0);
    spec.attacks = Some(synth::uniform_labels((17..=20).map(|i| format!("A{i:02}"))));
    spec.codecs = Some(synth::uniform_labels((0..=3).map(|i| format!("C{i:02}"))));
    let data = synth::generate(&spec).unwrap();

    // Binomial count at p = 1/4, n = 30k has a standard deviation of about
    // 75; allow six of them.
    let mut attack_counts = std::collections::BTreeMap::new();
    let mut codec_counts = std::collections::BTreeMap::new();
    for record in &data.records {
        if record.class == spoofeval::TrialClass::Spoof {
            *attack_counts
                .entry(record.attack_label.clone())
                .or_insert(0usize) += 1;
        }
        *codec_counts
            .entry(record.codec_label.clone())
            .or_insert(0usize) += 1;
    }
    assert_eq!(attack_counts.len(), 4);
    assert_eq!(codec_counts.len(), 4);
    for (label, count) in attack_counts {
        assert!(
            (count as f64 - 7_500.0).abs() < 450.0,
            "attack {label} drawn {count} times"
        );
    }
    for (label, count) in codec_counts {
        assert!(
            (count as f64 - 15_000.0).abs() < 650.0,
            "codec {label} drawn {count} times"
        );
    }
}
