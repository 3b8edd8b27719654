//! Full evaluation reports: pooled metrics plus per-condition breakdowns.
//!
//! An [`EvaluationReport`] is a plain data structure built by
//! [`evaluate_track1`] or [`evaluate_track2`] and rendered to disk by
//! [`crate::io::report_fmt`]. Construction is deterministic: conditions are
//! keyed through ordered maps and every parallel computation is collected in
//! task order, so the same inputs always produce byte-identical renderings
//! regardless of thread count.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CmCostModel, SasvCostModel};
use crate::detection::{
    compute_act_dcf, compute_cllr, compute_eer_with, compute_min_dcf, EerMethod, ErrorRateCurve,
};
use crate::error::{DomainError, EvalError, MetricError};
use crate::model::{
    self, SasvPartition, ScoreChannel, ScoreSet, TandemPartition, Track, TrialRecord,
};
use crate::sasv::{
    compute_asv_operating_point, compute_concurrent_teer, compute_min_a_dcf, compute_min_tdcf_at,
    AsvOperatingPoint, TandemThresholdPair, TdcfNormalization,
};

/// Schema identifier stamped into every report.
pub const REPORT_SCHEMA: &str = "spoofeval-report/1";

/// Serialization of floats that may legitimately be infinite (optimal
/// thresholds at the sweep sentinels). JSON has no literal for infinities,
/// so they are written as the strings `"inf"` / `"-inf"` and read back from
/// either spelling or a plain number.
mod extended_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Word(String),
    }

    fn from_repr<E: de::Error>(repr: Repr) -> Result<f64, E> {
        match repr {
            Repr::Number(v) => Ok(v),
            Repr::Word(w) => match w.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("unrecognized float word {other:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else if *value > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(deserializer)?)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            value: &Option<f64>,
            serializer: S,
        ) -> Result<S::Ok, S::Error> {
            match value {
                None => serializer.serialize_none(),
                Some(v) if v.is_finite() => serializer.serialize_some(v),
                Some(v) if *v > 0.0 => serializer.serialize_some("inf"),
                Some(_) => serializer.serialize_some("-inf"),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            deserializer: D,
        ) -> Result<Option<f64>, D::Error> {
            Option::<Repr>::deserialize(deserializer)?
                .map(from_repr)
                .transpose()
        }
    }
}

/// Which condition tables to compute alongside the pooled metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionBreakdown {
    None,
    Attack,
    Codec,
    Both,
}

impl ConditionBreakdown {
    fn includes_attack(self) -> bool {
        matches!(self, ConditionBreakdown::Attack | ConditionBreakdown::Both)
    }

    fn includes_codec(self) -> bool {
        matches!(self, ConditionBreakdown::Codec | ConditionBreakdown::Both)
    }
}

/// Settings for a Track 1 evaluation.
#[derive(Debug, Clone)]
pub struct Track1Options {
    pub cost: CmCostModel,
    pub eer_method: EerMethod,
    pub breakdown: ConditionBreakdown,
    /// Also tabulate every observed attack x codec pair.
    pub cross_conditions: bool,
}

impl Default for Track1Options {
    fn default() -> Self {
        Track1Options {
            cost: CmCostModel::challenge_default(),
            eer_method: EerMethod::Step,
            breakdown: ConditionBreakdown::Both,
            cross_conditions: false,
        }
    }
}

/// Settings for a Track 2 evaluation.
#[derive(Debug, Clone)]
pub struct Track2Options {
    pub cost: SasvCostModel,
    pub tdcf_norm: TdcfNormalization,
    pub breakdown: ConditionBreakdown,
    /// Also tabulate every observed attack x codec pair.
    pub cross_conditions: bool,
}

impl Default for Track2Options {
    fn default() -> Self {
        Track2Options {
            cost: SasvCostModel::challenge_default(),
            tdcf_norm: TdcfNormalization::Revised,
            breakdown: ConditionBreakdown::Both,
            cross_conditions: false,
        }
    }
}

/// Track 1 metric block for one condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Track1Metrics {
    pub min_dcf: f64,
    #[serde(with = "extended_float")]
    pub min_dcf_threshold: f64,
    pub act_dcf: f64,
    pub cllr: f64,
    /// Equal error rate as a fraction in `[0, 1]`.
    pub eer: f64,
    pub eer_threshold: f64,
}

/// Track 2 metric block for one condition.
///
/// The tandem fields are `None` when the submission carries no `cm`/`asv`
/// channels, or when the condition admits no value (a chance-level ASV
/// operating point, a path with no equalizing crossing); the condition's
/// notes say which.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Track2Metrics {
    pub min_a_dcf: f64,
    #[serde(with = "extended_float")]
    pub min_a_dcf_threshold: f64,
    pub min_tdcf: Option<f64>,
    #[serde(with = "extended_float::option")]
    pub min_tdcf_threshold: Option<f64>,
    pub teer: Option<TandemThresholdPair>,
    pub asv_operating_point: Option<AsvOperatingPoint>,
}

/// Metrics of one condition, or the reason there are none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ConditionMetrics {
    Track1(Track1Metrics),
    Track2(Track2Metrics),
    /// Too few trials in at least one class; see the condition's notes.
    Insufficient,
}

/// One row of the report: a trial subset with its counts and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Trial counts per class label.
    pub counts: BTreeMap<String, usize>,
    /// Human-readable caveats (skipped metrics, degenerate inputs).
    pub notes: Vec<String>,
    pub metrics: ConditionMetrics,
}

/// Name and SHA-256 digest of one input file, for provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

/// A complete evaluation: pooled metrics plus requested breakdowns.
///
/// Breakdown maps are `None` when not requested; an empty map means the
/// breakdown was requested but the data exposes no such conditions. Cross
/// conditions are keyed `"<attack>|<codec>"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema: String,
    pub track: Track,
    pub toolkit_version: String,
    /// EER reading used by every Track 1 condition; `None` on Track 2.
    pub eer_method: Option<EerMethod>,
    /// t-DCF normalization used by every Track 2 condition; `None` on
    /// Track 1.
    pub tdcf_norm: Option<TdcfNormalization>,
    /// Digests of the evaluated files, filled in by the caller.
    pub inputs: Vec<InputDigest>,
    pub pooled: ConditionReport,
    pub per_attack: Option<BTreeMap<String, ConditionReport>>,
    pub per_codec: Option<BTreeMap<String, ConditionReport>>,
    pub per_attack_codec: Option<BTreeMap<String, ConditionReport>>,
}

/// Minimum trials per class for a condition to be scored.
pub const MIN_CLASS_TRIALS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bucket {
    Pooled,
    Attack,
    Codec,
    AttackCodec,
}

struct SubsetTask {
    bucket: Bucket,
    key: String,
    rows: Vec<usize>,
}

/// Enumerates the pooled subset plus every requested condition subset.
///
/// Attack subsets pair each attack's spoofed trials with every bona fide
/// trial (the attack label only exists on spoofs). Codec subsets restrict
/// all classes to the codec. Cross subsets restrict bona fide trials to the
/// codec and spoofed trials to the attack and codec.
fn subset_tasks(
    joined: &[&TrialRecord],
    breakdown: ConditionBreakdown,
    cross_conditions: bool,
) -> Vec<SubsetTask> {
    let mut tasks = vec![SubsetTask {
        bucket: Bucket::Pooled,
        key: "pooled".to_owned(),
        rows: (0..joined.len()).collect(),
    }];

    if breakdown.includes_attack() || cross_conditions {
        let attacks: BTreeSet<&str> = joined
            .iter()
            .filter(|r| !r.class.is_bona_fide())
            .map(|r| r.attack_label.as_str())
            .collect();
        if breakdown.includes_attack() {
            for attack in &attacks {
                let rows = (0..joined.len())
                    .filter(|&i| {
                        let r = joined[i];
                        r.class.is_bona_fide() || r.attack_label == *attack
                    })
                    .collect();
                tasks.push(SubsetTask {
                    bucket: Bucket::Attack,
                    key: (*attack).to_owned(),
                    rows,
                });
            }
        }
        if cross_conditions {
            let pairs: BTreeSet<(&str, &str)> = joined
                .iter()
                .filter(|r| !r.class.is_bona_fide())
                .map(|r| (r.attack_label.as_str(), r.codec_label.as_str()))
                .collect();
            for (attack, codec) in pairs {
                let rows = (0..joined.len())
                    .filter(|&i| {
                        let r = joined[i];
                        r.codec_label == codec
                            && (r.class.is_bona_fide() || r.attack_label == attack)
                    })
                    .collect();
                tasks.push(SubsetTask {
                    bucket: Bucket::AttackCodec,
                    key: format!("{attack}|{codec}"),
                    rows,
                });
            }
        }
    }

    if breakdown.includes_codec() {
        let codecs: BTreeSet<&str> = joined.iter().map(|r| r.codec_label.as_str()).collect();
        for codec in codecs {
            let rows = (0..joined.len())
                .filter(|&i| joined[i].codec_label == codec)
                .collect();
            tasks.push(SubsetTask {
                bucket: Bucket::Codec,
                key: codec.to_owned(),
                rows,
            });
        }
    }

    tasks
}

fn insufficient_notes(counts: &BTreeMap<String, usize>) -> Vec<String> {
    counts
        .iter()
        .filter(|(_, &n)| n < MIN_CLASS_TRIALS)
        .map(|(label, &n)| {
            format!("insufficient {label} trials: {n} (at least {MIN_CLASS_TRIALS} required)")
        })
        .collect()
}

/// Keyed condition table, present only when its breakdown was requested.
type ConditionTable = Option<BTreeMap<String, ConditionReport>>;

fn assemble(
    tasks: Vec<SubsetTask>,
    mut reports: Vec<ConditionReport>,
    breakdown: ConditionBreakdown,
    cross_conditions: bool,
) -> (
    ConditionReport,
    ConditionTable,
    ConditionTable,
    ConditionTable,
) {
    let mut pooled = None;
    let mut per_attack = breakdown.includes_attack().then(BTreeMap::new);
    let mut per_codec = breakdown.includes_codec().then(BTreeMap::new);
    let mut per_attack_codec = cross_conditions.then(BTreeMap::new);

    for (task, report) in tasks.into_iter().zip(reports.drain(..)) {
        match task.bucket {
            Bucket::Pooled => pooled = Some(report),
            Bucket::Attack => {
                per_attack
                    .as_mut()
                    .expect("attack tasks only exist when requested")
                    .insert(task.key, report);
            }
            Bucket::Codec => {
                per_codec
                    .as_mut()
                    .expect("codec tasks only exist when requested")
                    .insert(task.key, report);
            }
            Bucket::AttackCodec => {
                per_attack_codec
                    .as_mut()
                    .expect("cross tasks only exist when requested")
                    .insert(task.key, report);
            }
        }
    }

    (
        pooled.expect("the pooled task is always present"),
        per_attack,
        per_codec,
        per_attack_codec,
    )
}

/// Evaluates a Track 1 (spoofing detection) submission.
///
/// `scores` must carry a `cm` channel and every scored trial must appear in
/// `records` exactly once. Coverage problems (unscored key trials, scores
/// for unknown ids) are the validator's concern; this function evaluates
/// whatever joins cleanly and fails only on genuinely ambiguous input.
pub fn evaluate_track1(
    scores: &ScoreSet,
    records: &[TrialRecord],
    options: &Track1Options,
) -> Result<EvaluationReport, EvalError> {
    let cm = scores.channel(ScoreChannel::Cm).ok_or_else(|| {
        DomainError::new("scores", "track 1 evaluation requires a cm score channel")
    })?;
    let joined = model::join(scores, records)?;
    let tasks = subset_tasks(&joined, options.breakdown, options.cross_conditions);

    let reports: Vec<ConditionReport> = tasks
        .par_iter()
        .map(|task| track1_condition(&task.rows, cm, &joined, options))
        .collect::<Result<_, EvalError>>()?;

    let (pooled, per_attack, per_codec, per_attack_codec) =
        assemble(tasks, reports, options.breakdown, options.cross_conditions);

    Ok(EvaluationReport {
        schema: REPORT_SCHEMA.to_owned(),
        track: Track::One,
        toolkit_version: env!("CARGO_PKG_VERSION").to_owned(),
        eer_method: Some(options.eer_method),
        tdcf_norm: None,
        inputs: Vec::new(),
        pooled,
        per_attack,
        per_codec,
        per_attack_codec,
    })
}

fn track1_condition(
    rows: &[usize],
    cm: &[f64],
    joined: &[&TrialRecord],
    options: &Track1Options,
) -> Result<ConditionReport, EvalError> {
    let mut bona_fide = Vec::new();
    let mut spoof = Vec::new();
    for &i in rows {
        if joined[i].class.is_bona_fide() {
            bona_fide.push(cm[i]);
        } else {
            spoof.push(cm[i]);
        }
    }
    let counts: BTreeMap<String, usize> = [
        ("bonafide".to_owned(), bona_fide.len()),
        ("spoof".to_owned(), spoof.len()),
    ]
    .into();

    let notes = insufficient_notes(&counts);
    if !notes.is_empty() {
        return Ok(ConditionReport {
            counts,
            notes,
            metrics: ConditionMetrics::Insufficient,
        });
    }

    let curve = ErrorRateCurve::from_scores(&bona_fide, &spoof)?;
    let (min_dcf, min_dcf_threshold) = compute_min_dcf(&curve, &options.cost);
    let act_dcf = compute_act_dcf(&bona_fide, &spoof, &options.cost)?;
    let (eer, eer_threshold) = compute_eer_with(&curve, options.eer_method);
    let cllr = compute_cllr(&bona_fide, &spoof)?;

    Ok(ConditionReport {
        counts,
        notes,
        metrics: ConditionMetrics::Track1(Track1Metrics {
            min_dcf,
            min_dcf_threshold,
            act_dcf,
            cllr,
            eer,
            eer_threshold,
        }),
    })
}

/// Evaluates a Track 2 (spoofing-robust verification) submission.
///
/// `scores` must carry an `sasv` channel. When the `cm` and `asv` channels
/// are present as well, the tandem metrics (t-DCF, concurrent t-EER, ASV
/// operating point) are computed per condition; otherwise they are `None`
/// and each scored condition notes the omission.
pub fn evaluate_track2(
    scores: &ScoreSet,
    records: &[TrialRecord],
    options: &Track2Options,
) -> Result<EvaluationReport, EvalError> {
    let sasv = scores.channel(ScoreChannel::Sasv).ok_or_else(|| {
        DomainError::new(
            "scores",
            "track 2 evaluation requires an sasv score channel",
        )
    })?;
    let tandem = match (
        scores.channel(ScoreChannel::Asv),
        scores.channel(ScoreChannel::Cm),
    ) {
        (Some(asv), Some(cm)) => Some((asv, cm)),
        _ => None,
    };
    let joined = model::join(scores, records)?;
    let tasks = subset_tasks(&joined, options.breakdown, options.cross_conditions);

    let reports: Vec<ConditionReport> = tasks
        .par_iter()
        .map(|task| track2_condition(&task.rows, sasv, tandem, &joined, options))
        .collect::<Result<_, EvalError>>()?;

    let (pooled, per_attack, per_codec, per_attack_codec) =
        assemble(tasks, reports, options.breakdown, options.cross_conditions);

    Ok(EvaluationReport {
        schema: REPORT_SCHEMA.to_owned(),
        track: Track::Two,
        toolkit_version: env!("CARGO_PKG_VERSION").to_owned(),
        eer_method: None,
        tdcf_norm: Some(options.tdcf_norm),
        inputs: Vec::new(),
        pooled,
        per_attack,
        per_codec,
        per_attack_codec,
    })
}

fn track2_condition(
    rows: &[usize],
    sasv: &[f64],
    tandem: Option<(&[f64], &[f64])>,
    joined: &[&TrialRecord],
    options: &Track2Options,
) -> Result<ConditionReport, EvalError> {
    use crate::model::TrialClass;

    let mut partition = SasvPartition::default();
    let mut pairs = TandemPartition::default();
    for &i in rows {
        let (sasv_bucket, pair_bucket) = match joined[i].class {
            TrialClass::BonaFideTarget => (&mut partition.target, &mut pairs.target),
            TrialClass::BonaFideNonTarget => (&mut partition.nontarget, &mut pairs.nontarget),
            TrialClass::Spoof => (&mut partition.spoof, &mut pairs.spoof),
        };
        sasv_bucket.push(sasv[i]);
        if let Some((asv, cm)) = tandem {
            pair_bucket.push((asv[i], cm[i]));
        }
    }
    let counts: BTreeMap<String, usize> = [
        ("target".to_owned(), partition.target.len()),
        ("nontarget".to_owned(), partition.nontarget.len()),
        ("spoof".to_owned(), partition.spoof.len()),
    ]
    .into();

    let mut notes = insufficient_notes(&counts);
    if !notes.is_empty() {
        return Ok(ConditionReport {
            counts,
            notes,
            metrics: ConditionMetrics::Insufficient,
        });
    }

    let (min_a_dcf, min_a_dcf_threshold) = compute_min_a_dcf(&partition, &options.cost)?;

    let mut metrics = Track2Metrics {
        min_a_dcf,
        min_a_dcf_threshold,
        min_tdcf: None,
        min_tdcf_threshold: None,
        teer: None,
        asv_operating_point: None,
    };

    if tandem.is_some() {
        let asv_of = |v: &[(f64, f64)]| v.iter().map(|&(a, _)| a).collect::<Vec<f64>>();
        let cm_of = |v: &[(f64, f64)]| v.iter().map(|&(_, c)| c).collect::<Vec<f64>>();
        let operating_point = compute_asv_operating_point(
            &asv_of(&pairs.target),
            &asv_of(&pairs.nontarget),
            &asv_of(&pairs.spoof),
        )?;
        metrics.asv_operating_point = Some(operating_point);

        let mut cm_bona = cm_of(&pairs.target);
        cm_bona.extend(cm_of(&pairs.nontarget));
        let cm_spoof = cm_of(&pairs.spoof);
        match compute_min_tdcf_at(
            &cm_bona,
            &cm_spoof,
            &operating_point,
            &options.cost,
            options.tdcf_norm,
        ) {
            Ok((value, threshold)) => {
                metrics.min_tdcf = Some(value);
                metrics.min_tdcf_threshold = Some(threshold);
            }
            Err(MetricError::Degenerate { reason }) => {
                notes.push(format!("t-dcf unavailable: {reason}"));
            }
            Err(error) => return Err(error.into()),
        }

        match compute_concurrent_teer(&pairs) {
            Ok(pair) => metrics.teer = Some(pair),
            Err(MetricError::NoCrossing { reason }) => {
                notes.push(format!("t-eer unavailable: {reason}"));
            }
            Err(error) => return Err(error.into()),
        }
    } else {
        notes.push("tandem metrics skipped: cm and asv channels not provided".to_owned());
    }

    Ok(ConditionReport {
        counts,
        notes,
        metrics: ConditionMetrics::Track2(metrics),
    })
}
