//! Trial records, score sets, and the partitions the metrics consume.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{DomainError, JoinError, ModelError};

/// The two evaluation tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Track {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl std::fmt::Display for Track {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Track::One => "1",
            Track::Two => "2",
        })
    }
}

/// Ground-truth class of a trial.
///
/// Track 2 distinguishes all three classes. Track 1 only separates bona
/// fide from spoofed speech; its key files carry no target/nontarget
/// distinction and parse bona fide rows as [`TrialClass::BonaFideTarget`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrialClass {
    BonaFideTarget,
    BonaFideNonTarget,
    Spoof,
}

impl TrialClass {
    pub fn is_bona_fide(self) -> bool {
        !matches!(self, TrialClass::Spoof)
    }

    /// Track 2 class label as written in key files.
    pub fn sasv_label(self) -> &'static str {
        match self {
            TrialClass::BonaFideTarget => "target",
            TrialClass::BonaFideNonTarget => "nontarget",
            TrialClass::Spoof => "spoof",
        }
    }
}

/// Attack label carried by every bona fide trial.
pub const BONA_FIDE_LABEL: &str = "bonafide";

/// One trial joined with its ground truth and condition labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: String,
    pub speaker_id: String,
    pub class: TrialClass,
    /// `"bonafide"` for bona fide trials, otherwise an attack id such as
    /// `"A17"`.
    pub attack_label: String,
    /// Codec/compression condition id such as `"C00"`.
    pub codec_label: String,
}

impl TrialRecord {
    /// Builds a record, enforcing that `attack_label == "bonafide"` holds
    /// exactly for non-spoof trials.
    pub fn new(
        trial_id: impl Into<String>,
        speaker_id: impl Into<String>,
        class: TrialClass,
        attack_label: impl Into<String>,
        codec_label: impl Into<String>,
    ) -> Result<Self, DomainError> {
        let attack_label = attack_label.into();
        let is_bona_label = attack_label == BONA_FIDE_LABEL;
        if class.is_bona_fide() != is_bona_label {
            return Err(DomainError::new(
                "attack_label",
                format!(
                    "attack label {:?} is inconsistent with class {:?}",
                    attack_label, class
                ),
            ));
        }
        Ok(TrialRecord {
            trial_id: trial_id.into(),
            speaker_id: speaker_id.into(),
            class,
            attack_label,
            codec_label: codec_label.into(),
        })
    }
}

/// Known attack and codec label tables.
///
/// Defaults mirror the challenge inventory: attacks `A01`..`A32` plus the
/// `"bonafide"` marker, codecs `C00`..`C11`, with `C04`..`C07` restricted
/// to Track 1 key files. Custom deployments may substitute their own
/// tables; validation never hard-codes the defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    attacks: BTreeSet<String>,
    codecs: BTreeSet<String>,
    track1_only_codecs: BTreeSet<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        let attacks = (1..=32).map(|i| format!("A{i:02}")).collect();
        let codecs = (0..=11).map(|i| format!("C{i:02}")).collect();
        let track1_only_codecs = (4..=7).map(|i| format!("C{i:02}")).collect();
        Vocabulary {
            attacks,
            codecs,
            track1_only_codecs,
        }
    }
}

impl Vocabulary {
    /// Builds a custom vocabulary. `track1_only_codecs` must be a subset of
    /// `codecs`; the attack table implicitly admits `"bonafide"`.
    pub fn new(
        attacks: impl IntoIterator<Item = String>,
        codecs: impl IntoIterator<Item = String>,
        track1_only_codecs: impl IntoIterator<Item = String>,
    ) -> Result<Self, DomainError> {
        let attacks: BTreeSet<String> = attacks.into_iter().collect();
        let codecs: BTreeSet<String> = codecs.into_iter().collect();
        let track1_only_codecs: BTreeSet<String> = track1_only_codecs.into_iter().collect();
        if let Some(c) = track1_only_codecs.difference(&codecs).next() {
            return Err(DomainError::new(
                "track1_only_codecs",
                format!("codec {c:?} is not in the codec table"),
            ));
        }
        Ok(Vocabulary {
            attacks,
            codecs,
            track1_only_codecs,
        })
    }

    pub fn is_known_attack(&self, label: &str) -> bool {
        label == BONA_FIDE_LABEL || self.attacks.contains(label)
    }

    pub fn is_known_codec(&self, label: &str) -> bool {
        self.codecs.contains(label)
    }

    /// Whether `label` may appear in a key file for `track`.
    pub fn codec_allowed(&self, label: &str, track: Track) -> bool {
        self.is_known_codec(label)
            && (track == Track::One || !self.track1_only_codecs.contains(label))
    }
}

/// Identifies one of the score columns a submission may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreChannel {
    /// Countermeasure (bona fide vs. spoof) detection score.
    Cm,
    /// Speaker verification score.
    Asv,
    /// Fused spoofing-robust speaker verification score.
    Sasv,
}

impl ScoreChannel {
    pub fn name(self) -> &'static str {
        match self {
            ScoreChannel::Cm => "cm",
            ScoreChannel::Asv => "asv",
            ScoreChannel::Sasv => "sasv",
        }
    }
}

/// An ordered set of scored trials.
///
/// Single-score submissions fill exactly one channel; triplet submissions
/// fill `sasv`, `cm`, and `asv` together. Construction rejects NaN and
/// infinite scores outright rather than sanitizing them, and requires all
/// present channels to align with `trial_ids` element for element.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    trial_ids: Vec<String>,
    cm: Option<Vec<f64>>,
    asv: Option<Vec<f64>>,
    sasv: Option<Vec<f64>>,
}

fn check_channel(name: &'static str, n: usize, v: &Option<Vec<f64>>) -> Result<(), DomainError> {
    if let Some(scores) = v {
        if scores.len() != n {
            return Err(DomainError::new(
                name,
                format!("channel has {} scores for {} trial ids", scores.len(), n),
            ));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(DomainError::new(
                name,
                format!("non-finite score {} at index {i}", scores[i]),
            ));
        }
    }
    Ok(())
}

impl ScoreSet {
    pub fn new(
        trial_ids: Vec<String>,
        cm: Option<Vec<f64>>,
        asv: Option<Vec<f64>>,
        sasv: Option<Vec<f64>>,
    ) -> Result<Self, DomainError> {
        if cm.is_none() && asv.is_none() && sasv.is_none() {
            return Err(DomainError::new(
                "channels",
                "at least one score channel must be present",
            ));
        }
        let n = trial_ids.len();
        check_channel("cm", n, &cm)?;
        check_channel("asv", n, &asv)?;
        check_channel("sasv", n, &sasv)?;
        Ok(ScoreSet {
            trial_ids,
            cm,
            asv,
            sasv,
        })
    }

    /// A single-channel score set.
    pub fn single(
        trial_ids: Vec<String>,
        channel: ScoreChannel,
        scores: Vec<f64>,
    ) -> Result<Self, DomainError> {
        match channel {
            ScoreChannel::Cm => ScoreSet::new(trial_ids, Some(scores), None, None),
            ScoreChannel::Asv => ScoreSet::new(trial_ids, None, Some(scores), None),
            ScoreChannel::Sasv => ScoreSet::new(trial_ids, None, None, Some(scores)),
        }
    }

    /// A Track 2 triplet score set (`sasv`, `cm`, `asv`).
    pub fn triplet(
        trial_ids: Vec<String>,
        sasv: Vec<f64>,
        cm: Vec<f64>,
        asv: Vec<f64>,
    ) -> Result<Self, DomainError> {
        ScoreSet::new(trial_ids, Some(cm), Some(asv), Some(sasv))
    }

    pub fn len(&self) -> usize {
        self.trial_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trial_ids.is_empty()
    }

    pub fn trial_ids(&self) -> &[String] {
        &self.trial_ids
    }

    pub fn channel(&self, channel: ScoreChannel) -> Option<&[f64]> {
        match channel {
            ScoreChannel::Cm => self.cm.as_deref(),
            ScoreChannel::Asv => self.asv.as_deref(),
            ScoreChannel::Sasv => self.sasv.as_deref(),
        }
    }

    pub fn has_channel(&self, channel: ScoreChannel) -> bool {
        self.channel(channel).is_some()
    }

    /// `true` when `sasv`, `cm`, and `asv` are all present.
    pub fn is_triplet(&self) -> bool {
        self.cm.is_some() && self.asv.is_some() && self.sasv.is_some()
    }

    /// Replaces the ASV channel with externally supplied scores, aligned by
    /// trial id. Every trial in `self` must be scored in `asv`.
    pub fn with_asv_override(&self, asv: &ScoreSet) -> Result<ScoreSet, ModelError> {
        let scores = asv
            .channel(ScoreChannel::Asv)
            .ok_or_else(|| DomainError::new("asv", "override set carries no asv channel"))?;
        let index = index_by_trial(asv.trial_ids())?;
        let mut out = Vec::with_capacity(self.len());
        let mut missing = Vec::new();
        let mut missing_total = 0usize;
        for id in &self.trial_ids {
            match index.get(id.as_str()) {
                Some(&i) => out.push(scores[i]),
                None => {
                    missing_total += 1;
                    if missing.len() < JoinError::LISTED {
                        missing.push(id.clone());
                    }
                }
            }
        }
        if missing_total > 0 {
            return Err(JoinError {
                missing,
                missing_total,
                duplicated: Vec::new(),
                duplicated_total: 0,
            }
            .into());
        }
        Ok(ScoreSet {
            trial_ids: self.trial_ids.clone(),
            cm: self.cm.clone(),
            asv: Some(out),
            sasv: self.sasv.clone(),
        })
    }
}

/// Bona fide / spoof score partition consumed by the Track 1 metrics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScorePartition {
    pub bona_fide: Vec<f64>,
    pub spoof: Vec<f64>,
}

/// Target / nontarget / spoof score partition consumed by the Track 2
/// metrics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SasvPartition {
    pub target: Vec<f64>,
    pub nontarget: Vec<f64>,
    pub spoof: Vec<f64>,
}

/// Per-trial `(asv, cm)` score pairs split by class, for tandem metrics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TandemPartition {
    pub target: Vec<(f64, f64)>,
    pub nontarget: Vec<(f64, f64)>,
    pub spoof: Vec<(f64, f64)>,
}

fn index_by_trial(ids: &[String]) -> Result<HashMap<&str, usize>, JoinError> {
    let mut index = HashMap::with_capacity(ids.len());
    let mut duplicated = Vec::new();
    let mut duplicated_total = 0usize;
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            duplicated_total += 1;
            if duplicated.len() < JoinError::LISTED {
                duplicated.push(id.clone());
            }
        }
    }
    if duplicated_total > 0 {
        return Err(JoinError {
            missing: Vec::new(),
            missing_total: 0,
            duplicated,
            duplicated_total,
        });
    }
    Ok(index)
}

/// Looks up each scored trial's record, in score order.
///
/// Records not referenced by `scores` are ignored; missing or duplicated
/// record ids produce a [`JoinError`] listing the first offenders.
pub(crate) fn join<'r>(
    scores: &ScoreSet,
    records: &'r [TrialRecord],
) -> Result<Vec<&'r TrialRecord>, JoinError> {
    let ids: Vec<String> = records.iter().map(|r| r.trial_id.clone()).collect();
    let index = index_by_trial(&ids)?;
    let mut out = Vec::with_capacity(scores.len());
    let mut missing = Vec::new();
    let mut missing_total = 0usize;
    for id in scores.trial_ids() {
        match index.get(id.as_str()) {
            Some(&i) => out.push(&records[i]),
            None => {
                missing_total += 1;
                if missing.len() < JoinError::LISTED {
                    missing.push(id.clone());
                }
            }
        }
    }
    if missing_total > 0 {
        return Err(JoinError {
            missing,
            missing_total,
            duplicated: Vec::new(),
            duplicated_total: 0,
        });
    }
    Ok(out)
}

fn require_channel(scores: &ScoreSet, channel: ScoreChannel) -> Result<&[f64], DomainError> {
    scores.channel(channel).ok_or_else(|| {
        DomainError::new(
            "channel",
            format!("score set carries no {} channel", channel.name()),
        )
    })
}

/// Splits one score channel into bona fide and spoof buckets.
///
/// Every score lands in exactly one bucket, in score-file order.
pub fn partition_binary(
    scores: &ScoreSet,
    records: &[TrialRecord],
    channel: ScoreChannel,
) -> Result<ScorePartition, ModelError> {
    let values = require_channel(scores, channel)?;
    let joined = join(scores, records)?;
    let mut p = ScorePartition::default();
    for (v, r) in values.iter().zip(&joined) {
        if r.class.is_bona_fide() {
            p.bona_fide.push(*v);
        } else {
            p.spoof.push(*v);
        }
    }
    Ok(p)
}

/// Splits one score channel into target, nontarget, and spoof buckets.
pub fn partition_ternary(
    scores: &ScoreSet,
    records: &[TrialRecord],
    channel: ScoreChannel,
) -> Result<SasvPartition, ModelError> {
    let values = require_channel(scores, channel)?;
    let joined = join(scores, records)?;
    let mut p = SasvPartition::default();
    for (v, r) in values.iter().zip(&joined) {
        match r.class {
            TrialClass::BonaFideTarget => p.target.push(*v),
            TrialClass::BonaFideNonTarget => p.nontarget.push(*v),
            TrialClass::Spoof => p.spoof.push(*v),
        }
    }
    Ok(p)
}

/// Pairs each trial's `(asv, cm)` scores by class for the tandem metrics.
pub fn partition_tandem(
    scores: &ScoreSet,
    records: &[TrialRecord],
) -> Result<TandemPartition, ModelError> {
    let asv = require_channel(scores, ScoreChannel::Asv)?;
    let cm = require_channel(scores, ScoreChannel::Cm)?;
    let joined = join(scores, records)?;
    let mut p = TandemPartition::default();
    for ((a, c), r) in asv.iter().zip(cm).zip(&joined) {
        let pair = (*a, *c);
        match r.class {
            TrialClass::BonaFideTarget => p.target.push(pair),
            TrialClass::BonaFideNonTarget => p.nontarget.push(pair),
            TrialClass::Spoof => p.spoof.push(pair),
        }
    }
    Ok(p)
}
