//! Deterministic synthetic submissions: Gaussian-mixture scores plus
//! matching trial records.
//!
//! Randomness comes from `ChaCha12` seeded with [`SyntheticSpec::seed`].
//! Each (class, purpose) pair draws from its own counter-mode stream, so
//! adding a channel or reordering classes never perturbs the other draws:
//!
//! * stream `class_index * 8 + 0`: attack label assignment
//! * stream `class_index * 8 + 1`: codec label assignment
//! * stream `class_index * 8 + 2 + channel`: score draws (`cm` 0, `asv` 1,
//!   `sasv` 2)
//!
//! The same spec therefore reproduces byte-identical data on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use spoofeval::model::BONA_FIDE_LABEL;
use spoofeval::{ScoreChannel, ScoreSet, TrialClass, TrialRecord};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    BadSpec(String),
}

/// One Gaussian mixture component.
#[derive(Debug, Clone, Copy)]
pub struct GaussianComponent {
    pub mean: f64,
    pub stddev: f64,
    pub weight: f64,
}

/// Score distribution for one trial class.
#[derive(Debug, Clone)]
pub struct ClassSynthSpec {
    pub class: TrialClass,
    pub count: usize,
    /// Mixtures per score channel; all classes in a spec must list the
    /// same channels in the same order.
    pub channels: Vec<(ScoreChannel, Vec<GaussianComponent>)>,
}

/// Full description of a synthetic submission.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub classes: Vec<ClassSynthSpec>,
    /// Attack labels and probabilities for spoof trials; `None` assigns
    /// `"A01"` everywhere.
    pub attacks: Option<Vec<(String, f64)>>,
    /// Codec labels and probabilities for all trials; `None` assigns
    /// `"C00"` everywhere.
    pub codecs: Option<Vec<(String, f64)>>,
}

/// Generated records plus the aligned score set.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub records: Vec<TrialRecord>,
    pub scores: ScoreSet,
}

fn class_prefix(class: TrialClass) -> char {
    match class {
        TrialClass::BonaFideTarget => 'T',
        TrialClass::BonaFideNonTarget => 'N',
        TrialClass::Spoof => 'S',
    }
}

fn class_stream_base(class: TrialClass) -> u64 {
    match class {
        TrialClass::BonaFideTarget => 0,
        TrialClass::BonaFideNonTarget => 8,
        TrialClass::Spoof => 16,
    }
}

fn channel_stream_offset(channel: ScoreChannel) -> u64 {
    match channel {
        ScoreChannel::Cm => 2,
        ScoreChannel::Asv => 3,
        ScoreChannel::Sasv => 4,
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_mixture(components: &[GaussianComponent]) -> Result<(), SynthError> {
    if components.is_empty() {
        return Err(SynthError::BadSpec("empty mixture".into()));
    }
    let mut sum = 0.0;
    for c in components {
        if !c.mean.is_finite() || !c.stddev.is_finite() || c.stddev < 0.0 {
            return Err(SynthError::BadSpec(format!(
                "bad component (mean {}, stddev {})",
                c.mean, c.stddev
            )));
        }
        if c.weight.is_nan() || c.weight <= 0.0 {
            return Err(SynthError::BadSpec("component weight must be > 0".into()));
        }
        sum += c.weight;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(SynthError::BadSpec(format!(
            "component weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn check_probs(what: &str, table: &[(String, f64)]) -> Result<(), SynthError> {
    if table.is_empty() {
        return Err(SynthError::BadSpec(format!("empty {what} table")));
    }
    let sum: f64 = table.iter().map(|(_, p)| *p).sum();
    if table.iter().any(|(_, p)| p.is_nan() || *p <= 0.0) || (sum - 1.0).abs() > 1e-9 {
        return Err(SynthError::BadSpec(format!(
            "{what} probabilities must be positive and sum to 1"
        )));
    }
    Ok(())
}

fn pick<'t>(table: &'t [(String, f64)], rng: &mut ChaCha12Rng) -> &'t str {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (label, p) in table {
        acc += p;
        if u < acc {
            return label;
        }
    }
    &table.last().expect("non-empty table").0
}

fn sample_mixture(
    components: &[GaussianComponent],
    count: usize,
    rng: &mut ChaCha12Rng,
) -> Vec<f64> {
    let normals: Vec<Normal<f64>> = components
        .iter()
        .map(|c| Normal::new(c.mean, c.stddev).expect("validated component"))
        .collect();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut idx = components.len() - 1;
        for (i, c) in components.iter().enumerate() {
            acc += c.weight;
            if u < acc {
                idx = i;
                break;
            }
        }
        out.push(normals[idx].sample(rng));
    }
    out
}

/// Generates records and scores for `spec`, deterministically in its seed.
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData, SynthError> {
    if spec.classes.is_empty() {
        return Err(SynthError::BadSpec("no classes".into()));
    }
    let layout: Vec<ScoreChannel> = spec.classes[0].channels.iter().map(|(c, _)| *c).collect();
    if layout.is_empty() {
        return Err(SynthError::BadSpec("no score channels".into()));
    }
    for (i, a) in spec.classes.iter().enumerate() {
        let this: Vec<ScoreChannel> = a.channels.iter().map(|(c, _)| *c).collect();
        if this != layout {
            return Err(SynthError::BadSpec(
                "all classes must list the same channels in the same order".into(),
            ));
        }
        for (_, mix) in &a.channels {
            check_mixture(mix)?;
        }
        for b in &spec.classes[..i] {
            if b.class == a.class {
                return Err(SynthError::BadSpec(format!(
                    "class {:?} listed twice",
                    a.class
                )));
            }
        }
    }
    let default_attacks = vec![("A01".to_string(), 1.0)];
    let default_codecs = vec![("C00".to_string(), 1.0)];
    let attacks = spec.attacks.as_deref().unwrap_or(&default_attacks);
    let codecs = spec.codecs.as_deref().unwrap_or(&default_codecs);
    check_probs("attack", attacks)?;
    check_probs("codec", codecs)?;

    let mut records = Vec::new();
    let mut trial_ids = Vec::new();
    let mut channel_values: Vec<Vec<f64>> = layout.iter().map(|_| Vec::new()).collect();

    for class_spec in &spec.classes {
        let base = class_stream_base(class_spec.class);
        let prefix = class_prefix(class_spec.class);
        let mut attack_rng = stream_rng(spec.seed, base);
        let mut codec_rng = stream_rng(spec.seed, base + 1);
        for i in 0..class_spec.count {
            let trial_id = format!("{prefix}{i:07}");
            let speaker_id = format!("SPK{prefix}{:04}", i % 1000);
            let attack = if class_spec.class == TrialClass::Spoof {
                pick(attacks, &mut attack_rng).to_string()
            } else {
                BONA_FIDE_LABEL.to_string()
            };
            let codec = pick(codecs, &mut codec_rng).to_string();
            let record = TrialRecord::new(&trial_id, speaker_id, class_spec.class, attack, codec)
                .map_err(|e| SynthError::BadSpec(e.to_string()))?;
            records.push(record);
            trial_ids.push(trial_id);
        }
        for (slot, (channel, mix)) in class_spec.channels.iter().enumerate() {
            let mut rng = stream_rng(spec.seed, base + channel_stream_offset(*channel));
            channel_values[slot].extend(sample_mixture(mix, class_spec.count, &mut rng));
        }
    }

    let take = |ch: ScoreChannel| -> Option<Vec<f64>> {
        layout
            .iter()
            .position(|c| *c == ch)
            .map(|i| channel_values[i].clone())
    };
    let scores = ScoreSet::new(
        trial_ids,
        take(ScoreChannel::Cm),
        take(ScoreChannel::Asv),
        take(ScoreChannel::Sasv),
    )
    .map_err(|e| SynthError::BadSpec(e.to_string()))?;
    Ok(SyntheticData { records, scores })
}

/// Single-Gaussian CM submission: bona fide at `mean_bona`, spoof at
/// `mean_spoof`, shared `stddev`.
pub fn two_class_track1(
    seed: u64,
    n_bona: usize,
    n_spoof: usize,
    mean_bona: f64,
    mean_spoof: f64,
    stddev: f64,
) -> SyntheticSpec {
    let gauss = |mean| {
        vec![GaussianComponent {
            mean,
            stddev,
            weight: 1.0,
        }]
    };
    SyntheticSpec {
        seed,
        classes: vec![
            ClassSynthSpec {
                class: TrialClass::BonaFideTarget,
                count: n_bona,
                channels: vec![(ScoreChannel::Cm, gauss(mean_bona))],
            },
            ClassSynthSpec {
                class: TrialClass::Spoof,
                count: n_spoof,
                channels: vec![(ScoreChannel::Cm, gauss(mean_spoof))],
            },
        ],
        attacks: None,
        codecs: None,
    }
}

/// CM submission whose scores are exact log-likelihood ratios.
///
/// The underlying detector statistic is unit-variance Gaussian at `+m`
/// (bona fide) and `-m` (spoof); its LLR is `2m * x`, so the emitted
/// scores are Gaussian with mean `±2m²` and stddev `2m`. Decisions made
/// at the Bayes threshold on these scores are optimal by construction.
pub fn ideal_llr_track1(seed: u64, n_bona: usize, n_spoof: usize, m: f64) -> SyntheticSpec {
    two_class_track1(seed, n_bona, n_spoof, 2.0 * m * m, -2.0 * m * m, 2.0 * m)
}

/// Triplet (sasv, cm, asv) submission with one Gaussian per class and
/// channel. `means` rows are (target, nontarget, spoof); columns follow
/// the (sasv, cm, asv) channel order.
pub fn triplet_track2(
    seed: u64,
    counts: (usize, usize, usize),
    means: [[f64; 3]; 3],
    stddev: f64,
) -> SyntheticSpec {
    let gauss = |mean| {
        vec![GaussianComponent {
            mean,
            stddev,
            weight: 1.0,
        }]
    };
    let class_spec = |class, count, row: [f64; 3]| ClassSynthSpec {
        class,
        count,
        channels: vec![
            (ScoreChannel::Sasv, gauss(row[0])),
            (ScoreChannel::Cm, gauss(row[1])),
            (ScoreChannel::Asv, gauss(row[2])),
        ],
    };
    SyntheticSpec {
        seed,
        classes: vec![
            class_spec(TrialClass::BonaFideTarget, counts.0, means[0]),
            class_spec(TrialClass::BonaFideNonTarget, counts.1, means[1]),
            class_spec(TrialClass::Spoof, counts.2, means[2]),
        ],
        attacks: None,
        codecs: None,
    }
}

/// Uniform label table over the given ids.
pub fn uniform_labels(ids: impl IntoIterator<Item = String>) -> Vec<(String, f64)> {
    let ids: Vec<String> = ids.into_iter().collect();
    let p = 1.0 / ids.len() as f64;
    ids.into_iter().map(|id| (id, p)).collect()
}

/// Evaluation-scale Track 1 submission: 138,688 bona fide and 542,086
/// spoofed trials over 16 attacks (`A17`..`A32`) and 12 codecs
/// (`C00`..`C11`), with overlapping Gaussian scores.
pub fn table1_scale_track1(seed: u64) -> SyntheticSpec {
    let mut spec = two_class_track1(seed, 138_688, 542_086, 1.0, -1.0, 1.0);
    spec.attacks = Some(uniform_labels((17..=32).map(|i| format!("A{i:02}"))));
    spec.codecs = Some(uniform_labels((0..=11).map(|i| format!("C{i:02}"))));
    spec
}
