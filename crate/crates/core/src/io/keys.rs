//! Protocol key files.
//!
//! A key file describes the ground truth for each trial, one row per trial:
//!
//! ```text
//! speaker_id<TAB>trial_id<TAB>codec<TAB>attack<TAB>class[<TAB>extra...]
//! ```
//!
//! Columns past the fifth are ignored so that richer protocol exports can be
//! consumed directly. The class column depends on the track: spoofing
//! detection keys use `bonafide` / `spoof`, verification keys use `target` /
//! `nontarget` / `spoof`. Bona fide rows must carry `bonafide` in the attack
//! column; spoofed rows must not.
//!
//! Under the closed evaluation condition every attack and codec label must
//! belong to the active [`Vocabulary`]. The open condition admits novel
//! labels and skips those checks entirely.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use crate::model::{Track, TrialClass, TrialRecord, Vocabulary, BONA_FIDE_LABEL};

use super::validate::EvalCondition;
use super::{create_text, for_each_row, open_text, split_fields, ReadError, ReadOptions};

const KEY_COLUMNS: usize = 5;

fn parse_class(label: &str, track: Track, line: usize) -> Result<TrialClass, ReadError> {
    let class = match (track, label) {
        (Track::One, BONA_FIDE_LABEL) => Some(TrialClass::BonaFideTarget),
        (Track::One, "spoof") => Some(TrialClass::Spoof),
        (Track::Two, "target") => Some(TrialClass::BonaFideTarget),
        (Track::Two, "nontarget") => Some(TrialClass::BonaFideNonTarget),
        (Track::Two, "spoof") => Some(TrialClass::Spoof),
        _ => None,
    };
    class.ok_or_else(|| ReadError::Parse {
        line,
        message: format!("unknown class label {label:?} for track {track}"),
    })
}

/// Reads a key file for the given track.
///
/// `condition` controls vocabulary enforcement: [`EvalCondition::Closed`]
/// rejects attack or codec labels missing from `vocabulary`, while
/// [`EvalCondition::Open`] accepts any label. Duplicate trial ids are a hard
/// error; the key file defines the protocol and must be unambiguous.
pub fn read_keys(
    path: &Path,
    track: Track,
    vocabulary: &Vocabulary,
    condition: EvalCondition,
    options: &ReadOptions,
) -> Result<Vec<TrialRecord>, ReadError> {
    let reader = open_text(path)?;
    let mut records: Vec<TrialRecord> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();

    for_each_row(reader, |line_no, row| {
        let fields = split_fields(row, options);
        match parse_key_row(&fields, track, vocabulary, condition, line_no) {
            Ok(record) => {
                if !seen.insert(record.trial_id.clone()) {
                    return Err(ReadError::Duplicate {
                        line: line_no,
                        trial_id: record.trial_id.clone(),
                    });
                }
                records.push(record);
                Ok(())
            }
            // A rejected first line is a header when the caller allows one.
            Err(_) if line_no == 1 && options.allow_header => Ok(()),
            Err(error) => Err(error),
        }
    })?;

    Ok(records)
}

fn parse_key_row(
    fields: &[&str],
    track: Track,
    vocabulary: &Vocabulary,
    condition: EvalCondition,
    line: usize,
) -> Result<TrialRecord, ReadError> {
    if fields.len() < KEY_COLUMNS {
        return Err(ReadError::Format {
            line,
            message: format!(
                "expected at least {KEY_COLUMNS} columns, found {}",
                fields.len()
            ),
        });
    }
    let [speaker_id, trial_id, codec, attack, class_label] =
        [fields[0], fields[1], fields[2], fields[3], fields[4]];
    for (name, value) in [("speaker id", speaker_id), ("trial id", trial_id)] {
        if value.is_empty() {
            return Err(ReadError::Format {
                line,
                message: format!("empty {name}"),
            });
        }
    }
    let class = parse_class(class_label, track, line)?;

    if condition == EvalCondition::Closed {
        if class == TrialClass::Spoof && !vocabulary.is_known_attack(attack) {
            return Err(ReadError::Vocabulary {
                line,
                message: format!("unknown attack label {attack:?} under the closed condition"),
            });
        }
        if !vocabulary.codec_allowed(codec, track) {
            let detail = if vocabulary.is_known_codec(codec) {
                format!("codec {codec:?} is not eligible for track {track}")
            } else {
                format!("unknown codec label {codec:?} under the closed condition")
            };
            return Err(ReadError::Vocabulary {
                line,
                message: detail,
            });
        }
    }

    TrialRecord::new(trial_id, speaker_id, class, attack, codec).map_err(|error| ReadError::Parse {
        line,
        message: error.to_string(),
    })
}

/// Writes key records in canonical five-column form.
pub fn write_keys(
    path: &Path,
    records: &[TrialRecord],
    track: Track,
) -> Result<(), std::io::Error> {
    let mut writer = create_text(path)?;
    for record in records {
        let class_label = match (track, record.class) {
            (Track::One, c) if c.is_bona_fide() => BONA_FIDE_LABEL,
            (Track::One, _) => "spoof",
            (Track::Two, c) => c.sasv_label(),
        };
        writeln!(
            writer,
            "{}\t{}\t{}\t{}\t{}",
            record.speaker_id,
            record.trial_id,
            record.codec_label,
            record.attack_label,
            class_label
        )?;
    }
    writer.flush()
}
