//! Score submission files.
//!
//! Two layouts exist. A single-channel file has two columns:
//!
//! ```text
//! trial_id<TAB>score
//! ```
//!
//! A triplet file, used for spoofing-robust verification systems that expose
//! their subsystem scores, has four:
//!
//! ```text
//! trial_id<TAB>sasv_score<TAB>cm_score<TAB>asv_score
//! ```
//!
//! Scores must be finite; `inf` and `NaN` spellings are rejected at parse
//! time. Duplicate trial ids are accepted here and surface later as
//! validation findings, since a scorer may legitimately be checked against
//! several key subsets.

use std::io::Write;
use std::path::Path;

use crate::model::{ScoreChannel, ScoreSet};

use super::{create_text, for_each_row, open_text, split_fields, ReadError, ReadOptions};

/// Column layout of a score file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreLayout {
    /// Two columns: trial id and one score for the given channel.
    Single(ScoreChannel),
    /// Four columns: trial id, then sasv, cm, and asv scores.
    Triplet,
}

impl ScoreLayout {
    fn columns(self) -> usize {
        match self {
            ScoreLayout::Single(_) => 2,
            ScoreLayout::Triplet => 4,
        }
    }
}

/// Column count of the first non-empty row, for layout auto-detection.
///
/// The first row's shape stands in for the whole file; a header line has
/// the same column count as the data under it, so the answer is unaffected
/// by [`ReadOptions::allow_header`]. An empty file is a format error.
pub fn sniff_columns(path: &Path, options: &ReadOptions) -> Result<usize, ReadError> {
    use std::io::BufRead;

    let reader = open_text(path)?;
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.strip_suffix('\r').unwrap_or(&line);
        if trimmed.is_empty() {
            continue;
        }
        return Ok(split_fields(trimmed, options).len());
    }
    Err(ReadError::Format {
        line: 1,
        message: "file holds no data rows".to_owned(),
    })
}

fn parse_score(field: &str, line: usize, column: usize) -> Result<f64, ReadError> {
    let value: f64 = field.parse().map_err(|_| ReadError::Parse {
        line,
        message: format!("column {column}: {field:?} is not a number"),
    })?;
    if !value.is_finite() {
        return Err(ReadError::Parse {
            line,
            message: format!("column {column}: score {field:?} is not finite"),
        });
    }
    Ok(value)
}

/// Reads a score file in the given layout.
pub fn read_scores(
    path: &Path,
    layout: ScoreLayout,
    options: &ReadOptions,
) -> Result<ScoreSet, ReadError> {
    let reader = open_text(path)?;
    let expected = layout.columns();
    let mut ids: Vec<String> = Vec::new();
    let mut first: Vec<f64> = Vec::new();
    let mut second: Vec<f64> = Vec::new();
    let mut third: Vec<f64> = Vec::new();

    for_each_row(reader, |line_no, row| {
        let fields = split_fields(row, options);
        let parsed = parse_row(&fields, expected, line_no);
        match parsed {
            Ok((id, values)) => {
                ids.push(id.to_owned());
                first.push(values[0]);
                if expected == 4 {
                    second.push(values[1]);
                    third.push(values[2]);
                }
                Ok(())
            }
            // A rejected first line is a header when the caller allows one.
            Err(_) if line_no == 1 && options.allow_header => Ok(()),
            Err(error) => Err(error),
        }
    })?;

    let set = match layout {
        ScoreLayout::Single(channel) => ScoreSet::single(ids, channel, first),
        ScoreLayout::Triplet => ScoreSet::triplet(ids, first, second, third),
    };
    // All alignment and finiteness preconditions were enforced row by row.
    Ok(set.expect("parsed rows always satisfy score set invariants"))
}

fn parse_row<'f>(
    fields: &[&'f str],
    expected: usize,
    line: usize,
) -> Result<(&'f str, [f64; 3]), ReadError> {
    if fields.len() != expected {
        return Err(ReadError::Format {
            line,
            message: format!("expected {expected} columns, found {}", fields.len()),
        });
    }
    let id = fields[0];
    if id.is_empty() {
        return Err(ReadError::Format {
            line,
            message: "empty trial id".to_owned(),
        });
    }
    let mut values = [0.0f64; 3];
    for (slot, field) in fields[1..].iter().enumerate() {
        values[slot] = parse_score(field, line, slot + 2)?;
    }
    Ok((id, values))
}

/// Writes a score set in canonical form: tab-separated, LF endings, no
/// header, shortest round-trip float formatting. The requested layout must
/// be present in the set.
pub fn write_scores(
    path: &Path,
    scores: &ScoreSet,
    layout: ScoreLayout,
) -> Result<(), std::io::Error> {
    let missing = || {
        std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "score set does not carry the requested channels",
        )
    };
    let mut writer = create_text(path)?;
    match layout {
        ScoreLayout::Single(channel) => {
            let values = scores.channel(channel).ok_or_else(missing)?;
            for (id, value) in scores.trial_ids().iter().zip(values) {
                writeln!(writer, "{id}\t{value}")?;
            }
        }
        ScoreLayout::Triplet => {
            if !scores.is_triplet() {
                return Err(missing());
            }
            let sasv = scores.channel(ScoreChannel::Sasv).expect("checked");
            let cm = scores.channel(ScoreChannel::Cm).expect("checked");
            let asv = scores.channel(ScoreChannel::Asv).expect("checked");
            for (index, id) in scores.trial_ids().iter().enumerate() {
                writeln!(
                    writer,
                    "{id}\t{}\t{}\t{}",
                    sasv[index], cm[index], asv[index]
                )?;
            }
        }
    }
    writer.flush()
}
