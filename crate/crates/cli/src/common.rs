//! Flags, exit codes, and input plumbing shared by every subcommand.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use spoofeval::io::keys::read_keys;
use spoofeval::io::scores::{read_scores, sniff_columns, ScoreLayout};
use spoofeval::io::validate::{validate_submission, EvalCondition, ValidationReport};
use spoofeval::io::{file_digest, ReadOptions};
use spoofeval::report::InputDigest;
use spoofeval::{ScoreChannel, ScoreSet, Track, TrialRecord, Vocabulary};

/// Clean run.
pub const EXIT_OK: u8 = 0;
/// Unreadable or malformed data, or metrics the data cannot support.
pub const EXIT_DATA: u8 = 1;
/// The submission failed validation against the key.
pub const EXIT_VALIDATION: u8 = 2;
/// Command-line usage error.
pub const EXIT_USAGE: u8 = 64;

/// A subcommand failure, carrying the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Exit [`EXIT_DATA`]: a problem with the inputs themselves.
    Data(String),
    /// Exit [`EXIT_USAGE`]: a flag combination the parser cannot reject
    /// statically.
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) => EXIT_DATA,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Data(message) | CliError::Usage(message) => f.write_str(message),
        }
    }
}

/// Wraps a per-file failure with the offending path.
pub fn file_error(path: &Path, error: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {error}", path.display()))
}

/// Evaluation track selector (mirrors the key-file dialects).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrackArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl From<TrackArg> for Track {
    fn from(arg: TrackArg) -> Track {
        match arg {
            TrackArg::One => Track::One,
            TrackArg::Two => Track::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Closed,
    Open,
}

impl From<ConditionArg> for EvalCondition {
    fn from(arg: ConditionArg) -> EvalCondition {
        match arg {
            ConditionArg::Closed => EvalCondition::Closed,
            ConditionArg::Open => EvalCondition::Open,
        }
    }
}

/// Score-file column layout, with `auto` sniffing the first data row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColumnsArg {
    Auto,
    Single,
    Triplet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    Cm,
    Asv,
    Sasv,
}

impl From<ChannelArg> for ScoreChannel {
    fn from(arg: ChannelArg) -> ScoreChannel {
        match arg {
            ChannelArg::Cm => ScoreChannel::Cm,
            ChannelArg::Asv => ScoreChannel::Asv,
            ChannelArg::Sasv => ScoreChannel::Sasv,
        }
    }
}

/// Input files and parsing switches common to every subcommand.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Track the key file describes: 1 (detection) or 2 (verification)
    #[arg(long, value_enum)]
    pub track: TrackArg,

    /// Score submission file (TSV; .gz accepted)
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,

    /// Protocol key file (TSV; .gz accepted)
    #[arg(long, value_name = "FILE")]
    pub keys: PathBuf,

    /// Column layout of the score file
    #[arg(long, value_enum, default_value = "auto")]
    pub score_columns: ColumnsArg,

    /// Attack/codec vocabulary enforcement for the key file
    #[arg(long, value_enum, default_value = "closed")]
    pub condition: ConditionArg,

    /// Skip the first line of an input when it does not parse as data
    #[arg(long)]
    pub allow_header: bool,

    /// Split fields on runs of spaces and tabs instead of single tabs
    #[arg(long)]
    pub space_delimited: bool,
}

/// Everything a subcommand needs after the files are read.
pub struct LoadedInputs {
    pub track: Track,
    pub condition: EvalCondition,
    pub records: Vec<TrialRecord>,
    pub scores: ScoreSet,
    pub layout: ScoreLayout,
}

impl InputArgs {
    pub fn read_options(&self) -> ReadOptions {
        ReadOptions {
            allow_header: self.allow_header,
            allow_space_delimited: self.space_delimited,
        }
    }

    /// The channel a two-column file carries on this track.
    pub fn single_channel(&self) -> ScoreChannel {
        match self.track {
            TrackArg::One => ScoreChannel::Cm,
            TrackArg::Two => ScoreChannel::Sasv,
        }
    }

    /// Maps the `--score-columns` choice onto a concrete layout, sniffing
    /// the file's first row under `auto`.
    pub fn resolve_layout(&self, path: &Path) -> Result<ScoreLayout, CliError> {
        self.resolve_layout_as(path, self.single_channel())
    }

    /// Same as [`InputArgs::resolve_layout`], but a two-column file is read
    /// as `single_channel` instead of the track default.
    pub fn resolve_layout_as(
        &self,
        path: &Path,
        single_channel: ScoreChannel,
    ) -> Result<ScoreLayout, CliError> {
        match self.score_columns {
            ColumnsArg::Single => Ok(ScoreLayout::Single(single_channel)),
            ColumnsArg::Triplet => Ok(ScoreLayout::Triplet),
            ColumnsArg::Auto => {
                let columns =
                    sniff_columns(path, &self.read_options()).map_err(|e| file_error(path, e))?;
                match columns {
                    2 => Ok(ScoreLayout::Single(single_channel)),
                    4 => Ok(ScoreLayout::Triplet),
                    n => Err(CliError::Data(format!(
                        "{}: found {n} columns; score files have 2 (single) or 4 \
                         (triplet), or pass --score-columns to override",
                        path.display()
                    ))),
                }
            }
        }
    }

    /// Reads the key and score files behind the shared flags.
    pub fn load(&self) -> Result<LoadedInputs, CliError> {
        let options = self.read_options();
        let track: Track = self.track.into();
        let condition: EvalCondition = self.condition.into();
        let records = read_keys(
            &self.keys,
            track,
            &Vocabulary::default(),
            condition,
            &options,
        )
        .map_err(|e| file_error(&self.keys, e))?;
        let layout = self.resolve_layout(&self.scores)?;
        let scores =
            read_scores(&self.scores, layout, &options).map_err(|e| file_error(&self.scores, e))?;
        Ok(LoadedInputs {
            track,
            condition,
            records,
            scores,
            layout,
        })
    }
}

impl LoadedInputs {
    /// Checks score coverage of the key.
    pub fn validation(&self) -> ValidationReport {
        validate_submission(&self.scores, &self.records, self.track, self.condition)
    }
}

/// Validation gate for the computing subcommands: on failure the findings
/// go to stderr and the caller exits [`EXIT_VALIDATION`].
pub fn require_valid(inputs: &LoadedInputs, allow_extra: bool) -> Result<(), u8> {
    let report = inputs.validation();
    if report.passed(allow_extra) {
        Ok(())
    } else {
        eprint!("{}", report.render_text(allow_extra));
        Err(EXIT_VALIDATION)
    }
}

/// Restricts a score set to the trials the key lists, preserving score-file
/// order. Used when a full submission is checked against a subset key.
pub fn restrict_to_key(scores: &ScoreSet, records: &[TrialRecord]) -> Result<ScoreSet, CliError> {
    let keep: HashSet<&str> = records.iter().map(|r| r.trial_id.as_str()).collect();
    let kept: Vec<usize> = scores
        .trial_ids()
        .iter()
        .enumerate()
        .filter(|(_, id)| keep.contains(id.as_str()))
        .map(|(index, _)| index)
        .collect();
    let ids: Vec<String> = kept
        .iter()
        .map(|&i| scores.trial_ids()[i].clone())
        .collect();
    let select = |channel: ScoreChannel| -> Option<Vec<f64>> {
        scores
            .channel(channel)
            .map(|values| kept.iter().map(|&i| values[i]).collect())
    };
    ScoreSet::new(
        ids,
        select(ScoreChannel::Cm),
        select(ScoreChannel::Asv),
        select(ScoreChannel::Sasv),
    )
    .map_err(|e| CliError::Data(format!("after dropping extra trials: {e}")))
}

/// Digest entry for a report's provenance block.
pub fn input_digest(path: &Path) -> Result<InputDigest, CliError> {
    let sha256 = file_digest(path).map_err(|e| file_error(path, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(InputDigest { name, sha256 })
}
