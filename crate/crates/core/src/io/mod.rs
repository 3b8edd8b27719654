//! Reading and writing the on-disk formats.
//!
//! Submission inputs are plain-text tables, UTF-8 with LF line endings and
//! tab-separated fields. Files whose name ends in `.gz` are transparently
//! decompressed (and compressed when writing). Two lenience switches exist
//! for material found in the wild, see [`ReadOptions`]; everything else is
//! rejected with a line-numbered error rather than silently repaired.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub mod keys;
pub mod report_fmt;
pub mod scores;
pub mod validate;

/// Failure while reading an input file. Line numbers are 1-based.
#[derive(Debug, Error)]
pub enum ReadError {
    #[error(transparent)]
    Io(#[from] io::Error),
    /// A field failed to parse as its expected type.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// A row had the wrong shape (column count, empty field).
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    /// A label fell outside the active vocabulary.
    #[error("line {line}: {message}")]
    Vocabulary { line: usize, message: String },
    /// A trial id appeared more than once in a key file.
    #[error("line {line}: duplicate trial id {trial_id:?}")]
    Duplicate { line: usize, trial_id: String },
}

impl ReadError {
    /// The 1-based line the error points at, when it names one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ReadError::Io(_) => None,
            ReadError::Parse { line, .. }
            | ReadError::Format { line, .. }
            | ReadError::Vocabulary { line, .. }
            | ReadError::Duplicate { line, .. } => Some(*line),
        }
    }
}

/// Lenience switches for submission parsing.
///
/// The default is strict: tab-separated fields, no header row. Both
/// switches widen what is accepted without changing how well-formed
/// canonical files are read.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReadOptions {
    /// Skip the first line if it does not parse as a data row.
    pub allow_header: bool,
    /// Split fields on any run of spaces and tabs instead of single tabs.
    pub allow_space_delimited: bool,
}

/// Opens a file for buffered text reading, decompressing `.gz` names.
fn open_text(path: &Path) -> io::Result<Box<dyn BufRead>> {
    let file = File::open(path)?;
    if has_gz_suffix(path) {
        Ok(Box::new(BufReader::new(flate2::read::GzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Creates a file for buffered text writing, compressing `.gz` names.
fn create_text(path: &Path) -> io::Result<Box<dyn Write>> {
    let file = File::create(path)?;
    if has_gz_suffix(path) {
        let encoder = flate2::write::GzEncoder::new(file, flate2::Compression::default());
        Ok(Box::new(BufWriter::new(encoder)))
    } else {
        Ok(Box::new(BufWriter::new(file)))
    }
}

fn has_gz_suffix(path: &Path) -> bool {
    path.extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("gz"))
}

/// Splits one line into fields according to the active delimiter rule.
/// A single trailing carriage return is tolerated on any line.
fn split_fields<'l>(line: &'l str, options: &ReadOptions) -> Vec<&'l str> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if options.allow_space_delimited {
        line.split_ascii_whitespace().collect()
    } else {
        line.split('\t').collect()
    }
}

/// Iterates non-empty lines with their 1-based line numbers.
fn for_each_row<R, F>(reader: R, mut per_row: F) -> Result<(), ReadError>
where
    R: BufRead,
    F: FnMut(usize, &str) -> Result<(), ReadError>,
{
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.strip_suffix('\r').unwrap_or(&line);
        if trimmed.is_empty() {
            continue;
        }
        per_row(index + 1, trimmed)?;
    }
    Ok(())
}

/// Writes a calibration map as pretty-printed JSON (gzipped for `.gz` names).
pub fn write_calibration_map(
    path: &Path,
    map: &crate::calibration::CalibrationMap,
) -> io::Result<()> {
    let mut writer = create_text(path)?;
    serde_json::to_writer_pretty(&mut writer, map).map_err(io::Error::from)?;
    writer.write_all(b"\n")?;
    writer.flush()
}

/// Reads a calibration map previously written by [`write_calibration_map`].
pub fn read_calibration_map(path: &Path) -> Result<crate::calibration::CalibrationMap, ReadError> {
    let reader = open_text(path)?;
    serde_json::from_reader(reader).map_err(|error| {
        if error.is_io() {
            ReadError::Io(io::Error::other(error))
        } else {
            ReadError::Parse {
                line: error.line(),
                message: format!("invalid calibration map: {error}"),
            }
        }
    })
}

/// Hex-encoded SHA-256 digest of a file's raw bytes (compressed files are
/// digested as stored, not decompressed).
pub fn file_digest(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buffer = [0u8; 64 * 1024];
    loop {
        let read = file.read(&mut buffer)?;
        if read == 0 {
            break;
        }
        hasher.update(&buffer[..read]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}
