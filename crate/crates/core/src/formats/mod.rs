//! Readers and writers for RTTM, UEM and HTK speech label files.
//!
//! Input fields may be separated by any run of spaces or tabs; output always
//! uses single spaces and fixed-point times with four decimals. Blank lines
//! and lines starting with `;;` are skipped.

mod htk;
mod rttm;
mod uem;

pub use htk::{parse_htk_lab, write_htk_lab, SadSegment, SPEECH_LABEL};
pub use rttm::{parse_rttm, parse_rttm_with, write_rttm, Turn, NA, SPEAKER_TAG};
pub use uem::{parse_uem, write_uem, FileRegions, ScoringRegions};

use thiserror::Error;

use crate::timeline::Ticks;

/// How strictly RTTM records are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Tag, channel and placeholder deviations are errors.
    #[default]
    Strict,
    /// Tag, channel and placeholder deviations become warnings.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount { line: usize, expected: &'static str, found: usize },
    #[error("line {line}: bad number in field {field}: {value:?}")]
    BadNumber { line: usize, field: &'static str, value: String },
    #[error("line {line}: segment type must be \"SPEAKER\", found {found:?}")]
    BadTag { line: usize, found: String },
    #[error("line {line}: bad channel {found:?}")]
    BadChannel { line: usize, found: String },
    #[error("line {line}: field {field} must be \"<NA>\", found {found:?}")]
    BadPlaceholder { line: usize, field: &'static str, found: String },
    #[error("line {line}: negative onset {onset}")]
    NegativeOnset { line: usize, onset: Ticks },
    #[error("line {line}: duration must be positive, found {duration}")]
    NonPositiveDuration { line: usize, duration: Ticks },
    #[error("line {line}: offset {offset} does not exceed onset {onset}")]
    DegenerateSegment { line: usize, onset: Ticks, offset: Ticks },
    #[error("line {line}: label must be \"speech\", found {found:?}")]
    BadLabel { line: usize, found: String },
    #[error("line {line}: segment overlaps an earlier segment")]
    OverlapViolation { line: usize },
    #[error("line {line}: scoring regions for {file_id} overlap")]
    OverlappingRegions { line: usize, file_id: String },
    #[error("line {line}: channel {found} for {file_id} differs from earlier channel {expected}")]
    ChannelMismatch { line: usize, file_id: String, expected: u32, found: u32 },
    #[error("record {index}: {reason}")]
    InvariantViolation { index: usize, reason: String },
}

impl FormatError {
    /// 1-based source line, when the error came from a parser.
    pub fn line(&self) -> Option<usize> {
        use FormatError::*;
        match self {
            FieldCount { line, .. }
            | BadNumber { line, .. }
            | BadTag { line, .. }
            | BadChannel { line, .. }
            | BadPlaceholder { line, .. }
            | NegativeOnset { line, .. }
            | NonPositiveDuration { line, .. }
            | DegenerateSegment { line, .. }
            | BadLabel { line, .. }
            | OverlapViolation { line }
            | OverlappingRegions { line, .. }
            | ChannelMismatch { line, .. } => Some(*line),
            InvariantViolation { .. } => None,
        }
    }
}

/// A non-fatal parser finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

/// Everything a parser found in one text: records from good lines plus one
/// diagnostic per bad line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    /// Source line of each record.
    pub record_lines: Vec<usize>,
    pub warnings: Vec<Warning>,
    pub errors: Vec<FormatError>,
}

impl<T> Default for Parsed<T> {
    fn default() -> Self {
        Parsed { records: Vec::new(), record_lines: Vec::new(), warnings: Vec::new(), errors: Vec::new() }
    }
}

impl<T> Parsed<T> {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    /// The records, or the first error by line.
    pub fn into_result(self) -> Result<Vec<T>, FormatError> {
        match self.errors.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(self.records),
        }
    }
}

/// Yields `(line_no, fields)` for every line that carries data.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with(";;") {
            return None;
        }
        Some((i + 1, trimmed.split_ascii_whitespace().collect()))
    })
}

pub(crate) fn parse_time(line: usize, field: &'static str, value: &str) -> Result<Ticks, FormatError> {
    value.parse().map_err(|_| FormatError::BadNumber { line, field, value: value.to_string() })
}

/// A single whitespace-free, non-empty token.
pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}
