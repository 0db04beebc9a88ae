use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{data_lines, is_token, parse_time, FormatError, Parsed, Strictness, Warning};
use crate::timeline::{Interval, Ticks};

pub const SPEAKER_TAG: &str = "SPEAKER";
pub const NA: &str = "<NA>";

const FIELD_COUNT: usize = 10;
const PLACEHOLDERS: [(usize, &str); 4] = [(5, "orthography"), (6, "speaker type"), (8, "confidence"), (9, "lookahead")];

/// One speaker turn from an RTTM file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Turn {
    pub file_id: String,
    pub channel: u32,
    pub onset: Ticks,
    pub duration: Ticks,
    pub speaker: String,
}

impl Turn {
    pub fn new(file_id: impl Into<String>, onset: Ticks, duration: Ticks, speaker: impl Into<String>) -> Self {
        Turn { file_id: file_id.into(), channel: 1, onset, duration, speaker: speaker.into() }
    }

    pub fn offset(&self) -> Ticks {
        self.onset + self.duration
    }

    /// The turn as a half-open interval; `None` only for a zero or negative
    /// duration, which parsing never produces.
    pub fn interval(&self) -> Option<Interval> {
        Interval::new(self.onset, self.offset()).ok()
    }

    fn check(&self) -> Result<(), String> {
        if !is_token(&self.file_id) {
            return Err(format!("file id {:?} is not a single token", self.file_id));
        }
        if !is_token(&self.speaker) {
            return Err(format!("speaker {:?} is not a single token", self.speaker));
        }
        if self.channel != 1 {
            return Err(format!("channel must be 1, found {}", self.channel));
        }
        if self.onset.is_negative() {
            return Err(format!("negative onset {}", self.onset));
        }
        if self.duration <= Ticks::ZERO {
            return Err(format!("duration must be positive, found {}", self.duration));
        }
        Ok(())
    }
}

/// Strict RTTM parse; fails on the first bad line.
pub fn parse_rttm(text: &str) -> Result<Vec<Turn>, FormatError> {
    parse_rttm_with(text, Strictness::Strict).into_result()
}

/// Parses every line, collecting one diagnostic per bad line.
pub fn parse_rttm_with(text: &str, strictness: Strictness) -> Parsed<Turn> {
    let mut out = Parsed::default();
    for (line, fields) in data_lines(text) {
        match parse_line(line, &fields, strictness, &mut out.warnings) {
            Ok(Some(turn)) => {
                out.records.push(turn);
                out.record_lines.push(line);
            }
            Ok(None) => {}
            Err(e) => out.errors.push(e),
        }
    }
    out
}

fn parse_line(
    line: usize,
    fields: &[&str],
    strictness: Strictness,
    warnings: &mut Vec<Warning>,
) -> Result<Option<Turn>, FormatError> {
    if fields.len() != FIELD_COUNT {
        return Err(FormatError::FieldCount { line, expected: "10", found: fields.len() });
    }
    let lenient = strictness == Strictness::Lenient;

    if fields[0] != SPEAKER_TAG {
        if lenient {
            warnings.push(Warning { line, message: format!("skipping {:?} record", fields[0]) });
            return Ok(None);
        }
        return Err(FormatError::BadTag { line, found: fields[0].to_string() });
    }

    let channel: u32 = fields[2].parse().map_err(|_| FormatError::BadNumber {
        line,
        field: "channel",
        value: fields[2].to_string(),
    })?;
    if channel == 0 {
        return Err(FormatError::BadChannel { line, found: fields[2].to_string() });
    }
    if channel != 1 {
        if !lenient {
            return Err(FormatError::BadChannel { line, found: fields[2].to_string() });
        }
        warnings.push(Warning { line, message: format!("channel {channel} (expected 1)") });
    }

    let onset = parse_time(line, "onset", fields[3])?;
    let duration = parse_time(line, "duration", fields[4])?;
    if onset.is_negative() {
        return Err(FormatError::NegativeOnset { line, onset });
    }
    if duration <= Ticks::ZERO {
        return Err(FormatError::NonPositiveDuration { line, duration });
    }

    for (idx, name) in PLACEHOLDERS {
        if fields[idx] != NA {
            if !lenient {
                return Err(FormatError::BadPlaceholder { line, field: name, found: fields[idx].to_string() });
            }
            warnings.push(Warning { line, message: format!("{name} field is {:?}, expected <NA>", fields[idx]) });
        }
    }

    Ok(Some(Turn { file_id: fields[1].to_string(), channel, onset, duration, speaker: fields[7].to_string() }))
}

/// One line per turn, in input order.
pub fn write_rttm(turns: &[Turn]) -> Result<String, FormatError> {
    let mut out = String::new();
    for (index, turn) in turns.iter().enumerate() {
        turn.check().map_err(|reason| FormatError::InvariantViolation { index, reason })?;
        writeln!(
            out,
            "{SPEAKER_TAG} {} {} {} {} {NA} {NA} {} {NA} {NA}",
            turn.file_id, turn.channel, turn.onset, turn.duration, turn.speaker
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}
