use std::fmt::Write as _;

use super::{data_lines, parse_time, FormatError};
use crate::timeline::Interval;

pub const SPEECH_LABEL: &str = "speech";

/// One line of a speech-segmentation label file.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SadSegment {
    pub interval: Interval,
    pub label: String,
}

impl SadSegment {
    pub fn speech(interval: Interval) -> Self {
        SadSegment { interval, label: SPEECH_LABEL.to_string() }
    }
}

/// Parses segments in file order and verifies they are disjoint.
pub fn parse_htk_lab(text: &str) -> Result<Vec<SadSegment>, FormatError> {
    let mut segments = Vec::new();
    let mut lines = Vec::new();
    for (line, fields) in data_lines(text) {
        if fields.len() != 3 {
            return Err(FormatError::FieldCount { line, expected: "3", found: fields.len() });
        }
        let onset = parse_time(line, "onset", fields[0])?;
        let offset = parse_time(line, "offset", fields[1])?;
        if onset.is_negative() {
            return Err(FormatError::NegativeOnset { line, onset });
        }
        let interval =
            Interval::new(onset, offset).map_err(|_| FormatError::DegenerateSegment { line, onset, offset })?;
        if fields[2] != SPEECH_LABEL {
            return Err(FormatError::BadLabel { line, found: fields[2].to_string() });
        }
        segments.push(SadSegment::speech(interval));
        lines.push(line);
    }

    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by_key(|&i| (segments[i].interval, lines[i]));
    if let Some(w) = order.windows(2).find(|w| segments[w[0]].interval.offset() > segments[w[1]].interval.onset()) {
        return Err(FormatError::OverlapViolation { line: lines[w[0]].max(lines[w[1]]) });
    }
    Ok(segments)
}

/// Serializes sorted by onset; rejects overlapping segments or non-speech
/// labels.
pub fn write_htk_lab(segments: &[SadSegment]) -> Result<String, FormatError> {
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by_key(|&i| segments[i].interval);

    let mut out = String::new();
    let mut prev: Option<Interval> = None;
    for i in order {
        let seg = &segments[i];
        if seg.label != SPEECH_LABEL {
            return Err(FormatError::InvariantViolation {
                index: i,
                reason: format!("label must be \"speech\", found {:?}", seg.label),
            });
        }
        if seg.interval.onset().is_negative() {
            return Err(FormatError::InvariantViolation { index: i, reason: "negative onset".into() });
        }
        if prev.is_some_and(|p| p.offset() > seg.interval.onset()) {
            return Err(FormatError::InvariantViolation { index: i, reason: "segments overlap".into() });
        }
        prev = Some(seg.interval);
        writeln!(out, "{} {} {}", seg.interval.onset(), seg.interval.offset(), seg.label)
            .expect("writing to a String cannot fail");
    }
    Ok(out)
}
