use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{data_lines, is_token, parse_time, FormatError};
use crate::timeline::{Interval, Ticks, Timeline};

/// Scoring regions of one recording, sorted by onset and pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileRegions {
    channel: u32,
    intervals: Vec<Interval>,
}

impl FileRegions {
    pub fn channel(&self) -> u32 {
        self.channel
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn timeline(&self) -> Timeline {
        Timeline::from_intervals(self.intervals.clone())
    }

    fn insert(&mut self, iv: Interval) -> Result<(), ()> {
        let pos = self.intervals.partition_point(|r| r.onset() < iv.onset());
        let clash_before = pos > 0 && self.intervals[pos - 1].offset() > iv.onset();
        let clash_after = pos < self.intervals.len() && self.intervals[pos].onset() < iv.offset();
        if clash_before || clash_after {
            return Err(());
        }
        self.intervals.insert(pos, iv);
        Ok(())
    }
}

/// Per-file scoring regions from a UEM file. Gaps between regions are
/// excluded from scoring.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScoringRegions {
    files: BTreeMap<String, FileRegions>,
}

impl ScoringRegions {
    pub fn new() -> Self {
        ScoringRegions::default()
    }

    /// Adds one region. Fails if it overlaps an existing region of the same
    /// file, or if the channel differs from the file's earlier regions.
    pub fn insert(&mut self, file_id: &str, channel: u32, region: Interval) -> Result<(), FormatError> {
        self.insert_at(0, file_id, channel, region)
    }

    fn insert_at(&mut self, line: usize, file_id: &str, channel: u32, region: Interval) -> Result<(), FormatError> {
        if !is_token(file_id) {
            return Err(FormatError::InvariantViolation {
                index: line,
                reason: format!("file id {file_id:?} is not a single token"),
            });
        }
        if channel == 0 {
            return Err(FormatError::BadChannel { line, found: "0".into() });
        }
        if region.onset().is_negative() {
            return Err(FormatError::NegativeOnset { line, onset: region.onset() });
        }
        let entry =
            self.files.entry(file_id.to_string()).or_insert_with(|| FileRegions { channel, intervals: Vec::new() });
        if entry.channel != channel {
            return Err(FormatError::ChannelMismatch {
                line,
                file_id: file_id.to_string(),
                expected: entry.channel,
                found: channel,
            });
        }
        entry.insert(region).map_err(|()| FormatError::OverlappingRegions { line, file_id: file_id.to_string() })
    }

    pub fn get(&self, file_id: &str) -> Option<&FileRegions> {
        self.files.get(file_id)
    }

    /// Region timeline for one file, if the file is listed.
    pub fn timeline(&self, file_id: &str) -> Option<Timeline> {
        self.files.get(file_id).map(FileRegions::timeline)
    }

    pub fn contains(&self, file_id: &str) -> bool {
        self.files.contains_key(file_id)
    }

    pub fn file_ids(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FileRegions)> {
        self.files.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }
}

pub fn parse_uem(text: &str) -> Result<ScoringRegions, FormatError> {
    let mut regions = ScoringRegions::new();
    for (line, fields) in data_lines(text) {
        if fields.len() != 4 {
            return Err(FormatError::FieldCount { line, expected: "4", found: fields.len() });
        }
        let channel: u32 = fields[1].parse().map_err(|_| FormatError::BadNumber {
            line,
            field: "channel",
            value: fields[1].to_string(),
        })?;
        let onset = parse_time(line, "onset", fields[2])?;
        let offset = parse_time(line, "offset", fields[3])?;
        let region =
            Interval::new(onset, offset).map_err(|_| FormatError::DegenerateSegment { line, onset, offset })?;
        regions.insert_at(line, fields[0], channel, region)?;
    }
    Ok(regions)
}

/// One line per region, sorted by file id then onset.
pub fn write_uem(regions: &ScoringRegions) -> String {
    let mut out = String::new();
    for (file_id, fr) in &regions.files {
        for iv in &fr.intervals {
            writeln!(out, "{file_id} {} {} {}", fr.channel, iv.onset(), iv.offset())
                .expect("writing to a String cannot fail");
        }
    }
    out
}

impl ScoringRegions {
    /// Whole-recording regions `[0, duration)` per file.
    pub fn full_files<'a>(durations: impl IntoIterator<Item = (&'a str, Ticks)>) -> Result<Self, FormatError> {
        let mut regions = ScoringRegions::new();
        for (file_id, duration) in durations {
            let iv = Interval::new(Ticks::ZERO, duration).map_err(|_| FormatError::InvariantViolation {
                index: 0,
                reason: format!("non-positive duration {duration} for {file_id}"),
            })?;
            regions.insert(file_id, 1, iv)?;
        }
        Ok(regions)
    }
}
