//! Diarization error rate and Jaccard error rate.
//!
//! Both metrics share one speaker mapping per file: the one-to-one pairing
//! of reference to system speakers that maximizes total overlapped time.
//! All arithmetic is done in integer ticks; only the final percentages are
//! floating point.

mod assignment;
mod der;
mod jer;
mod overlap;
mod sad;
mod score;

pub use assignment::{max_weight_assignment, optimal_mapping, SpeakerMapping};
pub use der::{compute_der, DerComponents};
pub use jer::{compute_jer, JerComponents, SpeakerJer};
pub use overlap::{build_overlap_matrix, OverlapMatrix};
pub use sad::derive_sad;
pub use score::{score_corpus, score_file, Aggregate, CorpusInput, CorpusScore, FileScore, ScoreOptions};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formats::Turn;
use crate::timeline::{Ticks, Timeline, TimelineError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("no scored reference speech; error rate is undefined")]
    EmptyReference,
    #[error("{file_id}: {source}")]
    InFile {
        file_id: String,
        #[source]
        source: Box<MetricError>,
    },
    #[error("reference file {0} has no system output")]
    MissingFile(String),
    #[error("system output for {0} has no reference")]
    UnexpectedSystemFile(String),
    #[error("no scoring regions for {0}")]
    MissingRegions(String),
    #[error("collar must be non-negative, got {0}")]
    NegativeCollar(Ticks),
    #[error(transparent)]
    Timeline(#[from] TimelineError),
}

impl MetricError {
    fn in_file(self, file_id: &str) -> MetricError {
        MetricError::InFile { file_id: file_id.to_string(), source: Box::new(self) }
    }
}

/// Per-speaker timelines for one recording, keyed (and ordered) by speaker
/// name. Speakers whose time was clipped away are kept with an empty
/// timeline.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpeakerTimelines {
    speakers: BTreeMap<String, Timeline>,
}

impl SpeakerTimelines {
    pub fn new() -> Self {
        SpeakerTimelines::default()
    }

    /// Groups turns by speaker; a speaker's overlapping or touching turns are
    /// merged.
    pub fn from_turns<'a>(turns: impl IntoIterator<Item = &'a Turn>) -> Self {
        let mut raw: BTreeMap<String, Vec<_>> = BTreeMap::new();
        for t in turns {
            let entry = raw.entry(t.speaker.clone()).or_default();
            if let Some(iv) = t.interval() {
                entry.push(iv);
            }
        }
        SpeakerTimelines { speakers: raw.into_iter().map(|(k, v)| (k, Timeline::from_intervals(v))).collect() }
    }

    pub fn insert(&mut self, speaker: impl Into<String>, timeline: Timeline) {
        self.speakers.insert(speaker.into(), timeline);
    }

    /// Restricts every speaker to the given regions.
    pub fn clip(&self, regions: &Timeline) -> Self {
        SpeakerTimelines { speakers: self.speakers.iter().map(|(k, v)| (k.clone(), v.clip(regions))).collect() }
    }

    pub fn get(&self, speaker: &str) -> Option<&Timeline> {
        self.speakers.get(speaker)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.speakers.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Timeline)> {
        self.speakers.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.speakers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speakers.is_empty()
    }

    /// Sum of per-speaker durations (overlapped time counted once per speaker).
    pub fn total_duration(&self) -> Ticks {
        self.speakers.values().map(Timeline::duration).sum()
    }

    /// Union over all speakers.
    pub fn union(&self) -> Timeline {
        Timeline::from_intervals(self.speakers.values().flat_map(|t| t.intervals().iter().copied()).collect())
    }
}

impl<S: Into<String>> FromIterator<(S, Timeline)> for SpeakerTimelines {
    fn from_iter<I: IntoIterator<Item = (S, Timeline)>>(iter: I) -> Self {
        SpeakerTimelines { speakers: iter.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}

pub(crate) fn percent(numerator: Ticks, denominator: Ticks) -> f64 {
    100.0 * numerator.ticks() as f64 / denominator.ticks() as f64
}
