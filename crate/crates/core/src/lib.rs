//! Speaker diarization scoring.
//!
//! Parses RTTM, UEM and HTK speech label files, computes diarization error
//! rate (DER) and Jaccard error rate (JER) with an optimal one-to-one
//! speaker mapping, validates submissions against a manifest, and renders
//! per-file and corpus-level reports.
//!
//! Scoring uses no forgiveness collar and scores overlapped speech.

pub mod cli;
pub mod formats;
pub mod metrics;
pub mod reporting;
pub mod timeline;
pub mod validation;

pub use formats::{ScoringRegions, Turn};
pub use metrics::{score_corpus, score_file, CorpusInput, CorpusScore, FileScore, ScoreOptions};
pub use timeline::{Interval, Ticks, Timeline};
