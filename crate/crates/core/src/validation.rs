//! Submission checks run before scoring.
//!
//! A submission is valid when it covers every recording of the manifest,
//! names no unknown recordings, and every RTTM line passes strict parsing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formats::{data_lines, parse_rttm_with, ScoringRegions, Strictness, Turn};
use crate::timeline::{Interval, Ticks, Timeline};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub core: bool,
    pub duration: Option<Ticks>,
}

/// Expected recordings of a submission.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    entries: BTreeMap<String, ManifestEntry>,
}

impl Manifest {
    pub fn get(&self, file_id: &str) -> Option<&ManifestEntry> {
        self.entries.get(file_id)
    }

    pub fn contains(&self, file_id: &str) -> bool {
        self.entries.contains_key(file_id)
    }

    pub fn file_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn core_ids(&self) -> BTreeSet<String> {
        self.entries.iter().filter(|(_, e)| e.core).map(|(k, _)| k.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("line {line}: expected 2 or 3 fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: core flag must be 0 or 1, found {found:?}")]
    BadFlag { line: usize, found: String },
    #[error("line {line}: bad duration {found:?}")]
    BadNumber { line: usize, found: String },
    #[error("line {line}: duplicate file id {file_id}")]
    DuplicateFileId { line: usize, file_id: String },
}

/// Parses `file_id core_flag [duration]` records.
pub fn load_manifest(text: &str) -> Result<Manifest, ManifestError> {
    let mut entries = BTreeMap::new();
    for (line, fields) in data_lines(text) {
        if !(2..=3).contains(&fields.len()) {
            return Err(ManifestError::FieldCount { line, found: fields.len() });
        }
        let core = match fields[1] {
            "0" => false,
            "1" => true,
            other => return Err(ManifestError::BadFlag { line, found: other.to_string() }),
        };
        let duration = match fields.get(2) {
            None => None,
            Some(raw) => match raw.parse::<Ticks>() {
                Ok(d) if d > Ticks::ZERO => Some(d),
                _ => return Err(ManifestError::BadNumber { line, found: raw.to_string() }),
            },
        };
        if entries.insert(fields[0].to_string(), ManifestEntry { core, duration }).is_some() {
            return Err(ManifestError::DuplicateFileId { line, file_id: fields[0].to_string() });
        }
    }
    Ok(Manifest { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub file_id: Option<String>,
    /// Submission source (usually a path) the finding refers to.
    pub source: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.severity)?;
        match (&self.source, self.line) {
            (Some(src), Some(line)) => write!(f, "{src}:{line}: ")?,
            (Some(src), None) => write!(f, "{src}: ")?,
            (None, Some(line)) => write!(f, "line {line}: ")?,
            (None, None) => {}
        }
        if let Some(id) = &self.file_id {
            write!(f, "[{id}] ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub verdict: Verdict,
    /// Sorted by (file id, source, line).
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Warning)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.diagnostics {
            writeln!(f, "{d}")?;
        }
        let n_err = self.errors().count();
        let n_warn = self.warnings().count();
        match self.verdict {
            Verdict::Valid => writeln!(f, "VALID ({n_warn} warnings)"),
            Verdict::Invalid => writeln!(f, "INVALID ({n_err} errors, {n_warn} warnings)"),
        }
    }
}

/// One RTTM text of a submission.
#[derive(Debug, Clone, Copy)]
pub struct SubmissionFile<'a> {
    /// Name of the source, usually its path. Its file stem names the
    /// recording when the text holds no turns.
    pub source: &'a str,
    pub text: &'a str,
}

fn stem(source: &str) -> &str {
    let base = source.rsplit(['/', '\\']).next().unwrap_or(source);
    match base.rsplit_once('.') {
        Some((s, _)) if !s.is_empty() => s,
        _ => base,
    }
}

/// Checks a submission against the manifest and, when given, the scoring
/// regions. Parsing is always strict.
pub fn validate_submission(
    files: &[SubmissionFile<'_>],
    manifest: &Manifest,
    regions: Option<&ScoringRegions>,
) -> ValidationReport {
    let mut diags = Vec::new();
    let mut present: BTreeSet<String> = BTreeSet::new();

    for file in files {
        let parsed = parse_rttm_with(file.text, Strictness::Strict);
        for err in &parsed.errors {
            let file_id = err.line().and_then(|l| line_file_id(file.text, l));
            if let Some(id) = &file_id {
                present.insert(id.clone());
            }
            diags.push(Diagnostic {
                severity: Severity::Error,
                file_id,
                source: Some(file.source.to_string()),
                line: err.line(),
                message: strip_line_prefix(&err.to_string()),
            });
        }
        if parsed.records.is_empty() && parsed.errors.is_empty() {
            let id = stem(file.source).to_string();
            diags.push(Diagnostic {
                severity: Severity::Warning,
                file_id: Some(id.clone()),
                source: Some(file.source.to_string()),
                line: None,
                message: "no speaker turns; treated as empty system output".into(),
            });
            if !manifest.contains(&id) {
                diags.push(Diagnostic {
                    severity: Severity::Error,
                    file_id: Some(id.clone()),
                    source: Some(file.source.to_string()),
                    line: None,
                    message: "empty submission file names no manifest recording".into(),
                });
            }
            present.insert(id);
            continue;
        }

        check_turns(file.source, &parsed.records, &parsed.record_lines, manifest, regions, &mut diags);
        present.extend(parsed.records.iter().map(|t| t.file_id.clone()));
    }

    for id in manifest.file_ids() {
        if !present.contains(id) {
            diags.push(Diagnostic {
                severity: Severity::Error,
                file_id: Some(id.to_string()),
                source: None,
                line: None,
                message: "missing file: no RTTM output for this recording".into(),
            });
        }
    }

    diags.sort_by(|a, b| {
        (&a.file_id, &a.source, a.line, a.severity, &a.message)
            .cmp(&(&b.file_id, &b.source, b.line, b.severity, &b.message))
    });
    diags.dedup();
    let verdict = if diags.iter().any(|d| d.severity == Severity::Error) { Verdict::Invalid } else { Verdict::Valid };
    ValidationReport { verdict, diagnostics: diags }
}

fn check_turns(
    source: &str,
    turns: &[Turn],
    lines: &[usize],
    manifest: &Manifest,
    regions: Option<&ScoringRegions>,
    diags: &mut Vec<Diagnostic>,
) {
    let diag = |severity, turn: &Turn, line: Option<usize>, message: String| Diagnostic {
        severity,
        file_id: Some(turn.file_id.clone()),
        source: Some(source.to_string()),
        line,
        message,
    };

    let mut by_speaker: BTreeMap<(&str, &str), Vec<(Interval, usize)>> = BTreeMap::new();
    for (turn, &line) in turns.iter().zip(lines) {
        let Some(entry) = manifest.get(&turn.file_id) else {
            diags.push(diag(Severity::Error, turn, Some(line), "file id not in manifest".into()));
            continue;
        };
        let region_tl: Option<Timeline> = regions.and_then(|r| r.timeline(&turn.file_id));
        match entry.duration {
            Some(d) if turn.offset() > d => diags.push(diag(
                Severity::Error,
                turn,
                Some(line),
                format!("turn ends at {} beyond recording duration {}", turn.offset(), d),
            )),
            None => {
                if let Some(end) = region_tl.as_ref().and_then(Timeline::extent).map(|e| e.offset()) {
                    if turn.offset() > end {
                        diags.push(diag(
                            Severity::Warning,
                            turn,
                            Some(line),
                            format!("turn ends at {} beyond last scoring region {}", turn.offset(), end),
                        ));
                    }
                }
            }
            _ => {}
        }
        let Some(iv) = turn.interval() else { continue };
        if let Some(tl) = &region_tl {
            if Timeline::single(iv).intersect(tl).is_empty() {
                diags.push(diag(
                    Severity::Warning,
                    turn,
                    Some(line),
                    "turn lies entirely outside scoring regions".into(),
                ));
            }
        }
        by_speaker.entry((&turn.file_id, &turn.speaker)).or_default().push((iv, line));
    }

    for ((file_id, speaker), mut spans) in by_speaker {
        spans.sort();
        let mut reach: Option<Ticks> = None;
        for (iv, line) in spans {
            if reach.is_some_and(|end| iv.onset() < end) {
                diags.push(Diagnostic {
                    severity: Severity::Warning,
                    file_id: Some(file_id.to_string()),
                    source: Some(source.to_string()),
                    line: Some(line),
                    message: format!(
                        "speaker {speaker} overlaps an earlier turn of the same speaker; merged when scoring"
                    ),
                });
            }
            reach = Some(reach.map_or(iv.offset(), |r| r.max(iv.offset())));
        }
    }
}

fn line_file_id(text: &str, line: usize) -> Option<String> {
    let raw = text.lines().nth(line - 1)?;
    raw.split_ascii_whitespace().nth(1).map(str::to_string)
}

fn strip_line_prefix(msg: &str) -> String {
    match msg.split_once(": ") {
        Some((head, rest)) if head.starts_with("line ") => rest.to_string(),
        _ => msg.to_string(),
    }
}
