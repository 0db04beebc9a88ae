use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_overlap_matrix, compute_der, compute_jer, optimal_mapping, DerComponents, JerComponents, MetricError,
    SpeakerMapping, SpeakerTimelines,
};
use crate::formats::{ScoringRegions, Turn};
use crate::timeline::{Interval, Ticks, Timeline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScoreOptions {
    /// Half-width of the no-score zone around each reference boundary.
    /// Challenge scoring uses zero.
    pub collar: Ticks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileScore {
    pub file_id: String,
    pub der: DerComponents,
    pub jer: JerComponents,
    pub mapping: SpeakerMapping,
    pub n_ref_speakers: usize,
    pub n_sys_speakers: usize,
}

impl FileScore {
    pub fn der_percent(&self) -> f64 {
        self.der.der().expect("scored files have reference time")
    }
}

/// Scores one recording. `regions` of `None` scores the whole recording.
pub fn score_file(
    file_id: &str,
    ref_turns: &[Turn],
    sys_turns: &[Turn],
    regions: Option<&Timeline>,
    options: ScoreOptions,
) -> Result<FileScore, MetricError> {
    score_file_inner(ref_turns, sys_turns, regions, options).map_err(|e| e.in_file(file_id)).map(
        |(der, jer, mapping, n_ref, n_sys)| FileScore {
            file_id: file_id.to_string(),
            der,
            jer,
            mapping,
            n_ref_speakers: n_ref,
            n_sys_speakers: n_sys,
        },
    )
}

type Inner = (DerComponents, JerComponents, SpeakerMapping, usize, usize);

fn score_file_inner(
    ref_turns: &[Turn],
    sys_turns: &[Turn],
    regions: Option<&Timeline>,
    options: ScoreOptions,
) -> Result<Inner, MetricError> {
    if options.collar.is_negative() {
        return Err(MetricError::NegativeCollar(options.collar));
    }
    let mut reference = SpeakerTimelines::from_turns(ref_turns);
    let mut system = SpeakerTimelines::from_turns(sys_turns);

    let scored = if options.collar > Ticks::ZERO {
        let base = match regions {
            Some(r) => r.clone(),
            None => reference.union().union(&system.union()).extent().map(Timeline::single).unwrap_or_default(),
        };
        Some(base.subtract(&collar_zone(&reference, options.collar)))
    } else {
        regions.cloned()
    };
    if let Some(scored) = &scored {
        reference = reference.clip(scored);
        system = system.clip(scored);
    }

    let mapping = optimal_mapping(&build_overlap_matrix(&reference, &system));
    let der = compute_der(&reference, &system, &mapping)?;
    let jer = compute_jer(&reference, &system, &mapping)?;
    Ok((der, jer, mapping, reference.len(), system.len()))
}

fn collar_zone(reference: &SpeakerTimelines, collar: Ticks) -> Timeline {
    let zones = reference
        .iter()
        .flat_map(|(_, tl)| tl.intervals().iter().flat_map(|iv| [iv.onset(), iv.offset()]))
        .filter_map(|b| Interval::new((b - collar).max(Ticks::ZERO), b + collar).ok())
        .collect();
    Timeline::from_intervals(zones)
}

/// Turns grouped by file id. A file present with no turns is an explicit
/// empty output.
#[derive(Debug, Clone, Default)]
pub struct CorpusInput {
    pub reference: BTreeMap<String, Vec<Turn>>,
    pub system: BTreeMap<String, Vec<Turn>>,
    pub regions: Option<ScoringRegions>,
    /// File ids of the core subset, if one is reported.
    pub core: Option<BTreeSet<String>>,
}

impl CorpusInput {
    pub fn group(turns: impl IntoIterator<Item = Turn>) -> BTreeMap<String, Vec<Turn>> {
        let mut out: BTreeMap<String, Vec<Turn>> = BTreeMap::new();
        for t in turns {
            out.entry(t.file_id.clone()).or_default().push(t);
        }
        out
    }

    pub fn from_turns(reference: Vec<Turn>, system: Vec<Turn>) -> Self {
        CorpusInput { reference: Self::group(reference), system: Self::group(system), ..Default::default() }
    }
}

/// Pooled results over a set of files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n_files: usize,
    pub n_ref_speakers: usize,
    pub n_sys_speakers: usize,
    pub components: DerComponents,
    /// Pooled: summed errors over summed reference time.
    pub der: f64,
    /// Mean JER over every reference speaker of every file.
    pub jer: f64,
}

impl Aggregate {
    pub fn over<'a>(files: impl IntoIterator<Item = &'a FileScore>) -> Option<Aggregate> {
        let files: Vec<&FileScore> = files.into_iter().collect();
        if files.is_empty() {
            return None;
        }
        let components: DerComponents = files.iter().map(|f| f.der).sum();
        let speaker_jers: Vec<f64> = files.iter().flat_map(|f| f.jer.speakers.iter().map(|s| s.jer)).collect();
        Some(Aggregate {
            n_files: files.len(),
            n_ref_speakers: files.iter().map(|f| f.n_ref_speakers).sum(),
            n_sys_speakers: files.iter().map(|f| f.n_sys_speakers).sum(),
            components,
            der: components.der()?,
            jer: speaker_jers.iter().sum::<f64>() / speaker_jers.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusScore {
    /// Sorted by file id.
    pub files: Vec<FileScore>,
    pub overall: Option<Aggregate>,
    pub core: Option<Aggregate>,
}

/// Scores every reference file, one task per file.
pub fn score_corpus(input: &CorpusInput, options: ScoreOptions) -> Result<CorpusScore, MetricError> {
    if let Some(extra) = input.system.keys().find(|k| !input.reference.contains_key(*k)) {
        return Err(MetricError::UnexpectedSystemFile(extra.clone()));
    }
    let mut jobs = Vec::with_capacity(input.reference.len());
    for (file_id, ref_turns) in &input.reference {
        let sys_turns = input.system.get(file_id).ok_or_else(|| MetricError::MissingFile(file_id.clone()))?;
        let regions = match &input.regions {
            Some(r) => Some(r.timeline(file_id).ok_or_else(|| MetricError::MissingRegions(file_id.clone()))?),
            None => None,
        };
        jobs.push((file_id, ref_turns, sys_turns, regions));
    }

    let results: Vec<Result<FileScore, MetricError>> =
        jobs.par_iter().map(|(file_id, r, s, regions)| score_file(file_id, r, s, regions.as_ref(), options)).collect();
    let files = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let overall = Aggregate::over(&files);
    let core = input.core.as_ref().and_then(|core| Aggregate::over(files.iter().filter(|f| core.contains(&f.file_id))));
    Ok(CorpusScore { files, overall, core })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn turn(file: &str, onset: f64, dur: f64, spk: &str) -> Turn {
        Turn::new(file, Ticks::from_secs_f64(onset), Ticks::from_secs_f64(dur), spk)
    }

    #[test]
    fn identical_file_scores_zero() {
        let r = vec![turn("f", 0.0, 3.0, "a"), turn("f", 2.0, 4.0, "b")];
        let s = score_file("f", &r, &r, None, ScoreOptions::default()).unwrap();
        assert_eq!(s.der_percent(), 0.0);
        assert_eq!(s.jer.jer, 0.0);
    }

    #[test]
    fn empty_system_is_full_error() {
        let r = vec![turn("f", 0.0, 10.0, "A")];
        let s = score_file("f", &r, &[], None, ScoreOptions::default()).unwrap();
        assert_eq!(s.der_percent(), 100.0);
        assert_eq!(s.jer.jer, 100.0);
    }

    #[test]
    fn regions_clip_both_sides() {
        let r = vec![turn("f", 100.0, 100.0, "A")];
        let s = vec![turn("f", 100.0, 50.0, "x")];
        let regions = Timeline::single(Interval::from_secs(0.0, 150.0).unwrap());
        let score = score_file("f", &r, &s, Some(&regions), ScoreOptions::default()).unwrap();
        assert_eq!(score.der.total, Ticks::from_secs(50));
        assert_eq!(score.der_percent(), 0.0);
    }

    #[test]
    fn reference_outside_regions_is_error_with_context() {
        let r = vec![turn("f", 100.0, 10.0, "A")];
        let regions = Timeline::single(Interval::from_secs(0.0, 50.0).unwrap());
        let err = score_file("f", &r, &r, Some(&regions), ScoreOptions::default()).unwrap_err();
        assert_eq!(err.to_string(), "f: no scored reference speech; error rate is undefined");
    }

    #[test]
    fn collar_removes_boundary_time() {
        let r = vec![turn("f", 10.0, 10.0, "A")];
        let s = vec![turn("f", 10.2, 9.6, "x")];
        let strict = score_file("f", &r, &s, None, ScoreOptions::default()).unwrap();
        assert!(strict.der_percent() > 0.0);
        let forgiving = score_file("f", &r, &s, None, ScoreOptions { collar: Ticks::from_millis(250) }).unwrap();
        assert_eq!(forgiving.der.errors(), Ticks::ZERO);
        assert_eq!(forgiving.der.total, Ticks::from_secs_f64(9.5));
        assert!(score_file("f", &r, &s, None, ScoreOptions { collar: Ticks(-1) }).is_err());
    }

    #[test]
    fn pooled_overall() {
        // file1: perfect, 10 s. file2: 20 s of reference with 6 s missed.
        let reference = vec![turn("f1", 0.0, 10.0, "A"), turn("f2", 0.0, 20.0, "A")];
        let system = vec![turn("f1", 0.0, 10.0, "x"), turn("f2", 0.0, 14.0, "x")];
        let corpus = score_corpus(&CorpusInput::from_turns(reference, system), ScoreOptions::default()).unwrap();
        assert_eq!(corpus.files[0].der_percent(), 0.0);
        assert_eq!(corpus.files[1].der_percent(), 30.0);
        let overall = corpus.overall.unwrap();
        assert_eq!(overall.der, 20.0);
        assert_eq!(overall.n_files, 2);
    }

    #[test]
    fn single_file_overall_matches_file() {
        let reference = vec![turn("f1", 0.0, 10.0, "A"), turn("f1", 10.0, 10.0, "B")];
        let system = vec![turn("f1", 0.0, 12.0, "x")];
        let corpus = score_corpus(&CorpusInput::from_turns(reference, system), ScoreOptions::default()).unwrap();
        let overall = corpus.overall.unwrap();
        assert_eq!(overall.der, corpus.files[0].der_percent());
        assert_eq!(overall.jer, corpus.files[0].jer.jer);
    }

    #[test]
    fn overall_jer_averages_speakers_not_files() {
        // f1: one speaker, JER 0. f2: two speakers, JER 0 and 100.
        let reference = vec![turn("f1", 0.0, 10.0, "A"), turn("f2", 0.0, 10.0, "A"), turn("f2", 10.0, 10.0, "B")];
        let system = vec![turn("f1", 0.0, 10.0, "x"), turn("f2", 0.0, 10.0, "x")];
        let corpus = score_corpus(&CorpusInput::from_turns(reference, system), ScoreOptions::default()).unwrap();
        assert_eq!(corpus.files[1].jer.jer, 50.0);
        assert!((corpus.overall.unwrap().jer - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn core_subset_aggregate() {
        let reference = vec![turn("f1", 0.0, 10.0, "A"), turn("f2", 0.0, 20.0, "A")];
        let system = vec![turn("f1", 0.0, 10.0, "x"), turn("f2", 0.0, 14.0, "x")];
        let mut input = CorpusInput::from_turns(reference, system);
        input.core = Some(["f2".to_string()].into());
        let corpus = score_corpus(&input, ScoreOptions::default()).unwrap();
        let core = corpus.core.unwrap();
        assert_eq!(core.n_files, 1);
        assert_eq!(core.der, 30.0);
    }

    #[test]
    fn missing_and_unexpected_files() {
        let reference = vec![turn("f1", 0.0, 10.0, "A"), turn("f2", 0.0, 20.0, "A")];
        let system = vec![turn("f1", 0.0, 10.0, "x")];
        let err = score_corpus(&CorpusInput::from_turns(reference.clone(), system), ScoreOptions::default());
        assert_eq!(err.unwrap_err(), MetricError::MissingFile("f2".into()));

        let system = vec![turn("f1", 0.0, 10.0, "x"), turn("f2", 0.0, 1.0, "x"), turn("f3", 0.0, 1.0, "x")];
        let err = score_corpus(&CorpusInput::from_turns(reference, system), ScoreOptions::default());
        assert_eq!(err.unwrap_err(), MetricError::UnexpectedSystemFile("f3".into()));
    }

    #[test]
    fn missing_regions_is_error() {
        let reference = vec![turn("f1", 0.0, 10.0, "A")];
        let mut input = CorpusInput::from_turns(reference.clone(), reference);
        input.regions = Some(ScoringRegions::new());
        assert_eq!(
            score_corpus(&input, ScoreOptions::default()).unwrap_err(),
            MetricError::MissingRegions("f1".into())
        );
    }

    #[test]
    fn empty_corpus() {
        let corpus = score_corpus(&CorpusInput::default(), ScoreOptions::default()).unwrap();
        assert!(corpus.files.is_empty());
        assert!(corpus.overall.is_none());
    }
}
