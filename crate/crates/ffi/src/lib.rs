//! C ABI for `diarscore`.
//!
//! Every function returns a [`DsStatus`] or a value with a documented
//! failure sentinel. After a failure, [`ds_last_error_message`] describes
//! it. Strings returned as `char *` are owned by the caller and must be
//! released with [`ds_string_free`]. Handles are released with their
//! matching `*_free` function. Inputs are UTF-8, NUL-terminated.
//!
//! Handles are not thread-safe; use one per thread or lock externally.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use diarscore::formats::{parse_rttm_with, parse_uem, write_htk_lab, ScoringRegions, Strictness, Turn};
use diarscore::metrics::{derive_sad, score_corpus, CorpusInput, ScoreOptions};
use diarscore::reporting::{emit_machine, render_table, MachineFormat, Metadata, ReportRow, ScoreReport};
use diarscore::timeline::Ticks;
use diarscore::validation::{load_manifest, validate_submission, SubmissionFile};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An RTTM, UEM or manifest text failed to parse.
    ParseError = 3,
    /// Scoring failed: missing system output, missing UEM entry, no
    /// reference speech, ...
    ScoringError = 4,
    /// An index was past the end.
    OutOfRange = 5,
    /// A numeric argument was invalid (negative collar, NaN, ...).
    InvalidArgument = 6,
    /// The library panicked. This is a bug.
    Panic = 7,
}

/// One table row. Times are seconds, rates percent.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DsRow {
    pub der: f64,
    pub jer: f64,
    pub false_alarm: f64,
    pub miss: f64,
    pub confusion: f64,
    pub total: f64,
    pub n_files: usize,
    pub n_ref_speakers: usize,
    pub n_sys_speakers: usize,
}

impl From<&ReportRow> for DsRow {
    fn from(r: &ReportRow) -> Self {
        DsRow {
            der: r.der,
            jer: r.jer,
            false_alarm: r.false_alarm,
            miss: r.miss,
            confusion: r.confusion,
            total: r.total,
            n_files: r.n_files,
            n_ref_speakers: r.n_ref_speakers,
            n_sys_speakers: r.n_sys_speakers,
        }
    }
}

/// Accumulates scoring inputs. Opaque.
pub struct DsScorer {
    reference: Vec<Turn>,
    system: BTreeMap<String, Vec<Turn>>,
    ref_sources: Vec<String>,
    sys_sources: Vec<String>,
    regions: Option<ScoringRegions>,
    uem_source: Option<String>,
    collar: Ticks,
    strictness: Strictness,
}

/// Scores of a corpus. Opaque.
pub struct DsReport {
    report: ScoreReport,
}

struct Failure(DsStatus, String);

impl Failure {
    fn null(name: &str) -> Self {
        Failure(DsStatus::NullPointer, format!("{name} is NULL"))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            DsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(DsStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn opt_text<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, name).map(Some)
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NUL bytes removed").into_raw()
}

fn seconds(value: f64, name: &str) -> Result<Ticks, Failure> {
    if !value.is_finite() || value < 0.0 {
        return Err(Failure(DsStatus::InvalidArgument, format!("{name} must be finite and non-negative, got {value}")));
    }
    Ok(Ticks::from_secs_f64(value))
}

fn parse_turns(source: &str, rttm: &str, strictness: Strictness) -> Result<Vec<Turn>, Failure> {
    parse_rttm_with(rttm, strictness).into_result().map_err(|e| Failure(DsStatus::ParseError, format!("{source}: {e}")))
}

fn stem(source: &str) -> &str {
    let base = source.rsplit(['/', '\\']).next().unwrap_or(source);
    match base.rsplit_once('.') {
        Some((s, _)) if !s.is_empty() => s,
        _ => base,
    }
}

/// Library version, static string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next library call on this thread.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// New scorer: strict parsing, no collar, whole recordings scored.
#[no_mangle]
pub extern "C" fn ds_scorer_new() -> *mut DsScorer {
    Box::into_raw(Box::new(DsScorer {
        reference: Vec::new(),
        system: BTreeMap::new(),
        ref_sources: Vec::new(),
        sys_sources: Vec::new(),
        regions: None,
        uem_source: None,
        collar: Ticks::ZERO,
        strictness: Strictness::Strict,
    }))
}

#[no_mangle]
pub unsafe extern "C" fn ds_scorer_free(scorer: *mut DsScorer) {
    if !scorer.is_null() {
        drop(Box::from_raw(scorer));
    }
}

/// Downgrades RTTM tag, channel and placeholder deviations to warnings.
/// Affects texts added afterwards.
#[no_mangle]
pub unsafe extern "C" fn ds_scorer_set_lenient(scorer: *mut DsScorer, lenient: bool) -> DsStatus {
    guard(|| {
        let s = scorer.as_mut().ok_or(Failure::null("scorer"))?;
        s.strictness = if lenient { Strictness::Lenient } else { Strictness::Strict };
        Ok(())
    })
}

/// Collar in seconds around reference boundaries. Zero (the default) is
/// the challenge setting.
#[no_mangle]
pub unsafe extern "C" fn ds_scorer_set_collar(scorer: *mut DsScorer, collar_seconds: f64) -> DsStatus {
    guard(|| {
        let s = scorer.as_mut().ok_or(Failure::null("scorer"))?;
        s.collar = seconds(collar_seconds, "collar")?;
        Ok(())
    })
}

/// Adds one reference RTTM text. `source` names it in diagnostics and may
/// be NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_scorer_add_reference(
    scorer: *mut DsScorer,
    source: *const c_char,
    rttm: *const c_char,
) -> DsStatus {
    guard(|| {
        let s = scorer.as_mut().ok_or(Failure::null("scorer"))?;
        let source = opt_text(source, "source")?.unwrap_or("<reference>");
        let turns = parse_turns(source, text(rttm, "rttm")?, s.strictness)?;
        s.reference.extend(turns);
        s.ref_sources.push(source.to_string());
        Ok(())
    })
}

/// Adds one system RTTM text. A text with no turns declares empty output
/// for the recording named by the file stem of `source`, which must then
/// be non-NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_scorer_add_system(
    scorer: *mut DsScorer,
    source: *const c_char,
    rttm: *const c_char,
) -> DsStatus {
    guard(|| {
        let s = scorer.as_mut().ok_or(Failure::null("scorer"))?;
        let name = opt_text(source, "source")?;
        let turns = parse_turns(name.unwrap_or("<system>"), text(rttm, "rttm")?, s.strictness)?;
        if turns.is_empty() {
            let name = name.ok_or(Failure(
                DsStatus::InvalidArgument,
                "system text has no turns and no source to name its recording".to_string(),
            ))?;
            s.system.entry(stem(name).to_string()).or_default();
        }
        for t in turns {
            s.system.entry(t.file_id.clone()).or_default().push(t);
        }
        s.sys_sources.push(name.unwrap_or("<system>").to_string());
        Ok(())
    })
}

/// Sets the scoring regions from UEM text, replacing earlier ones.
#[no_mangle]
pub unsafe extern "C" fn ds_scorer_set_uem(
    scorer: *mut DsScorer,
    source: *const c_char,
    uem: *const c_char,
) -> DsStatus {
    guard(|| {
        let s = scorer.as_mut().ok_or(Failure::null("scorer"))?;
        let source = opt_text(source, "source")?.unwrap_or("<uem>");
        let regions =
            parse_uem(text(uem, "uem")?).map_err(|e| Failure(DsStatus::ParseError, format!("{source}: {e}")))?;
        s.regions = Some(regions);
        s.uem_source = Some(source.to_string());
        Ok(())
    })
}

/// Scores everything added so far. On success `*out` receives a report to
/// release with [`ds_report_free`].
#[no_mangle]
pub unsafe extern "C" fn ds_scorer_run(scorer: *const DsScorer, out: *mut *mut DsReport) -> DsStatus {
    guard(|| {
        let s = scorer.as_ref().ok_or(Failure::null("scorer"))?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let input = CorpusInput {
            reference: CorpusInput::group(s.reference.iter().cloned()),
            system: s.system.clone(),
            regions: s.regions.clone(),
            core: None,
        };
        let score = score_corpus(&input, ScoreOptions { collar: s.collar })
            .map_err(|e| Failure(DsStatus::ScoringError, e.to_string()))?;
        let metadata = Metadata {
            collar: s.collar.as_secs_f64(),
            uem: s.uem_source.clone(),
            reference: s.ref_sources.clone(),
            system: s.sys_sources.clone(),
            ..Metadata::with_version()
        };
        *out = Box::into_raw(Box::new(DsReport { report: ScoreReport::new(&score, metadata) }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ds_report_free(report: *mut DsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of scored files; 0 for a NULL report.
#[no_mangle]
pub unsafe extern "C" fn ds_report_file_count(report: *const DsReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.files.len())
}

/// Id of the file at `index` (files are in name order), or NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_report_file_id(report: *const DsReport, index: usize) -> *mut c_char {
    let mut id = None;
    let status = guard(|| {
        let r = report.as_ref().ok_or(Failure::null("report"))?;
        let row =
            r.report.files.get(index).ok_or(Failure(DsStatus::OutOfRange, format!("no file at index {index}")))?;
        id = Some(row.file_id.clone());
        Ok(())
    });
    match (status, id) {
        (DsStatus::Ok, Some(id)) => into_c_string(id),
        _ => ptr::null_mut(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn ds_report_file_row(report: *const DsReport, index: usize, out: *mut DsRow) -> DsStatus {
    guard(|| {
        let r = report.as_ref().ok_or(Failure::null("report"))?;
        let out = out.as_mut().ok_or(Failure::null("out"))?;
        let row =
            r.report.files.get(index).ok_or(Failure(DsStatus::OutOfRange, format!("no file at index {index}")))?;
        *out = row.into();
        Ok(())
    })
}

/// Pooled DER and speaker-averaged JER over all files.
#[no_mangle]
pub unsafe extern "C" fn ds_report_overall_row(report: *const DsReport, out: *mut DsRow) -> DsStatus {
    guard(|| {
        let r = report.as_ref().ok_or(Failure::null("report"))?;
        let out = out.as_mut().ok_or(Failure::null("out"))?;
        let row = r.report.overall.as_ref().ok_or(Failure(DsStatus::OutOfRange, "no files scored".to_string()))?;
        *out = row.into();
        Ok(())
    })
}

unsafe fn render(report: *const DsReport, f: impl FnOnce(&ScoreReport) -> String) -> *mut c_char {
    let mut rendered = None;
    let status = guard(|| {
        let r = report.as_ref().ok_or(Failure::null("report"))?;
        rendered = Some(f(&r.report));
        Ok(())
    });
    match (status, rendered) {
        (DsStatus::Ok, Some(s)) => into_c_string(s),
        _ => ptr::null_mut(),
    }
}

/// Fixed-width text table, or NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_report_table(report: *const DsReport) -> *mut c_char {
    render(report, render_table)
}

/// JSON document with full precision, or NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_report_json(report: *const DsReport) -> *mut c_char {
    render(report, |r| emit_machine(r, MachineFormat::Json))
}

/// CSV with a header row, or NULL.
#[no_mangle]
pub unsafe extern "C" fn ds_report_csv(report: *const DsReport) -> *mut c_char {
    render(report, |r| emit_machine(r, MachineFormat::Csv))
}

/// Validates a submission of `count` RTTM texts against a manifest.
///
/// `sources[i]` names `texts[i]`; `uem` may be NULL. On success `*valid`
/// holds the verdict and `*report_text` the human-readable diagnostics.
#[no_mangle]
pub unsafe extern "C" fn ds_validate(
    manifest: *const c_char,
    sources: *const *const c_char,
    texts: *const *const c_char,
    count: usize,
    uem: *const c_char,
    valid: *mut bool,
    report_text: *mut *mut c_char,
) -> DsStatus {
    guard(|| {
        let manifest = load_manifest(text(manifest, "manifest")?)
            .map_err(|e| Failure(DsStatus::ParseError, format!("manifest: {e}")))?;
        let regions = match opt_text(uem, "uem")? {
            Some(u) => Some(parse_uem(u).map_err(|e| Failure(DsStatus::ParseError, format!("uem: {e}")))?),
            None => None,
        };
        if count > 0 && (sources.is_null() || texts.is_null()) {
            return Err(Failure::null("sources/texts"));
        }
        if valid.is_null() || report_text.is_null() {
            return Err(Failure::null("valid/report_text"));
        }
        let mut files = Vec::with_capacity(count);
        for i in 0..count {
            files.push(SubmissionFile {
                source: text(*sources.add(i), &format!("sources[{i}]"))?,
                text: text(*texts.add(i), &format!("texts[{i}]"))?,
            });
        }
        let report = validate_submission(&files, &manifest, regions.as_ref());
        *valid = report.is_valid();
        *report_text = into_c_string(report.to_string());
        Ok(())
    })
}

/// Speech segments of recording `file_id` in label-file form: the union
/// of its reference turns with pauses up to `max_gap_seconds` bridged.
#[no_mangle]
pub unsafe extern "C" fn ds_derive_sad(
    rttm: *const c_char,
    file_id: *const c_char,
    max_gap_seconds: f64,
    out: *mut *mut c_char,
) -> DsStatus {
    guard(|| {
        let turns = parse_turns("rttm", text(rttm, "rttm")?, Strictness::Strict)?;
        let file_id = text(file_id, "file_id")?;
        let max_gap = seconds(max_gap_seconds, "max_gap")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let mine: Vec<Turn> = turns.into_iter().filter(|t| t.file_id == file_id).collect();
        let segments = derive_sad(&mine, max_gap).map_err(|e| Failure(DsStatus::InvalidArgument, e.to_string()))?;
        let lab = write_htk_lab(&segments).expect("derived segments are disjoint speech");
        *out = into_c_string(lab);
        Ok(())
    })
}
