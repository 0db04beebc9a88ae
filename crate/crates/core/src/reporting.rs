//! Score tables for people and JSON/CSV documents for machines.
//!
//! Tables show two decimals; machine output keeps full precision.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::metrics::{Aggregate, CorpusScore, DerComponents, FileScore};

pub const OVERALL_LABEL: &str = "OVERALL";
pub const CORE_OVERALL_LABEL: &str = "CORE-OVERALL";

/// One table row. Times are in seconds, rates in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub file_id: String,
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

impl ReportRow {
    fn times(c: &DerComponents) -> (f64, f64, f64, f64) {
        (c.false_alarm.as_secs_f64(), c.miss.as_secs_f64(), c.confusion.as_secs_f64(), c.total.as_secs_f64())
    }

    pub fn from_file(f: &FileScore) -> Self {
        let (false_alarm, miss, confusion, total) = Self::times(&f.der);
        ReportRow {
            file_id: f.file_id.clone(),
            der: f.der_percent(),
            jer: f.jer.jer,
            false_alarm,
            miss,
            confusion,
            total,
            n_files: 1,
            n_ref_speakers: f.n_ref_speakers,
            n_sys_speakers: f.n_sys_speakers,
        }
    }

    pub fn from_aggregate(label: &str, a: &Aggregate) -> Self {
        let (false_alarm, miss, confusion, total) = Self::times(&a.components);
        ReportRow {
            file_id: label.to_string(),
            der: a.der,
            jer: a.jer,
            false_alarm,
            miss,
            confusion,
            total,
            n_files: a.n_files,
            n_ref_speakers: a.n_ref_speakers,
            n_sys_speakers: a.n_sys_speakers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Metadata {
    /// Collar in seconds.
    pub collar: f64,
    pub uem: Option<String>,
    pub reference: Vec<String>,
    pub system: Vec<String>,
    pub tool_version: String,
}

impl Metadata {
    pub fn with_version() -> Self {
        Metadata { tool_version: env!("CARGO_PKG_VERSION").to_string(), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub metadata: Metadata,
    /// Sorted by file id.
    pub files: Vec<ReportRow>,
    pub overall: Option<ReportRow>,
    pub core_overall: Option<ReportRow>,
}

impl ScoreReport {
    pub fn new(score: &CorpusScore, metadata: Metadata) -> Self {
        let mut files: Vec<ReportRow> = score.files.iter().map(ReportRow::from_file).collect();
        files.sort_by(|a, b| a.file_id.cmp(&b.file_id));
        ScoreReport {
            metadata,
            files,
            overall: score.overall.as_ref().map(|a| ReportRow::from_aggregate(OVERALL_LABEL, a)),
            core_overall: score.core.as_ref().map(|a| ReportRow::from_aggregate(CORE_OVERALL_LABEL, a)),
        }
    }

    /// File rows followed by OVERALL and CORE-OVERALL when present.
    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.files.iter().chain(self.overall.as_ref()).chain(self.core_overall.as_ref())
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineFormat {
    Json,
    Csv,
}

const HEADERS: [&str; 9] = ["DER", "JER", "FA", "MISS", "ERROR", "TOTAL", "FILES", "REF", "SYS"];
const NUM_WIDTH: usize = 9;

/// Two-decimal display used by the table.
pub fn display2(v: f64) -> String {
    format!("{v:.2}")
}

/// Fixed-width table: file rows in name order, then OVERALL and
/// CORE-OVERALL.
pub fn render_table(report: &ScoreReport) -> String {
    let name_width = report.rows().map(|r| r.file_id.len()).chain([4, OVERALL_LABEL.len()]).max().unwrap_or(4);
    let rule_width = name_width + HEADERS.len() * (NUM_WIDTH + 1);

    let mut out = String::new();
    write!(out, "{:<name_width$}", "File").unwrap();
    for h in HEADERS {
        write!(out, " {h:>NUM_WIDTH$}").unwrap();
    }
    out.push('\n');
    out.push_str(&"-".repeat(rule_width));
    out.push('\n');

    if report.files.is_empty() {
        out.push_str("(no files scored)\n");
        return out;
    }

    for row in &report.files {
        push_row(&mut out, row, name_width);
    }
    if report.overall.is_some() || report.core_overall.is_some() {
        out.push_str(&"-".repeat(rule_width));
        out.push('\n');
        for row in report.overall.iter().chain(report.core_overall.iter()) {
            push_row(&mut out, row, name_width);
        }
    }
    out
}

fn push_row(out: &mut String, row: &ReportRow, name_width: usize) {
    write!(out, "{:<name_width$}", row.file_id).unwrap();
    for v in [row.der, row.jer, row.false_alarm, row.miss, row.confusion, row.total] {
        write!(out, " {:>NUM_WIDTH$}", display2(v)).unwrap();
    }
    for n in [row.n_files, row.n_ref_speakers, row.n_sys_speakers] {
        write!(out, " {n:>NUM_WIDTH$}").unwrap();
    }
    out.push('\n');
}

pub const CSV_HEADER: [&str; 10] = [
    "file_id",
    "der",
    "jer",
    "false_alarm",
    "miss",
    "confusion",
    "total",
    "n_files",
    "n_ref_speakers",
    "n_sys_speakers",
];

/// Full-precision JSON or CSV.
pub fn emit_machine(report: &ScoreReport, format: MachineFormat) -> String {
    match format {
        MachineFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        MachineFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            for row in report.rows() {
                w.serialize(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
        }
    }
}

/// Reads rows back from [`emit_machine`]'s CSV output.
pub fn read_csv_rows(text: &str) -> csv::Result<Vec<ReportRow>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Turn;
    use crate::metrics::{score_corpus, CorpusInput, ScoreOptions};
    use crate::timeline::Ticks;

    fn turn(file: &str, onset: f64, dur: f64, spk: &str) -> Turn {
        Turn::new(file, Ticks::from_secs_f64(onset), Ticks::from_secs_f64(dur), spk)
    }

    fn report(core: bool) -> ScoreReport {
        let reference = vec![turn("f1", 0.0, 10.0, "A"), turn("f2", 0.0, 20.0, "A"), turn("f2", 20.0, 1.0, "B")];
        let system = vec![turn("f1", 0.0, 8.0, "x"), turn("f2", 0.0, 14.0, "x")];
        let mut input = CorpusInput::from_turns(reference, system);
        if core {
            input.core = Some(["f1".to_string()].into());
        }
        let score = score_corpus(&input, ScoreOptions::default()).unwrap();
        ScoreReport::new(&score, Metadata::with_version())
    }

    fn empty_report() -> ScoreReport {
        ScoreReport { metadata: Metadata::default(), files: vec![], overall: None, core_overall: None }
    }

    #[test]
    fn single_file_table() {
        let score = score_corpus(
            &CorpusInput::from_turns(vec![turn("f1", 0.0, 10.0, "A")], vec![turn("f1", 0.0, 8.0, "x")]),
            ScoreOptions::default(),
        )
        .unwrap();
        let table = render_table(&ScoreReport::new(&score, Metadata::default()));
        let expected = "\
File          DER       JER        FA      MISS     ERROR     TOTAL     FILES       REF       SYS
-------------------------------------------------------------------------------------------------
f1          20.00     20.00      0.00      2.00      0.00     10.00         1         1         1
-------------------------------------------------------------------------------------------------
OVERALL     20.00     20.00      0.00      2.00      0.00     10.00         1         1         1
";
        assert_eq!(table, expected);
    }

    #[test]
    fn empty_table_has_notice() {
        let table = render_table(&empty_report());
        assert!(table.starts_with("File "));
        assert!(table.ends_with("(no files scored)\n"));
    }

    #[test]
    fn core_row_in_table() {
        let table = render_table(&report(true));
        let last = table.lines().last().unwrap();
        assert!(last.starts_with("CORE-OVERALL "), "{table}");
        assert_eq!(table.lines().count(), 2 + 2 + 1 + 2);
    }

    #[test]
    fn json_round_trip() {
        for r in [report(true), report(false), empty_report()] {
            let text = emit_machine(&r, MachineFormat::Json);
            assert_eq!(ScoreReport::from_json(&text).unwrap(), r);
        }
    }

    #[test]
    fn csv_rows_and_precision() {
        let r = report(false);
        let text = emit_machine(&r, MachineFormat::Csv);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        let rows = read_csv_rows(&text).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].file_id, OVERALL_LABEL);
        assert_eq!(rows, r.rows().cloned().collect::<Vec<_>>());

        let empty = emit_machine(&empty_report(), MachineFormat::Csv);
        assert_eq!(empty.lines().count(), 1);
        assert!(read_csv_rows(&empty).unwrap().is_empty());
    }

    #[test]
    fn table_matches_machine_values() {
        let r = report(true);
        let table = render_table(&r);
        let body = table.lines().skip(2).filter(|l| !l.starts_with('-'));
        for (line, row) in body.zip(r.rows()) {
            let cols: Vec<&str> = line.split_whitespace().collect();
            assert_eq!(cols[0], row.file_id);
            assert_eq!(cols[1], display2(row.der));
            assert_eq!(cols[2], display2(row.jer));
            assert_eq!(cols[6], display2(row.total));
        }
    }

    #[test]
    fn overall_der_recomputable_from_rows() {
        let r = report(false);
        let (e, t) = r
            .files
            .iter()
            .fold((0.0, 0.0), |(e, t), row| (e + row.false_alarm + row.miss + row.confusion, t + row.total));
        assert!((100.0 * e / t - r.overall.as_ref().unwrap().der).abs() < 1e-6);
    }

    #[test]
    fn render_is_deterministic() {
        assert_eq!(render_table(&report(true)), render_table(&report(true)));
        assert_eq!(emit_machine(&report(true), MachineFormat::Json), emit_machine(&report(true), MachineFormat::Json));
    }
}
