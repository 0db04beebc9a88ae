//! `diarscore` command line: `score`, `validate` and `derive-sad`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (for `validate`: submission valid) |
//! | 1 | usage, I/O or parse failure |
//! | 2 | scoring failure (missing file pairing, missing UEM entry, ...) |
//! | 3 | `validate`: submission invalid |
//!
//! Results go to stdout, diagnostics to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::formats::{parse_rttm_with, parse_uem, write_htk_lab, ScoringRegions, Strictness, Turn};
use crate::metrics::{derive_sad, score_corpus, CorpusInput, ScoreOptions};
use crate::reporting::{emit_machine, render_table, MachineFormat, Metadata, ScoreReport};
use crate::timeline::Ticks;
use crate::validation::{load_manifest, validate_submission, Manifest, SubmissionFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_SCORING: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

/// Environment variable capping the number of scoring worker threads.
pub const JOBS_ENV: &str = "DIARSCORE_JOBS";

#[derive(Debug, Parser)]
#[command(name = "diarscore", version, about = "Speaker diarization scoring (DER/JER)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score system RTTMs against reference RTTMs.
    Score(ScoreArgs),
    /// Check a submission for completeness and well-formedness.
    Validate(ValidateArgs),
    /// Write speech-activity label files derived from reference RTTMs.
    DeriveSad(DeriveSadArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// UEM file with scoring regions; without it whole recordings are scored.
    #[arg(short = 'u', long = "uem")]
    pub uem: Option<PathBuf>,
    /// Reference RTTM files.
    #[arg(short = 'r', long = "ref", required = true, num_args = 1..)]
    pub reference: Vec<PathBuf>,
    /// System RTTM files.
    #[arg(short = 's', long = "sys", required = true, num_args = 1..)]
    pub system: Vec<PathBuf>,
    /// Manifest; its core flags add a CORE-OVERALL row.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Challenge mode: UEM required, no collar.
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,
    /// Downgrade RTTM tag/channel/placeholder deviations to warnings.
    #[arg(long)]
    pub lenient: bool,
    /// Forgiveness collar in seconds (research use only; not challenge compliant).
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub collar: Ticks,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Submission RTTM files.
    #[arg(short = 's', long = "sys", required = true, num_args = 1..)]
    pub system: Vec<PathBuf>,
    /// UEM file; enables scoring-region checks.
    #[arg(short = 'u', long = "uem")]
    pub uem: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeriveSadArgs {
    /// Reference RTTM files.
    #[arg(short = 'r', long = "ref", required = true, num_args = 1..)]
    pub reference: Vec<PathBuf>,
    /// Directory receiving one `<file_id>.lab` per recording.
    #[arg(short = 'o', long = "out-dir")]
    pub out_dir: PathBuf,
    /// Bridge pauses up to this many seconds.
    #[arg(long, default_value = "0", allow_negative_numbers = true)]
    pub max_gap: Ticks,
    #[arg(long)]
    pub lenient: bool,
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Score(a) => run_score(a, stdout, stderr),
        Command::Validate(a) => run_validate(a, stdout),
        Command::DeriveSad(a) => run_derive_sad(a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Parses RTTM files; warnings go to stderr, the first error aborts.
/// Returns turns per path.
fn read_rttms(paths: &[PathBuf], strictness: Strictness, stderr: &mut dyn Write) -> Result<Vec<Vec<Turn>>, Failure> {
    paths
        .iter()
        .map(|p| {
            let parsed = parse_rttm_with(&read(p)?, strictness);
            for w in &parsed.warnings {
                let _ = writeln!(stderr, "warning: {}:{}: {}", p.display(), w.line, w.message);
            }
            parsed.into_result().map_err(|e| Failure::io(format!("{}: {e}", p.display())))
        })
        .collect()
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn jobs_pool(stderr: &mut dyn Write) -> Option<rayon::ThreadPool> {
    let raw = std::env::var(JOBS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => rayon::ThreadPoolBuilder::new().num_threads(n).build().ok(),
        _ => {
            let _ = writeln!(stderr, "warning: ignoring {JOBS_ENV}={raw:?}");
            None
        }
    }
}

fn run_score(args: &ScoreArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    if args.collar.is_negative() {
        return Err(Failure::io(format!("collar must be non-negative, got {}", args.collar)));
    }
    if args.strict {
        if args.uem.is_none() {
            return Err(Failure::io("--strict requires a UEM file (-u)"));
        }
        if args.collar != Ticks::ZERO {
            return Err(Failure::io("--strict scoring does not allow a collar"));
        }
    }
    if args.collar != Ticks::ZERO {
        let _ = writeln!(
            stderr,
            "warning: scoring with a {} s collar; results are not comparable to zero-collar challenge scoring",
            args.collar
        );
    }
    let strictness = if args.lenient { Strictness::Lenient } else { Strictness::Strict };

    let reference = read_rttms(&args.reference, strictness, stderr)?;
    let system = read_rttms(&args.system, strictness, stderr)?;

    let mut input =
        CorpusInput { reference: CorpusInput::group(reference.into_iter().flatten()), ..Default::default() };
    let mut sys_groups: BTreeMap<String, Vec<Turn>> = BTreeMap::new();
    for (path, turns) in args.system.iter().zip(system) {
        if turns.is_empty() {
            let id = stem(path);
            let _ = writeln!(stderr, "warning: {}: no turns; treating {id} as empty system output", path.display());
            sys_groups.entry(id).or_default();
        }
        for t in turns {
            sys_groups.entry(t.file_id.clone()).or_default().push(t);
        }
    }
    input.system = sys_groups;

    if let Some(p) = &args.uem {
        let regions: ScoringRegions = parse_uem(&read(p)?).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?;
        input.regions = Some(regions);
    }
    if let Some(p) = &args.manifest {
        let manifest = load_manifest(&read(p)?).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?;
        input.core = Some(manifest.core_ids());
    }

    let options = ScoreOptions { collar: args.collar };
    let scored = match jobs_pool(stderr) {
        Some(pool) => pool.install(|| score_corpus(&input, options)),
        None => score_corpus(&input, options),
    };
    let corpus = scored.map_err(|e| Failure { code: EXIT_SCORING, message: e.to_string() })?;

    for f in &corpus.files {
        let zero: Vec<&str> = f.jer.speakers.iter().filter(|s| s.zero_time).map(|s| s.ref_speaker.as_str()).collect();
        if !zero.is_empty() {
            let _ = writeln!(
                stderr,
                "warning: {}: reference speakers with no scored time (JER taken as 0): {}",
                f.file_id,
                zero.join(", ")
            );
        }
    }

    let display = |p: &PathBuf| p.display().to_string();
    let metadata = Metadata {
        collar: args.collar.as_secs_f64(),
        uem: args.uem.as_ref().map(display),
        reference: args.reference.iter().map(display).collect(),
        system: args.system.iter().map(display).collect(),
        ..Metadata::with_version()
    };
    let report = ScoreReport::new(&corpus, metadata);
    let text = match args.format {
        OutputFormat::Table => render_table(&report),
        OutputFormat::Json => emit_machine(&report, MachineFormat::Json),
        OutputFormat::Csv => emit_machine(&report, MachineFormat::Csv),
    };
    stdout.write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string()))?;
    Ok(EXIT_OK)
}

fn run_validate(args: &ValidateArgs, stdout: &mut dyn Write) -> CmdResult {
    let manifest: Manifest =
        load_manifest(&read(&args.manifest)?).map_err(|e| Failure::io(format!("{}: {e}", args.manifest.display())))?;
    let regions = match &args.uem {
        Some(p) => Some(parse_uem(&read(p)?).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let texts: Vec<(String, String)> =
        args.system.iter().map(|p| Ok((p.display().to_string(), read(p)?))).collect::<Result<_, Failure>>()?;
    let files: Vec<SubmissionFile<'_>> = texts.iter().map(|(source, text)| SubmissionFile { source, text }).collect();

    let report = validate_submission(&files, &manifest, regions.as_ref());
    write!(stdout, "{report}").map_err(|e| Failure::io(e.to_string()))?;
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_INVALID })
}

fn run_derive_sad(args: &DeriveSadArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    if args.max_gap.is_negative() {
        return Err(Failure::io(format!("--max-gap must be non-negative, got {}", args.max_gap)));
    }
    let strictness = if args.lenient { Strictness::Lenient } else { Strictness::Strict };
    let per_path = read_rttms(&args.reference, strictness, stderr)?;

    let mut by_file: BTreeMap<String, Vec<Turn>> = BTreeMap::new();
    for (path, turns) in args.reference.iter().zip(per_path) {
        if turns.is_empty() {
            let id = stem(path);
            let _ = writeln!(stderr, "warning: {}: no turns; writing empty label file for {id}", path.display());
            by_file.entry(id).or_default();
        }
        for t in turns {
            by_file.entry(t.file_id.clone()).or_default().push(t);
        }
    }

    fs::create_dir_all(&args.out_dir).map_err(|e| Failure::io(format!("{}: {e}", args.out_dir.display())))?;
    for (file_id, turns) in &by_file {
        let segments = derive_sad(turns, args.max_gap).map_err(|e| Failure::io(e.to_string()))?;
        let text = write_htk_lab(&segments).map_err(|e| Failure::io(format!("{file_id}: {e}")))?;
        let out = args.out_dir.join(format!("{file_id}.lab"));
        fs::write(&out, text).map_err(|e| Failure::io(format!("{}: {e}", out.display())))?;
        writeln!(stdout, "{}", out.display()).map_err(|e| Failure::io(e.to_string()))?;
    }
    Ok(EXIT_OK)
}
