//! `whk`: kernels, indices and 2x2 case analysis of middle factors given as
//! JSON instance documents.
//!
//! Exit codes: 0 success, 1 semantic or precondition failure, 2 I/O or
//! parse failure. JSON goes to stdout, diagnostics to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::{debug, error, info, LevelFilter};
use serde::Serialize;

use whk_core::document::{basis_json, CaseReport, InstanceDocument, ReportDocument, TransformDocument};
use whk_core::kernel::{dims_special_form, general_report, index_multiplicity_check, kernel_basis};
use whk_core::oracle::{counterexamples, cross_check, FuzzConfig, Profile};
use whk_core::two_by_two::{dim_by_case, mono_to_special, verify_transform, CaseParams};
use whk_core::{Error, MiddleFactor};

#[derive(Parser)]
#[command(name = "whk", version, about = "Exact kernel and index analysis of lower-triangular middle factors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hard rules of an instance; root placement is advisory only.
    Validate { file: PathBuf },
    /// Kernel dimension, index, codimension and factorization indices.
    Analyze {
        file: PathBuf,
        /// Include a kernel basis.
        #[arg(long)]
        kernel: bool,
        /// Add the 2x2 case classification.
        #[arg(long)]
        case: bool,
        /// Tabulate index multiplicities over LO..HI (default: around the
        /// factorization indices). Requires special form.
        #[arg(long, value_name = "LO..HI", num_args = 0..=1, default_missing_value = "", allow_hyphen_values = true)]
        indices: Option<String>,
    },
    /// Transform a non-special 2x2 monomial factor into a diagonal one.
    Mono2special { file: PathBuf },
    /// Cross-check random instances against the brute-force oracle.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long, value_parser = parse_profile)]
        profile: Profile,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 4)]
        m_max: usize,
        #[arg(long, default_value_t = 6)]
        deg_max: usize,
        #[arg(long, default_value_t = 3)]
        k_max: i64,
        #[arg(long, default_value_t = 8)]
        kdiag_max: i64,
        /// Directory for failing instances, one document per file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse()
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn semantic(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Document(_) | Error::Malformed(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

fn init_logging() {
    let level = match std::env::var("WHK_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        Ok(other) => {
            eprintln!("whk: ignoring WHK_LOG={other:?}; expected quiet, info or debug");
            LevelFilter::Warn
        }
        Err(_) => LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).target(env_logger::Target::Stderr).init();
}

fn emit<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::io(format!("cannot serialize output: {e}")))?;
    println!("{text}");
    Ok(())
}

fn load(path: &Path) -> Result<(InstanceDocument, MiddleFactor), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let doc = InstanceDocument::parse(&text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let mf = doc.to_middle_factor();
    debug!("loaded {} with m = {}", path.display(), mf.m());
    Ok((doc, mf))
}

fn validation_failure(report: &whk_core::middle_factor::ValidationReport) -> Failure {
    let failed: Vec<String> = report.failures().map(|c| format!("{:?}: {}", c.rule, c.detail)).collect();
    Failure::semantic(format!("invalid instance: {}", failed.join("; ")))
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    valid: bool,
    #[serde(flatten)]
    report: &'a whk_core::middle_factor::ValidationReport,
}

fn cmd_validate(file: &Path) -> CmdResult {
    let (_, mf) = load(file)?;
    let report = mf.validate()?;
    for a in report.advisories.iter().filter(|a| !a.on_circle) {
        log::warn!("row {}: a root of q is {:.3e} off the unit circle", a.row, a.max_deviation);
    }
    emit(&ValidateOutput { valid: report.passed(), report: &report })?;
    if report.passed() {
        Ok(())
    } else {
        Err(validation_failure(&report))
    }
}

fn parse_range(s: &str) -> Result<Option<std::ops::RangeInclusive<i64>>, Failure> {
    if s.is_empty() {
        return Ok(None);
    }
    let bad = || Failure::io(format!("--indices expects LO..HI, got {s:?}"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(Some(lo..=hi))
}

fn cmd_analyze(file: &Path, kernel: bool, case: bool, indices: Option<&str>) -> CmdResult {
    let start = Instant::now();
    let (doc, mf) = load(file)?;
    let range = indices.map(parse_range).transpose()?;
    let validation = mf.validate()?;
    if !validation.passed() {
        return Err(validation_failure(&validation));
    }

    let analysis = if mf.is_special_form() { dims_special_form(&mf)? } else { general_report(&mf)? };
    let mut report = ReportDocument::new(doc, validation, &analysis);
    if kernel {
        let basis = kernel_basis(&mf)?;
        if basis.dim() != report.dim_ker {
            return Err(Error::Inconsistent("kernel basis size differs from dim ker".into()).into());
        }
        report.kernel = Some(basis_json(&basis));
    }
    if case {
        let t = mf.as_two_by_two()?;
        let by_case = dim_by_case(&t)?;
        let tag = if t.d21.is_zero() { None } else { Some(CaseParams::of(&t)?.classify()) };
        report.two_by_two = Some(CaseReport { case: tag, dim_by_case: by_case, bound_only: by_case.is_bound_only() });
    }
    if let Some(range) = range {
        if !mf.is_special_form() {
            return Err(Failure::semantic(
                "--indices needs the factor in special form: in every column the diagonal entry must have \
                 the largest numerator-minus-denominator degree",
            ));
        }
        let rows = index_multiplicity_check(&mf, range)?;
        report.indices = Some(rows.into_values().collect());
    }
    report.timing_ms = start.elapsed().as_millis() as u64;
    emit(&report)
}

fn cmd_mono2special(file: &Path) -> CmdResult {
    let (_, mf) = load(file)?;
    mf.ensure_valid()?;
    let t = mf.as_two_by_two()?;
    let result = mono_to_special(&t)?;
    let check = verify_transform(&t, &result)?;
    let passed = check.passed();
    emit(&TransformDocument::new(&mf, &result, check))?;
    if passed {
        Ok(())
    } else {
        Err(Failure::semantic("transform verification failed"))
    }
}

fn cmd_fuzz(cfg: FuzzConfig, jobs: usize, out: Option<&Path>) -> CmdResult {
    info!("fuzzing {} instances of profile {} from seed {}", cfg.count, cfg.profile, cfg.seed);
    let summary = cross_check(&cfg, jobs)?;
    emit(&summary)?;
    if summary.all_passed {
        info!("all {} instances passed in {} ms", summary.instances, summary.timing_ms);
        return Ok(());
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
        for (i, doc) in counterexamples(&cfg)? {
            let path = dir.join(format!("counterexample-{i}.json"));
            fs::write(&path, doc.to_json_pretty() + "\n")
                .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
            info!("wrote {}", path.display());
        }
    }
    Err(Failure::semantic(format!("{} of {} instances failed", summary.counterexamples, summary.instances)))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Analyze { file, kernel, case, indices } => cmd_analyze(&file, kernel, case, indices.as_deref()),
        Command::Mono2special { file } => cmd_mono2special(&file),
        Command::Fuzz { seed, count, profile, jobs, m_max, deg_max, k_max, kdiag_max, out } => {
            let cfg = FuzzConfig { seed, count, m_max, deg_max, k_max, kdiag_max, profile };
            cmd_fuzz(cfg, jobs, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    init_logging();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            error!("{}", f.message);
            if log::max_level() < LevelFilter::Error {
                eprintln!("whk: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
