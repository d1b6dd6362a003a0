//! The `galrep` command-line front end.
//!
//! Reports are JSON documents on standard output (or `--output`), with a
//! short human summary on standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith;
use crate::conditions;
use crate::frobdata::{self, Dataset, DatasetError, RecordCheck};
use crate::sieve::{
    self, expected_image, is_excluded, ExclusionMode, ImageLabel, LabelContext, SieveConfig, Step4Variant,
};
use crate::testkit;

pub const SEED_ENV: &str = "GALREP_SEED";

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const ORACLE_FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INVALID_DATA: u8 = 3;
    pub const CONDITION_FAILED: u8 = 4;
    pub const INCONCLUSIVE: u8 = 5;
    pub const EXCEPTIONAL_PRIMES: u8 = 6;
}

#[derive(Debug, Parser)]
#[command(name = "galrep", version, about = "Large-image certification for 4-dimensional Galois representations over ℚ(ζ)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report to this file (atomically) instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Record wall-clock time in the report manifest.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Seed for randomized oracles; overrides the GALREP_SEED variable.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a dataset file.
    VerifyData {
        /// Dataset file; the bundled Scholten data when omitted.
        path: Option<PathBuf>,
    },
    /// Check the seven large-image conditions.
    CheckConditions {
        /// Dataset file; the bundled Scholten data when omitted.
        path: Option<PathBuf>,
    },
    /// Bound the exceptional primes.
    Sieve(SieveArgs),
    /// Print the expected image at one prime.
    Classify {
        #[arg(long)]
        ell: u64,
        /// A saved sieve report; the sieve is run when omitted.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        #[command(flatten)]
        sieve: SieveArgs,
    },
    /// Run the randomized and numerical oracle suites.
    Oracle {
        /// Dataset file; the bundled Scholten data when omitted.
        path: Option<PathBuf>,
        #[arg(long, default_value_t = testkit::DEFAULT_TRIALS)]
        trials: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Cubed,
    Uncubed,
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    /// Dataset file; the bundled Scholten data when omitted.
    pub path: Option<PathBuf>,
    /// Uniform conductor bound c used for the reducible steps.
    #[arg(long, default_value_t = sieve::DEFAULT_CONDUCTOR)]
    pub conductor: u64,
    /// Only primes above this value are certified.
    #[arg(long, default_value_t = sieve::DEFAULT_CUTOFF)]
    pub cutoff: u64,
    /// Remove the congruence sets D1 and D2 from the final set (default).
    #[arg(long = "exclude-d1d2", overrides_with = "no_exclude_d1d2")]
    pub exclude_d1d2: bool,
    /// Keep D1 and D2 primes in the final set.
    #[arg(long = "no-exclude-d1d2", overrides_with = "exclude_d1d2")]
    pub no_exclude_d1d2: bool,
    /// Also label every prime up to this bound.
    #[arg(long)]
    pub lmax: Option<u64>,
    #[arg(long, value_enum, default_value = "cubed")]
    pub step4_variant: VariantArg,
    /// Also run step 4 with the other variant.
    #[arg(long)]
    pub compare_step4: bool,
    /// Trial-division bound for the gcds.
    #[arg(long, default_value_t = sieve::DEFAULT_TRIAL_BOUND)]
    pub trial_bound: u64,
}

impl SieveArgs {
    pub fn config(&self) -> SieveConfig {
        SieveConfig {
            conductor: self.conductor,
            cutoff: self.cutoff,
            exclusion: if self.no_exclude_d1d2 {
                ExclusionMode::None
            } else {
                ExclusionMode::D1D2
            },
            step4_variant: match self.step4_variant {
                VariantArg::Cubed => Step4Variant::Cubed,
                VariantArg::Uncubed => Step4Variant::Uncubed,
            },
            compare_step4: self.compare_step4,
            trial_division_bound: self.trial_bound,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub input: String,
    pub config: Value,
    pub seed: u64,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    manifest: &'a RunManifest,
    #[serde(flatten)]
    report: &'a T,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Command failures that end the run early.
struct Failure(u8);

impl<'a> Io<'a> {
    fn note(&mut self, msg: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{msg}");
    }

    fn fail(&mut self, code: u8, msg: impl std::fmt::Display) -> Failure {
        self.note(format!("error: {msg}"));
        Failure(code)
    }
}

fn input_label(path: Option<&Path>) -> String {
    match path {
        Some(p) => p.display().to_string(),
        None => "bundled:scholten.json".to_string(),
    }
}

fn dataset_error(io: &mut Io, e: DatasetError) -> Failure {
    let code = if e.is_parse_error() {
        exit::USAGE
    } else {
        exit::INVALID_DATA
    };
    if let DatasetError::Invalid(issues) = &e {
        for issue in issues {
            io.note(format!("invalid: {issue}"));
        }
    }
    io.fail(code, e)
}

fn load(io: &mut Io, path: Option<&Path>) -> Result<Dataset, Failure> {
    match path {
        None => Ok(Dataset::scholten()),
        Some(p) => frobdata::load_dataset_file(p).map_err(|e| dataset_error(io, e)),
    }
}

fn resolve_seed(io: &mut Io, flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| io.fail(exit::USAGE, format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(testkit::DEFAULT_SEED),
    }
}

fn emit<T: Serialize>(io: &mut Io, output: Option<&Path>, manifest: &RunManifest, report: &T) -> Result<(), Failure> {
    let envelope = Envelope { manifest, report };
    let mut text = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    text.push('\n');
    match output {
        None => io
            .out
            .write_all(text.as_bytes())
            .map_err(|e| io.fail(exit::USAGE, format!("cannot write report: {e}"))),
        Some(path) => write_atomically(path, text.as_bytes())
            .map_err(|e| io.fail(exit::USAGE, format!("cannot write {}: {e}", path.display()))),
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    n: u64,
    record_count: usize,
    traces_generate_field: bool,
    valid: bool,
    records: Vec<RecordCheck>,
    issues: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    twist: Option<&'a Value>,
}

fn verify_data(io: &mut Io, path: Option<&Path>) -> Result<(&'static str, Value, u8, Value), Failure> {
    let text = match path {
        None => frobdata::SCHOLTEN_JSON.to_string(),
        Some(p) => frobdata::read_dataset_text(p).map_err(|e| dataset_error(io, e))?,
    };
    let ds = frobdata::parse_dataset(&text).map_err(|e| dataset_error(io, e))?;
    let mut issues: Vec<String> = frobdata::validate(&ds).iter().map(ToString::to_string).collect();
    let generates = ds.traces_generate_field();
    if !generates {
        issues.push("traces do not generate ℚ(ζ): every a_p is a rational integer".to_string());
    }
    let valid = issues.is_empty();
    for issue in &issues {
        io.note(format!("invalid: {issue}"));
    }
    io.note(format!(
        "verify-data: {} records, N = {}, {}",
        ds.records.len(),
        ds.n,
        if valid { "valid" } else { "INVALID" }
    ));
    let report = VerifyReport {
        n: ds.n,
        record_count: ds.records.len(),
        traces_generate_field: generates,
        valid,
        records: ds.records.iter().map(frobdata::verify_record).collect(),
        issues,
        twist: (!ds.twist.is_null()).then_some(&ds.twist),
    };
    let code = if valid { exit::OK } else { exit::INVALID_DATA };
    Ok(("verify-data", Value::Null, code, serde_json::to_value(report).expect("serializable")))
}

fn check_conditions(io: &mut Io, path: Option<&Path>) -> Result<(&'static str, Value, u8, Value), Failure> {
    let ds = load(io, path)?;
    let report = conditions::check_all(&ds);
    for v in &report.conditions {
        let detail: Vec<String> = v
            .checks
            .iter()
            .map(|c| {
                let who = c.character.as_ref().map(|x| format!("{x}: ")).unwrap_or_default();
                let ps: Vec<String> = c.witness_primes().iter().map(u64::to_string).collect();
                if c.pass {
                    format!("{who}p = {}", ps.join(", "))
                } else {
                    format!("{who}no witness")
                }
            })
            .collect();
        io.note(format!(
            "condition {}: {} [{}]",
            v.condition,
            if v.pass { "PASS" } else { "FAIL" },
            detail.join("; ")
        ));
    }
    let code = if report.pass {
        exit::OK
    } else {
        exit::CONDITION_FAILED
    };
    Ok((
        "check-conditions",
        Value::Null,
        code,
        serde_json::to_value(&report).expect("serializable"),
    ))
}

fn run_sieve(io: &mut Io, args: &SieveArgs) -> Result<sieve::SieveReport, Failure> {
    let ds = load(io, args.path.as_deref())?;
    let cfg = args.config();
    let mut report = sieve::run_sieve(&ds, &cfg).map_err(|e| io.fail(exit::USAGE, e))?;
    if !report.conditions_pass {
        io.note("warning: the dataset does not satisfy all seven conditions");
    }
    if let Some(l) = args.lmax {
        report.label_primes_up_to(l);
    }
    Ok(report)
}

fn sieve_cmd(io: &mut Io, args: &SieveArgs) -> Result<(&'static str, Value, u8, Value), Failure> {
    let report = run_sieve(io, args)?;
    for step in &report.per_step {
        let primes: Vec<String> = step.candidates.iter().map(|c| c.prime.to_string()).collect();
        io.note(format!(
            "step {} ({}): {{{}}}{}",
            step.step,
            step.name,
            primes.join(", "),
            if step.is_inconclusive() { " INCONCLUSIVE" } else { "" }
        ));
    }
    let finals: Vec<String> = report.final_set.iter().map(u64::to_string).collect();
    io.note(format!("final exceptional set: {{{}}}", finals.join(", ")));
    let code = if report.is_inconclusive() {
        exit::INCONCLUSIVE
    } else if !report.final_set.is_empty() {
        exit::EXCEPTIONAL_PRIMES
    } else {
        exit::OK
    };
    let config = serde_json::to_value(&report.config).expect("serializable");
    Ok(("sieve", config, code, serde_json::to_value(&report).expect("serializable")))
}

/// Human-readable statement for a label.
pub fn describe(ell: u64, label: ImageLabel, ctx: &LabelContext) -> String {
    match label {
        ImageLabel::PSL4 => format!("PSL(4, {ell}), Galois over ℚ, unramified outside {}", ctx.n * ell),
        ImageLabel::PSU4 => format!("PSU(4, {ell}), Galois over ℚ, unramified outside {}", ctx.n * ell),
        ImageLabel::DetSquareSubgroup => {
            format!("{{x ∈ PGL(4, F_{ell}) : det x ∈ (F_{ell}*)²}}")
        }
        ImageLabel::Excluded => match is_excluded(ell) {
            Some(reason) => format!("Excluded ({reason})"),
            None => "Excluded".to_string(),
        },
        ImageLabel::Small => format!("Small (ℓ ≤ {})", ctx.cutoff),
        ImageLabel::BadReduction => format!("Bad reduction (ℓ | {})", ctx.n),
        ImageLabel::PossiblyExceptional => "Possibly exceptional".to_string(),
    }
}

fn classify(io: &mut Io, ell: u64, report: Option<&Path>, args: &SieveArgs) -> Result<u8, Failure> {
    if !arith::is_prime(ell) {
        return Err(io.fail(exit::USAGE, format!("{ell} is not prime")));
    }
    let ctx = match report {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| io.fail(exit::USAGE, format!("cannot read {}: {e}", path.display())))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| io.fail(exit::USAGE, format!("{}: {e}", path.display())))?;
            LabelContext::from_json(&value)
                .ok_or_else(|| io.fail(exit::USAGE, format!("{} is not a sieve report", path.display())))?
        }
        None => run_sieve(io, args)?.label_context(),
    };
    let label = expected_image(ell, &ctx);
    let line = describe(ell, label, &ctx);
    writeln!(io.out, "{line}").map_err(|e| io.fail(exit::USAGE, e))?;
    Ok(exit::OK)
}

fn oracle(io: &mut Io, path: Option<&Path>, trials: usize, seed: u64) -> Result<(&'static str, Value, u8, Value), Failure> {
    let ds = load(io, path)?;
    let suites = testkit::run_all(&ds, trials, seed);
    for s in &suites {
        io.note(format!(
            "{}: {} ({} trials){}",
            s.suite,
            if s.pass { "PASS" } else { "FAIL" },
            s.trials,
            s.failure.as_ref().map(|f| format!(": {f}")).unwrap_or_default()
        ));
    }
    let pass = suites.iter().all(|s| s.pass);
    let code = if pass { exit::OK } else { exit::ORACLE_FAILURE };
    Ok((
        "oracle",
        json!({ "trials": trials }),
        code,
        json!({ "pass": pass, "suites": suites }),
    ))
}

fn execute(cli: &Cli, io: &mut Io) -> Result<u8, Failure> {
    let start = Instant::now();
    let seed = resolve_seed(io, cli.seed)?;
    let (input, outcome) = match &cli.command {
        Command::VerifyData { path } => (input_label(path.as_deref()), verify_data(io, path.as_deref())?),
        Command::CheckConditions { path } => (input_label(path.as_deref()), check_conditions(io, path.as_deref())?),
        Command::Sieve(args) => (input_label(args.path.as_deref()), sieve_cmd(io, args)?),
        Command::Classify { ell, report, sieve } => return classify(io, *ell, report.as_deref(), sieve),
        Command::Oracle { path, trials } => (input_label(path.as_deref()), oracle(io, path.as_deref(), *trials, seed)?),
    };
    let (command, config, code, report) = outcome;
    let manifest = RunManifest {
        command,
        input,
        config,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        elapsed_ms: cli.timing.then(|| start.elapsed().as_millis()),
    };
    emit(io, cli.output.as_deref(), &manifest, &report)?;
    Ok(code)
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code() as u8;
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    match execute(&cli, &mut io) {
        Ok(code) | Err(Failure(code)) => code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("galrep").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_statements() {
        let (code, out, _) = call(&["classify", "--ell", "19"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "PSL(4, 19), Galois over ℚ, unramified outside 114");
        let (_, out, _) = call(&["classify", "--ell", "23"]);
        assert!(out.starts_with("PSU(4, 23)"));
        let (_, out, _) = call(&["classify", "--ell", "109"]);
        assert_eq!(out.trim(), "Excluded (D1: 109 ≡ 1 mod 27)");
        let (_, out, _) = call(&["classify", "--ell", "13"]);
        assert_eq!(out.trim(), "{x ∈ PGL(4, F_13) : det x ∈ (F_13*)²}");
        let (_, out, _) = call(&["classify", "--ell", "7"]);
        assert_eq!(out.trim(), "Small (ℓ ≤ 11)");
        let (code, _, _) = call(&["classify", "--ell", "21"]);
        assert_eq!(code, exit::USAGE);
    }

    #[test]
    fn sieve_flag_parsing() {
        let cli = Cli::try_parse_from(["galrep", "sieve", "--no-exclude-d1d2", "--cutoff", "0"]).unwrap();
        let Command::Sieve(args) = cli.command else { panic!() };
        let cfg = args.config();
        assert_eq!(cfg.exclusion, ExclusionMode::None);
        assert_eq!(cfg.cutoff, 0);
        assert_eq!(cfg.conductor, 1728);
        let cli = Cli::try_parse_from(["galrep", "sieve", "--no-exclude-d1d2", "--exclude-d1d2"]).unwrap();
        let Command::Sieve(args) = cli.command else { panic!() };
        assert_eq!(args.config().exclusion, ExclusionMode::D1D2);
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, err) = call(&["sieve", "--bogus"]);
        assert_eq!(code, exit::USAGE);
        assert!(err.contains("--bogus"));
    }

    #[test]
    fn seed_precedence() {
        let mut sink = Vec::new();
        let mut errs = Vec::new();
        let mut io = Io {
            out: &mut sink,
            err: &mut errs,
        };
        assert_eq!(resolve_seed(&mut io, Some(9)).ok(), Some(9));
    }

    #[test]
    fn describe_bad_reduction() {
        let ctx = LabelContext {
            n: 6,
            cutoff: 11,
            exclusion: ExclusionMode::D1D2,
            final_set: vec![],
            inconclusive: false,
        };
        assert_eq!(describe(2, expected_image(2, &ctx), &ctx), "Bad reduction (ℓ | 6)");
    }
}
