//! Command-line front end. [`run`] returns the process exit code:
//! 0 on success, 1 when a verification check fails, 2 on bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::construction::{
    build, compare_reports, materialize_partial, verify_construction, CheckStatus, ConstructionConfig, ConstructionState,
    VerificationReport, VerifyOptions, STATE_SCHEMA,
};
use crate::error::{Error, Result};
use crate::evolution::{compare_steady, evolve, EvolutionConfig, KernelChoice};
use crate::generators::{family_conditions_report, lacunary_field, resonant_conditions_report, resonant_field, LacunarySpec, ResonantSpec};
use crate::io::{parse_ratio, read_field, read_json, write_field, write_json};
use crate::lattice::Frequency;
use crate::nonlinearity::{admissibility_partial_sums, PairOrder};
use crate::phase::Phase;

pub const MANIFEST_SCHEMA: &str = "sparse-steady/manifest/v1";
pub const THREADS_ENV: &str = "SPARSE_STEADY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sparse-steady", version, about = "Sparse steady states of 2D Navier-Stokes on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the stage-by-stage construction and write its state and report.
    Construct(ConstructArgs),
    /// Recompute the report of a saved construction and compare.
    Verify(VerifyArgs),
    /// Write a lacunary or resonant field with its conditions report.
    Generate(GenerateArgs),
    /// Evolve a field under truncated Navier-Stokes and log observers.
    Evolve(EvolveArgs),
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Number of stages after the initial one.
    #[arg(long, default_value_t = 3)]
    pub stages: usize,
    /// Only enforce the hard floors on N_n.
    #[arg(long = "unsafe-schedule", alias = "unsafe")]
    pub unsafe_schedule: bool,
    #[arg(long, default_value = "1/2")]
    pub rho0: String,
    #[arg(long, default_value = "1,1")]
    pub k0: String,
    #[arg(long, default_value = "4")]
    pub c0: String,
    #[arg(long, default_value_t = 12)]
    pub exponent: u32,
    /// Fix N_n for one stage, as `n=value`. Repeatable.
    #[arg(long = "override", value_name = "N=VALUE")]
    pub overrides: Vec<String>,
    /// Read the whole configuration from JSON instead of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub verify: VerifyFlags,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyFlags {
    #[arg(long, default_value_t = 3)]
    pub sobolev_order: u32,
    #[arg(long, default_value_t = 100_000)]
    pub pair_cutoff: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub residual_tolerance: f64,
}

impl VerifyFlags {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            sobolev_order: self.sobolev_order,
            pair_cutoff: self.pair_cutoff,
            residual_tolerance: self.residual_tolerance,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Output directory of `construct`, or a state.json file.
    pub path: PathBuf,
    /// Stored report to compare against; defaults to report.json beside the state.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[command(flatten)]
    pub verify: VerifyFlags,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long, default_value = "1,1")]
    pub base: String,
    #[arg(long, default_value_t = 9)]
    pub ratio: u64,
    #[arg(long, default_value_t = 6)]
    pub count: usize,
    /// Amplitude ratio between consecutive levels.
    #[arg(long, default_value_t = 0.125)]
    pub amp_ratio: f64,
    /// Turn each level by a quarter.
    #[arg(long)]
    pub rotating: bool,
    /// ω at level 0 (resonant family).
    #[arg(long, default_value = "0,0")]
    pub omega0: String,
    /// Phase η as a multiple of π (resonant family).
    #[arg(long, default_value = "0")]
    pub eta: String,
    #[arg(long, default_value_t = 3)]
    pub sobolev_order: u32,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Lacunary,
    Resonant,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// A field file, or a construction state with `--stage`.
    pub input: PathBuf,
    /// Materialize U_n from a construction state.
    #[arg(long)]
    pub stage: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub radius: i64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Auto)]
    pub kernel: KernelArg,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelArg {
    Auto,
    Sparse,
    Fft,
}

impl From<KernelArg> for KernelChoice {
    fn from(k: KernelArg) -> KernelChoice {
        match k {
            KernelArg::Auto => KernelChoice::Auto,
            KernelArg::Sparse => KernelChoice::Sparse,
            KernelArg::Fft => KernelChoice::Fft,
        }
    }
}

/// What a command wrote, for reproducibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub arguments: Vec<String>,
    pub threads: usize,
    pub outputs: Vec<OutputRecord>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub bytes: u64,
}

impl RunManifest {
    fn new(command: &str, arguments: &[String]) -> RunManifest {
        RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            arguments: arguments.to_vec(),
            threads: rayon::current_num_threads(),
            outputs: Vec::new(),
            passed: true,
        }
    }

    fn record(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::metadata(path)?.len();
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.outputs.push(OutputRecord { path: name, bytes });
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    configure_threads();
    let raw: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, &raw, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn dispatch(cmd: Command, raw: &[String], out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Construct(a) => construct(a, raw, out),
        Command::Verify(a) => verify(a, out),
        Command::Generate(a) => generate(a, raw, out),
        Command::Evolve(a) => evolve_cmd(a, raw, out),
    }
}

fn parse_phase(s: &str) -> Result<Phase> {
    let r = parse_ratio(s)?;
    let num = i64::try_from(r.numer()).map_err(|_| Error::Format(format!("phase {s:?} out of range")))?;
    let den = i64::try_from(r.denom()).map_err(|_| Error::Format(format!("phase {s:?} out of range")))?;
    Phase::new(num, den)
}

fn construct_config(a: &ConstructArgs) -> Result<ConstructionConfig> {
    if let Some(path) = &a.config {
        let c: ConstructionConfig = read_json(path)?;
        return Ok(ConstructionConfig {
            max_stage: a.stages,
            ..c
        });
    }
    let mut c = if a.unsafe_schedule {
        ConstructionConfig::toy(a.stages)
    } else {
        ConstructionConfig::standard(a.stages)
    };
    c.rho0 = parse_ratio(&a.rho0)?;
    c.k0 = a.k0.parse()?;
    c.c0 = parse_ratio(&a.c0)?;
    c.exponent = a.exponent;
    for o in &a.overrides {
        let (n, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("override must look like n=value, got {o:?}")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad stage number in override {o:?}")))?;
        c.n_overrides.insert(n, v.trim().to_string());
    }
    Ok(c)
}

const SCOPE_NOTE: &str = "note: sums and tails cover the finite stages only; \
convergence of the full series and BMO^-1 smallness are not checked, \
and standard-schedule frequencies are far beyond any evolution grid";

fn print_checks(report: &VerificationReport, out: &mut dyn Write) -> Result<()> {
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable => "n/a ",
        };
        writeln!(out, "  {tag}  {:<22} {}", c.name, c.detail)?;
    }
    writeln!(out, "{SCOPE_NOTE}")?;
    Ok(())
}

fn construct(a: ConstructArgs, raw: &[String], out: &mut dyn Write) -> Result<i32> {
    let config = construct_config(&a)?;
    let opts = a.verify.options();
    let state = build(config)?;
    let report = verify_construction(&state, &opts)?;

    fs::create_dir_all(&a.out)?;
    let mut manifest = RunManifest::new("construct", raw);
    let state_path = a.out.join("state.json");
    write_json(&state_path, &state)?;
    manifest.record(&state_path)?;
    let report_path = a.out.join("report.json");
    write_json(&report_path, &report)?;
    manifest.record(&report_path)?;

    let n = state.completed_stages();
    let u = materialize_partial(&state, n)?;
    let field_path = a.out.join("field.json");
    write_field(&field_path, &u)?;
    manifest.record(&field_path)?;
    let tableau = admissibility_partial_sums(&u, opts.sobolev_order, opts.pair_cutoff, PairOrder::MaxIndexLex)?;
    let csv_path = a.out.join("admissibility.csv");
    tableau.write_csv(fs::File::create(&csv_path)?)?;
    manifest.record(&csv_path)?;

    manifest.passed = report.passed();
    let manifest_path = a.out.join("manifest.json");
    write_json(&manifest_path, &manifest)?;

    writeln!(
        out,
        "constructed {} stages ({} ledger entries, {} modes in U_{n})",
        n,
        state.ledger.len(),
        u.len()
    )?;
    print_checks(&report, out)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let state_path = if a.path.is_dir() { a.path.join("state.json") } else { a.path.clone() };
    let report_path = a.report.clone().unwrap_or_else(|| state_path.with_file_name("report.json"));
    let state: ConstructionState = read_json(&state_path)?;
    if state.schema != STATE_SCHEMA {
        return Err(Error::Format(format!("unsupported state schema {:?}", state.schema)));
    }
    let stored: Option<VerificationReport> = if report_path.exists() { Some(read_json(&report_path)?) } else { None };
    let fresh = verify_construction(&state, &a.verify.options())?;
    print_checks(&fresh, out)?;
    let mut ok = fresh.passed();
    for c in fresh.failing() {
        writeln!(out, "failing check: {}", c.name)?;
    }
    match stored {
        Some(stored) => {
            let diffs = compare_reports(&stored, &fresh, a.tolerance);
            for d in diffs.iter().take(20) {
                writeln!(out, "report mismatch: {d}")?;
            }
            if !diffs.is_empty() {
                ok = false;
                writeln!(out, "stored report differs in {} places", diffs.len())?;
            } else {
                writeln!(out, "stored report reproduced within {:e}", a.tolerance)?;
            }
        }
        None => writeln!(out, "no stored report at {}", report_path.display())?,
    }
    Ok(if ok { 0 } else { 1 })
}

fn generate(a: GenerateArgs, raw: &[String], out: &mut dyn Write) -> Result<i32> {
    if a.ratio <= 8 {
        return Err(Error::Spec(format!("gap condition requires ratio > 8, got {}", a.ratio)));
    }
    let base: Frequency = a.base.parse()?;
    let lac = if a.rotating {
        LacunarySpec::rotating(base, a.ratio, a.count, a.amp_ratio)
    } else {
        LacunarySpec::geometric(base, a.ratio, a.count, a.amp_ratio)
    };
    let (field, report, spec_json) = match a.family {
        Family::Lacunary => (
            lacunary_field(&lac)?,
            family_conditions_report(&lac, a.sobolev_order),
            serde_json::to_value(&lac)?,
        ),
        Family::Resonant => {
            let spec = ResonantSpec::following(lac, a.omega0.parse()?, parse_phase(&a.eta)?);
            (
                resonant_field(&spec)?,
                resonant_conditions_report(&spec, a.sobolev_order),
                serde_json::to_value(&spec)?,
            )
        }
    };
    fs::create_dir_all(&a.out)?;
    let mut manifest = RunManifest::new("generate", raw);
    let field_path = a.out.join("field.json");
    write_field(&field_path, &field)?;
    manifest.record(&field_path)?;
    let spec_path = a.out.join("spec.json");
    write_json(&spec_path, &spec_json)?;
    manifest.record(&spec_path)?;
    let report_path = a.out.join("conditions.json");
    write_json(&report_path, &report)?;
    manifest.record(&report_path)?;
    manifest.passed = report.all_pass();
    write_json(&a.out.join("manifest.json"), &manifest)?;

    writeln!(out, "wrote {} modes", field.len())?;
    for f in &report.flags {
        writeln!(out, "  flag: {f}")?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn evolve_cmd(a: EvolveArgs, raw: &[String], out: &mut dyn Write) -> Result<i32> {
    let field = match a.stage {
        Some(n) => {
            let state: ConstructionState = read_json(&a.input)?;
            if n > state.completed_stages() {
                return Err(Error::Config(format!(
                    "stage {n} requested but the state has {} stages",
                    state.completed_stages()
                )));
            }
            materialize_partial(&state, n)?
        }
        None => read_field(&a.input)?,
    };
    let config = EvolutionConfig {
        radius: a.radius,
        dt: a.dt,
        t_final: a.t_final,
        record_every: a.record_every,
        kernel: a.kernel.into(),
    };
    let traj = evolve(&field, &config)?;
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    traj.write_csv(std::io::BufWriter::new(fs::File::create(&a.out)?))?;
    let mut manifest = RunManifest::new("evolve", raw);
    manifest.record(&a.out)?;
    write_json(&a.out.with_extension("manifest.json"), &manifest)?;

    let cmp = compare_steady(&traj);
    writeln!(
        out,
        "evolved to t = {} in {} samples; dropped {} modes (H^-1 mass {:e}); energy audit {:e}; decay ratio {:e}; distance to initial {:e}",
        config.t_final,
        traj.samples.len(),
        traj.truncation.dropped,
        traj.truncation.dropped_h_minus1,
        traj.energy_audit(),
        cmp.decay_ratio,
        cmp.final_distance
    )?;
    Ok(0)
}
