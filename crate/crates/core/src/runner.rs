//! Experiment commands, run manifests and replay.
//!
//! Every command writes `<out>/<command>.json` (plus a CSV mirror for
//! tabular output and a bundle for `sample-oracle`) and `<out>/manifest.json`.
//! `replay <manifest>` reruns the recorded command and compares the JSON
//! byte for byte.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::gf2::FunctionMode;
use crate::oracle::{oracle_unitary, OracleBundle};
use crate::parallel::run_trials;
use crate::schemes::{
    bssp_layout, run_bssp_with, run_depth_sweep, sample_instance, wilson_interval, BsspOptions,
    BsspResult, SchemeChoice, Verdict,
};
use crate::seed::{SeedSpec, Stream};
use crate::sim::caps;
use crate::verify::{check_bfp, estimate_o2h_expectation, Distinguisher, QueryFamily};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Search,
    Decision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FamilyArg {
    Points,
    Superposition,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "search")]
    pub mode: SolveMode,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "qc")]
    pub scheme: SchemeArg,
    /// Sample cap; defaults to 5n for search and 3n for decision.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Include per-trial results and transcripts in the report.
    #[arg(long)]
    pub transcripts: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Qc,
    Cq,
}

impl From<SchemeArg> for SchemeChoice {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Qc => SchemeChoice::Qc,
            SchemeArg::Cq => SchemeChoice::Cq,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct O2hArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// ignore, xi_flag, zeta_flag or value_bit.
    #[arg(long, default_value = "xi_flag")]
    pub distinguisher: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct BfpArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, value_enum, default_value = "points")]
    pub family: FamilyArg,
    /// Support of each slot for the superposition family.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct SampleOracleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "simon")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Simon,
    Injective,
}

impl From<ModeArg> for FunctionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Simon => FunctionMode::Simon,
            ModeArg::Injective => FunctionMode::Injective,
        }
    }
}

/// A replayable command with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Run the BSSP search or decision algorithm over random instances.
    Solve(SolveArgs),
    /// Check the one-way-to-hiding bound by Monte Carlo.
    O2h(O2hArgs),
    /// Estimate the finding probability against the p·q bound.
    Bfp(BfpArgs),
    /// Success rate against the number of oracle calls.
    Sweep(SweepArgs),
    /// Sample an oracle and write it as a bundle.
    SampleOracle(SampleOracleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::O2h(_) => "o2h",
            Command::Bfp(_) => "bfp",
            Command::Sweep(_) => "sweep",
            Command::SampleOracle(_) => "sample-oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPaths {
    pub json: PathBuf,
    pub csv: Option<PathBuf>,
    pub bundle: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
    pub threads: Option<usize>,
    pub outputs: OutputPaths,
    pub created_unix: u64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

/// What a command produced, before anything is written.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub report: Value,
    pub csv: Option<String>,
    pub bundle: Option<Vec<u8>>,
    /// False if an invariant was violated.
    pub ok: bool,
}

impl CommandOutput {
    /// Canonical JSON document written to disk.
    pub fn json_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(&self.report)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// Runs a command in memory. Results depend only on its parameters, not
/// on `threads`.
pub fn run_command(command: &Command, threads: Option<usize>) -> Result<CommandOutput> {
    match command {
        Command::Solve(a) => solve(a, threads),
        Command::O2h(a) => o2h(a, threads),
        Command::Bfp(a) => bfp(a, threads),
        Command::Sweep(a) => sweep(a, threads),
        Command::SampleOracle(a) => sample_oracle(a),
    }
}

/// Fails with a resource error if the BSSP registers exceed the dense cap.
pub fn check_solve_width(n: usize, d: usize) -> Result<usize> {
    let width = bssp_layout(n, d, false)?.width();
    let cap = caps().dense_qubits;
    if width > cap {
        return Err(Error::Resource {
            what: "BSSP register width",
            required: width,
            available: cap,
        });
    }
    Ok(width)
}

#[derive(Clone, Debug, Serialize)]
struct TrialSummary {
    success: bool,
    says_simon: bool,
    low_confidence: bool,
    samples: usize,
    equations_hold: bool,
    period_consistent: bool,
    calls: BTreeSet<usize>,
    depth: usize,
    gates: BTreeSet<String>,
    #[serde(skip)]
    result: Option<BsspResult>,
}

fn solve_trial(
    a: &SolveArgs,
    options: &BsspOptions,
    mode: FunctionMode,
    seeds: &SeedSpec,
) -> Result<TrialSummary> {
    let fb = sample_instance(a.n, a.d, mode, seeds)?;
    let u = oracle_unitary(&fb)?;
    let r = run_bssp_with(&u, options, seeds.derive(Stream::Measurement, 0))?;
    let truth = fb.function().period();
    let equations_hold = match truth {
        Some(s) => r.consistent_with(s)?,
        None => true,
    };
    let period_consistent = match r.period {
        Some(p) => r.consistent_with(p)?,
        None => true,
    };
    Ok(TrialSummary {
        success: r.period.is_some() && r.period == truth,
        says_simon: r.verdict == Some(Verdict::Simon),
        low_confidence: r.low_confidence,
        samples: r.samples_used,
        equations_hold,
        period_consistent,
        calls: r.calls_per_sample.iter().copied().collect(),
        depth: r.depth,
        gates: r.gate_set.clone(),
        result: a.transcripts.then_some(r),
    })
}

fn solve(a: &SolveArgs, threads: Option<usize>) -> Result<CommandOutput> {
    let width = check_solve_width(a.n, a.d)?;
    let master = SeedSpec::new(a.seed);
    let mut options = match a.mode {
        SolveMode::Search => BsspOptions::search(a.n, a.d),
        SolveMode::Decision => BsspOptions::decision(a.n, a.d),
    };
    options.scheme = a.scheme.into();
    options.keep_transcripts = a.transcripts;
    if let Some(s) = a.samples {
        options.max_samples = s;
    }
    let merge = |ts: &[TrialSummary]| {
        let calls: BTreeSet<usize> = ts.iter().flat_map(|t| t.calls.iter().copied()).collect();
        let gates: BTreeSet<String> = ts.iter().flat_map(|t| t.gates.iter().cloned()).collect();
        let depths: BTreeSet<usize> = ts.iter().map(|t| t.depth).collect();
        (calls, gates, depths)
    };
    let (report, ok) = match a.mode {
        SolveMode::Search => {
            let ts = run_trials(a.trials, threads, |t| {
                solve_trial(a, &options, FunctionMode::Simon, &master.fork(Stream::Trial, t as u64))
            })?;
            let successes = ts.iter().filter(|t| t.success).count();
            let (lo, hi) = wilson_interval(successes, a.trials);
            let violations = ts.iter().filter(|t| !t.equations_hold || !t.period_consistent).count();
            let (calls, gates, depths) = merge(&ts);
            let mut report = json!({
                "command": "solve",
                "mode": "search",
                "n": a.n, "d": a.d, "trials": a.trials, "seed": a.seed,
                "scheme": a.scheme, "width": width, "sample_cap": options.max_samples,
                "successes": successes,
                "success_rate": successes as f64 / a.trials.max(1) as f64,
                "ci_low": lo, "ci_high": hi,
                "mean_samples": ts.iter().map(|t| t.samples).sum::<usize>() as f64 / a.trials.max(1) as f64,
                "oracle_calls_per_sample": calls,
                "depth": depths,
                "gate_set": gates,
                "equation_violations": violations,
            });
            if a.transcripts {
                report["results"] = serde_json::to_value(ts.iter().map(|t| &t.result).collect::<Vec<_>>())?;
            }
            (report, violations == 0)
        }
        SolveMode::Decision => {
            let arms = run_trials(2 * a.trials, threads, |k| {
                let mode = if k % 2 == 0 { FunctionMode::Simon } else { FunctionMode::Injective };
                solve_trial(a, &options, mode, &master.fork(Stream::Trial, k as u64))
            })?;
            let simon: Vec<&TrialSummary> = arms.iter().step_by(2).collect();
            let injective: Vec<&TrialSummary> = arms.iter().skip(1).step_by(2).collect();
            let rate = |xs: &[&TrialSummary]| {
                xs.iter().filter(|t| t.says_simon).count() as f64 / a.trials.max(1) as f64
            };
            let (ps, pi) = (rate(&simon), rate(&injective));
            let violations = simon.iter().filter(|t| !t.equations_hold || !t.says_simon).count();
            let (calls, gates, depths) = merge(&arms);
            let mut report = json!({
                "command": "solve",
                "mode": "decision",
                "n": a.n, "d": a.d, "trials_per_arm": a.trials, "seed": a.seed,
                "scheme": a.scheme, "width": width, "samples": options.max_samples,
                "simon_says_simon": ps,
                "injective_says_simon": pi,
                "advantage": (ps - pi).abs(),
                "low_confidence": arms.iter().filter(|t| t.low_confidence).count(),
                "oracle_calls_per_sample": calls,
                "depth": depths,
                "gate_set": gates,
                "equation_violations": violations,
            });
            if a.transcripts {
                report["results"] = serde_json::to_value(arms.iter().map(|t| &t.result).collect::<Vec<_>>())?;
            }
            (report, violations == 0)
        }
    };
    Ok(CommandOutput {
        report,
        csv: None,
        bundle: None,
        ok,
    })
}

fn o2h(a: &O2hArgs, threads: Option<usize>) -> Result<CommandOutput> {
    let dist: Distinguisher = a.distinguisher.parse()?;
    let r = estimate_o2h_expectation(a.n, a.d, a.level, dist, a.trials, a.seed, threads)?;
    let mut csv = Vec::new();
    r.write_csv(&mut csv)?;
    Ok(CommandOutput {
        ok: r.passed(),
        report: serde_json::to_value(&r)?,
        csv: Some(String::from_utf8(csv).expect("csv is utf-8")),
        bundle: None,
    })
}

fn bfp(a: &BfpArgs, threads: Option<usize>) -> Result<CommandOutput> {
    let family = match a.family {
        FamilyArg::Points => QueryFamily::Points { q: a.q },
        FamilyArg::Superposition => QueryFamily::Superposition { q: a.q, k: a.k },
        FamilyArg::Uniform => QueryFamily::Uniform,
    };
    let r = check_bfp(family, a.n, a.d, a.level, a.trials, a.seed, threads)?;
    let mut csv = Vec::new();
    r.write_csv(&mut csv)?;
    Ok(CommandOutput {
        ok: r.within_bound,
        report: serde_json::to_value(&r)?,
        csv: Some(String::from_utf8(csv).expect("csv is utf-8")),
        bundle: None,
    })
}

fn sweep(a: &SweepArgs, threads: Option<usize>) -> Result<CommandOutput> {
    check_solve_width(a.n, a.d)?;
    let t = run_depth_sweep(a.n, a.d, a.trials, a.seed, threads)?;
    let mut csv = Vec::new();
    t.write_csv(&mut csv)?;
    Ok(CommandOutput {
        ok: true,
        report: serde_json::to_value(&t)?,
        csv: Some(String::from_utf8(csv).expect("csv is utf-8")),
        bundle: None,
    })
}

/// FNV-1a, for a short fingerprint of the bundle bytes.
fn fingerprint(bytes: &[u8]) -> String {
    let h = bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    });
    format!("{h:016x}")
}

fn sample_oracle(a: &SampleOracleArgs) -> Result<CommandOutput> {
    let seeds = SeedSpec::new(a.seed);
    let fb = sample_instance(a.n, a.d, a.mode.into(), &seeds)?;
    let bundle = OracleBundle::new(fb, vec![a.seed]);
    let bytes = bundle.to_bytes()?;
    let back = OracleBundle::from_bytes(&bytes)?;
    let ok = back == bundle && bundle.oracle.check_invariants().is_ok();
    let report = json!({
        "command": "sample-oracle",
        "header": bundle.header,
        "domain_bits": bundle.oracle.domain_bits(),
        "bytes": bytes.len(),
        "fingerprint": fingerprint(&bytes),
        "round_trip": back == bundle,
    });
    Ok(CommandOutput {
        report,
        csv: None,
        bundle: Some(bytes),
        ok,
    })
}

/// Runs a command, writes its outputs under `out` and records a manifest.
pub fn execute(command: &Command, out: &Path, threads: Option<usize>) -> Result<(RunManifest, CommandOutput)> {
    let output = run_command(command, threads)?;
    std::fs::create_dir_all(out)?;
    let stem = command.name();
    let outputs = OutputPaths {
        json: out.join(format!("{stem}.json")),
        csv: output.csv.as_ref().map(|_| out.join(format!("{stem}.csv"))),
        bundle: output.bundle.as_ref().map(|_| out.join(format!("{stem}.bin"))),
    };
    std::fs::write(&outputs.json, output.json_bytes()?)?;
    if let (Some(p), Some(c)) = (&outputs.csv, &output.csv) {
        std::fs::write(p, c)?;
    }
    if let (Some(p), Some(b)) = (&outputs.bundle, &output.bundle) {
        std::fs::write(p, b)?;
    }
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        command: command.clone(),
        threads,
        outputs,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    std::fs::write(out.join(MANIFEST_FILE), serde_json::to_vec_pretty(&manifest)?)?;
    Ok((manifest, output))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub manifest: PathBuf,
    pub command: String,
    pub json_identical: bool,
    pub csv_identical: Option<bool>,
    pub bundle_identical: Option<bool>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.json_identical && self.csv_identical != Some(false) && self.bundle_identical != Some(false)
    }
}

/// Reruns a manifest's command and compares against its recorded outputs.
/// Relative output paths are resolved against the manifest's directory
/// first and the working directory second.
pub fn replay(manifest_path: &Path, threads: Option<usize>) -> Result<ReplayReport> {
    let m = RunManifest::load(manifest_path)?;
    if m.version != env!("CARGO_PKG_VERSION") {
        return Err(Error::InvalidParameter(format!(
            "manifest was written by version {}, this is {}",
            m.version,
            env!("CARGO_PKG_VERSION")
        )));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| {
        let local = base.join(p.file_name().unwrap_or(p.as_os_str()));
        if local.exists() {
            local
        } else {
            p.to_path_buf()
        }
    };
    let output = run_command(&m.command, threads.or(m.threads))?;
    let same = |p: &Path, bytes: &[u8]| -> Result<bool> { Ok(std::fs::read(resolve(p))? == bytes) };
    let json_identical = same(&m.outputs.json, &output.json_bytes()?)?;
    let csv_identical = match (&m.outputs.csv, &output.csv) {
        (Some(p), Some(c)) => Some(same(p, c.as_bytes())?),
        (None, None) => None,
        _ => Some(false),
    };
    let bundle_identical = match (&m.outputs.bundle, &output.bundle) {
        (Some(p), Some(b)) => Some(same(p, b)?),
        (None, None) => None,
        _ => Some(false),
    };
    Ok(ReplayReport {
        manifest: manifest_path.to_path_buf(),
        command: m.command.name().to_owned(),
        json_identical,
        csv_identical,
        bundle_identical,
    })
}

#[derive(Debug, Parser)]
#[command(name = "bssp", version, about = "Bijective shuffling Simon's problem experiments")]
pub struct Cli {
    /// Worker threads for trial-level parallelism (results do not depend on it).
    #[arg(long, global = true, env = "BSSP_THREADS")]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "bssp-out", env = "BSSP_OUT")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    #[command(flatten)]
    Run(Command),
    /// Rerun a manifest and check the outputs are byte-identical.
    Replay {
        manifest: PathBuf,
    },
}

/// Exit codes: 0 success, 1 invariant violation or replay mismatch,
/// 2 usage or data error, 3 resource error.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        CliCommand::Run(cmd) => execute(cmd, &cli.out, cli.threads).and_then(|(m, out)| {
            let summary = json!({
                "command": cmd.name(),
                "ok": out.ok,
                "outputs": m.outputs,
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(out.ok)
        }),
        CliCommand::Replay { manifest } => replay(manifest, cli.threads).and_then(|r| {
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(r.identical())
        }),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::Resource { .. }) => {
            eprintln!("error: {e}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversized_solve_is_a_resource_error() {
        let a = SolveArgs {
            n: 9,
            d: 3,
            mode: SolveMode::Search,
            trials: 1,
            seed: 0,
            scheme: SchemeArg::Qc,
            samples: None,
            transcripts: false,
        };
        match run_command(&Command::Solve(a), None) {
            Err(Error::Resource { required, .. }) => assert_eq!(required, 56),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let m = RunManifest {
            version: "0".into(),
            command: Command::Sweep(SweepArgs {
                n: 2,
                d: 1,
                trials: 3,
                seed: 4,
            }),
            threads: Some(2),
            outputs: OutputPaths {
                json: "a.json".into(),
                csv: None,
                bundle: None,
            },
            created_unix: 1,
        };
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"command\":\"sweep\""));
        assert_eq!(serde_json::from_str::<RunManifest>(&text).unwrap(), m);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let cmd = Command::O2h(O2hArgs {
            n: 1,
            d: 1,
            level: 1,
            trials: 50,
            seed: 3,
            distinguisher: "xi_flag".into(),
        });
        let a = run_command(&cmd, Some(1)).unwrap();
        let b = run_command(&cmd, Some(4)).unwrap();
        assert_eq!(a.json_bytes().unwrap(), b.json_bytes().unwrap());
    }

    #[test]
    fn execute_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let cmd = Command::SampleOracle(SampleOracleArgs {
            n: 1,
            d: 2,
            mode: ModeArg::Simon,
            seed: 5,
        });
        let (m, out) = execute(&cmd, dir.path(), None).unwrap();
        assert!(out.ok);
        assert!(m.outputs.bundle.is_some());
        let r = replay(&dir.path().join(MANIFEST_FILE), None).unwrap();
        assert!(r.identical(), "{r:?}");
    }
}
