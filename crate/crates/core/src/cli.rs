//! Command-line experiment runner. Every subcommand parses its flags,
//! calls the library and writes a JSON document
//! `{command, params, seed, results, diagnostics}`; only `diagnostics`
//! carries run-dependent data (timestamps).

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    capacity, dispersion, id_second_order, plan_achievability, quantization_slack, sandwich_report,
    transmission_second_order,
};
use crate::channel::{clt_diagnostic, estimate_moments, ChannelSpec};
use crate::error::{Error, Result};
use crate::id_codec::{build_id_code, code_error_profile, Construction, IdCodeDesign};
use crate::numerics::RngStream;
use crate::resolvability::{frey_bound, resolvability_experiment, write_curve_csv, FreyParams, ResolvabilityTarget};
use crate::shell_quant::{
    quantization_tv_report, sample_shell, sector_count, sector_count_log2_exp_width, sector_growth_ratio,
    QuantizerSpec,
};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "AWGN_ID_SEED";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "awgn-id", version, about = "Second-order identification experiments over the AWGN channel")]
pub struct Cli {
    /// Seed for every random stream of the run.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads for Monte Carlo (results do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the main table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Second-order identification and transmission curves over grids.
    Bounds(BoundsArgs),
    /// Instantiate the existence lemma at one blocklength.
    Plan(PlanArgs),
    /// Achievability, approximation and converse side by side.
    Sandwich(SandwichArgs),
    /// Normality of the information density.
    Clt(CltArgs),
    /// Build an identification code and measure its errors.
    SimulateId(SimulateIdArgs),
    /// Total variation of random codebooks against the output law.
    Resolvability(ResolvabilityArgs),
    /// Sector counts and quantization error on the power shell.
    Quantize(QuantizeArgs),
    /// Evaluate the Frey resolvability bound.
    Frey(FreyArgs),
    /// Re-run the command recorded in a previous JSON document.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PowerArgs {
    /// Power constraint P (linear); default 1.
    #[arg(long, conflicts_with = "snr_db")]
    pub power: Option<f64>,
    /// Power constraint as SNR in dB.
    #[arg(long)]
    pub snr_db: Option<f64>,
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl PowerArgs {
    pub fn resolve(&self) -> f64 {
        match (self.power, self.snr_db) {
            (Some(p), _) => p,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => 1.0,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "snr_db")]
    pub power: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub snr_db: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PlanArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerArgs,
    #[arg(long)]
    pub eps: f64,
    /// Berry-Esseen constant B.
    #[arg(long, default_value_t = 1.0)]
    pub berry_b: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SandwichArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerArgs,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub berry_b: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CltArgs {
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionArg {
    IndependentPools,
    SharedPoolSubsets,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SimulateIdArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerArgs,
    #[arg(long, default_value_t = 16)]
    pub messages: usize,
    /// Codewords per message, or the pool size for shared-pool codes.
    #[arg(long, default_value_t = 1)]
    pub codewords: usize,
    #[arg(long, default_value_t = 1)]
    pub subset_size: usize,
    #[arg(long, value_enum, default_value_t = ConstructionArg::IndependentPools)]
    pub construction: ConstructionArg,
    /// Threshold `nC - sqrt(nV) Q^{-1}(eps_design)`, unless --log2-k is given.
    #[arg(long, default_value_t = 0.1)]
    pub eps_design: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub log2_k: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Type-I level to certify.
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    /// Type-II level to certify.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Cap on N (N-1) trials.
    #[arg(long, default_value_t = 1u64 << 32)]
    pub budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetArg {
    Shell,
    Cao,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ResolvabilityArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerArgs,
    /// Rates in bits; default C - 0.25, C, C + 0.25, C + 0.5.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub rates: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = TargetArg::Shell)]
    pub target: TargetArg,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct QuantizeArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerArgs,
    /// Sector width in radians; default pi/8.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Number of random shell atoms in the input distribution.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FreyArgs {
    #[arg(long)]
    pub n: u64,
    /// Mutual information I in bits; default C(P).
    #[arg(long)]
    pub mutual_info: Option<f64>,
    /// Central second moment V; default V(P).
    #[arg(long)]
    pub central_second: Option<f64>,
    /// Absolute third moment rho.
    #[arg(long)]
    pub third_abs: f64,
    #[arg(long)]
    pub xi: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub power: PowerArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// JSON document written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
}

/// What gets echoed to stderr for each run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub artifact_version: String,
    pub started: u128,
    pub finished: u128,
}

fn unix_millis() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Result of one subcommand: the JSON payload and an optional CSV table.
struct Output {
    results: Value,
    csv: Option<Vec<u8>>,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize)]
struct BoundsRow {
    n: usize,
    power: f64,
    eps: f64,
    capacity: f64,
    dispersion: f64,
    #[serde(rename = "loglog_N")]
    loglog_n: f64,
    #[serde(rename = "log_M")]
    log_m: f64,
    first_term: f64,
    second_term: f64,
}

fn bounds(a: &BoundsArgs) -> Result<Output> {
    let powers: Vec<f64> = match (a.power.is_empty(), a.snr_db.is_empty()) {
        (false, _) => a.power.clone(),
        (true, false) => a.snr_db.iter().map(|&d| db_to_linear(d)).collect(),
        (true, true) => vec![1.0],
    };
    let mut rows = Vec::new();
    for &n in &a.n {
        for &p in &powers {
            let spec = ChannelSpec::new(n, p)?;
            for &eps in &a.eps {
                let id = id_second_order(&spec, eps)?;
                let tr = transmission_second_order(&spec, eps)?;
                rows.push(BoundsRow {
                    n,
                    power: p,
                    eps,
                    capacity: capacity(p)?,
                    dispersion: dispersion(p)?,
                    loglog_n: id.value,
                    log_m: tr.value,
                    first_term: id.first_term,
                    second_term: id.second_term,
                });
            }
        }
    }
    Ok(Output { csv: Some(csv_bytes(&rows)?), results: json!({ "rows": to_value(&rows)? }) })
}

fn plan(a: &PlanArgs) -> Result<Output> {
    let spec = ChannelSpec::new(a.n, a.power.resolve())?;
    let plan = plan_achievability(&spec, a.eps, a.berry_b)?;
    let mut results = to_value(&plan)?;
    results["loglog2_N"] = to_value(&plan.loglog2_n())?;
    Ok(Output { results, csv: None })
}

fn sandwich(a: &SandwichArgs) -> Result<Output> {
    let rows = sandwich_report(&a.n, a.power.resolve(), a.eps, a.berry_b);
    Ok(Output { csv: Some(csv_bytes(&rows)?), results: json!({ "rows": to_value(&rows)? }) })
}

#[derive(Serialize)]
struct CltRow {
    n: usize,
    trials: usize,
    ks_distance: f64,
    berry_esseen_estimate: f64,
    mean: f64,
    std_dev: f64,
    per_symbol_mean: f64,
    per_symbol_scaled_variance: f64,
    capacity: f64,
    dispersion: f64,
}

fn clt(a: &CltArgs, stream: &RngStream) -> Result<Output> {
    let p = a.power.resolve();
    let mut rows = Vec::new();
    for (k, &n) in a.n.iter().enumerate() {
        let spec = ChannelSpec::new(n, p)?;
        let s = stream.fork(k as u64);
        let x = sample_shell(&spec, &s.fork(0));
        let report = clt_diagnostic(&spec, &x, a.trials, &s.fork(1))?;
        let moments = estimate_moments(&spec, &x, a.trials, &s.fork(2))?;
        rows.push(CltRow {
            n,
            trials: a.trials,
            ks_distance: report.ks_distance,
            berry_esseen_estimate: report.berry_esseen_estimate,
            mean: report.mean,
            std_dev: report.std_dev,
            per_symbol_mean: moments.mean,
            per_symbol_scaled_variance: n as f64 * moments.variance,
            capacity: capacity(p)?,
            dispersion: dispersion(p)?,
        });
    }
    Ok(Output { csv: Some(csv_bytes(&rows)?), results: json!({ "rows": to_value(&rows)? }) })
}

#[derive(Serialize)]
struct PairRow {
    sent: usize,
    tested: usize,
    value: f64,
    ci_low: f64,
    ci_high: f64,
    trials: usize,
}

fn simulate_id(a: &SimulateIdArgs, stream: &RngStream) -> Result<Output> {
    let spec = ChannelSpec::new(a.n, a.power.resolve())?;
    let log2_k = match a.log2_k {
        Some(k) => k,
        None => id_second_order(&spec, a.eps_design)?.value,
    };
    let design = IdCodeDesign {
        messages: a.messages,
        codewords: a.codewords,
        subset_size: a.subset_size,
        log2_k,
        construction: match a.construction {
            ConstructionArg::IndependentPools => Construction::IndependentPools,
            ConstructionArg::SharedPoolSubsets => Construction::SharedPoolSubsets,
        },
    };
    let code = build_id_code(&spec, &design, &stream.fork(0))?;
    let profile = code_error_profile(&code, a.trials, &stream.fork(1), a.eps, a.delta, a.budget as u128)?;
    let rows: Vec<PairRow> = profile
        .type2
        .iter()
        .map(|p| PairRow {
            sent: p.sent,
            tested: p.tested,
            value: p.estimate.value,
            ci_low: p.estimate.ci_low,
            ci_high: p.estimate.ci_high,
            trials: p.estimate.trials,
        })
        .collect();
    let results = json!({
        "log2_K": log2_k,
        "messages": code.messages(),
        "per_message_codewords": code.per_message_codewords(),
        "pool_size": code.pool_size(),
        "profile": to_value(&profile)?,
    });
    Ok(Output { results, csv: Some(csv_bytes(&rows)?) })
}

fn resolvability(a: &ResolvabilityArgs, stream: &RngStream) -> Result<Output> {
    let spec = ChannelSpec::new(a.n, a.power.resolve())?;
    let rates = if a.rates.is_empty() {
        let c = capacity(spec.power())?;
        vec![c - 0.25, c, c + 0.25, c + 0.5]
    } else {
        a.rates.clone()
    };
    let target = match a.target {
        TargetArg::Shell => ResolvabilityTarget::Shell,
        TargetArg::Cao => ResolvabilityTarget::Cao,
    };
    let rows = resolvability_experiment(&spec, &rates, a.trials, stream, target)?;
    let mut buf = Vec::new();
    write_curve_csv(&rows, &mut buf)?;
    Ok(Output { results: json!({ "target": target, "rows": to_value(&rows)? }), csv: Some(buf) })
}

fn quantize(a: &QuantizeArgs, stream: &RngStream) -> Result<Output> {
    let spec = ChannelSpec::new(a.n, a.power.resolve())?;
    let theta = a.theta.unwrap_or(PI / 8.0);
    let qs = QuantizerSpec::for_channel(&spec, theta)?;
    if a.points == 0 {
        return Err(Error::Domain("need at least one shell point".into()));
    }
    let atoms: Vec<(Vec<f64>, f64)> = (0..a.points)
        .map(|k| (sample_shell(&spec, &stream.fork(0).fork(k as u64)), 1.0))
        .collect();
    let report = quantization_tv_report(&atoms, &qs, &spec, a.trials, &stream.fork(1))?;
    let results = json!({
        "sector_count": to_value(&sector_count(&qs)?)?,
        "grid_sector_count": to_value(&qs.grid_sector_count())?,
        "count_polar": qs.count_polar(),
        "count_azimuthal": qs.count_azimuthal(),
        "log2_sector_count_at_exp_width": sector_count_log2_exp_width(a.n),
        "growth_ratio": sector_growth_ratio(a.n).ok(),
        "tv_report": to_value(&report)?,
        "closed_form_slack": quantization_slack(a.n, spec.power()),
    });
    Ok(Output { results, csv: None })
}

fn frey(a: &FreyArgs) -> Result<Output> {
    let p = a.power.resolve();
    let fp = FreyParams {
        mutual_info: match a.mutual_info {
            Some(i) => i,
            None => capacity(p)?,
        },
        central_second: match a.central_second {
            Some(v) => v,
            None => dispersion(p)?,
        },
        third_abs: a.third_abs,
        xi: a.xi,
        c: a.c,
        d: a.d,
        n: a.n,
    };
    let b = frey_bound(&fp)?;
    Ok(Output { results: json!({ "inputs": to_value(&fp)?, "bound": to_value(&b)? }), csv: None })
}

fn execute(command: &Command, seed: u64) -> Result<Output> {
    let stream = RngStream::new(seed, 0);
    match command {
        Command::Bounds(a) => bounds(a),
        Command::Plan(a) => plan(a),
        Command::Sandwich(a) => sandwich(a),
        Command::Clt(a) => clt(a, &stream),
        Command::SimulateId(a) => simulate_id(a, &stream),
        Command::Resolvability(a) => resolvability(a, &stream),
        Command::Quantize(a) => quantize(a, &stream),
        Command::Frey(a) => frey(a),
        Command::Replay(_) => Err(Error::Domain("replay cannot be nested".into())),
    }
}

/// Reads a previous result document and returns its command and seed.
fn load_manifest(path: &PathBuf) -> Result<(Command, u64)> {
    let text = fs::read_to_string(path)?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let seed = doc["seed"].as_u64().ok_or_else(|| Error::Parse("manifest has no integer seed".into()))?;
    let tagged = json!({ "command": doc["command"], "params": doc["params"] });
    let command: Command = serde_json::from_value(tagged).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((command, seed))
}

fn run_parsed(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let (command, seed) = match &cli.command {
        Command::Replay(r) => load_manifest(&r.manifest)?,
        other => (other.clone(), cli.seed),
    };
    let tagged = to_value(&command)?;
    let started = unix_millis();
    let output = match cli.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Domain(e.to_string()))?
            .install(|| execute(&command, seed))?,
        None => execute(&command, seed)?,
    };
    let finished = unix_millis();
    let manifest = ExperimentManifest {
        command: tagged["command"].as_str().unwrap_or_default().to_string(),
        params: tagged["params"].clone(),
        seed,
        artifact_version: ARTIFACT_VERSION.to_string(),
        started,
        finished,
    };
    let doc = json!({
        "command": manifest.command,
        "params": manifest.params,
        "seed": seed,
        "results": output.results,
        "diagnostics": {
            "artifact_version": manifest.artifact_version,
            "started": started,
            "finished": finished,
        },
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    match &cli.out {
        Some(path) => fs::write(path, &text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    if let (Some(path), Some(bytes)) = (&cli.csv, &output.csv) {
        fs::write(path, bytes)?;
    }
    let echo = serde_json::to_string(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(stderr, "manifest: {echo}")?;
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code:
/// 0 on success, 1 on numeric or I/O errors, 2 on usage errors.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match run_parsed(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
