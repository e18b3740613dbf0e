//! Command-line front end.
//!
//! Every command is first resolved into a [`JobConfig`], which is what
//! [`execute`] consumes. The resolved config is written next to the results
//! as `config.json`; feeding that file back through `--config` repeats the
//! job exactly.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{run_with, RunConfig, State, ZeroFieldRule};
use crate::error::{Error, Result};
use crate::experiments::{
    self, extract_boundary, extract_boundary_with, read_sweep_csv, run_perturbation_ensemble,
    run_sweep, write_ensemble_csv, write_sweep_csv, EnsembleSpec, FitRange, SweepGrid, SweepKind,
    SweepSpec,
};
use crate::metrics;
use crate::reservoir::{generate_reservoir, ReservoirParams};
use crate::rng::{self, streams};
use crate::signals::{SignalKind, SignalSpec};
use crate::theory::{self, CriticalDegree};

pub const CONFIG_FILE: &str = "config.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub job: Job,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Generate(NetworkParams),
    Run(RunParams),
    Perturb(PerturbParams),
    SweepPhase(PhaseSweepParams),
    SweepNoise(NoiseSweepParams),
    SweepNoisePhase(NoisePhaseSweepParams),
    SweepSignal(SignalSweepParams),
    FitBoundary(FitParams),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Generate(_) => "generate",
            Job::Run(_) => "run",
            Job::Perturb(_) => "perturb",
            Job::SweepPhase(_) => "sweep-phase",
            Job::SweepNoise(_) => "sweep-noise",
            Job::SweepNoisePhase(_) => "sweep-noise-phase",
            Job::SweepSignal(_) => "sweep-signal",
            Job::FitBoundary(_) => "fit-boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    pub n_neurons: usize,
    pub mean_degree: f64,
    pub asymmetry: f64,
}

impl NetworkParams {
    fn reservoir(&self, seed: u64) -> ReservoirParams {
        ReservoirParams::new(self.n_neurons, self.mean_degree, self.asymmetry, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunParams {
    pub network: NetworkParams,
    pub noise_gain: f64,
    pub signal: SignalKind,
    pub signal_gain: f64,
    pub horizon: usize,
    pub burn_in: usize,
    pub bias: f64,
    pub zero_field: ZeroFieldRule,
    pub dump_states: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbParams {
    pub network: NetworkParams,
    pub bias: f64,
    pub copies: usize,
    pub horizon: usize,
    pub zero_field: ZeroFieldRule,
}

/// Settings shared by all sweep commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCommon {
    pub d_values: Vec<f64>,
    pub n_neurons: usize,
    pub horizon: usize,
    pub burn_in: usize,
    pub replicates: usize,
    pub initial_bias: f64,
    pub zero_field: ZeroFieldRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSweepParams {
    pub mean_degrees: Vec<f64>,
    pub common: SweepCommon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSweepParams {
    pub mean_degree: f64,
    pub noise_gains: Vec<f64>,
    pub common: SweepCommon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisePhaseSweepParams {
    pub noise_gain: f64,
    pub mean_degrees: Vec<f64>,
    pub common: SweepCommon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSweepParams {
    pub mean_degree: f64,
    pub signal: SignalKind,
    pub gains: Vec<f64>,
    pub common: SweepCommon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitParams {
    pub input: PathBuf,
    pub threshold: f64,
    pub fit_range: FitRange,
}

impl JobConfig {
    /// Checks every parameter without touching the file system.
    pub fn validate(&self) -> Result<()> {
        self.validate_inner().map_err(to_config_error)
    }

    fn validate_inner(&self) -> Result<()> {
        match &self.job {
            Job::Generate(p) => p.reservoir(self.master_seed).validate(),
            Job::Run(p) => {
                p.network.reservoir(self.master_seed).validate()?;
                check_probability("bias", p.bias)?;
                run_config(p, self.master_seed).validate()?;
                if p.burn_in > p.horizon {
                    return Err(Error::domain(
                        "burn_in",
                        format!("{} exceeds horizon {}", p.burn_in, p.horizon),
                    ));
                }
                Ok(())
            }
            Job::Perturb(p) => {
                p.network.reservoir(self.master_seed).validate()?;
                check_probability("bias", p.bias)?;
                if p.horizon == 0 {
                    return Err(Error::domain("horizon", "must be at least 1"));
                }
                if p.copies == 0 || p.copies > p.network.n_neurons {
                    return Err(Error::domain(
                        "copies",
                        format!("{} not in [1, {}]", p.copies, p.network.n_neurons),
                    ));
                }
                Ok(())
            }
            Job::SweepSignal(p) if p.signal == SignalKind::Zero => Err(Error::domain(
                "signal",
                "signal sweep needs white_noise or multisine",
            )),
            Job::FitBoundary(p) => {
                if p.threshold.is_finite() && p.threshold > 0.0 && p.threshold < 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain(
                        "threshold",
                        format!("{} not in (0, 1)", p.threshold),
                    ))
                }
            }
            _ => self.sweep_spec().expect("sweep job").validate(),
        }
    }

    fn sweep_spec(&self) -> Option<SweepSpec> {
        let (kind, x, common) = match &self.job {
            Job::SweepPhase(p) => (SweepKind::Phase, &p.mean_degrees, &p.common),
            Job::SweepNoise(p) => (
                SweepKind::Noise {
                    mean_degree: p.mean_degree,
                },
                &p.noise_gains,
                &p.common,
            ),
            Job::SweepNoisePhase(p) => (
                SweepKind::NoisePhase {
                    noise_gain: p.noise_gain,
                },
                &p.mean_degrees,
                &p.common,
            ),
            Job::SweepSignal(p) => (
                SweepKind::Signal {
                    mean_degree: p.mean_degree,
                    signal: p.signal,
                },
                &p.gains,
                &p.common,
            ),
            _ => return None,
        };
        Some(SweepSpec {
            n_neurons: common.n_neurons,
            horizon: common.horizon,
            burn_in: common.burn_in,
            replicates: common.replicates,
            initial_bias: common.initial_bias,
            master_seed: self.master_seed,
            zero_field: common.zero_field,
            ..SweepSpec::new(kind, x.clone(), common.d_values.clone())
        })
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(name, format!("{p} is not a probability")))
    }
}

fn run_config(p: &RunParams, seed: u64) -> RunConfig {
    RunConfig {
        signal: SignalSpec::of_kind(p.signal, p.signal_gain, seed),
        noise_gain: p.noise_gain,
        horizon: p.horizon,
        zero_field: p.zero_field,
    }
}

/// Command-line flag that sets a library parameter.
pub fn flag_for(name: &str) -> &str {
    match name {
        "n_neurons" => "--n",
        "mean_degree" | "degree" => "--k",
        "asymmetry" => "--d",
        "noise_gain" => "--nu",
        "gain" | "signal_gain" => "--gain",
        "horizon" => "--t",
        "burn_in" => "--t0",
        "replicates" => "--replicates",
        "copies" => "--copies",
        "bias" | "initial_bias" => "--bias",
        "signal" | "signal kind" => "--signal",
        "threshold" => "--threshold",
        other => other,
    }
}

fn to_config_error(e: Error) -> Error {
    match e {
        Error::Domain { name, reason } => Error::Config {
            key: flag_for(name).to_string(),
            reason,
        },
        Error::Cell { source, .. } => to_config_error(*source),
        other => other,
    }
}

/// What a finished job reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// One-line human readable summary.
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Validates, runs and writes all outputs of `config`.
pub fn execute(config: &JobConfig) -> Result<Outcome> {
    config.validate()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let (summary, details) = match &config.job {
        Job::Generate(p) => generate(config, p, &mut files)?,
        Job::Run(p) => simulate_run(config, p, &mut files)?,
        Job::Perturb(p) => perturb(config, p, &mut files)?,
        Job::FitBoundary(p) => fit_boundary(config, p, &mut files)?,
        _ => sweep(config, &mut files)?,
    };
    let config_path = dir.join(CONFIG_FILE);
    write_json(&config_path, &config)?;
    files.push(config_path);
    let summary_path = dir.join(SUMMARY_FILE);
    write_json(
        &summary_path,
        &json!({ "config": config, "summary": summary, "result": details }),
    )?;
    files.push(summary_path);
    Ok(Outcome { summary, files })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, mut out: BufWriter<File>) -> Result<()> {
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    finish(path, out)
}

fn theory_line(mean_degree: f64, d: f64) -> Result<(String, Value)> {
    let kc = theory::critical_degree(d)?;
    let regime = theory::predicted_regime(mean_degree, d);
    let value = match kc {
        CriticalDegree::Finite(k) => json!(k),
        CriticalDegree::AlwaysChaotic => Value::Null,
    };
    Ok((
        format!("theory: {regime} (k_c = {:.1})", kc.value()),
        json!({ "regime": regime, "critical_degree": value }),
    ))
}

fn generate(
    config: &JobConfig,
    p: &NetworkParams,
    files: &mut Vec<PathBuf>,
) -> Result<(String, Value)> {
    let reservoir = generate_reservoir(p.reservoir(config.master_seed))?;
    let path = config.output_dir.join("reservoir.json");
    write_json(&path, &reservoir)?;
    files.push(path);
    let links = reservoir.link_count();
    let mean_in_degree = links as f64 / p.n_neurons as f64;
    let positive = if links == 0 {
        0.0
    } else {
        reservoir.positive_link_count() as f64 / links as f64
    };
    let (theory, theory_json) = theory_line(p.mean_degree, p.asymmetry)?;
    Ok((
        format!(
            "{links} links, mean in-degree {mean_in_degree:.3}, {:.1}% positive; {theory}",
            100.0 * positive
        ),
        json!({
            "links": links,
            "mean_in_degree": mean_in_degree,
            "positive_fraction": positive,
            "theory": theory_json,
        }),
    ))
}

fn simulate_run(
    config: &JobConfig,
    p: &RunParams,
    files: &mut Vec<PathBuf>,
) -> Result<(String, Value)> {
    let seed = config.master_seed;
    let reservoir = generate_reservoir(p.network.reservoir(seed))?;
    let initial = State::random(
        p.network.n_neurons,
        p.bias,
        &mut rng::stream(seed, streams::INITIAL_STATE),
    )?;
    let mut noise = rng::stream(seed, streams::NOISE);
    let trajectory = run_with(&reservoir, &initial, &run_config(p, seed), Some(&mut noise))?;

    let path = config.output_dir.join("trajectory.csv");
    let mut out = create(&path)?;
    trajectory.write_indicators_csv(&mut out)?;
    finish(&path, out)?;
    files.push(path);
    if p.dump_states {
        let path = config.output_dir.join("states.csv");
        let mut out = create(&path)?;
        trajectory.write_states_csv(&mut out)?;
        finish(&path, out)?;
        files.push(path);
    }

    let mean_entropy = if p.burn_in < p.horizon {
        Some(metrics::mean_entropy(&trajectory, p.burn_in, p.horizon)?)
    } else {
        None
    };
    let fixed_point = trajectory.first_fixed_point();
    let (theory, theory_json) = theory_line(p.network.mean_degree, p.network.asymmetry)?;
    let mut line = match mean_entropy {
        Some(h) => format!(
            "mean entropy {h:.4} over n in [{}, {}]",
            p.burn_in, p.horizon
        ),
        None => format!(
            "final entropy {:.4}",
            metrics::entropy(&trajectory.states[p.horizon])
        ),
    };
    if let Some(n) = fixed_point {
        line.push_str(&format!(", fixed point at n = {n}"));
    }
    Ok((
        format!("{line}; {theory}"),
        json!({
            "mean_entropy": mean_entropy,
            "first_fixed_point": fixed_point,
            "final_energy": trajectory.indicators.energy[p.horizon],
            "theory": theory_json,
        }),
    ))
}

fn perturb(
    config: &JobConfig,
    p: &PerturbParams,
    files: &mut Vec<PathBuf>,
) -> Result<(String, Value)> {
    let spec = EnsembleSpec {
        n_neurons: p.network.n_neurons,
        mean_degree: p.network.mean_degree,
        asymmetry: p.network.asymmetry,
        bias: p.bias,
        copies: p.copies,
        horizon: p.horizon,
        seed: config.master_seed,
        zero_field: p.zero_field,
    };
    let result = run_perturbation_ensemble(&spec)?;
    let path = config.output_dir.join("ensemble.csv");
    let mut out = create(&path)?;
    write_ensemble_csv(&result, &mut out)?;
    finish(&path, out)?;
    files.push(path);
    let last = result.final_step();
    let (theory, theory_json) = theory_line(p.network.mean_degree, p.network.asymmetry)?;
    Ok((
        format!(
            "hamming at n = {}: {:.4} (std {:.4}), entropy {:.4}; {theory}",
            p.horizon, last.hamming.mean, last.hamming.std, last.entropy.mean
        ),
        json!({
            "final_step": last,
            "flipped": result.flipped,
            "theory": theory_json,
        }),
    ))
}

fn boundary_summary(grid: &SweepGrid) -> (String, Value) {
    match extract_boundary(grid, experiments::DEFAULT_THRESHOLD) {
        Ok(fit) => (
            format!(
                "boundary d* = {:.4} {} + {:.4} from {} of {} columns",
                fit.slope,
                grid.x_axis.name,
                fit.intercept,
                fit.fitted_x.len(),
                grid.nx()
            ),
            json!({ "boundary": fit }),
        ),
        Err(_) => (
            "no entropy crossing of 0.5 along d".to_string(),
            json!({ "boundary": Value::Null }),
        ),
    }
}

fn sweep(config: &JobConfig, files: &mut Vec<PathBuf>) -> Result<(String, Value)> {
    let spec = config.sweep_spec().expect("sweep job");
    let grid = run_sweep(&spec)?;
    let path = config.output_dir.join("sweep.csv");
    let mut out = create(&path)?;
    write_sweep_csv(&grid, &mut out)?;
    finish(&path, out)?;
    files.push(path);
    Ok(boundary_summary(&grid))
}

fn fit_boundary(
    config: &JobConfig,
    p: &FitParams,
    files: &mut Vec<PathBuf>,
) -> Result<(String, Value)> {
    let input = File::open(&p.input).map_err(|e| Error::io(&p.input, e))?;
    let grid = read_sweep_csv(input)?;
    let fit = extract_boundary_with(&grid, p.threshold, p.fit_range)?;
    let path = config.output_dir.join("boundary.json");
    write_json(&path, &fit)?;
    files.push(path);
    Ok((
        format!(
            "slope {:.4}, intercept {:.4}, rms residual {:.4} over {} columns",
            fit.slope,
            fit.intercept,
            fit.residual,
            fit.fitted_x.len()
        ),
        json!({ "boundary": fit }),
    ))
}

/// Parses `start:end:count` or a comma separated list.
pub fn parse_axis(s: &str) -> std::result::Result<Vec<f64>, String> {
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, end, count] => {
            let count = count
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("`{count}` is not a count"))?;
            if count == 0 {
                return Err("count must be at least 1".into());
            }
            Ok(experiments::linspace(number(start)?, number(end)?, count))
        }
        [list] => list.split(',').map(number).collect(),
        _ => Err(format!("`{s}` is neither start:end:count nor a comma list")),
    }
}

/// Values of one sweep axis given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisArg(pub Vec<f64>);

fn parse_axis_arg(s: &str) -> std::result::Result<AxisArg, String> {
    parse_axis(s).map(AxisArg)
}

fn parse_zero_field(s: &str) -> std::result::Result<ZeroFieldRule, String> {
    match s {
        "positive" => Ok(ZeroFieldRule::Positive),
        "hold" => Ok(ZeroFieldRule::Hold),
        other => Err(format!(
            "unknown rule `{other}` (expected positive or hold)"
        )),
    }
}

fn parse_fit_range(s: &str) -> std::result::Result<FitRange, String> {
    match s {
        "auto" => Ok(FitRange::Auto),
        "all" => Ok(FitRange::All),
        other => Err(format!("unknown range `{other}` (expected auto or all)")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "besn", version, about = "Binary echo state network simulator")]
pub struct Cli {
    /// Run the job stored in a config JSON file instead of a subcommand.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Print the resolved config JSON and exit without running.
    #[arg(long, global = true)]
    pub emit_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "besn-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NetworkArgs {
    /// Number of neurons.
    #[arg(long, default_value_t = 1000, allow_negative_numbers = true)]
    pub n: usize,
    /// Mean degree.
    #[arg(long, default_value_t = 22.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Asymmetry of positive over negative links.
    #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
    pub d: f64,
}

impl From<&NetworkArgs> for NetworkParams {
    fn from(a: &NetworkArgs) -> Self {
        NetworkParams {
            n_neurons: a.n,
            mean_degree: a.k,
            asymmetry: a.d,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Number of neurons.
    #[arg(long, default_value_t = 1000, allow_negative_numbers = true)]
    pub n: usize,
    /// Simulated steps.
    #[arg(long, default_value_t = 300, allow_negative_numbers = true)]
    pub t: usize,
    /// First step of the entropy average.
    #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
    pub t0: usize,
    /// Networks per grid cell.
    #[arg(long, default_value_t = 8, allow_negative_numbers = true)]
    pub replicates: usize,
    /// Probability of +1 in random initial states.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub bias: f64,
    /// Output at zero local field: positive or hold.
    #[arg(long, default_value = "positive", value_parser = parse_zero_field)]
    pub zero_field: ZeroFieldRule,
}

impl SweepArgs {
    fn common(&self, d_values: Vec<f64>) -> SweepCommon {
        SweepCommon {
            d_values,
            n_neurons: self.n,
            horizon: self.t,
            burn_in: self.t0,
            replicates: self.replicates,
            initial_bias: self.bias,
            zero_field: self.zero_field,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a reservoir and write it as JSON.
    Generate {
        #[command(flatten)]
        network: NetworkArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate one trajectory and write its indicators.
    Run {
        #[command(flatten)]
        network: NetworkArgs,
        /// Noise gain.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        nu: f64,
        /// Input signal: zero, white-noise or multisine.
        #[arg(long, default_value = "zero")]
        signal: SignalKind,
        /// Input signal gain.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gain: f64,
        /// Simulated steps.
        #[arg(long, default_value_t = 300, allow_negative_numbers = true)]
        t: usize,
        /// First step of the entropy average.
        #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
        t0: usize,
        /// Probability of +1 in the initial state.
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        bias: f64,
        /// Output at zero local field: positive or hold.
        #[arg(long, default_value = "positive", value_parser = parse_zero_field)]
        zero_field: ZeroFieldRule,
        /// Also write every state to states.csv.
        #[arg(long)]
        dump_states: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run single-neuron perturbations of one initial state.
    Perturb {
        #[command(flatten)]
        network: NetworkArgs,
        /// Probability of +1 in the reference initial state.
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        bias: f64,
        /// Perturbed copies.
        #[arg(long, default_value_t = 50, allow_negative_numbers = true)]
        copies: usize,
        /// Simulated steps.
        #[arg(long, default_value_t = 300, allow_negative_numbers = true)]
        t: usize,
        /// Output at zero local field: positive or hold.
        #[arg(long, default_value = "positive", value_parser = parse_zero_field)]
        zero_field: ZeroFieldRule,
        #[command(flatten)]
        common: Common,
    },
    /// Autonomous sweep over mean degree and asymmetry.
    SweepPhase {
        /// Mean degree axis.
        #[arg(long, default_value = "4:300:20", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        k: AxisArg,
        /// Asymmetry axis.
        #[arg(long, default_value = "0.03:0.4:20", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        d: AxisArg,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep over noise gain and asymmetry at fixed mean degree.
    SweepNoise {
        /// Mean degree.
        #[arg(long, default_value_t = 200.0, allow_negative_numbers = true)]
        k: f64,
        /// Noise gain axis.
        #[arg(long, default_value = "0:0.3:16", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        nu: AxisArg,
        /// Asymmetry axis.
        #[arg(long, default_value = "0:0.35:36", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        d: AxisArg,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep over mean degree and asymmetry at fixed noise gain.
    SweepNoisePhase {
        /// Noise gain.
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        nu: f64,
        /// Mean degree axis.
        #[arg(long, default_value = "4:300:20", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        k: AxisArg,
        /// Asymmetry axis.
        #[arg(long, default_value = "0.03:0.4:20", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        d: AxisArg,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep over input gain and asymmetry at fixed mean degree.
    SweepSignal {
        /// Mean degree.
        #[arg(long, default_value_t = 150.0, allow_negative_numbers = true)]
        k: f64,
        /// Input signal: white-noise or multisine.
        #[arg(long, default_value = "white-noise")]
        signal: SignalKind,
        /// Input gain axis.
        #[arg(long, default_value = "0,0.5,1,2", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        gain: AxisArg,
        /// Asymmetry axis.
        #[arg(long, default_value = "0:0.2:41", value_parser = parse_axis_arg, allow_hyphen_values = true)]
        d: AxisArg,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Fit a linear entropy boundary to a sweep CSV.
    FitBoundary {
        /// Sweep CSV to read.
        #[arg(long)]
        input: PathBuf,
        /// Entropy level of the boundary.
        #[arg(long, default_value_t = experiments::DEFAULT_THRESHOLD, allow_negative_numbers = true)]
        threshold: f64,
        /// Columns entering the fit: auto or all.
        #[arg(long, default_value = "auto", value_parser = parse_fit_range)]
        fit_range: FitRange,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    /// Resolves the parsed flags into a config.
    pub fn into_config(self) -> JobConfig {
        let (job, common) = match self {
            Command::Generate { network, common } => (Job::Generate((&network).into()), common),
            Command::Run {
                network,
                nu,
                signal,
                gain,
                t,
                t0,
                bias,
                zero_field,
                dump_states,
                common,
            } => (
                Job::Run(RunParams {
                    network: (&network).into(),
                    noise_gain: nu,
                    signal,
                    signal_gain: gain,
                    horizon: t,
                    burn_in: t0,
                    bias,
                    zero_field,
                    dump_states,
                }),
                common,
            ),
            Command::Perturb {
                network,
                bias,
                copies,
                t,
                zero_field,
                common,
            } => (
                Job::Perturb(PerturbParams {
                    network: (&network).into(),
                    bias,
                    copies,
                    horizon: t,
                    zero_field,
                }),
                common,
            ),
            Command::SweepPhase {
                k,
                d,
                sweep,
                common,
            } => (
                Job::SweepPhase(PhaseSweepParams {
                    mean_degrees: k.0,
                    common: sweep.common(d.0),
                }),
                common,
            ),
            Command::SweepNoise {
                k,
                nu,
                d,
                sweep,
                common,
            } => (
                Job::SweepNoise(NoiseSweepParams {
                    mean_degree: k,
                    noise_gains: nu.0,
                    common: sweep.common(d.0),
                }),
                common,
            ),
            Command::SweepNoisePhase {
                nu,
                k,
                d,
                sweep,
                common,
            } => (
                Job::SweepNoisePhase(NoisePhaseSweepParams {
                    noise_gain: nu,
                    mean_degrees: k.0,
                    common: sweep.common(d.0),
                }),
                common,
            ),
            Command::SweepSignal {
                k,
                signal,
                gain,
                d,
                sweep,
                common,
            } => (
                Job::SweepSignal(SignalSweepParams {
                    mean_degree: k,
                    signal,
                    gains: gain.0,
                    common: sweep.common(d.0),
                }),
                common,
            ),
            Command::FitBoundary {
                input,
                threshold,
                fit_range,
                common,
            } => (
                Job::FitBoundary(FitParams {
                    input,
                    threshold,
                    fit_range,
                }),
                common,
            ),
        };
        JobConfig {
            master_seed: common.seed,
            output_dir: common.out,
            job,
        }
    }
}

/// Reads a config JSON file.
pub fn load_config(path: &Path) -> Result<JobConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn dispatch(cli: Cli) -> Result<()> {
    let config = match (cli.config, cli.command) {
        (Some(path), None) => load_config(&path)?,
        (None, Some(command)) => command.into_config(),
        _ => {
            return Err(Error::Config {
                key: "command".into(),
                reason: "give a subcommand or --config (see --help)".into(),
            })
        }
    };
    if cli.emit_config {
        config.validate()?;
        let _ = writeln!(
            std::io::stdout(),
            "{}",
            serde_json::to_string_pretty(&config)?
        );
        return Ok(());
    }
    let outcome = match cli.jobs {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config {
                key: "--jobs".into(),
                reason: e.to_string(),
            })?
            .install(|| execute(&config))?,
        None => execute(&config)?,
    };
    let _ = writeln!(
        std::io::stdout(),
        "{}: {}",
        config.job.name(),
        outcome.summary
    );
    Ok(())
}

/// Entry point of the `besn` binary.
pub fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn axis_forms() {
        assert_eq!(parse_axis("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_axis("0, 0.5,2").unwrap(), vec![0.0, 0.5, 2.0]);
        assert_eq!(parse_axis("7").unwrap(), vec![7.0]);
        assert!(parse_axis("0:1").is_err());
        assert!(parse_axis("0:1:0").is_err());
        assert!(parse_axis("a,b").is_err());
    }

    #[test]
    fn defaults_resolve() {
        let cli = Cli::try_parse_from(["besn", "run", "--seed", "3"]).unwrap();
        let config = cli.command.unwrap().into_config();
        assert_eq!(config.master_seed, 3);
        let Job::Run(p) = &config.job else { panic!() };
        assert_eq!(p.network.n_neurons, 1000);
        assert_eq!(p.horizon, 300);
        assert_eq!(p.burn_in, 100);
        config.validate().unwrap();
    }

    #[test]
    fn invalid_key_is_named() {
        let cli = Cli::try_parse_from(["besn", "run", "--d", "0.7"]).unwrap();
        let err = cli.command.unwrap().into_config().validate().unwrap_err();
        assert!(
            matches!(&err, Error::Config { key, .. } if key == "--d"),
            "{err}"
        );
        let cli = Cli::try_parse_from(["besn", "sweep-phase", "--t0", "400"]).unwrap();
        let err = cli.command.unwrap().into_config().validate().unwrap_err();
        assert!(
            matches!(&err, Error::Config { key, .. } if key == "--t0"),
            "{err}"
        );
    }

    #[test]
    fn negative_asymmetry_parses() {
        let cli = Cli::try_parse_from(["besn", "generate", "--d", "-0.2"]).unwrap();
        let config = cli.command.unwrap().into_config();
        assert!(matches!(config.job, Job::Generate(p) if p.asymmetry == -0.2));
    }

    #[test]
    fn config_json_round_trip() {
        for args in [
            vec!["besn", "perturb"],
            vec!["besn", "sweep-signal", "--signal", "multisine"],
            vec![
                "besn",
                "fit-boundary",
                "--input",
                "x.csv",
                "--fit-range",
                "all",
            ],
        ] {
            let config = Cli::try_parse_from(args)
                .unwrap()
                .command
                .unwrap()
                .into_config();
            let text = serde_json::to_string(&config).unwrap();
            assert_eq!(serde_json::from_str::<JobConfig>(&text).unwrap(), config);
        }
    }

    #[test]
    fn unknown_config_field_rejected() {
        let text = r#"{"master_seed":0,"output_dir":"o","job":{"command":"generate",
            "n_neurons":10,"mean_degree":2.0,"asymmetry":0.1,"colour":1}}"#;
        assert!(serde_json::from_str::<JobConfig>(text).is_err());
    }
}
