use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use energy_core::testing::Statistic;

use crate::config::{parse_statistic, CalibrationName, Estimator, HalfspaceMethod, ModelKindName, PresetName};

/// Energy distances, halfspace discrepancies and the experiments built on them.
///
/// Every option may also come from a JSON file passed with `--config`; flags take precedence.
/// Results are printed as JSON, or written to `--output-dir` together with CSV tables.
#[derive(Debug, Parser)]
#[command(name = "edist", version, about)]
pub struct Cli {
    /// JSON configuration file (global keys plus one section per subcommand).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for `summary.json` and CSV outputs; without it the summary goes to stdout.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// E_γ² between two CSV samples.
    Energy(EnergyArgs),
    /// Monte Carlo sliced estimate of E_γ².
    Slice(SliceArgs),
    /// Perceptron discrepancy d̄_H with a witness halfspace.
    Halfspace(HalfspaceArgs),
    /// Ramp-feature statistic T_{d,k}.
    Tstat(TstatArgs),
    /// Minimum-energy fit of a parametric generator.
    Fit(FitArgs),
    /// Codebook-embedded discrete estimator.
    Discrete(DiscreteArgs),
    /// Sample-size stopping rule over candidate generators.
    Stop(StopArgs),
    /// Two-sample test.
    Test(TestArgs),
    /// Power curves.
    Power(PowerArgs),
    /// Oscillating density pair.
    Construct {
        #[command(subcommand)]
        which: ConstructCommand,
    },
    /// Rate experiments.
    Rates {
        #[command(subcommand)]
        which: RatesCommand,
    },
    /// Timings of the pairwise energy (printed to stderr).
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum ConstructCommand {
    /// Tabulate p_ε, q_ε and report their distances.
    Pair(ConstructPairArgs),
    /// Regression slopes of ‖f_β̄‖_{t,2}, L¹ and d̄_H in r.
    Verify(ConstructVerifyArgs),
    /// E_1 and d̄_H against TV over an ε sweep.
    Tightness(ConstructTightnessArgs),
}

#[derive(Debug, Subcommand)]
pub enum RatesCommand {
    /// E TV² of the discrete estimator against n.
    Discrete(RatesDiscreteArgs),
    /// E[E_γ²(ν_n, ν)] for uniform-ball ν against the concentration bound.
    Concentration(RatesConcentrationArgs),
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub estimator: Option<Estimator>,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n_dirs: Option<usize>,
    /// Also report the exact 1-D energy along this (unit) direction.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub direction: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct HalfspaceArgs {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<HalfspaceMethod>,
    #[arg(long)]
    pub n_dirs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TstatArgs {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n_dirs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKindName>,
    #[arg(long)]
    pub components: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub gamma_preset: Option<PresetName>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub batch_m: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<u64>>,
    #[arg(long)]
    pub delta_target: Option<f64>,
    /// Restrict the estimate to these symbols.
    #[arg(long, value_delimiter = ',')]
    pub support: Option<Vec<usize>>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StopArgs {
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub gamma_preset: Option<PresetName>,
    #[arg(long)]
    pub c_cal: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    /// energy[:γ|:inv-log|:inv-log-log], dhbar or tdk[:k]
    #[arg(long, value_parser = parse_statistic)]
    pub statistic: Option<Statistic>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, value_enum)]
    pub calibration: Option<CalibrationName>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_statistic)]
    pub statistics: Option<Vec<Statistic>>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, value_enum)]
    pub calibration: Option<CalibrationName>,
    #[arg(long)]
    pub permutations: Option<usize>,
    #[arg(long)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConstructPairArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConstructVerifyArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub r_list: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ts: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ConstructTightnessArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub eps_list: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct RatesDiscreteArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub delta_target: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RatesConcentrationArgs {
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub reps: Option<usize>,
}
