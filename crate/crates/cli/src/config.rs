//! Resolved experiment configuration: JSON file sections overridden by command-line flags.

use std::path::{Path, PathBuf};

use energy_core::estimation::{GammaPreset, GeneratorModel};
use energy_core::spectral::ConstructionSide;
use energy_core::testing::{Calibration, Statistic};
use energy_core::{DistributionSpec, GammaOrder};
use serde::{Deserialize, Serialize};

use crate::cli::{Cli, Command, ConstructCommand, RatesCommand};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config file {path}: at `{key}`: {message}")]
    Parse { path: PathBuf, key: String, message: String },
    #[error("missing required field `{0}`")]
    Missing(String),
    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Vstat,
    Ustat,
    Mmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HalfspaceMethod {
    Auto,
    Exact,
    Bruteforce,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKindName {
    GaussianMixture,
    PushforwardAffine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    One,
    InvLog,
    InvLogLog,
}

impl From<PresetName> for GammaPreset {
    fn from(p: PresetName) -> Self {
        match p {
            PresetName::One => GammaPreset::One,
            PresetName::InvLog => GammaPreset::InvLog,
            PresetName::InvLogLog => GammaPreset::InvLogLog,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationName {
    Permutation,
    NullSimulation,
    Threshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyParams {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub gamma: f64,
    pub estimator: Estimator,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            x: None,
            y: None,
            gamma: 1.0,
            estimator: Estimator::Vstat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SliceParams {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub gamma: f64,
    pub n_dirs: usize,
    /// Report the exact one-dimensional energy along this direction as well.
    pub direction: Option<Vec<f64>>,
}

impl Default for SliceParams {
    fn default() -> Self {
        Self {
            x: None,
            y: None,
            gamma: 1.0,
            n_dirs: 1000,
            direction: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HalfspaceParams {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub method: HalfspaceMethod,
    pub n_dirs: usize,
}

impl Default for HalfspaceParams {
    fn default() -> Self {
        Self {
            x: None,
            y: None,
            method: HalfspaceMethod::Auto,
            n_dirs: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TstatParams {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub k: u32,
    pub n_dirs: usize,
}

impl Default for TstatParams {
    fn default() -> Self {
        Self {
            x: None,
            y: None,
            k: 0,
            n_dirs: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitParams {
    pub data: Option<PathBuf>,
    pub model: ModelKindName,
    pub components: usize,
    /// Initial parameters; defaults to zero logits with means at evenly spaced data rows, or
    /// the identity map shifted to the data mean.
    pub init: Option<Vec<f64>>,
    pub gamma: f64,
    pub gamma_preset: Option<PresetName>,
    pub steps: usize,
    pub batch_m: usize,
    pub learning_rate: f64,
    pub gradient_cap: f64,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            data: None,
            model: ModelKindName::GaussianMixture,
            components: 1,
            init: None,
            gamma: 1.0,
            gamma_preset: None,
            steps: 2000,
            batch_m: 64,
            learning_rate: 0.05,
            gradient_cap: energy_core::energy::DEFAULT_GRADIENT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscreteParams {
    pub counts: Option<Vec<u64>>,
    pub delta_target: f64,
    pub support: Option<Vec<usize>>,
    pub max_iter: usize,
}

impl Default for DiscreteParams {
    fn default() -> Self {
        Self {
            counts: None,
            delta_target: 1.0,
            support: None,
            max_iter: 200_000,
        }
    }
}

/// A candidate generator for the stopping rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Candidate {
    Distribution { spec: DistributionSpec },
    /// Fitted model JSON written by `fit`.
    ModelFile { path: PathBuf },
    Model { model: GeneratorModel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopParams {
    pub data: Option<PathBuf>,
    pub candidates: Vec<Candidate>,
    pub delta: f64,
    pub gamma: f64,
    pub gamma_preset: Option<PresetName>,
    pub c_cal: f64,
    pub tau: f64,
}

impl Default for StopParams {
    fn default() -> Self {
        Self {
            data: None,
            candidates: Vec::new(),
            delta: 0.05,
            gamma: 1.0,
            gamma_preset: None,
            c_cal: 1.0,
            tau: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestParams {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub statistic: Statistic,
    pub level: f64,
    pub calibration: Calibration,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            x: None,
            y: None,
            statistic: Statistic::Energy { gamma: 1.0 },
            level: 0.05,
            calibration: Calibration::Permutation { permutations: 999 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecPair {
    pub p: DistributionSpec,
    pub q: DistributionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerParams {
    /// Explicit pair; when absent the construction pair `(β, ε)` is used.
    pub pair: Option<SpecPair>,
    pub beta: f64,
    pub epsilon: f64,
    pub statistics: Vec<Statistic>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub level: f64,
    pub calibration: Calibration,
}

impl Default for PowerParams {
    fn default() -> Self {
        Self {
            pair: None,
            beta: 1.0,
            epsilon: 0.1,
            statistics: vec![
                Statistic::EnergyPreset {
                    preset: GammaPreset::InvLog,
                },
                Statistic::Dhbar,
            ],
            n_list: vec![2000, 5000, 10000],
            trials: 200,
            level: 0.05,
            calibration: Calibration::NullSimulation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructPairParams {
    pub beta: f64,
    pub epsilon: f64,
}

impl Default for ConstructPairParams {
    fn default() -> Self {
        Self { beta: 1.0, epsilon: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructVerifyParams {
    pub beta: f64,
    pub r_list: Vec<u32>,
    /// Defaults to `{−1, 0, 1, β̄ − 1}`.
    pub ts: Option<Vec<f64>>,
}

impl Default for ConstructVerifyParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            r_list: vec![16, 32, 64, 128, 256, 512],
            ts: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstructTightnessParams {
    pub beta: f64,
    pub eps_list: Vec<f64>,
}

impl Default for ConstructTightnessParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            eps_list: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesDiscreteParams {
    pub k: usize,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub delta_target: f64,
}

impl Default for RatesDiscreteParams {
    fn default() -> Self {
        Self {
            k: 32,
            n_list: vec![100, 400, 1600],
            trials: 200,
            delta_target: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConcentrationParams {
    pub dims: Vec<usize>,
    pub gammas: Vec<f64>,
    pub n_list: Vec<usize>,
    pub trials: usize,
}

impl Default for RatesConcentrationParams {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 5],
            gammas: vec![0.5, 1.0, 1.5],
            n_list: vec![50, 200, 800],
            trials: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchParams {
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub gamma: f64,
    pub reps: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        Self {
            sizes: vec![250, 500, 1000, 2000],
            dim: 3,
            gamma: 1.0,
            reps: 3,
        }
    }
}

/// The JSON config file: global keys plus one optional section per subcommand.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    output_dir: Option<PathBuf>,
    energy: Option<EnergyParams>,
    slice: Option<SliceParams>,
    halfspace: Option<HalfspaceParams>,
    tstat: Option<TstatParams>,
    fit: Option<FitParams>,
    discrete: Option<DiscreteParams>,
    stop: Option<StopParams>,
    test: Option<TestParams>,
    power: Option<PowerParams>,
    #[serde(rename = "construct-pair")]
    construct_pair: Option<ConstructPairParams>,
    #[serde(rename = "construct-verify")]
    construct_verify: Option<ConstructVerifyParams>,
    #[serde(rename = "construct-tightness")]
    construct_tightness: Option<ConstructTightnessParams>,
    #[serde(rename = "rates-discrete")]
    rates_discrete: Option<RatesDiscreteParams>,
    #[serde(rename = "rates-concentration")]
    rates_concentration: Option<RatesConcentrationParams>,
    bench: Option<BenchParams>,
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        key: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Subcommand parameters after merging.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Params {
    Energy(EnergyParams),
    Slice(SliceParams),
    Halfspace(HalfspaceParams),
    Tstat(TstatParams),
    Fit(FitParams),
    Discrete(DiscreteParams),
    Stop(StopParams),
    Test(TestParams),
    Power(PowerParams),
    ConstructPair(ConstructPairParams),
    ConstructVerify(ConstructVerifyParams),
    ConstructTightness(ConstructTightnessParams),
    RatesDiscrete(RatesDiscreteParams),
    RatesConcentration(RatesConcentrationParams),
    Bench(BenchParams),
}

/// Fully resolved run configuration. Only `seed` and `params` affect results and are echoed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(flatten)]
    pub params: Params,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
}

macro_rules! set {
    ($target:expr, $flag:expr) => {
        if let Some(v) = $flag {
            $target = v;
        }
    };
    ($target:expr, some $flag:expr) => {
        if let Some(v) = $flag {
            $target = Some(v);
        }
    };
}

fn check_gamma(key: &str, g: f64) -> Result<(), ConfigError> {
    GammaOrder::new(g, 1).map(|_| ()).map_err(|e| invalid(key, e.to_string()))
}

fn check_level(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(key, format!("must lie in (0, 1), got {v}")))
    }
}

fn check_positive(key: &str, v: usize) -> Result<(), ConfigError> {
    if v == 0 {
        Err(invalid(key, "must be positive"))
    } else {
        Ok(())
    }
}

fn require<T>(key: &str, v: &Option<T>) -> Result<(), ConfigError> {
    if v.is_none() {
        Err(ConfigError::Missing(key.to_string()))
    } else {
        Ok(())
    }
}

fn check_list<T>(key: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        Err(invalid(key, "must not be empty"))
    } else {
        Ok(())
    }
}

fn check_statistic(key: &str, s: &Statistic) -> Result<(), ConfigError> {
    match s {
        Statistic::Energy { gamma } => check_gamma(&format!("{key}.gamma"), *gamma),
        Statistic::TDk { k } if *k > 16 => Err(invalid(&format!("{key}.k"), "must be at most 16")),
        _ => Ok(()),
    }
}

fn check_calibration(key: &str, c: &Calibration) -> Result<(), ConfigError> {
    match c {
        Calibration::Permutation { permutations } if *permutations < 99 => {
            Err(invalid(&format!("{key}.permutations"), "need at least 99"))
        }
        Calibration::Threshold { exponent } if !(*exponent > 0.0 && *exponent < 0.5) => {
            Err(invalid(&format!("{key}.exponent"), "must lie in (0, 1/2)"))
        }
        _ => Ok(()),
    }
}

fn calibration_from_flags(
    current: Calibration,
    name: Option<CalibrationName>,
    permutations: Option<usize>,
    exponent: Option<f64>,
) -> Calibration {
    let kind = name.unwrap_or(match current {
        Calibration::Permutation { .. } => CalibrationName::Permutation,
        Calibration::NullSimulation => CalibrationName::NullSimulation,
        Calibration::Threshold { .. } => CalibrationName::Threshold,
    });
    match kind {
        CalibrationName::Permutation => Calibration::Permutation {
            permutations: permutations.unwrap_or(match current {
                Calibration::Permutation { permutations } => permutations,
                _ => 999,
            }),
        },
        CalibrationName::NullSimulation => Calibration::NullSimulation,
        CalibrationName::Threshold => Calibration::Threshold {
            exponent: exponent.unwrap_or(match current {
                Calibration::Threshold { exponent } => exponent,
                _ => energy_core::testing::DEFAULT_THRESHOLD_EXPONENT,
            }),
        },
    }
}

/// Parses a statistic short form: `energy:<γ>`, `energy:inv-log`, `energy:inv-log-log`,
/// `dhbar`, `tdk:<k>`.
pub fn parse_statistic(s: &str) -> Result<Statistic, String> {
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    match (head, arg) {
        ("energy", None) => Ok(Statistic::Energy { gamma: 1.0 }),
        ("energy", Some("inv-log")) => Ok(Statistic::EnergyPreset {
            preset: GammaPreset::InvLog,
        }),
        ("energy", Some("inv-log-log")) => Ok(Statistic::EnergyPreset {
            preset: GammaPreset::InvLogLog,
        }),
        ("energy", Some(g)) => g
            .parse()
            .map(|gamma| Statistic::Energy { gamma })
            .map_err(|_| format!("bad γ in `{s}`")),
        ("dhbar", None) => Ok(Statistic::Dhbar),
        ("tdk", Some(k)) => k.parse().map(|k| Statistic::TDk { k }).map_err(|_| format!("bad k in `{s}`")),
        ("tdk", None) => Ok(Statistic::TDk { k: 0 }),
        _ => Err(format!("unknown statistic `{s}` (energy[:γ|:inv-log|:inv-log-log], dhbar, tdk[:k])")),
    }
}

/// Merges the config file (if any) with the flags and validates the result.
pub fn resolve(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let file = match &cli.config {
        Some(p) => read_file(p)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let threads = cli.threads.or(file.threads);
    if threads == Some(0) {
        return Err(invalid("threads", "must be positive"));
    }
    let output_dir = cli.output_dir.clone().or(file.output_dir);
    let params = match &cli.command {
        Command::Energy(a) => {
            let mut p = file.energy.unwrap_or_default();
            set!(p.x, some a.x.clone());
            set!(p.y, some a.y.clone());
            set!(p.gamma, a.gamma);
            set!(p.estimator, a.estimator);
            require("energy.x", &p.x)?;
            require("energy.y", &p.y)?;
            check_gamma("energy.gamma", p.gamma)?;
            Params::Energy(p)
        }
        Command::Slice(a) => {
            let mut p = file.slice.unwrap_or_default();
            set!(p.x, some a.x.clone());
            set!(p.y, some a.y.clone());
            set!(p.gamma, a.gamma);
            set!(p.n_dirs, a.n_dirs);
            set!(p.direction, some a.direction.clone());
            require("slice.x", &p.x)?;
            require("slice.y", &p.y)?;
            check_gamma("slice.gamma", p.gamma)?;
            check_positive("slice.n_dirs", p.n_dirs)?;
            Params::Slice(p)
        }
        Command::Halfspace(a) => {
            let mut p = file.halfspace.unwrap_or_default();
            set!(p.x, some a.x.clone());
            set!(p.y, some a.y.clone());
            set!(p.method, a.method);
            set!(p.n_dirs, a.n_dirs);
            require("halfspace.x", &p.x)?;
            require("halfspace.y", &p.y)?;
            check_positive("halfspace.n_dirs", p.n_dirs)?;
            Params::Halfspace(p)
        }
        Command::Tstat(a) => {
            let mut p = file.tstat.unwrap_or_default();
            set!(p.x, some a.x.clone());
            set!(p.y, some a.y.clone());
            set!(p.k, a.k);
            set!(p.n_dirs, a.n_dirs);
            require("tstat.x", &p.x)?;
            require("tstat.y", &p.y)?;
            check_positive("tstat.n_dirs", p.n_dirs)?;
            if p.k > 16 {
                return Err(invalid("tstat.k", "must be at most 16"));
            }
            Params::Tstat(p)
        }
        Command::Fit(a) => {
            let mut p = file.fit.unwrap_or_default();
            set!(p.data, some a.data.clone());
            set!(p.model, a.model);
            set!(p.components, a.components);
            set!(p.gamma, a.gamma);
            set!(p.gamma_preset, some a.gamma_preset);
            set!(p.steps, a.steps);
            set!(p.batch_m, a.batch_m);
            set!(p.learning_rate, a.learning_rate);
            require("fit.data", &p.data)?;
            check_gamma("fit.gamma", p.gamma)?;
            check_positive("fit.components", p.components)?;
            if p.batch_m < 2 {
                return Err(invalid("fit.batch_m", "must be at least 2"));
            }
            if !(p.learning_rate >= 0.0 && p.learning_rate.is_finite()) {
                return Err(invalid("fit.learning_rate", "must be finite and nonnegative"));
            }
            Params::Fit(p)
        }
        Command::Discrete(a) => {
            let mut p = file.discrete.unwrap_or_default();
            set!(p.counts, some a.counts.clone());
            set!(p.delta_target, a.delta_target);
            set!(p.support, some a.support.clone());
            set!(p.max_iter, a.max_iter);
            require("discrete.counts", &p.counts)?;
            let counts = p.counts.as_ref().expect("checked");
            if counts.len() < 2 {
                return Err(invalid("discrete.counts", "need at least two symbols"));
            }
            if counts.iter().sum::<u64>() == 0 {
                return Err(invalid("discrete.counts", "histogram is empty"));
            }
            if !(p.delta_target > 0.0 && p.delta_target < 2f64.sqrt()) {
                return Err(invalid("discrete.delta_target", "must lie in (0, √2)"));
            }
            Params::Discrete(p)
        }
        Command::Stop(a) => {
            let mut p = file.stop.unwrap_or_default();
            set!(p.data, some a.data.clone());
            set!(p.delta, a.delta);
            set!(p.gamma, a.gamma);
            set!(p.gamma_preset, some a.gamma_preset);
            set!(p.c_cal, a.c_cal);
            set!(p.tau, a.tau);
            require("stop.data", &p.data)?;
            if p.candidates.is_empty() {
                return Err(ConfigError::Missing("stop.candidates".to_string()));
            }
            check_level("stop.delta", p.delta)?;
            check_gamma("stop.gamma", p.gamma)?;
            if !(p.c_cal > 0.0) {
                return Err(invalid("stop.c_cal", "must be positive"));
            }
            if !(p.tau > 0.0) {
                return Err(invalid("stop.tau", "must be positive"));
            }
            Params::Stop(p)
        }
        Command::Test(a) => {
            let mut p = file.test.unwrap_or_default();
            set!(p.x, some a.x.clone());
            set!(p.y, some a.y.clone());
            set!(p.statistic, a.statistic);
            set!(p.level, a.level);
            p.calibration = calibration_from_flags(p.calibration, a.calibration, a.permutations, a.exponent);
            require("test.x", &p.x)?;
            require("test.y", &p.y)?;
            check_statistic("test.statistic", &p.statistic)?;
            check_level("test.level", p.level)?;
            if p.calibration == Calibration::NullSimulation {
                return Err(invalid("test.calibration", "null simulation needs a known distribution; use `power`"));
            }
            check_calibration("test.calibration", &p.calibration)?;
            Params::Test(p)
        }
        Command::Power(a) => {
            let mut p = file.power.unwrap_or_default();
            set!(p.beta, a.beta);
            set!(p.epsilon, a.epsilon);
            set!(p.statistics, a.statistics.clone());
            set!(p.n_list, a.n_list.clone());
            set!(p.trials, a.trials);
            set!(p.level, a.level);
            p.calibration = calibration_from_flags(p.calibration, a.calibration, a.permutations, a.exponent);
            check_list("power.statistics", &p.statistics)?;
            for (i, s) in p.statistics.iter().enumerate() {
                check_statistic(&format!("power.statistics[{i}]"), s)?;
            }
            check_list("power.n_list", &p.n_list)?;
            if p.n_list.contains(&0) {
                return Err(invalid("power.n_list", "sizes must be positive"));
            }
            if p.trials < 2 {
                return Err(invalid("power.trials", "need at least two trials"));
            }
            check_level("power.level", p.level)?;
            check_calibration("power.calibration", &p.calibration)?;
            if p.pair.is_none() {
                check_level("power.epsilon", p.epsilon)?;
                if !(p.beta > 0.0) {
                    return Err(invalid("power.beta", "must be positive"));
                }
            }
            Params::Power(p)
        }
        Command::Construct { which } => match which {
            ConstructCommand::Pair(a) => {
                let mut p = file.construct_pair.unwrap_or_default();
                set!(p.beta, a.beta);
                set!(p.epsilon, a.epsilon);
                if !(p.beta > 0.0) {
                    return Err(invalid("construct-pair.beta", "must be positive"));
                }
                if !(0.0..1.0).contains(&p.epsilon) {
                    return Err(invalid("construct-pair.epsilon", "must lie in [0, 1)"));
                }
                Params::ConstructPair(p)
            }
            ConstructCommand::Verify(a) => {
                let mut p = file.construct_verify.unwrap_or_default();
                set!(p.beta, a.beta);
                set!(p.r_list, a.r_list.clone());
                set!(p.ts, some a.ts.clone());
                if !(p.beta > 0.0) {
                    return Err(invalid("construct-verify.beta", "must be positive"));
                }
                if p.r_list.len() < 2 || p.r_list.windows(2).any(|w| w[1] <= w[0]) || p.r_list[0] == 0 {
                    return Err(invalid("construct-verify.r_list", "need two or more increasing positive frequencies"));
                }
                Params::ConstructVerify(p)
            }
            ConstructCommand::Tightness(a) => {
                let mut p = file.construct_tightness.unwrap_or_default();
                set!(p.beta, a.beta);
                set!(p.eps_list, a.eps_list.clone());
                if !(p.beta > 0.0) {
                    return Err(invalid("construct-tightness.beta", "must be positive"));
                }
                if p.eps_list.len() < 2 || p.eps_list.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                    return Err(invalid("construct-tightness.eps_list", "need two or more values in (0, 1)"));
                }
                Params::ConstructTightness(p)
            }
        },
        Command::Rates { which } => match which {
            RatesCommand::Discrete(a) => {
                let mut p = file.rates_discrete.unwrap_or_default();
                set!(p.k, a.k);
                set!(p.n_list, a.n_list.clone());
                set!(p.trials, a.trials);
                set!(p.delta_target, a.delta_target);
                if p.k < 2 {
                    return Err(invalid("rates-discrete.k", "need at least two symbols"));
                }
                if p.n_list.len() < 2 || p.n_list.contains(&0) {
                    return Err(invalid("rates-discrete.n_list", "need two or more positive sizes"));
                }
                check_positive("rates-discrete.trials", p.trials)?;
                Params::RatesDiscrete(p)
            }
            RatesCommand::Concentration(a) => {
                let mut p = file.rates_concentration.unwrap_or_default();
                set!(p.dims, a.dims.clone());
                set!(p.gammas, a.gammas.clone());
                set!(p.n_list, a.n_list.clone());
                set!(p.trials, a.trials);
                check_list("rates-concentration.dims", &p.dims)?;
                if p.dims.contains(&0) {
                    return Err(invalid("rates-concentration.dims", "dimensions must be positive"));
                }
                check_list("rates-concentration.gammas", &p.gammas)?;
                for (i, g) in p.gammas.iter().enumerate() {
                    check_gamma(&format!("rates-concentration.gammas[{i}]"), *g)?;
                }
                if p.n_list.len() < 2 || p.n_list.contains(&0) {
                    return Err(invalid("rates-concentration.n_list", "need two or more positive sizes"));
                }
                if p.trials < 2 {
                    return Err(invalid("rates-concentration.trials", "need at least two trials"));
                }
                Params::RatesConcentration(p)
            }
        },
        Command::Bench(a) => {
            let mut p = file.bench.unwrap_or_default();
            set!(p.sizes, a.sizes.clone());
            set!(p.dim, a.dim);
            set!(p.gamma, a.gamma);
            set!(p.reps, a.reps);
            check_list("bench.sizes", &p.sizes)?;
            check_positive("bench.dim", p.dim)?;
            check_positive("bench.reps", p.reps)?;
            check_gamma("bench.gamma", p.gamma)?;
            Params::Bench(p)
        }
    };
    Ok(ExperimentConfig {
        seed,
        params,
        threads,
        output_dir,
    })
}

/// Construction pair used by `power` when no explicit pair is given.
pub fn construction_pair(beta: f64, epsilon: f64) -> SpecPair {
    SpecPair {
        p: DistributionSpec::Construction1d {
            beta,
            epsilon,
            side: ConstructionSide::P,
        },
        q: DistributionSpec::Construction1d {
            beta,
            epsilon,
            side: ConstructionSide::Q,
        },
    }
}
