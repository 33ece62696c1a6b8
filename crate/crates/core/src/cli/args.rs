use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use consensus_kinetics::timeseries::DEFAULT_DT;

/// Cointegration tests and a kinetic model of analyst consensus targets.
#[derive(Debug, Parser, Serialize)]
#[command(name = "consensus-kinetics", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate synthetic series.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Augmented Dickey-Fuller unit-root test.
    Adf(AdfArgs),
    /// Engle-Granger cointegration test of consensus on index.
    Eg(EgArgs),
    /// Information criteria for the VAR lag order.
    Lags(LagsArgs),
    /// Johansen rank test.
    Johansen(JohansenArgs),
    /// Vector error-correction model.
    Vecm(VecmArgs),
    /// Residual diagnostics (Breusch-Godfrey, Jarque-Bera, ARCH).
    Diagnose(DiagnoseArgs),
    /// Half-life of a disequilibrium for an adjustment speed.
    Halflife(HalflifeArgs),
    /// Fit the kinetic model to consensus data.
    Calibrate(CalibrateArgs),
    /// Model sentiment driven by an index series.
    Forecast(ForecastArgs),
    /// Evolve the opinion distribution.
    Simulate(SimulateArgs),
    /// Error summaries of the model and the cointegration baseline.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthCommand {
    /// Geometric Brownian motion index.
    Gbm(SynthGbmArgs),
    /// Cointegrated pair `y = slope z + intercept + u`.
    Pair(SynthPairArgs),
    /// Consensus series generated by the sentiment equation.
    Sentiment(SynthSentimentArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthGbmArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2000.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.2)]
    pub sigma: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthPairArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub slope: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub intercept: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_u: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_z: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelParamArgs {
    /// JSON parameter file; overrides the individual flags.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 0.28)]
    pub q: f64,
    #[arg(long, default_value_t = 6.05)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.143, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Model years per observation.
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthSentimentArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[command(flatten)]
    pub model: ModelParamArgs,
    /// Initial sentiment; defaults to the first index level times (1 + delta).
    #[arg(long)]
    pub s0: Option<f64>,
    /// Observation noise as a fraction of the level.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecArg {
    None,
    Constant,
    Trend,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LagRuleArg {
    Aic,
    Fixed,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum LevelArg {
    #[value(name = "1")]
    One,
    #[value(name = "5")]
    Five,
    #[value(name = "10")]
    Ten,
}

#[derive(Debug, Args, Serialize)]
pub struct EconOut {
    /// Also write the result and a manifest into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AdfArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "constant")]
    pub spec: SpecArg,
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[arg(long, value_enum, default_value = "aic")]
    pub lag_rule: LagRuleArg,
    #[arg(long, value_enum, default_value = "5")]
    pub level: LevelArg,
    /// Test the natural logarithm of the series.
    #[arg(long)]
    pub log: bool,
    #[command(flatten)]
    pub out: EconOut,
}

#[derive(Debug, Args, Serialize)]
pub struct PairInput {
    /// Consensus series (dependent variable).
    #[arg(long)]
    pub consensus: PathBuf,
    /// Index series.
    #[arg(long)]
    pub index: PathBuf,
    /// Work with natural logarithms.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EgArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[arg(long, value_enum, default_value = "aic")]
    pub lag_rule: LagRuleArg,
    #[arg(long, value_enum, default_value = "5")]
    pub level: LevelArg,
    #[command(flatten)]
    pub out: EconOut,
}

#[derive(Debug, Args, Serialize)]
pub struct LagsArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long, default_value_t = 8)]
    pub p_max: usize,
    #[command(flatten)]
    pub out: EconOut,
}

#[derive(Debug, Args, Serialize)]
pub struct JohansenArgs {
    #[command(flatten)]
    pub input: PairInput,
    /// Lagged differences in the VECM.
    #[arg(long, default_value_t = 1)]
    pub lags: usize,
    #[arg(long, value_enum, default_value = "5")]
    pub level: LevelArg,
    #[command(flatten)]
    pub out: EconOut,
}

#[derive(Debug, Args, Serialize)]
pub struct VecmArgs {
    #[command(flatten)]
    pub input: PairInput,
    #[arg(long, default_value_t = 1)]
    pub lags: usize,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[command(flatten)]
    pub out: EconOut,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnoseArgs {
    /// Residual series.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub lags: usize,
    #[command(flatten)]
    pub out: EconOut,
}

#[derive(Debug, Args, Serialize)]
pub struct HalflifeArgs {
    /// Per-period adjustment speed, in (-1, 0).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: f64,
    #[command(flatten)]
    pub out: EconOut,
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub consensus: PathBuf,
    /// Last training date; later dates form the test set.
    #[arg(long)]
    pub train_end: Option<NaiveDate>,
}

#[derive(Debug, Args, Serialize)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// JSON calibration settings (budget, n_refine, tol, max_iter, q_fixed).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub q_fixed: Option<f64>,
    /// Initial sentiment; defaults to the first consensus value.
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Parameter file; defaults to `params.json` from a calibration in `--out`.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Defaults to `calibration.json` in `--out`.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    /// Defaults to `forecast.csv` in `--out` when present.
    #[arg(long)]
    pub forecast: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Particle,
    Neumann,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Paper,
    Corrected,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "closed-form")]
    pub engine: Engine,
    #[command(flatten)]
    pub model: ModelParamArgs,
    /// Index series; a constant level `--x0` is used when absent.
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long, default_value_t = 2000.0)]
    pub x0: f64,
    /// Years to simulate; defaults to 1 or the span of `--index`.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Mean of the initial lognormal opinion density; defaults to X(0).
    #[arg(long)]
    pub s0: Option<f64>,
    /// Relative standard deviation of the initial density.
    #[arg(long, default_value_t = 0.1)]
    pub width: f64,
    /// Number of recorded intervals.
    #[arg(long, default_value_t = 20)]
    pub records: usize,
    #[arg(long, default_value_t = 100_000)]
    pub particles: usize,
    #[arg(long, default_value_t = 1.0 / 2520.0)]
    pub step: f64,
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    #[arg(long, default_value_t = 100)]
    pub slices: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "corrected")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub common: Common,
}
