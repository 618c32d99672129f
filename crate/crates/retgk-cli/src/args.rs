use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "retgk",
    version,
    about = "Graph classification with return-probability random-walk kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Export every node's return probability curve as CSV.
    Rpf(RunArgs),
    /// Compute Gram matrices (one per exponent p) plus a metadata record.
    Gram(RunArgs),
    /// Run the repeated cross-validated classification protocol.
    Classify(RunArgs),
    /// Re-run classification along one parameter axis.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Directory holding datasets in the TU text layout.
    #[arg(long, default_value = "data")]
    pub dataset_dir: PathBuf,

    /// Dataset name (expects `<dir>/<name>/<name>_*.txt`).
    #[arg(long)]
    pub dataset: String,

    /// Kernel family: exact mean embeddings or tensor embeddings.
    #[arg(long, value_enum, default_value_t = VariantArg::Retgk2)]
    pub variant: VariantArg,

    #[arg(long, value_enum, default_value_t = RpfMethodArg::Spectral)]
    pub rpf_method: RpfMethodArg,

    /// Random walk length S.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,

    /// Walks per node for the monte-carlo method.
    #[arg(long, default_value_t = 200)]
    pub mc_trials: usize,

    /// Dimension of the structural feature map (default: 200, or 100 when
    /// both label and attribute maps are present).
    #[arg(long)]
    pub d0: Option<usize>,

    /// Dimension of the attribute feature map (same defaults as --d0;
    /// 500 on FRANKENSTEIN).
    #[arg(long)]
    pub dc: Option<usize>,

    /// Exponents p of the exponential graph kernel, selected by CV.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    pub p_grid: Vec<f64>,

    /// SVM trade-off grid, selected by CV.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0])]
    pub c_grid: Vec<f64>,

    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    #[arg(long, default_value_t = 10)]
    pub repeats: usize,

    /// Master seed; every random stage derives a named sub-stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Which nodes receive a unit self-loop before walking.
    #[arg(long, value_enum, default_value_t = SelfLoopsArg::Isolated)]
    pub self_loops: SelfLoopsArg,

    /// Thread cap; 0 uses all cores. Output is identical for any setting.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Gram matrix file format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,

    /// Frequency law of the random Fourier maps: gaussian approximates
    /// exp(−γ‖·‖²), cauchy approximates exp(−γ‖·‖).
    #[arg(long, value_enum, default_value_t = RffFreqArg::Gaussian)]
    pub rff_freq: RffFreqArg,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Parameter to vary, holding everything else (and the seed) fixed.
    #[arg(long, value_enum)]
    pub axis: SweepAxis,

    /// Values the axis takes, one classification run each.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantArg {
    Retgk1,
    Retgk2,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RpfMethodArg {
    Spectral,
    #[value(name = "monte-carlo")]
    MonteCarlo,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelfLoopsArg {
    Isolated,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Binary,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RffFreqArg {
    Gaussian,
    Cauchy,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    S,
    D0,
    Dc,
}

impl VariantArg {
    pub fn to_pipeline(self) -> retgk::pipeline::Variant {
        match self {
            VariantArg::Retgk1 => retgk::pipeline::Variant::RetGk1,
            VariantArg::Retgk2 => retgk::pipeline::Variant::RetGk2,
        }
    }
}

impl RpfMethodArg {
    pub fn to_pipeline(self) -> retgk::rpf::RpfMethod {
        match self {
            RpfMethodArg::Spectral => retgk::rpf::RpfMethod::Spectral,
            RpfMethodArg::MonteCarlo => retgk::rpf::RpfMethod::MonteCarlo,
        }
    }
}

impl SelfLoopsArg {
    pub fn to_policy(self) -> retgk::SelfLoopPolicy {
        match self {
            SelfLoopsArg::Isolated => retgk::SelfLoopPolicy::IsolatedOnly,
            SelfLoopsArg::All => retgk::SelfLoopPolicy::AllNodes,
        }
    }
}

impl RffFreqArg {
    pub fn to_pipeline(self) -> retgk::embed_approx::FrequencyDist {
        match self {
            RffFreqArg::Gaussian => retgk::embed_approx::FrequencyDist::Gaussian,
            RffFreqArg::Cauchy => retgk::embed_approx::FrequencyDist::Cauchy,
        }
    }
}
