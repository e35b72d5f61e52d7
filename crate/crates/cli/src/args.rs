use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const SEED_ENV: &str = "RNMS_SEED";

#[derive(Debug, Parser)]
#[command(name = "rnms", version, about = "Random noble means substitutions: words, entropy, frequencies and diffraction")]
pub struct Cli {
    /// TOML file with default values; flags given on the command line win [default: none]
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Print the loaded configuration as TOML and exit [default: off]
    #[arg(long)]
    pub dump_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random realisation as a word or as a point set.
    Generate(GenerateArgs),
    /// Topological entropy from the series and from generation-set counts.
    Entropy(EntropyArgs),
    /// Number of legal words of a given length.
    Complexity(ComplexityArgs),
    /// Subword frequencies, analytic and sampled.
    Frequencies(FrequenciesArgs),
    /// Diffraction spectrum on a k-grid.
    Diffract(DiffractArgs),
    /// Run the invariant checks and report each one.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateFormat {
    Word,
    Points,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Family parameter
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Comma-separated p_0,...,p_m [default: uniform]
    #[arg(long)]
    pub probs: Option<String>,
    /// Number of substitution steps applied to `a`.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Keep substituting until at least this many letters; overrides --n when positive.
    #[arg(long, default_value_t = 0)]
    pub letters: usize,
    /// Random seed
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GenerateFormat::Word)]
    pub format: GenerateFormat,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntropyMethod {
    /// Closed series only.
    Series,
    /// ln|G_n| / l_n for n = 3..=n-max, counted exactly.
    Count,
    /// Both of the above.
    All,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Largest generation index for the counting estimate.
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Tail bound for the series.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = EntropyMethod::All)]
    pub method: EntropyMethod,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComplexityMethod {
    /// Closed formula, valid for m + 3 <= l <= 2m + 2.
    Formula,
    /// Enumeration of legal words.
    Exact,
    /// Exact everywhere, formula where it applies.
    Both,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 1)]
    pub ell_min: usize,
    #[arg(long, default_value_t = 8)]
    pub ell_max: usize,
    #[arg(long, value_enum, default_value_t = ComplexityMethod::Both)]
    pub method: ComplexityMethod,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FrequenciesArgs {
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 2)]
    pub ell: usize,
    /// Comma-separated p_0,...,p_m [default: uniform]
    #[arg(long)]
    pub probs: Option<String>,
    /// Letters in the sampled realisation; 0 skips sampling.
    #[arg(long, default_value_t = 0)]
    pub empirical: usize,
    /// Random seed
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumFormat {
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct DiffractArgs {
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Comma-separated p_0,...,p_m [default: uniform]
    #[arg(long)]
    pub probs: Option<String>,
    /// Level: Monte Carlo samples realisations of zeta^(n-1)(a).
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Level of the recursion columns [default: same as --n]
    #[arg(long)]
    pub analytic_n: Option<usize>,
    /// Upper end of the k-range [0, kmax].
    #[arg(long, default_value_t = 3.0)]
    pub kmax: f64,
    /// Number of uniform grid points in [0, kmax].
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// Module points are added when |k'| is at most this value.
    #[arg(long, default_value_t = 8.0)]
    pub star_cutoff: f64,
    /// Monte Carlo samples; 0 skips sampling.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Random seed
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SpectrumFormat::Csv)]
    pub format: SpectrumFormat,
    /// Fill the ac column with the variant that conjugates A_(n-1), for diagnosis [default: off]
    #[arg(long)]
    pub misprint_mode: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Also run the conjugation variant of the ac convergence check and
    /// report it as expected to diverge [default: off]
    #[arg(long)]
    pub misprint_mode: bool,
}
