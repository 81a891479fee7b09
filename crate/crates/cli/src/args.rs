use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use revpref_core::sampling::DEFAULT_SEED;
use revpref_core::DEFAULT_TOLERANCE;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "revpref",
    version,
    about = "Rationalizability of consumer-choice data by homogeneous utilities"
)]
pub struct Cli {
    /// Tolerance on cycle sums, value comparisons and residuals.
    #[arg(long, global = true, env = "REVPREF_TOLERANCE", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads for batches of input files.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Decide rationalizability of one or more dataset files.
    Check(CheckArgs),
    /// Build and verify a rationalizing utility.
    Utility(UtilityArgs),
    /// Compare the diagonal coupling with the optimal transport plan.
    Transport(TransportArgs),
    /// Write a synthetic dataset.
    Generate(GenerateArgs),
    /// Closed-path sums and the inverse-demand relation for smooth demand fields.
    Fields(FieldsArgs),
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("method").args(["harp", "garp", "brute_force"])))]
pub struct CheckArgs {
    /// Homogeneous axiom by Floyd-Warshall (default).
    #[arg(long)]
    pub harp: bool,
    /// Generalized axiom by transitive closure.
    #[arg(long)]
    pub garp: bool,
    /// Homogeneous axiom by enumerating every simple cycle (n <= 8).
    #[arg(long)]
    pub brute_force: bool,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    Harp,
    Garp,
    BruteForce,
}

impl CheckArgs {
    pub fn method(&self) -> CheckMethod {
        if self.garp {
            CheckMethod::Garp
        } else if self.brute_force {
            CheckMethod::BruteForce
        } else {
            CheckMethod::Harp
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("model").args(["homogeneous", "afriat"])))]
pub struct UtilityArgs {
    /// Min-of-linear homogeneous utility from shortest-path potentials (default).
    #[arg(long)]
    pub homogeneous: bool,
    /// Concave piecewise-linear utility from the Afriat inequalities.
    #[arg(long)]
    pub afriat: bool,
    /// Random bundles per observation in the verification.
    #[arg(long, default_value_t = revpref_core::utility::DEFAULT_VERIFY_SAMPLES)]
    pub verify_samples: usize,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("mode").args(["diagonal_check", "solve"])))]
pub struct TransportArgs {
    /// Exit 0 iff the diagonal coupling is optimal (default for datasets).
    #[arg(long)]
    pub diagonal_check: bool,
    /// Solve and report the plan; exit 0 on success.
    #[arg(long)]
    pub solve: bool,
    /// Dataset files, or JSON transport instances with a `sources` key.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["cobb_douglas", "ces", "inject_violation"])))]
pub struct GenerateArgs {
    /// Cobb-Douglas demand at sampled prices and incomes.
    #[arg(long)]
    pub cobb_douglas: bool,
    /// CES demand at sampled prices and incomes.
    #[arg(long)]
    pub ces: bool,
    /// Swap two bundles of the dataset given by --input.
    #[arg(long)]
    pub inject_violation: bool,
    /// Number of observations.
    #[arg(short = 'n', long = "observations", default_value_t = 10)]
    pub n: usize,
    /// Number of goods.
    #[arg(short = 'm', long = "goods", default_value_t = 2)]
    pub m: usize,
    /// Cobb-Douglas exponents, comma separated (default: equal shares).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// CES substitution parameter.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub rho: f64,
    /// CES weights, comma separated (default: all ones).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Dataset to perturb with --inject-violation.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Geometric interpolation toward the swapped bundles; 1 swaps fully.
    #[arg(long, default_value_t = revpref_core::fields::DEFAULT_INJECTION_STRENGTH)]
    pub strength: f64,
    /// Output file; `.json` selects JSON, anything else CSV. Defaults to CSV on stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    CobbDouglas,
    Ces,
    /// A field that is not the gradient of any utility.
    Twist,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("check").args(["path_integral", "inverse_demand"])))]
pub struct FieldsArgs {
    /// Closed-path sums at each resolution (default).
    #[arg(long)]
    pub path_integral: bool,
    /// Compare the normalized field with the log-utility gradient.
    #[arg(long)]
    pub inverse_demand: bool,
    #[arg(long, value_enum, default_value_t = FieldKind::CobbDouglas)]
    pub field: FieldKind,
    /// Cobb-Douglas exponents (default: 0.5,0.5).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// CES substitution parameter.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub rho: f64,
    /// CES weights (default: all ones).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Goods for fields given without exponents or weights.
    #[arg(short = 'm', long = "goods")]
    pub m: Option<usize>,
    /// Number of loops: the three standard ones first, then seeded random ones.
    #[arg(long, default_value_t = 3)]
    pub loops: usize,
    /// Also run a constant loop, whose sums are exactly zero.
    #[arg(long)]
    pub constant_path: bool,
    /// Resolutions, strictly increasing.
    #[arg(long = "N", value_delimiter = ',', default_values_t = revpref_core::fields::DEFAULT_RESOLUTIONS)]
    pub resolutions: Vec<usize>,
    /// Bound on |sum| at the finest resolution.
    #[arg(long, default_value_t = revpref_core::fields::DEFAULT_PATH_THRESHOLD)]
    pub threshold: f64,
    /// Sample points for --inverse-demand.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
}
