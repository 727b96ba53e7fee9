use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Value distribution experiments: Nevanlinna functionals, q-Casorati
/// determinants, graded filtrations and inequality harnesses.
#[derive(Debug, Parser)]
#[command(name = "nevlab", version)]
pub struct Cli {
    /// More log output on stderr (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Suppress the hypothesis checklist on stderr.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tables of m, N and T for a function, or T_f for a map.
    Nev(NevArgs),
    /// Casorati determinant of a map's components or degree-alpha monomials.
    Casorati(CasoratiArgs),
    /// Decide whether the Casoratian vanishes identically.
    Nondegeneracy(NondegeneracyArgs),
    /// Filtrations of V_alpha by powers of forms.
    Filtration {
        #[command(subcommand)]
        command: FiltrationCommand,
    },
    /// Hilbert function scan of a set of forms.
    Hilbert(HilbertArgs),
    /// Run an inequality or identity harness from a run configuration.
    Verify(VerifyArgs),
    /// Forward invariance and q-invariance checks for a map and hyperplanes.
    Picard(PicardArgs),
    /// Partition components by q-invariant ratios.
    Partition(PartitionArgs),
    /// Logarithmic difference ratio m(r, h(qz)/h(z)) / T(r, h).
    Ldl(LdlArgs),
    /// Run bundled example cases and compare with their expectations.
    Gallery(GalleryArgs),
}

#[derive(Debug, Subcommand)]
pub enum FiltrationCommand {
    /// Build the filtration and report Delta, M and the quotient dimensions.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write report.json (and rows.csv when there are rows) into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to print on stdout when --out is not given.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuadArgs {
    /// Number of sampled directions (ignored for one variable).
    #[arg(long)]
    pub lines: Option<usize>,
    /// Angular nodes per circle, a power of two.
    #[arg(long)]
    pub theta: Option<usize>,
    /// Seed for direction sampling and numeric tests.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Radial grid "r0:r1:steps:log" or "r0:r1:steps:lin".
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct NevArgs {
    /// Slice function JSON.
    #[arg(long, conflicts_with = "map", required_unless_present = "map")]
    pub function: Option<PathBuf>,
    /// Projective map JSON; prints T_f instead.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// With --map: homogeneous form JSON, prints the first main theorem rows.
    #[arg(long, requires = "map")]
    pub form: Option<PathBuf>,
    /// With --function: print the Jensen residual instead.
    #[arg(long, requires = "function")]
    pub jensen: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CasoratiArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// QShift JSON {"q": [[re, im], ...]}.
    #[arg(long)]
    pub q: PathBuf,
    /// Use the degree-alpha monomials of the components.
    #[arg(long)]
    pub alpha: Option<u32>,
    /// Seed for the sample table of non-rational inputs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NondegeneracyArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
    /// Algebraic nondegeneracy in degree alpha; linear when absent.
    #[arg(long)]
    pub alpha: Option<u32>,
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// JSON array of homogeneous forms.
    #[arg(long)]
    pub gammas: PathBuf,
    #[arg(long)]
    pub alpha: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HilbertArgs {
    #[arg(long)]
    pub gammas: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Cartan,
    Hsmt,
    Hypersurface,
    Gundersen,
    Picard,
    Clunie,
    Tumura,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub theorem: Theorem,
    /// Run configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PicardArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// JSON array of hyperplanes.
    #[arg(long)]
    pub forms: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Projective map whose components are partitioned.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LdlArgs {
    #[arg(long)]
    pub function: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
    /// Run without the diagonal-q guard; the output is labeled exploratory.
    #[arg(long)]
    pub allow_general_q: bool,
    /// Report N(r, h(qz)) / N(r, h) instead.
    #[arg(long, conflicts_with = "allow_general_q")]
    pub counting: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    /// Case to run.
    #[arg(conflicts_with_all = ["all", "list"], required_unless_present_any = ["all", "list"])]
    pub name: Option<String>,
    #[arg(long)]
    pub all: bool,
    /// List the case names with their provenance.
    #[arg(long)]
    pub list: bool,
    /// Directory holding the bundled configurations.
    #[arg(long)]
    pub configs: Option<PathBuf>,
}
