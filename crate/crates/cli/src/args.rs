use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "roundlab",
    version,
    about = "Generalized roundness and embedding obstruction laboratory"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Mantissa bits for real powers.
    #[arg(long, global = true, default_value_t = 80)]
    pub precision: usize,
    /// Relative tolerance of inequality checks.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generalized roundness of a finite metric space.
    Gr {
        #[command(subcommand)]
        cmd: GrCmd,
    },
    /// Metric axioms of a distance matrix.
    Metric {
        #[command(subcommand)]
        cmd: MetricCmd,
    },
    /// Products of cycles: simplices, pair counts, incidences.
    Products {
        #[command(subcommand)]
        cmd: ProductsCmd,
    },
    /// Averaging inequalities and the coarse/uniform contradictions.
    Obstruct {
        #[command(subcommand)]
        cmd: ObstructCmd,
    },
    /// The disjoint union of the cycle products.
    Zspace {
        #[command(subcommand)]
        cmd: ZspaceCmd,
    },
    /// Lipschitz injections into sequence spaces and ball chains.
    Inject {
        #[command(subcommand)]
        cmd: InjectCmd,
    },
    /// Word metrics on integer lattices.
    Cayley {
        #[command(subcommand)]
        cmd: CayleyCmd,
    },
}

impl Command {
    pub fn name(&self) -> String {
        let (group, sub) = match self {
            Command::Gr { cmd } => ("gr", cmd.name()),
            Command::Metric { cmd } => ("metric", cmd.name()),
            Command::Products { cmd } => ("products", cmd.name()),
            Command::Obstruct { cmd } => ("obstruct", cmd.name()),
            Command::Zspace { cmd } => ("zspace", cmd.name()),
            Command::Inject { cmd } => ("inject", cmd.name()),
            Command::Cayley { cmd } => ("cayley", cmd.name()),
        };
        format!("{group} {sub}")
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Randomized search instead of the exhaustive scan.
    #[arg(long, conflicts_with = "exhaustive")]
    pub search: bool,
    /// Exhaustive scan (the default).
    #[arg(long)]
    pub exhaustive: bool,
    /// Exhaustive: configurations in total. Search: gap evaluations per step.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum GrCmd {
    /// Brackets the roundness by bisection on p.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Width of the final bracket.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 16.0)]
        p_cap: f64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Looks for a violating configuration at one exponent.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
}

impl GrCmd {
    fn name(&self) -> &'static str {
        match self {
            GrCmd::Estimate { .. } => "estimate",
            GrCmd::Check { .. } => "check",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum MetricCmd {
    /// Identity, symmetry and triangle inequality.
    Validate {
        #[arg(long)]
        input: PathBuf,
        /// Triples scanned exhaustively up to this count, sampled beyond.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl MetricCmd {
    fn name(&self) -> &'static str {
        "validate"
    }
}

/// A pair or simplex class, in quanta or in `(n, t, m)` form.
#[derive(Debug, Args)]
pub struct ClassArgs {
    #[arg(long, conflicts_with = "n")]
    pub coords: Option<usize>,
    #[arg(long, conflicts_with = "n")]
    pub units: Option<u64>,
    /// Cyclic distance of the class, in quanta.
    #[arg(long, conflicts_with = "n")]
    pub delta: Option<u64>,
    /// Number of differing coordinates.
    #[arg(long, conflicts_with = "n")]
    pub support: Option<usize>,
    /// Simplex size `r` (defaults to `n` in (n, t, m) form, else 2).
    #[arg(long)]
    pub size: Option<usize>,
    /// (n, t, m) form: the space `M_n`.
    #[arg(long)]
    pub n: Option<u32>,
    /// (n, t, m) form: distance `2^t`.
    #[arg(long, allow_hyphen_values = true, requires = "n")]
    pub t: Option<i32>,
    /// (n, t, m) form: support `n^m`.
    #[arg(long, requires = "n")]
    pub m: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum ProductsCmd {
    /// Builds the standard simplex of a class and checks it.
    Simplex {
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Closed-form pair count, optionally against enumeration.
    Count {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Simplex/pair incidence counts and the double counting identities.
    Incidences {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u64,
    },
}

impl ProductsCmd {
    fn name(&self) -> &'static str {
        match self {
            ProductsCmd::Simplex { .. } => "simplex",
            ProductsCmd::Count { .. } => "count",
            ProductsCmd::Incidences { .. } => "incidences",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ParityArg {
    Even,
    Any,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// circle, identity, constant or snowflake:ALPHA (a `builtin:` prefix is accepted).
    #[arg(long, default_value = "circle")]
    pub map: String,
    /// Declared roundness of the target; required for identity and snowflake.
    #[arg(long)]
    pub declared: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    /// Monte Carlo samples per level; exact enumeration when absent.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pair budget of exact enumeration.
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum ObstructCmd {
    /// The coarse contradiction for a pair of moduli.
    Coarse {
        /// JSON envelope `{rho1, rho2}` or `{samples: [{domain, image}]}`.
        #[arg(long)]
        moduli: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "1,64")]
        n_range: String,
        #[arg(long, value_enum, default_value_t = ParityArg::Even)]
        parity: ParityArg,
    },
    /// The fine/coarse comparison along a ladder of blocks.
    Uniform {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value = "2,4,6")]
        n_ladder: String,
        /// A positive number or `inf`.
        #[arg(long)]
        p: String,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// One averaging step: connecting lines against edges of a simplex class.
    Step {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        level: LevelArgs,
    },
    /// The chain of steps from a start pair class.
    Chain {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        levels: usize,
        #[command(flatten)]
        level: LevelArgs,
    },
}

impl ObstructCmd {
    fn name(&self) -> &'static str {
        match self {
            ObstructCmd::Coarse { .. } => "coarse",
            ObstructCmd::Uniform { .. } => "uniform",
            ObstructCmd::Step { .. } => "step",
            ObstructCmd::Chain { .. } => "chain",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Literal,
    Corrected,
}

#[derive(Debug, Subcommand)]
pub enum ZspaceCmd {
    /// Triangle audit over all blocks up to a bound.
    Validate {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long, default_value_t = 8)]
        block_bound: u32,
    },
    /// Points per block inside a ball.
    Census {
        /// Center as ZPoint JSON; the zero point of `--block` when absent.
        #[arg(long)]
        center: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        block: u32,
        #[arg(long)]
        radius: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
        variant: VariantArg,
    },
}

impl ZspaceCmd {
    fn name(&self) -> &'static str {
        match self {
            ZspaceCmd::Validate { .. } => "validate",
            ZspaceCmd::Census { .. } => "census",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Strict,
    Inclusive,
}

#[derive(Debug, Subcommand)]
pub enum InjectCmd {
    /// Builds the injection of a finite space.
    Build {
        #[arg(long)]
        input: PathBuf,
        /// ell0, ellp:P, ballchain:interval, ballchain:cauchy or ballchain:FILE.json
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = RuleArg::Strict)]
        rule: RuleArg,
    },
    /// Injectivity and the Lipschitz bound of a built map.
    Verify {
        /// A map, or a report written by `inject build`.
        #[arg(long)]
        map: PathBuf,
        /// identity or root:P; the target's default when absent.
        #[arg(long)]
        modulus: Option<String>,
    },
}

impl InjectCmd {
    fn name(&self) -> &'static str {
        match self {
            InjectCmd::Build { .. } => "build",
            InjectCmd::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Split,
    Mixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolverArg {
    Formula,
    Bfs,
}

#[derive(Debug, Subcommand)]
pub enum CayleyCmd {
    /// Word distance against the cyclic sup distance on integer points.
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Split)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = SolverArg::Formula)]
        solver: SolverArg,
    },
    /// Upper bound on roundness from a generator pair.
    Roundness {
        #[arg(long)]
        dim: usize,
        /// Block generators with this jump; standard basis when absent.
        #[arg(long)]
        jump: Option<i64>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Split)]
        family: FamilyArg,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, default_value_t = 2.0)]
        witness_p: f64,
    },
    /// In-block word distances in a two-block graph against one block.
    Projection {
        #[arg(long, default_value = "2,2")]
        dims: String,
        #[arg(long, default_value = "3,4")]
        jumps: String,
        #[arg(long, default_value_t = 3)]
        radius: u64,
        #[arg(long, value_enum, default_value_t = FamilyArg::Split)]
        family: FamilyArg,
    },
}

impl CayleyCmd {
    fn name(&self) -> &'static str {
        match self {
            CayleyCmd::Verify { .. } => "verify",
            CayleyCmd::Roundness { .. } => "roundness",
            CayleyCmd::Projection { .. } => "projection",
        }
    }
}
