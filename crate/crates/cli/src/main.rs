use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qwalk::bench::{run_bench, BenchConfig, CountingAllocator};
use qwalk::dsl::{bind_pipeline, parse_angle, parse_pipeline, PipelineExpr};
use qwalk::io;
use qwalk::pagerank::{build_google_matrix, quantum_pagerank, PageRankConfig, DEFAULT_DAMPING};
use qwalk::semiclassical::{build_semiclassical_matrix_with_phases, SemiclassicalConfig};
use qwalk::{
    build_psi_matrix, evolve, initial_superposition, Error, PhaseMatrix, Readout, Register,
    ValidationPolicy,
};

#[global_allocator]
static ALLOC: CountingAllocator = CountingAllocator;

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Szegedy quantum walks on N x N matrix states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a state and write per-step probabilities.
    Walk(WalkArgs),
    /// Build a semiclassical transition matrix.
    Semiclassical(SemiclassicalArgs),
    /// Quantum PageRank of a graph.
    Pagerank(PageRankArgs),
    /// Time and memory scaling of the double walk.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ApplyOrder {
    /// Leftmost operator acts last, as in `U = S R`.
    Operator,
    /// Leftmost operator acts first.
    Left,
}

#[derive(Args)]
struct PipelineArgs {
    /// Unitary pipeline, e.g. "S R" or "S Q1{0,2} R(pi/2)".
    #[arg(long, default_value = "S R", value_parser = parse_unitary)]
    unitary: PipelineExpr,

    #[arg(long, value_enum, default_value = "operator")]
    apply_order: ApplyOrder,

    /// CSV of phases for the Psi matrix.
    #[arg(long)]
    theta_matrix: Option<PathBuf>,
}

impl PipelineArgs {
    fn expr(&self) -> PipelineExpr {
        match self.apply_order {
            ApplyOrder::Operator => self.unitary.clone(),
            ApplyOrder::Left => self.unitary.reversed(),
        }
    }

    fn phases(&self) -> Result<Option<PhaseMatrix>, Error> {
        self.theta_matrix
            .as_deref()
            .map(|p| PhaseMatrix::new(io::read_matrix(p)?))
            .transpose()
    }
}

#[derive(Args)]
struct WalkArgs {
    /// Column-stochastic transition matrix (CSV).
    #[arg(long)]
    graph: PathBuf,

    #[arg(long)]
    steps: usize,

    #[command(flatten)]
    pipeline: PipelineArgs,

    /// Register(s) to measure: 1, 2 or both.
    #[arg(long, default_value = "both")]
    measure: Readout,

    /// `superposition` or a CSV of N x N amplitudes.
    #[arg(long, default_value = "superposition")]
    initial: String,

    /// Traces go to PREFIX_1.csv and PREFIX_2.csv.
    #[arg(long, default_value = "walk")]
    output: String,

    #[arg(long, default_value = "strict")]
    policy: ValidationPolicy,
}

#[derive(Args)]
struct SemiclassicalArgs {
    #[arg(long)]
    graph: PathBuf,

    /// Quantum steps between measurements.
    #[arg(long)]
    tq: usize,

    /// Measured register: 1 or 2.
    #[arg(long)]
    class: Register,

    #[command(flatten)]
    pipeline: PipelineArgs,

    /// Reset states evolved at once.
    #[arg(long)]
    batch_size: Option<usize>,

    #[arg(long, default_value = "semiclassical.csv")]
    output: PathBuf,

    #[arg(long, default_value = "strict")]
    policy: ValidationPolicy,
}

#[derive(Args)]
#[group(id = "input", required = true, multiple = false)]
struct PageRankInput {
    /// Column-stochastic transition matrix (CSV).
    #[arg(long, group = "input")]
    graph: Option<PathBuf>,

    /// Link matrix; entry (j, i) > 0 is a link from i to j.
    #[arg(long, group = "input")]
    adjacency: Option<PathBuf>,
}

#[derive(Args)]
struct PageRankArgs {
    #[command(flatten)]
    input: PageRankInput,

    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    damping: f64,

    #[arg(long)]
    steps: usize,

    /// Phase of the reflection applied second.
    #[arg(long, value_parser = parse_angle_arg, requires = "theta2", allow_hyphen_values = true)]
    theta1: Option<f64>,

    /// Phase of the reflection applied first.
    #[arg(long, value_parser = parse_angle_arg, requires = "theta1", allow_hyphen_values = true)]
    theta2: Option<f64>,

    /// Average over t = 0..T instead of 1..T.
    #[arg(long)]
    include_t0: bool,

    /// Rankings go to PREFIX.csv (by node) and PREFIX_by_score.csv.
    #[arg(long, default_value = "pagerank")]
    output: String,

    #[arg(long, default_value = "strict")]
    policy: ValidationPolicy,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
    sizes: Vec<usize>,

    #[arg(long, default_value_t = 100)]
    steps: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Fit sizes below 1000 too.
    #[arg(long)]
    include_small: bool,

    #[arg(long, default_value_t = 1)]
    repeats: usize,

    /// JSON-lines report; standard output if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_unitary(s: &str) -> Result<PipelineExpr, String> {
    parse_pipeline(s).map_err(|e| e.to_string())
}

fn parse_angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s).map(|a| a.value()).map_err(|e| e.to_string())
}

fn suffixed(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

fn walk(args: &WalkArgs) -> Result<(), Error> {
    let g = io::read_transition_matrix(&args.graph, args.policy)?;
    let theta = args.pipeline.phases()?;
    let u = bind_pipeline(&args.pipeline.expr(), &g, theta.as_ref())?;
    let phi = if args.initial == "superposition" {
        initial_superposition(&build_psi_matrix(&g, theta.as_ref())?)
    } else {
        let phi = io::read_state(Path::new(&args.initial))?;
        if phi.n() != g.n() {
            return Err(Error::ShapeMismatch {
                expected: g.n(),
                found: phi.n(),
            });
        }
        phi
    };
    let result = evolve(phi, &u, args.steps, args.measure)?;
    for register in args.measure.registers() {
        let path = suffixed(&args.output, &format!("_{}.csv", register.index()));
        io::write_trace(&path, result.trace(*register).expect("measured"))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn semiclassical(args: &SemiclassicalArgs) -> Result<(), Error> {
    let g = io::read_transition_matrix(&args.graph, args.policy)?;
    let theta = args
        .pipeline
        .phases()?
        .unwrap_or_else(|| PhaseMatrix::zeros(g.n()));
    let u = bind_pipeline(&args.pipeline.expr(), &g, Some(&theta))?;
    let mut cfg = SemiclassicalConfig::new(args.tq, args.class);
    if let Some(b) = args.batch_size {
        cfg = cfg.with_batch_size(b);
    }
    let sc = build_semiclassical_matrix_with_phases(&g, &theta, &u, &cfg)?;
    io::write_matrix(&args.output, sc.matrix())
}

fn pagerank(args: &PageRankArgs) -> Result<(), Error> {
    let g = match (&args.input.graph, &args.input.adjacency) {
        (Some(path), _) => io::read_transition_matrix(path, args.policy)?,
        (None, Some(path)) => build_google_matrix(&io::read_matrix(path)?, args.damping)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    let cfg = PageRankConfig {
        apr_angles: args.theta1.zip(args.theta2),
        damping: args.damping,
        include_t0: args.include_t0,
        ..PageRankConfig::new(args.steps)
    };
    let result = quantum_pagerank(&g, &cfg)?;
    io::write_ranking(&suffixed(&args.output, ".csv"), &result.ranking, false)?;
    io::write_ranking(&suffixed(&args.output, "_by_score.csv"), &result.ranking, true)
}

fn bench(args: &BenchArgs) -> Result<(), Error> {
    let cfg = BenchConfig {
        include_small: args.include_small,
        repeats: args.repeats,
        ..BenchConfig::new(args.sizes.clone(), args.steps, args.seed)
    };
    let report = run_bench(&cfg)?.to_json_lines();
    match &args.output {
        Some(path) => fs::write(path, report)?,
        None => std::io::stdout().write_all(report.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Walk(a) => walk(a),
        Command::Semiclassical(a) => semiclassical(a),
        Command::Pagerank(a) => pagerank(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 4 } else { 3 })
        }
    }
}
