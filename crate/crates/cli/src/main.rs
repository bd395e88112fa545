//! Command-line front end for graphsamp.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 failed check.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graphsamp::completion::{active_sample_greedy, bl_cross_sample, dglr_solve, CompletionProblem};
use graphsamp::experiments::{default_out_dir, run_experiment, write_outputs, ExperimentConfig, ExperimentId};
use graphsamp::filtering::{KernelSpec, SpectralKernel};
use graphsamp::generators::{gen_graph, GeneratorSpec};
use graphsamp::io;
use graphsamp::recovery::{build_generator, recover, regularized_recover, SubspaceModel};
use graphsamp::sampling::{FrequencySampler, Prefilter, SamplingMatrixView, VertexSampler};
use graphsamp::selection::{
    coherence_distribution, greedy_select, greedy_select_localized, greedy_select_regularized, random_select,
    Criterion, SamplingDistribution, SelectionResult,
};
use graphsamp::{build_laplacian, Graph, SpectralDecomposition, VariationOperatorKind};
use nalgebra::DVector;

#[derive(Parser)]
#[command(name = "graphsamp", version, about = "Sampling and recovery of graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph utilities.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Sample a vertex signal in the vertex or frequency domain.
    Sample(SampleArgs),
    /// Choose a sampling set.
    Select(SelectArgs),
    /// Reconstruct a signal from samples.
    Recover(RecoverArgs),
    /// Graph-regularized matrix completion.
    #[command(subcommand)]
    Mc(McCommand),
    /// Run a seeded experiment and write its report.
    Experiment(ExperimentArgs),
    /// Run the built-in oracle checks.
    Selftest,
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Generate a synthetic graph as an edge list.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Sensor,
    Community,
    Path,
    Cycle,
    Complete,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, required_unless_present = "spec")]
    kind: Option<GraphKind>,
    /// Generator spec as JSON (overrides --kind).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    neighbors: usize,
    /// Comma-separated cluster sizes.
    #[arg(long, default_value = "8,8,16,32,64,128")]
    sizes: String,
    #[arg(long, default_value_t = 0.8)]
    p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    p_out: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Operator {
    Combinatorial,
    Normalized,
}

impl From<Operator> for VariationOperatorKind {
    fn from(o: Operator) -> Self {
        match o {
            Operator::Combinatorial => VariationOperatorKind::Combinatorial,
            Operator::Normalized => VariationOperatorKind::SymmetricNormalized,
        }
    }
}

#[derive(Args)]
struct GraphInput {
    /// Edge list (`src,dst,weight`).
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "combinatorial")]
    operator: Operator,
}

impl GraphInput {
    fn load(&self) -> Result<(Graph, SpectralDecomposition)> {
        let g = io::read_edge_list(io::open(&self.graph)?).with_context(|| format!("reading {}", self.graph.display()))?;
        let dec = SpectralDecomposition::of_graph(&g, self.operator.into());
        Ok((g, dec))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Domain {
    Vertex,
    Frequency,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Vertex signal (`node,value`).
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, value_enum, default_value = "vertex")]
    domain: Domain,
    /// Ordered node list (`node`) for vertex sampling.
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Spectral kernel: identity | ideal_lowpass:K | exp_decay:TAU | linear_decay | polynomial:C0,C1,...
    #[arg(long)]
    kernel: Option<String>,
    /// Number of frequency samples (must divide N).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Eopt,
    Aopt,
    Localized,
    Regularized,
    Coherence,
    Uniform,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    graph: GraphInput,
    #[arg(long, value_enum, default_value = "eopt")]
    method: Method,
    /// Number of nodes to select.
    #[arg(long)]
    m: usize,
    /// Bandwidth for eopt, aopt and coherence.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "ideal_lowpass:10")]
    kernel: String,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Samples (`index,value`).
    #[arg(long)]
    samples: PathBuf,
    /// Sampling nodes for vertex-domain samples.
    #[arg(long, conflicts_with = "frequency")]
    nodes: Option<PathBuf>,
    /// Frequency-domain samples taken with this kernel.
    #[arg(long)]
    frequency: Option<String>,
    /// Prefilter kernel used when the vertex samples were taken.
    #[arg(long)]
    prefilter: Option<String>,
    /// Signal model dimension K.
    #[arg(long)]
    k: Option<usize>,
    /// PGS generator kernel; bandlimited model when absent.
    #[arg(long)]
    generator: Option<String>,
    /// Smoothness-regularized recovery with this weight instead of a subspace model.
    #[arg(long, conflicts_with_all = ["k", "generator"])]
    gamma: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum McCommand {
    /// Complete a partially observed matrix.
    Solve(McSolveArgs),
    /// Choose entries to observe.
    Sample(McSampleArgs),
}

#[derive(Args)]
struct McGraphs {
    #[arg(long)]
    row_graph: PathBuf,
    #[arg(long)]
    col_graph: PathBuf,
}

impl McGraphs {
    fn load(&self) -> Result<(Graph, Graph)> {
        Ok((io::read_edge_list(io::open(&self.row_graph)?)?, io::read_edge_list(io::open(&self.col_graph)?)?))
    }
}

#[derive(Args)]
struct McSolveArgs {
    #[command(flatten)]
    graphs: McGraphs,
    /// Observed entries (`row,col,value` with a `# rows=R cols=C` line).
    #[arg(long)]
    matrix: PathBuf,
    /// Mask in the same format; defaults to the listed entries.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum McStrategy {
    Greedy,
    Blcross,
}

#[derive(Args)]
struct McSampleArgs {
    #[command(flatten)]
    graphs: McGraphs,
    #[arg(long, value_enum)]
    strategy: McStrategy,
    #[arg(long, required_if_eq("strategy", "greedy"))]
    budget: Option<usize>,
    #[arg(long, required_if_eq("strategy", "blcross"))]
    kr: Option<usize>,
    #[arg(long, required_if_eq("strategy", "blcross"))]
    kc: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// fig4-top | fig4-bottom | community-selection | mc-demo | dft-folding-sanity
    #[arg(required_unless_present = "config")]
    id: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override a parameter, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Experiment config as JSON instead of the arguments above.
    #[arg(long, conflicts_with_all = ["id", "set"])]
    config: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

fn output_path(explicit: &Option<PathBuf>, default_name: &str) -> Result<PathBuf> {
    match explicit {
        Some(p) => Ok(p.clone()),
        None => {
            let dir = default_out_dir();
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            Ok(dir.join(default_name))
        }
    }
}

fn kernel(spec: &str, dec: &SpectralDecomposition) -> Result<SpectralKernel> {
    Ok(spec.parse::<KernelSpec>()?.resolve(dec.eigenvalues())?)
}

fn graph_gen(args: &GenArgs) -> Result<Status> {
    let spec = match (&args.spec, args.kind) {
        (Some(path), _) => serde_json::from_reader(BufReader::new(File::open(path)?))
            .with_context(|| format!("parsing {}", path.display()))?,
        (None, Some(GraphKind::Sensor)) => GeneratorSpec::RandomSensor { n: args.n, k_neighbors: args.neighbors },
        (None, Some(GraphKind::Community)) => GeneratorSpec::Community {
            cluster_sizes: args
                .sizes
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .context("--sizes must be comma-separated integers")?,
            p_in: args.p_in,
            p_out: args.p_out,
        },
        (None, Some(GraphKind::Path)) => GeneratorSpec::Path { n: args.n },
        (None, Some(GraphKind::Cycle)) => GeneratorSpec::Cycle { n: args.n },
        (None, Some(GraphKind::Complete)) => GeneratorSpec::Complete { n: args.n },
        (None, None) => bail!("either --kind or --spec is required"),
    };
    let g = gen_graph(&spec, args.seed)?;
    let path = output_path(&args.out, "graph.csv")?;
    io::write_edge_list(&g, io::create(&path)?)?;
    println!("{} nodes, {} edges -> {}", g.node_count(), g.edges().len(), path.display());
    Ok(Status::Ok)
}

fn sample(args: &SampleArgs) -> Result<Status> {
    let (g, dec) = args.graph.load()?;
    let x = io::read_signal(io::open(&args.signal)?)?;
    let view = match args.domain {
        Domain::Vertex => {
            let Some(nodes) = &args.nodes else { bail!("vertex sampling needs --nodes") };
            let mut vs = VertexSampler::ordered(io::read_node_set(io::open(nodes)?)?, g.node_count())?;
            if let Some(k) = &args.kernel {
                vs = vs.with_prefilter(Prefilter::Spectral(kernel(k, &dec)?));
            }
            SamplingMatrixView::vertex(&g, &dec, &vs)?
        }
        Domain::Frequency => {
            let Some(m) = args.m else { bail!("frequency sampling needs --m") };
            let k = kernel(args.kernel.as_deref().unwrap_or("identity"), &dec)?;
            SamplingMatrixView::frequency(&dec, &FrequencySampler::new(k, m, g.node_count())?)?
        }
    };
    let c = view.apply(&x)?;
    let path = output_path(&args.out, "samples.csv")?;
    io::write_samples(&c, io::create(&path)?)?;
    println!("{} samples -> {}", c.len(), path.display());
    Ok(Status::Ok)
}

fn select(args: &SelectArgs) -> Result<Status> {
    let (g, dec) = args.graph.load()?;
    let need_k = || args.k.context("this method needs --k");
    let result: SelectionResult = match args.method {
        Method::Eopt => greedy_select(&dec, need_k()?, args.m, Criterion::EOpt)?,
        Method::Aopt => greedy_select(&dec, need_k()?, args.m, Criterion::AOpt)?,
        Method::Localized => greedy_select_localized(&dec, &kernel(&args.kernel, &dec)?, args.m)?,
        Method::Regularized => {
            greedy_select_regularized(&build_laplacian(&g, args.graph.operator.into()), args.gamma, args.m)?
        }
        Method::Coherence => random_select(&coherence_distribution(&dec, need_k()?)?, args.m, args.seed)?,
        Method::Uniform => random_select(&SamplingDistribution::uniform(g.node_count()), args.m, args.seed)?,
    };
    let path = output_path(&args.out, "nodes.csv")?;
    io::write_node_set(&result.ordered_nodes, io::create(&path)?)?;
    serde_json::to_writer_pretty(io::create(path.with_extension("json"))?, &result)?;
    println!("{:?} -> {}", result.ordered_nodes, path.display());
    Ok(Status::Ok)
}

fn recover_cmd(args: &RecoverArgs) -> Result<Status> {
    let (g, dec) = args.graph.load()?;
    let n = g.node_count();
    let c = io::read_samples(io::open(&args.samples)?)?;
    let view = match (&args.nodes, &args.frequency) {
        (Some(nodes), None) => {
            let mut vs = VertexSampler::ordered(io::read_node_set(io::open(nodes)?)?, n)?;
            if let Some(k) = &args.prefilter {
                vs = vs.with_prefilter(Prefilter::Spectral(kernel(k, &dec)?));
            }
            SamplingMatrixView::vertex(&g, &dec, &vs)?
        }
        (None, Some(k)) => SamplingMatrixView::frequency(&dec, &FrequencySampler::new(kernel(k, &dec)?, c.len(), n)?)?,
        _ => bail!("give exactly one of --nodes or --frequency"),
    };
    let path = output_path(&args.out, "reconstruction.csv")?;
    let x: DVector<f64> = if let Some(gamma) = args.gamma {
        regularized_recover(&view, &c, &build_laplacian(&g, args.graph.operator.into()), gamma)?
    } else {
        let k = args.k.context("--k is required unless --gamma is given")?;
        let model = match &args.generator {
            Some(spec) => SubspaceModel::Pgs { generator: kernel(spec, &dec)?, k },
            None => SubspaceModel::Bandlimited(k),
        };
        let report = recover(&build_generator(&dec, &model)?, &view, &c)?;
        serde_json::to_writer_pretty(io::create(path.with_extension("json"))?, &report)?;
        if !report.ds_condition_held {
            eprintln!(
                "warning: sampling does not determine the model (smallest singular value {:.3e}); least-squares estimate",
                report.smallest_singular_value
            );
        }
        report.reconstruction
    };
    io::write_signal(&x, io::create(&path)?)?;
    println!("reconstruction -> {}", path.display());
    Ok(Status::Ok)
}

fn mc_solve(args: &McSolveArgs) -> Result<Status> {
    let (rg, cg) = args.graphs.load()?;
    let triples = io::read_matrix_triples(io::open(&args.matrix)?)?;
    let mask = match &args.mask {
        Some(p) => io::read_matrix_triples(io::open(p)?)?.positions(),
        None => triples.positions(),
    };
    let prob = CompletionProblem::new(triples.to_dense(), mask, &rg, &cg, args.alpha, args.beta)?;
    let max_iter = args.max_iter.unwrap_or_else(|| graphsamp::completion::default_max_iter(&prob));
    let x = dglr_solve(&prob, args.tol, max_iter)?;
    let path = output_path(&args.out, "completed.csv")?;
    io::write_matrix_triples(&x, None, io::create(&path)?)?;
    println!("{}x{} completed -> {}", x.nrows(), x.ncols(), path.display());
    Ok(Status::Ok)
}

fn mc_sample(args: &McSampleArgs) -> Result<Status> {
    let (rg, cg) = args.graphs.load()?;
    let mask = match args.strategy {
        McStrategy::Greedy => active_sample_greedy(&rg, &cg, args.alpha, args.beta, args.budget.context("--budget")?)?,
        McStrategy::Blcross => bl_cross_sample(&rg, &cg, args.kr.context("--kr")?, args.kc.context("--kc")?)?,
    };
    let path = output_path(&args.out, "mask.csv")?;
    let zeros = nalgebra::DMatrix::zeros(rg.node_count(), cg.node_count());
    io::write_matrix_triples(&zeros, Some(&mask), io::create(&path)?)?;
    println!("{} entries -> {}", mask.len(), path.display());
    Ok(Status::Ok)
}

fn experiment(args: &ExperimentArgs) -> Result<Status> {
    let cfg = match (&args.config, &args.id) {
        (Some(path), _) => serde_json::from_reader(BufReader::new(File::open(path)?))
            .with_context(|| format!("parsing {}", path.display()))?,
        (None, Some(id)) => {
            let mut cfg = ExperimentConfig::new(id.parse::<ExperimentId>()?, args.seed);
            for kv in &args.set {
                let Some((k, v)) = kv.split_once('=') else { bail!("--set expects key=value, got `{kv}`") };
                cfg = cfg.with(k.trim(), v.trim());
            }
            cfg
        }
        (None, None) => bail!("an experiment id or --config is required"),
    };
    let report = run_experiment(&cfg)?;
    let dir = default_out_dir();
    let paths = write_outputs(&report, &dir)?;
    for (k, v) in &report.metrics {
        println!("{k} = {v}");
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    println!("{} {} -> {}", report.experiment, if report.passed { "PASS" } else { "FAIL" }, paths[0].display());
    Ok(if report.passed { Status::Ok } else { Status::CheckFailed })
}

fn selftest() -> Result<Status> {
    let checks = graphsamp::selftest::run_all();
    for c in &checks {
        println!(
            "[{}] {}: {:.3e} (threshold {:.0e}, {:.2}s)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.threshold,
            c.seconds
        );
    }
    Ok(if checks.iter().all(|c| c.passed) { Status::Ok } else { Status::CheckFailed })
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Graph(GraphCommand::Gen(a)) => graph_gen(&a),
        Command::Sample(a) => sample(&a),
        Command::Select(a) => select(&a),
        Command::Recover(a) => recover_cmd(&a),
        Command::Mc(McCommand::Solve(a)) => mc_solve(&a),
        Command::Mc(McCommand::Sample(a)) => mc_sample(&a),
        Command::Experiment(a) => experiment(&a),
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

