//! `rydqubo`: compile, certify, lay out, validate and simulate Rydberg
//! encodings of QUBO problems.
//!
//! Exit codes: 0 success, 1 certification/validation failure, 2 bad input,
//! 3 a size cap or numeric limit was hit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rydberg_qubo::builtin::{load_builtin_layout, BuiltinError, BuiltinName};
use rydberg_qubo::compile::{compile, CompileError, WireLengthPolicy};
use rydberg_qubo::geometry::{
    auto_layout, blockade_radius, validate_unit_disk, AutoLayoutOptions, GeometryError, Layout,
    PhysicalParams, C6_RB71S, DETUNING_FINAL,
};
use rydberg_qubo::graph::GraphError;
use rydberg_qubo::qubo::QuboError;
use rydberg_qubo::sim::{
    evolve, measure_distribution, EvolveOptions, HamiltonianSpec, InteractionMode, PulseSchedule,
    SimError,
};
use rydberg_qubo::solver::{certify_equivalence, SearchLimits, SolverError};
use rydberg_qubo::{AtomGraph, QuboInstance};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "rydqubo",
    version,
    about = "Rydberg-atom encodings of QUBO problems"
)]
struct Cli {
    /// Emit log lines on stderr as JSON objects.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for search and simulation (default: all cores).
    #[arg(long, global = true, env = "RYDQUBO_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a QUBO JSON file into an atom graph.
    Compile {
        qubo: PathBuf,
        #[arg(long, default_value_t = 2)]
        wire_even_len: usize,
        #[arg(long, default_value_t = 1)]
        wire_odd_len: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that a graph's ground states decode to the QUBO minimizers.
    Certify {
        /// QUBO instance; compiled when no graph is given.
        #[arg(long)]
        qubo: Option<PathBuf>,
        /// Atom graph; its embedded source is used when --qubo is absent.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["qubo", "graph"])]
        builtin: Option<String>,
        #[arg(long, default_value_t = 2)]
        wire_even_len: usize,
        #[arg(long, default_value_t = 1)]
        wire_odd_len: usize,
        #[command(flatten)]
        caps: Caps,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Place atoms so that the graph is a unit-disk graph.
    Layout {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        restarts: usize,
        #[command(flatten)]
        physics: Physics,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check coordinates against the graph at the blockade radius.
    Validate {
        #[command(flatten)]
        input: GraphInput,
        /// Radius in µm; defaults to the built-in's radius or the value
        /// derived from the physical parameters.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        #[command(flatten)]
        physics: Physics,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Simulate the adiabatic sweep and write the measurement distribution.
    Simulate {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value_t = Mode::Ideal)]
        mode: Mode,
        /// Edge interaction in ideal mode, (2π)MHz.
        #[arg(long, default_value_t = 10.0 * DETUNING_FINAL)]
        u0: f64,
        #[arg(long, default_value_t = rydberg_qubo::sim::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = rydberg_qubo::sim::DEFAULT_TOTAL_TIME)]
        total_time: f64,
        #[arg(long)]
        postselect_af: bool,
        /// Draw this many measurement shots instead of exact probabilities.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Omit outcomes below this probability.
        #[arg(long, default_value_t = 0.0)]
        min_prob: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, env = "RYDQUBO_SIM_CAP", default_value_t = rydberg_qubo::sim::DEFAULT_SIM_CAP)]
        sim_cap: usize,
        #[command(flatten)]
        physics: Physics,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphInput {
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Coordinates as JSON (`{"atoms": [{id, x, y}]}`) or CSV (`id,x,y`).
    #[arg(long)]
    layout: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["graph", "layout"])]
    builtin: Option<String>,
}

#[derive(Args)]
struct Physics {
    #[arg(long, default_value_t = C6_RB71S)]
    c6: f64,
    #[arg(long, default_value_t = rydberg_qubo::geometry::RABI_FREQUENCY)]
    omega: f64,
    #[arg(long, default_value_t = rydberg_qubo::geometry::DETUNING_INITIAL, allow_hyphen_values = true)]
    delta_initial: f64,
    #[arg(long, default_value_t = DETUNING_FINAL, allow_hyphen_values = true)]
    delta_final: f64,
}

impl Physics {
    /// Blockade radius is taken at the end of the sweep, `Ω = 0`.
    fn params(&self) -> Result<PhysicalParams, CliError> {
        PhysicalParams::new(self.c6, 0.0, self.delta_final).map_err(input)
    }
}

#[derive(Args)]
struct Caps {
    #[arg(long, env = "RYDQUBO_EXACT_CAP", default_value_t = SearchLimits::default().exact_cap)]
    exact_cap: usize,
    #[arg(long, env = "RYDQUBO_QUBO_CAP", default_value_t = SearchLimits::default().qubo_cap)]
    qubo_cap: usize,
}

impl Caps {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            exact_cap: self.exact_cap,
            qubo_cap: self.qubo_cap,
            ..SearchLimits::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ideal,
    Vdw,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Failed(String),
    Resource(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Failed(m) | CliError::Resource(m) => m,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<QuboError> for CliError {
    fn from(e: QuboError) -> Self {
        match e {
            QuboError::Overflow(_) | QuboError::TooLarge { .. } => {
                CliError::Resource(e.to_string())
            }
            _ => input(e),
        }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Overflow(_) | CompileError::TooManyAtoms(_) => {
                CliError::Resource(e.to_string())
            }
            _ => input(e),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::CapExceeded { .. } => CliError::Resource(e.to_string()),
            SolverError::Qubo(q) => q.into(),
            _ => input(e),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::CapExceeded { .. } | SimError::NormDrift { .. } => {
                CliError::Resource(e.to_string())
            }
            SimError::EmptyPostselection => CliError::Failed(e.to_string()),
            _ => input(e),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::NonEmbeddable { .. } => CliError::Failed(e.to_string()),
            _ => input(e),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        input(e)
    }
}

impl From<BuiltinError> for CliError {
    fn from(e: BuiltinError) -> Self {
        input(e)
    }
}

struct Log {
    json: bool,
}

impl Log {
    fn info(&self, event: &str, fields: serde_json::Value) {
        if self.json {
            eprintln!(
                "{}",
                json!({"level": "info", "event": event, "data": fields})
            );
        } else if fields.is_null() {
            eprintln!("{event}");
        } else {
            eprintln!("{event}: {fields}");
        }
    }

    fn error(&self, e: &CliError) {
        if self.json {
            eprintln!(
                "{}",
                json!({"level": "error", "exit_code": e.code(), "message": e.message()})
            );
        } else {
            eprintln!("error: {}", e.message());
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match write!(out, "{text}{nl}").and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Input(format!("stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn read_layout(path: &Path) -> Result<Layout, CliError> {
    let text = read(path)?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if is_csv {
        Layout::from_csv(&text)?
    } else {
        Layout::from_json(&text)?
    })
}

/// Graph, optional layout, and the radius the layout was drawn for.
fn load_input(inp: &GraphInput) -> Result<(AtomGraph, Option<Layout>, Option<f64>), CliError> {
    if let Some(name) = &inp.builtin {
        let b = load_builtin_layout(name.parse::<BuiltinName>()?)?;
        return Ok((b.graph, Some(b.layout), Some(b.radius)));
    }
    let path = inp
        .graph
        .as_ref()
        .ok_or_else(|| CliError::Input("give --graph or --builtin".into()))?;
    let graph = AtomGraph::from_json(&read(path)?)?;
    let layout = inp.layout.as_deref().map(read_layout).transpose()?;
    Ok((graph, layout, None))
}

fn run(cli: Cli, log: &Log) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(input)?;
    }
    match cli.command {
        Command::Compile {
            qubo,
            wire_even_len,
            wire_odd_len,
            output,
        } => {
            let q = QuboInstance::from_json(&read(&qubo)?)?;
            let policy = WireLengthPolicy::new(wire_even_len, wire_odd_len)?;
            let graph = compile(&q, &policy)?;
            log.info(
                "compiled",
                json!({"atoms": graph.num_atoms(), "edges": graph.num_edges(), "wires": graph.wires().len()}),
            );
            emit(output.as_deref(), &graph.to_json())
        }
        Command::Certify {
            qubo,
            graph,
            builtin,
            wire_even_len,
            wire_odd_len,
            caps,
            output,
        } => {
            let (q, g) = if let Some(name) = builtin {
                let b = load_builtin_layout(name.parse::<BuiltinName>()?)?;
                let q = b
                    .graph
                    .source()
                    .cloned()
                    .expect("built-ins carry their source");
                (q, b.graph)
            } else {
                let q = qubo
                    .as_deref()
                    .map(|p| read(p).and_then(|t| Ok(QuboInstance::from_json(&t)?)))
                    .transpose()?;
                match (q, graph) {
                    (Some(q), None) => {
                        let policy = WireLengthPolicy::new(wire_even_len, wire_odd_len)?;
                        let g = compile(&q, &policy)?;
                        (q, g)
                    }
                    (q, Some(path)) => {
                        let g = AtomGraph::from_json(&read(&path)?)?;
                        let q = match q.or_else(|| g.source().cloned()) {
                            Some(q) => q,
                            None => {
                                return Err(CliError::Input(
                                    "graph has no embedded source; pass --qubo".into(),
                                ))
                            }
                        };
                        (q, g)
                    }
                    (None, None) => {
                        return Err(CliError::Input("give --qubo, --graph or --builtin".into()))
                    }
                }
            };
            let report = certify_equivalence(&q, &g, &caps.limits())?;
            log.info(
                "certified",
                json!({"pass": report.pass, "ground_configs": report.ground_config_count}),
            );
            emit(output.as_deref(), &report.to_json())?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "decoded ground states differ from the minimizers: {} counterexample(s)",
                    report.counterexamples.len()
                )))
            }
        }
        Command::Layout {
            graph,
            seed,
            restarts,
            physics,
            output,
        } => {
            let g = AtomGraph::from_json(&read(&graph)?)?;
            let opts = AutoLayoutOptions {
                restarts,
                ..AutoLayoutOptions::default()
            };
            let layout = auto_layout(&g, &physics.params()?, seed, &opts)?;
            log.info("placed", json!({"atoms": layout.len(), "seed": seed}));
            emit(output.as_deref(), &layout.to_json())
        }
        Command::Validate {
            input: inp,
            radius,
            margin,
            physics,
            output,
        } => {
            let (g, layout, stored) = load_input(&inp)?;
            let layout = layout.ok_or_else(|| CliError::Input("validate needs --layout".into()))?;
            let radius = match radius.or(stored) {
                Some(r) => r,
                None => blockade_radius(&physics.params()?)?,
            };
            let report = validate_unit_disk(&g, &layout, radius, margin)?;
            log.info(
                "validated",
                json!({"valid": report.valid, "radius": radius, "edge_slack": report.edge_slack}),
            );
            emit(output.as_deref(), &report.to_json())?;
            if report.valid {
                Ok(())
            } else {
                Err(CliError::Failed("layout does not realize the graph".into()))
            }
        }
        Command::Simulate {
            input: inp,
            mode,
            u0,
            steps,
            total_time,
            postselect_af,
            shots,
            seed,
            min_prob,
            format,
            sim_cap,
            physics,
            output,
        } => {
            let (g, layout, _) = load_input(&inp)?;
            let mode = match mode {
                Mode::Ideal => InteractionMode::IdealBlockade { u0 },
                Mode::Vdw => InteractionMode::FullVdW,
            };
            let params = PhysicalParams::new(physics.c6, physics.omega, physics.delta_final)?;
            let h = HamiltonianSpec::build(&g, layout.as_ref(), &params, mode)?;
            let schedule = PulseSchedule::new(
                total_time,
                physics.omega,
                physics.delta_initial,
                physics.delta_final,
                0.1,
                0.9,
            )?;
            let opts = EvolveOptions {
                steps,
                cap: sim_cap,
                ..EvolveOptions::default()
            };
            let ev = evolve(&h, &schedule, &opts)?;
            let mut dist = measure_distribution(&ev.state, g.num_atoms())?;
            if let Some(k) = shots {
                dist = dist.sample(k, seed)?;
            }
            if postselect_af {
                let chains = g.af_chains();
                if chains.is_empty() {
                    return Err(CliError::Input("graph has no AF-ordering atoms".into()));
                }
                dist = dist.postselect_af(&chains)?;
            }
            let top = dist.ranked_decoded(&g).into_iter().next();
            log.info(
                "simulated",
                json!({
                    "atoms": g.num_atoms(),
                    "steps": ev.steps,
                    "substeps": ev.substeps,
                    "norm_drift": ev.norm_drift,
                    "top_decoded": top.map(|(r, a)| json!({"bitstring": r.bitstring, "assignment": a.to_string(), "probability": r.probability})),
                }),
            );
            let labels: Vec<&str> = g.labels().collect();
            let text = match format {
                Format::Csv => dist.to_csv(&labels, min_prob),
                Format::Json => dist.to_json(&labels, min_prob),
            };
            emit(output.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let log = Log { json: cli.json };
    match run(cli, &log) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log.error(&e);
            ExitCode::from(e.code())
        }
    }
}
