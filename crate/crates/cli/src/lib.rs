//! Command-line front end for `qroute`.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or runtime error,
//! 3 table reproduction mismatch.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qroute::decode::{decode_qrobot, decode_swp, encode_swp_routes, FeasibilityReport, RobotPlan, Routes};
use qroute::instance::{
    build_weight_matrix, generate_qrobot_instance, generate_swp_instance, QRobotGenerator, SwpGenerator,
};
use qroute::io::{from_json_str, to_json_string, InstanceDoc, SCHEMA_VERSION};
use qroute::ising::{external_field_from_q, qubo_to_ising, to_pauli_terms, IsingDoc};
use qroute::qubo::{
    build_qrobot_qubo, build_swp_qubo, qubit_count, PenaltyForm, QRobotQuboOptions, QuboDoc, QubitParams,
    SwpQuboOptions,
};
use qroute::solvers::{
    solve_backtracking, solve_exact, solve_simulated_annealing_qubo, AnnealSchedule, BacktrackOptions,
    DEFAULT_BACKTRACK_LIMIT, DEFAULT_EXACT_LIMIT,
};
use qroute::tables::{worked_q_rows, QROBOT_CAPACITY, QROBOT_QUBITS, WORKED_H};
use qroute::vqsim::{
    build_ansatz, max_qubits, run_qaoa, run_vqe, AnsatzForm, Entanglement, Optimizer, QaoaOptions,
};
use qroute::{Backend, Error, Instance, ProblemKind, QuboModel, Solution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qroute", version, about = "QUBO routing and picking toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Compile an instance into a QUBO (and optionally Ising) model.
    Build(BuildArgs),
    /// Solve a model with one backend and decode the result.
    Solve(SolveArgs),
    /// Run backends over generated instances and write CSV.
    Bench(BenchArgs),
    /// Recompute the reference tables and compare.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Swp,
    Qrobot,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Swp => ProblemKind::Swp,
            Kind::Qrobot => ProblemKind::Qrobot,
        }
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: Kind,
    /// Patients (swp) or items (qrobot).
    #[arg(long)]
    n: usize,
    /// Workers (swp) or robots (qrobot).
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Robot capacity in kg (qrobot only).
    #[arg(long, default_value_t = QROBOT_CAPACITY)]
    capacity: u32,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormArg {
    PerNode,
    Aggregated,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Time-window weight for the routing cost.
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,
    /// Penalty strength; defaults to an integer above the largest cost.
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long, value_enum, default_value = "per-node")]
    form: FormArg,
    /// Encode the instance's workload limit with slack bits.
    #[arg(long)]
    capacity: bool,
    /// Keep depot-free 2-cycles allowed (degree penalties only).
    #[arg(long)]
    allow_two_cycles: bool,
    /// Also write the Ising form.
    #[arg(long)]
    ising: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OptimizerArg {
    Spsa,
    NelderMead,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_backend)]
    backend: Backend,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ansatz depth (vqe).
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Layer count (qaoa).
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Optimizer iterations (vqe, qaoa).
    #[arg(long, default_value_t = 200)]
    iters: usize,
    #[arg(long, value_enum, default_value = "spsa")]
    optimizer: OptimizerArg,
    /// Annealing restarts (sa).
    #[arg(long)]
    restarts: Option<usize>,
    /// Annealing temperature steps (sa).
    #[arg(long)]
    steps: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    suite: Kind,
    /// Inclusive size range `a..b`, or a single size.
    #[arg(long, value_parser = parse_sizes)]
    sizes: SizeRange,
    /// Number of seeds; seeds `0..s` are used.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Comma-separated backends.
    #[arg(long, value_delimiter = ',', value_parser = parse_backend, default_value = "exact,sa,backtracking")]
    backends: Vec<Backend>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,
    #[arg(long, default_value_t = QROBOT_CAPACITY)]
    capacity: u32,
    /// Optimizer iterations for vqe and qaoa cells.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TablesArgs {
    table: Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Table {
    QubitCounts,
    Hfield,
}

#[derive(Debug, Clone, Copy)]
struct SizeRange(usize, usize);

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse::<Backend>().map_err(|_| {
        let names: Vec<&str> = Backend::ALL.iter().map(|b| b.as_str()).collect();
        format!("unknown backend `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_sizes(s: &str) -> Result<SizeRange, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad size `{t}`: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        return Err(format!("size range `{s}` is empty"));
    }
    Ok(SizeRange(lo, hi))
}

/// Written by `build`, read by `solve`. The source instance travels with the
/// model so results can be decoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub source: InstanceDoc,
    pub qubo: QuboDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ising: Option<IsingDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalSummary {
    pub params: Vec<f64>,
    pub history: Vec<(usize, f64)>,
    pub probability: f64,
}

/// Written by `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema_version: u32,
    pub problem: ProblemKind,
    pub qubits: usize,
    pub solution: Solution,
    pub feasibility: FeasibilityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routes: Option<Routes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robot_plan: Option<RobotPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variational: Option<VariationalSummary>,
}

enum Failure {
    Invalid(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Results go to `out`, diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Build(a) => cmd_build(&a, out),
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Bench(a) => cmd_bench(&a, out, err),
        Command::Tables(a) => cmd_tables(&a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Mismatch(msg)) => {
            let _ = writeln!(err, "mismatch: {msg}");
            EXIT_MISMATCH
        }
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Invalid(e.to_string())),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn generate(kind: Kind, n: usize, k: usize, seed: u64, capacity: u32) -> qroute::Result<Instance> {
    Ok(match kind {
        Kind::Swp => {
            let (instance, distances) = generate_swp_instance(&SwpGenerator::new(n, k, seed))?;
            Instance::Swp { instance, distances }
        }
        Kind::Qrobot => Instance::QRobot(generate_qrobot_instance(&QRobotGenerator::new(n, k, capacity, seed))?),
    })
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> CliResult {
    let inst = generate(a.kind, a.n, a.k, a.seed, a.capacity)?;
    emit(&to_json_string(&InstanceDoc::from_instance(&inst))?, a.output.as_deref(), out)
}

struct BuildSettings {
    gamma: f64,
    swp: SwpQuboOptions,
    qrobot: QRobotQuboOptions,
}

fn build_model(inst: &Instance, s: &BuildSettings) -> qroute::Result<QuboModel> {
    match inst {
        Instance::Swp { instance, distances } => {
            let w = build_weight_matrix(instance, distances, s.gamma)?;
            build_swp_qubo(instance, &w, &s.swp)
        }
        Instance::QRobot(q) => build_qrobot_qubo(q, &s.qrobot),
    }
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> CliResult {
    let doc: InstanceDoc = from_json_str(&read_text(&a.input)?)?;
    let inst = doc.to_instance()?;
    let settings = BuildSettings {
        gamma: a.gamma,
        swp: SwpQuboOptions {
            penalty: a.penalty,
            include_capacity: a.capacity,
            form: match a.form {
                FormArg::PerNode => PenaltyForm::PerNode,
                FormArg::Aggregated => PenaltyForm::Aggregated,
            },
            forbid_two_cycles: !a.allow_two_cycles,
        },
        qrobot: QRobotQuboOptions { penalty: a.penalty },
    };
    let model = build_model(&inst, &settings)?;
    let file = ModelFile {
        schema_version: SCHEMA_VERSION,
        gamma: matches!(inst, Instance::Swp { .. }).then_some(a.gamma),
        source: InstanceDoc::from_instance(&inst),
        ising: a.ising.then(|| qubo_to_ising(&model).to_doc()),
        qubo: model.to_doc(),
    };
    emit(&to_json_string(&file)?, a.output.as_deref(), out)
}

/// Solver knobs shared by `solve` and `bench`.
struct SolveSettings {
    seed: u64,
    depth: usize,
    p: usize,
    iters: usize,
    optimizer: OptimizerArg,
    restarts: Option<usize>,
    steps: Option<usize>,
    gamma: f64,
}

struct Outcome {
    solution: Solution,
    report: FeasibilityReport,
    routes: Option<Routes>,
    robot_plan: Option<RobotPlan>,
    variational: Option<VariationalSummary>,
}

fn optimizer(s: &SolveSettings) -> Optimizer {
    match s.optimizer {
        OptimizerArg::Spsa => Optimizer::spsa(s.iters),
        OptimizerArg::NelderMead => Optimizer::nelder_mead(s.iters),
    }
}

fn solve_model(inst: &Instance, model: &QuboModel, backend: Backend, s: &SolveSettings) -> qroute::Result<Outcome> {
    let mut variational = None;
    let solution = match backend {
        Backend::Exact => solve_exact(model, DEFAULT_EXACT_LIMIT)?,
        Backend::Sa => {
            let ising = qubo_to_ising(model);
            let mut sched = AnnealSchedule::default_for(&ising);
            if let Some(r) = s.restarts {
                sched.restarts = r;
            }
            if let Some(st) = s.steps {
                sched.steps = st;
            }
            solve_simulated_annealing_qubo(model, Some(&sched), s.seed)?
        }
        Backend::Backtracking => {
            let Instance::Swp { instance, distances } = inst else {
                return Err(Error::Parameter("backtracking applies to swp instances only".into()));
            };
            let w = build_weight_matrix(instance, distances, s.gamma)?;
            let routes = solve_backtracking(instance, &w, &BacktrackOptions::default())?;
            let bits = encode_swp_routes(&routes, model, instance.n_nodes())?;
            Solution {
                energy: qroute::qubo::evaluate_qubo(model, &bits)?,
                bits,
                backend,
                seed: None,
                evaluations: 0,
            }
        }
        Backend::Vqe | Backend::Qaoa => {
            let terms = to_pauli_terms(&qubo_to_ising(model));
            let r = if backend == Backend::Vqe {
                let ansatz = build_ansatz(terms.n_qubits, s.depth, AnsatzForm::RyRz, Entanglement::Linear)?;
                run_vqe(&terms, &ansatz, &optimizer(s), s.seed, None)?
            } else {
                let opts = QaoaOptions {
                    p: s.p,
                    optimizer: optimizer(s),
                    seed: s.seed,
                    initial: None,
                };
                run_qaoa(&terms, &opts)?
            };
            variational = Some(VariationalSummary {
                params: r.params.clone(),
                history: r.history.clone(),
                probability: r.probability,
            });
            // The reported energy is the sampled bitstring's, not the
            // expectation, so all backends are comparable.
            let energy = qroute::qubo::evaluate_qubo(model, &r.most_probable_bits)?;
            Solution {
                bits: r.most_probable_bits,
                energy,
                backend,
                seed: Some(s.seed),
                evaluations: r.evaluations as u64,
            }
        }
    };
    let (report, routes, robot_plan) = match inst {
        Instance::Swp { instance, distances } => {
            let w = build_weight_matrix(instance, distances, s.gamma)?;
            let (routes, report) = decode_swp(&solution.bits, model, instance, &w)?;
            (report, Some(routes), None)
        }
        Instance::QRobot(q) => {
            let (plan, report) = decode_qrobot(&solution.bits, model, q)?;
            (report, None, Some(plan))
        }
    };
    Ok(Outcome {
        solution,
        report,
        routes,
        robot_plan,
        variational,
    })
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let file: ModelFile = from_json_str(&read_text(&a.input)?)?;
    let inst = file.source.to_instance()?;
    let model = QuboModel::from_doc(&file.qubo)?;
    let settings = SolveSettings {
        seed: a.seed,
        depth: a.depth,
        p: a.p,
        iters: a.iters,
        optimizer: a.optimizer,
        restarts: a.restarts,
        steps: a.steps,
        gamma: file.gamma.unwrap_or(0.0),
    };
    let o = solve_model(&inst, &model, a.backend, &settings)?;
    let text = match (&o.routes, &o.robot_plan) {
        (Some(r), _) => r.render(),
        (_, Some(p)) => p.render(),
        _ => String::new(),
    };
    let _ = write!(err, "{text}");
    for v in &o.report.violations {
        let _ = writeln!(err, "violation {}: {}", v.constraint, v.detail);
    }
    let result = ResultFile {
        schema_version: SCHEMA_VERSION,
        problem: inst.kind(),
        qubits: model.n_vars(),
        solution: o.solution,
        feasibility: o.report,
        routes: o.routes,
        robot_plan: o.robot_plan,
        variational: o.variational,
    };
    emit(&to_json_string(&result)?, a.output.as_deref(), out)
}

pub const CSV_HEADER: &str = "kind,n,k,qubits,backend,seed,energy,feasible,cost,evaluations";

struct Cell {
    n: usize,
    seed: u64,
    backend: Backend,
}

fn skip_reason(kind: Kind, n: usize, qubits: usize, backend: Backend) -> Option<String> {
    match backend {
        Backend::Exact if qubits > DEFAULT_EXACT_LIMIT => {
            Some(format!("{qubits} variables exceed the enumeration limit {DEFAULT_EXACT_LIMIT}"))
        }
        Backend::Vqe | Backend::Qaoa if qubits > max_qubits() => {
            Some(format!("{qubits} qubits exceed the simulator limit {}", max_qubits()))
        }
        Backend::Backtracking if kind == Kind::Qrobot => Some("backtracking applies to swp only".into()),
        Backend::Backtracking if n > DEFAULT_BACKTRACK_LIMIT => {
            Some(format!("{n} patients exceed the backtracking limit {DEFAULT_BACKTRACK_LIMIT}"))
        }
        _ => None,
    }
}

fn bench_cell(a: &BenchArgs, cell: &Cell) -> std::result::Result<String, String> {
    let inst = generate(a.suite, cell.n, a.k, cell.seed, a.capacity).map_err(|e| e.to_string())?;
    let settings = BuildSettings {
        gamma: a.gamma,
        swp: SwpQuboOptions::default(),
        qrobot: QRobotQuboOptions::default(),
    };
    let model = build_model(&inst, &settings).map_err(|e| e.to_string())?;
    if let Some(why) = skip_reason(a.suite, cell.n, model.n_vars(), cell.backend) {
        return Err(why);
    }
    let solve = SolveSettings {
        seed: cell.seed,
        depth: 2,
        p: 1,
        iters: a.iters,
        optimizer: OptimizerArg::Spsa,
        restarts: None,
        steps: None,
        gamma: a.gamma,
    };
    let o = solve_model(&inst, &model, cell.backend, &solve).map_err(|e| e.to_string())?;
    let kind: ProblemKind = a.suite.into();
    Ok(format!(
        "{kind},{},{},{},{},{},{},{},{},{}",
        cell.n,
        a.k,
        model.n_vars(),
        cell.backend,
        cell.seed,
        o.solution.energy,
        o.report.feasible,
        o.report.recomputed_cost,
        o.solution.evaluations
    ))
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut backends = a.backends.clone();
    backends.sort();
    backends.dedup();
    let mut cells = Vec::new();
    for n in a.sizes.0..=a.sizes.1 {
        for seed in 0..a.seeds {
            for &backend in &backends {
                cells.push(Cell { n, seed, backend });
            }
        }
    }
    // Cells are independent; results come back in cell order.
    let rows: Vec<_> = cells.par_iter().map(|c| bench_cell(a, c)).collect();
    let mut csv = String::with_capacity(64 * (rows.len() + 1));
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for (cell, row) in cells.iter().zip(rows) {
        match row {
            Ok(line) => {
                csv.push_str(&line);
                csv.push('\n');
            }
            Err(why) => {
                let _ = writeln!(err, "skip n={} seed={} backend={}: {why}", cell.n, cell.seed, cell.backend);
            }
        }
    }
    emit(&csv, a.output.as_deref(), out)
}

fn cmd_tables(a: &TablesArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut text = String::new();
    let mut mismatches = Vec::new();
    match a.table {
        Table::QubitCounts => {
            text.push_str("n,qubits\n");
            for &(n, expected) in QROBOT_QUBITS.iter() {
                let got = qubit_count(QubitParams::Qrobot {
                    n_items: n,
                    k_robots: 1,
                    capacity: QROBOT_CAPACITY,
                })?;
                let _ = writeln!(text, "{n},{got}");
                if got != expected {
                    mismatches.push(format!("n={n}: computed {got}, reference {expected}"));
                }
            }
        }
        Table::Hfield => {
            text.push_str("i,h\n");
            let h = external_field_from_q(&worked_q_rows())?;
            for (i, (&got, &expected)) in h.iter().zip(WORKED_H.iter()).enumerate() {
                let _ = writeln!(text, "{},{got}", i + 1);
                if got != expected {
                    mismatches.push(format!("h_{}: computed {got}, reference {expected}", i + 1));
                }
            }
        }
    }
    emit(&text, None, out)?;
    for m in &mismatches {
        let _ = writeln!(err, "{m}");
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} entries differ", mismatches.len())))
    }
}
