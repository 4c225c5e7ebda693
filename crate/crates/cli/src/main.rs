//! Command-line front end: solve models, convert them to QUBO, emit
//! variational circuits as OpenQASM 3, and list provider devices.
//!
//! Exit codes: 0 solved (optimal/feasible), 1 bad parameter count,
//! 2 invalid model, 3 backend or credential error, 4 infeasible.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qplex::backends::{
    default_algorithm, get_solver, remote::RemoteClient, select_device, Algorithm, BackendError,
    DeviceKind, SolveOptions,
};
use qplex::circuits::{build_qaoa, build_vqe, emit_qasm3, AnsatzKind, AnsatzSpec};
use qplex::model::{parse_model, Model, Solution, SolutionStatus};
use qplex::optimize::{initial_params, OptimizerConfig, OptimizerKind};
use qplex::qubo::{to_qubo, ConversionError, QuboDoc};

#[derive(Parser)]
#[command(
    name = "qplex",
    version,
    about = "Solve combinatorial optimization models via exact, annealing or gate-based backends"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model with the selected backend.
    Solve(SolveArgs),
    /// Convert a model to QUBO JSON.
    Convert(ConvertArgs),
    /// Emit a variational circuit for a model as OpenQASM 3.
    Emit(EmitArgs),
    /// List devices advertised by a remote provider.
    Devices(DevicesArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Exact,
    Annealing,
    Qaoa,
    Vqe,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(value: AlgorithmArg) -> Self {
        match value {
            AlgorithmArg::Exact => Algorithm::Exact,
            AlgorithmArg::Annealing => Algorithm::Annealing,
            AlgorithmArg::Qaoa => Algorithm::Qaoa,
            AlgorithmArg::Vqe => Algorithm::Vqe,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the model JSON file.
    model: PathBuf,
    #[arg(long, default_value = "exact")]
    backend: String,
    /// Defaults to the backend's native algorithm.
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmArg>,
    /// QAOA layers.
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// VQE ansatz depth.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Measurement shots; 0 = exact expectation on the simulator.
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value = "nelder-mead")]
    optimizer: String,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Constraint penalty weight (default: derived from the objective).
    #[arg(long)]
    penalty: Option<f64>,
    /// Unsigned seed, or "random" for entropy.
    #[arg(long, default_value = "0")]
    seed: String,
    /// Annealer restarts.
    #[arg(long, default_value_t = 100)]
    num_reads: usize,
    /// Metropolis sweeps per read.
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long, default_value_t = 0.1)]
    beta_hot: f64,
    #[arg(long, default_value_t = 10.0)]
    beta_cold: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    #[arg(long)]
    provider_url: Option<String>,
}

#[derive(Args)]
struct ConvertArgs {
    model: PathBuf,
    /// Output path (default: model path with a .qubo.json extension).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

#[derive(Args)]
struct EmitArgs {
    model: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Qaoa)]
    algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Comma-separated circuit parameters (default: seeded draw).
    #[arg(long)]
    params: Option<String>,
    #[arg(long, default_value = "0")]
    seed: String,
    #[arg(long)]
    penalty: Option<f64>,
    /// Output path (default: model path with a .qasm extension).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

#[derive(Args)]
struct DevicesArgs {
    #[arg(long)]
    provider_url: String,
    /// Provider/backend name used for the token variable.
    #[arg(long, default_value = "mock-remote")]
    backend: String,
    /// Mark the device that would be selected for this qubit count.
    #[arg(long)]
    require: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

/// An error plus the exit code it maps to.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn invalid_model(message: impl Into<String>) -> Self {
        CliError::new(2, message)
    }

    fn backend(message: impl Into<String>) -> Self {
        CliError::new(3, message)
    }

    fn bad_params(message: impl Into<String>) -> Self {
        CliError::new(1, message)
    }
}

impl From<BackendError> for CliError {
    fn from(error: BackendError) -> Self {
        let code = match &error {
            BackendError::Model(_) => 2,
            // A provably unsatisfiable constraint is an infeasibility
            // verdict, not a malformed model.
            BackendError::Conversion(ConversionError::Unsatisfiable { .. }) => 4,
            BackendError::Conversion(_) => 2,
            _ => 3,
        };
        CliError::new(code, error.to_string())
    }
}

impl From<ConversionError> for CliError {
    fn from(error: ConversionError) -> Self {
        match &error {
            ConversionError::Unsatisfiable { .. } => CliError::new(4, error.to_string()),
            _ => CliError::invalid_model(error.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Emit(args) => cmd_emit(args),
        Command::Devices(args) => cmd_devices(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {}", error.message);
            ExitCode::from(error.code)
        }
    }
}

fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid_model(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| CliError::invalid_model(e.to_string()))
}

fn parse_seed(text: &str) -> Result<u64, CliError> {
    if text == "random" {
        return Ok(rand::random());
    }
    text.parse::<u64>().map_err(|_| {
        CliError::invalid_model(format!(
            "seed must be an unsigned integer or \"random\", got \"{text}\""
        ))
    })
}

fn resolve_optimizer(
    name: &str,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<OptimizerConfig, CliError> {
    let (kind, aliased) =
        OptimizerKind::from_name(name).map_err(|e| CliError::backend(e.to_string()))?;
    if aliased {
        eprintln!("note: optimizer \"{name}\" is served by nelder-mead");
    }
    let mut config = OptimizerConfig::with_kind(kind);
    config.max_iter = max_iter;
    config.tol = tol;
    config.seed = seed;
    Ok(config)
}

/// Write to stdout without panicking when the consumer closes the pipe
/// early (e.g. `qplex solve ... | head`); the exit-code contract must
/// hold regardless.
fn print_out(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

/// Render a solution: human-readable text or one JSON object on stdout.
/// JSON mode drops volatile metadata (wall time) so identical seeded
/// invocations stay byte-identical.
fn render_solution(solution: &Solution, format: OutputFormat) {
    use std::fmt::Write;
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            writeln!(out, "status: {}", solution.status.as_str()).unwrap();
            writeln!(out, "backend: {}", solution.backend_name).unwrap();
            match solution.objective_value {
                Some(value) => writeln!(out, "objective: {value}").unwrap(),
                None => writeln!(out, "objective: n/a").unwrap(),
            }
            if !solution.assignment.is_empty() {
                writeln!(out, "assignment:").unwrap();
                for (name, value) in &solution.assignment {
                    writeln!(out, "  {name} = {value}").unwrap();
                }
            }
            if !solution.metadata.is_empty() {
                writeln!(out, "metadata:").unwrap();
                for (key, value) in &solution.metadata {
                    writeln!(out, "  {key}: {value}").unwrap();
                }
            }
        }
        OutputFormat::Json => {
            let metadata: BTreeMap<_, _> = solution
                .metadata
                .iter()
                .filter(|(key, _)| key.as_str() != "wall_time_ms")
                .collect();
            let doc = serde_json::json!({
                "status": solution.status.as_str(),
                "backend": solution.backend_name,
                "objective_value": solution.objective_value,
                "assignment": solution.assignment,
                "metadata": metadata,
            });
            writeln!(out, "{doc}").unwrap();
        }
    }
    print_out(&out);
}

fn cmd_solve(args: SolveArgs) -> Result<u8, CliError> {
    let seed = parse_seed(&args.seed)?;
    let model = load_model(&args.model)?;

    let algorithm = match args.algorithm {
        Some(a) => a.into(),
        None => default_algorithm(&args.backend).unwrap_or(Algorithm::Qaoa),
    };
    let optimizer = resolve_optimizer(&args.optimizer, args.max_iter, args.tol, seed)?;
    let options = SolveOptions {
        backend: args.backend.clone(),
        algorithm,
        p: args.p,
        depth: args.depth,
        shots: args.shots,
        optimizer,
        penalty: args.penalty,
        seed,
        num_reads: args.num_reads,
        sweeps: args.sweeps,
        beta_hot: args.beta_hot,
        beta_cold: args.beta_cold,
        provider_url: args.provider_url.clone(),
        initial_params: None,
    };

    let solver = get_solver(&args.backend, &options)?;
    let solution = solver.solve(&model, &options)?;
    render_solution(&solution, args.output);
    Ok(match solution.status {
        SolutionStatus::Optimal | SolutionStatus::Feasible => 0,
        SolutionStatus::Infeasible => 4,
        SolutionStatus::Error => 3,
    })
}

fn output_path(explicit: Option<PathBuf>, model: &Path, extension: &str) -> PathBuf {
    explicit.unwrap_or_else(|| {
        let stem = model
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".to_string());
        model.with_file_name(format!("{stem}.{extension}"))
    })
}

fn cmd_convert(args: ConvertArgs) -> Result<u8, CliError> {
    let model = load_model(&args.model)?;
    let conversion = to_qubo(&model, args.penalty)?;
    let doc = QuboDoc::from_conversion(&conversion);
    let path = output_path(args.out, &args.model, "qubo.json");
    let text = serde_json::to_string_pretty(&doc).expect("QUBO documents always serialize");
    std::fs::write(&path, text)
        .map_err(|e| CliError::backend(format!("cannot write {}: {e}", path.display())))?;

    match args.output {
        OutputFormat::Text => {
            print_out(&format!(
                "qubo: {} bits, penalty {} -> {}\n",
                doc.n,
                conversion.penalty,
                path.display()
            ));
        }
        OutputFormat::Json => {
            print_out(&format!(
                "{}\n",
                serde_json::json!({
                    "n": doc.n,
                    "penalty": conversion.penalty,
                    "path": path,
                })
            ));
        }
    }
    Ok(0)
}

fn cmd_emit(args: EmitArgs) -> Result<u8, CliError> {
    let seed = parse_seed(&args.seed)?;
    let model = load_model(&args.model)?;
    let conversion = to_qubo(&model, args.penalty)?;
    let n = conversion.qubo.n;

    let (kind, layers) = match args.algorithm {
        AlgorithmArg::Qaoa => (AnsatzKind::Qaoa, args.p),
        AlgorithmArg::Vqe => (AnsatzKind::Vqe, args.depth),
        _ => {
            return Err(CliError::bad_params(
                "emit supports only the qaoa and vqe algorithms",
            ))
        }
    };
    let spec = AnsatzSpec {
        kind,
        layers,
        num_qubits: n,
    };
    let params: Vec<f64> = match &args.params {
        Some(csv) => csv
            .split(',')
            .map(|token| {
                token
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::bad_params(format!("invalid parameter \"{token}\"")))
            })
            .collect::<Result<_, _>>()?,
        None => initial_params(&spec, seed),
    };
    if params.len() != spec.param_count() {
        return Err(CliError::bad_params(format!(
            "expected {} parameters for this ansatz, got {}",
            spec.param_count(),
            params.len()
        )));
    }

    let circuit = match kind {
        AnsatzKind::Qaoa => build_qaoa(
            &conversion.qubo.to_ising(),
            args.p,
            &params[..args.p],
            &params[args.p..],
        ),
        AnsatzKind::Vqe => build_vqe(n, args.depth, &params),
    }
    .map_err(|e| CliError::bad_params(e.to_string()))?;

    let text = emit_qasm3(&circuit);
    let path = output_path(args.out, &args.model, "qasm");
    std::fs::write(&path, &text)
        .map_err(|e| CliError::backend(format!("cannot write {}: {e}", path.display())))?;

    match args.output {
        OutputFormat::Text => {
            print_out(&format!(
                "circuit: {} qubits, {} gates -> {}\n",
                circuit.num_qubits,
                circuit.gates.len(),
                path.display()
            ));
        }
        OutputFormat::Json => {
            print_out(&format!(
                "{}\n",
                serde_json::json!({
                    "num_qubits": circuit.num_qubits,
                    "gates": circuit.gates.len(),
                    "path": path,
                })
            ));
        }
    }
    Ok(0)
}

fn cmd_devices(args: DevicesArgs) -> Result<u8, CliError> {
    let client = RemoteClient::from_env(&args.backend, &args.provider_url)?;
    let devices = client.devices()?;
    if devices.is_empty() {
        return Err(CliError::backend("no devices"));
    }
    let selected = match args.require {
        Some(required) => Some(select_device(&devices, required)?.name.clone()),
        None => None,
    };

    match args.output {
        OutputFormat::Text => {
            use std::fmt::Write;
            let mut out = String::new();
            writeln!(out, "{:<20} {:>7} {:>6}  {:<9}", "NAME", "QUBITS", "QUEUE", "KIND").unwrap();
            for d in &devices {
                let kind = match d.kind {
                    DeviceKind::Gate => "gate",
                    DeviceKind::Annealer => "annealer",
                };
                let marker = match &selected {
                    Some(name) if *name == d.name => " <- selected",
                    _ => "",
                };
                writeln!(
                    out,
                    "{:<20} {:>7} {:>6}  {:<9}{marker}",
                    d.name, d.num_qubits, d.queue_length, kind
                )
                .unwrap();
            }
            print_out(&out);
        }
        OutputFormat::Json => {
            print_out(&format!(
                "{}\n",
                serde_json::json!({
                    "devices": devices,
                    "selected": selected,
                })
            ));
        }
    }
    Ok(0)
}
