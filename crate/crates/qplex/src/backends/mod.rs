//! Solver abstraction and the bundled backends: an exact enumeration
//! oracle, a simulated-annealing QUBO sampler, a statevector simulator
//! driving the gate-based loop, and a generic remote client speaking a
//! small JSON-over-HTTP protocol (exercised by the bundled mock
//! provider).
//!
//! [`get_solver`] is the factory: it maps a backend name to a configured
//! solver, reading remote credentials from `QPLEX_<PROVIDER>_TOKEN`
//! environment variables.

pub mod annealer;
pub mod exact;
pub mod ggae;
pub mod mock;
pub mod remote;
pub mod sim;

mod solvers;

pub use ggae::{ggae_solve, ExecutionOutput, GateExecutor, LocalSimulator};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::CircuitError;
use crate::model::{Model, ModelError, Solution};
use crate::optimize::{OptimizeError, OptimizerConfig};
use crate::qubo::ConversionError;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("unknown backend \"{name}\" (registered: {registered})")]
    UnknownBackend { name: String, registered: String },
    #[error("missing credential {var}")]
    MissingToken { var: String },
    #[error("algorithm/backend mismatch: backend \"{backend}\" does not support algorithm \"{algorithm}\"")]
    AlgorithmMismatch { backend: String, algorithm: String },
    #[error("backend \"{0}\" requires a provider URL")]
    ProviderUrlRequired(String),
    #[error("invalid solve options: {0}")]
    InvalidOptions(String),
    #[error("model needs {bits} encoded bits, above the enumeration limit of {limit}")]
    TooManyBits { bits: usize, limit: usize },
    #[error("circuit has {width} qubits, above the backend limit of {max}")]
    CircuitTooWide { width: usize, max: usize },
    #[error("no device with >={required} qubits{largest}", largest = match largest {
        Some((name, qubits)) => format!(" (largest available: {name} with {qubits})"),
        None => String::new(),
    })]
    NoDevice {
        required: usize,
        largest: Option<(String, usize)>,
    },
    #[error("no devices available from provider")]
    NoDevices,
    #[error("remote execution requires shots >= 1")]
    ShotsRequired,
    #[error("HTTP failure: {0}")]
    Http(String),
    #[error("authentication rejected: {0}")]
    Auth(String),
    #[error("remote job failed: {0}")]
    JobFailed(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Conversion(#[from] ConversionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// Algorithm selector for [`SolveOptions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Exact,
    Annealing,
    Qaoa,
    Vqe,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Annealing => "annealing",
            Algorithm::Qaoa => "qaoa",
            Algorithm::Vqe => "vqe",
        }
    }

    pub fn is_gate_based(&self) -> bool {
        matches!(self, Algorithm::Qaoa | Algorithm::Vqe)
    }
}

/// Everything a solver needs to know about how to run one solve.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub backend: String,
    pub algorithm: Algorithm,
    /// QAOA layer count.
    pub p: usize,
    /// VQE ansatz depth.
    pub depth: usize,
    /// Measurement shots; 0 selects exact-expectation mode on the
    /// simulator.
    pub shots: u64,
    pub optimizer: OptimizerConfig,
    /// Constraint penalty weight; derived from the objective when unset.
    pub penalty: Option<f64>,
    pub seed: u64,
    /// Annealer restarts.
    pub num_reads: usize,
    /// Metropolis sweeps per read.
    pub sweeps: usize,
    pub beta_hot: f64,
    pub beta_cold: f64,
    pub provider_url: Option<String>,
    /// Override for the variational starting point (testing hook); the
    /// seeded uniform draw is used when unset.
    pub initial_params: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: "exact".to_string(),
            algorithm: Algorithm::Exact,
            p: 1,
            depth: 1,
            shots: 1024,
            optimizer: OptimizerConfig::default(),
            penalty: None,
            seed: 0,
            num_reads: 100,
            sweeps: 1000,
            beta_hot: 0.1,
            beta_cold: 10.0,
            provider_url: None,
            initial_params: None,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<(), BackendError> {
        if self.p < 1 {
            return Err(BackendError::InvalidOptions("p must be >= 1".into()));
        }
        if self.depth < 1 {
            return Err(BackendError::InvalidOptions("depth must be >= 1".into()));
        }
        if self.num_reads < 1 {
            return Err(BackendError::InvalidOptions("num_reads must be >= 1".into()));
        }
        if self.sweeps < 1 {
            return Err(BackendError::InvalidOptions("sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Measurement outcomes of one execution: map from bitstring to count.
/// Bit `i` of each string is variable/qubit `i`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl SampleSet {
    pub fn new() -> Self {
        SampleSet::default()
    }

    /// Rebuild a sample set received over the wire, checking that the
    /// declared shot total matches the counts.
    pub fn from_wire(counts: BTreeMap<String, u64>, shots: u64) -> Result<Self, BackendError> {
        let set = SampleSet { counts, shots };
        set.validate()?;
        Ok(set)
    }

    pub fn record(&mut self, bitstring: &str, count: u64) {
        *self.counts.entry(bitstring.to_string()).or_insert(0) += count;
        self.shots += count;
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Check the structural invariants: counts sum to the shot total and
    /// all bitstrings share one length.
    pub fn validate(&self) -> Result<(), BackendError> {
        let total: u64 = self.counts.values().sum();
        if total != self.shots {
            return Err(BackendError::Protocol(format!(
                "sample counts sum to {total} but shots is {}",
                self.shots
            )));
        }
        let mut lengths = self.counts.keys().map(|k| k.len());
        if let Some(first) = lengths.next() {
            if lengths.any(|l| l != first) {
                return Err(BackendError::Protocol(
                    "bitstrings have inconsistent lengths".into(),
                ));
            }
        }
        Ok(())
    }

    /// Lowest-scoring bitstring under `energy`, ties resolved toward the
    /// lexicographically smallest string.
    pub fn argmin_by(&self, mut energy: impl FnMut(&str) -> f64) -> Option<(String, f64)> {
        let mut best: Option<(String, f64)> = None;
        for key in self.counts.keys() {
            let e = energy(key);
            if best.as_ref().is_none_or(|(_, be)| e < *be) {
                best = Some((key.clone(), e));
            }
        }
        best
    }
}

/// Device kinds exposed by remote providers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceKind {
    Gate,
    Annealer,
}

/// One executable device advertised by a provider.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceInfo {
    pub name: String,
    pub num_qubits: usize,
    pub queue_length: usize,
    pub kind: DeviceKind,
}

/// Pick a device with enough qubits and the shortest queue; ties break
/// toward the lexicographically smallest name.
pub fn select_device(
    devices: &[DeviceInfo],
    required_qubits: usize,
) -> Result<&DeviceInfo, BackendError> {
    if devices.is_empty() {
        return Err(BackendError::NoDevices);
    }
    devices
        .iter()
        .filter(|d| d.num_qubits >= required_qubits)
        .min_by(|a, b| {
            a.queue_length
                .cmp(&b.queue_length)
                .then_with(|| a.name.cmp(&b.name))
        })
        .ok_or_else(|| {
            let largest = devices
                .iter()
                .max_by(|a, b| {
                    a.num_qubits
                        .cmp(&b.num_qubits)
                        .then_with(|| b.name.cmp(&a.name))
                })
                .map(|d| (d.name.clone(), d.num_qubits));
            BackendError::NoDevice {
                required: required_qubits,
                largest,
            }
        })
}

/// What a solver can execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapabilityKind {
    Classical,
    Gate,
    Annealer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capability {
    pub kind: CapabilityKind,
    pub max_qubits: Option<usize>,
}

/// A configured backend able to solve models. Implementations reject
/// inputs beyond their capability instead of truncating them.
pub trait Solver {
    fn name(&self) -> &str;
    fn capability(&self) -> Capability;
    fn solve(&self, model: &Model, options: &SolveOptions) -> Result<Solution, BackendError>;
}

/// Backend names [`get_solver`] recognizes, in lexicographic order.
pub const REGISTERED_BACKENDS: [&str; 4] = ["annealer-sim", "exact", "mock-remote", "simulator"];

/// Algorithm a backend runs when the caller does not pick one.
pub fn default_algorithm(backend: &str) -> Option<Algorithm> {
    match backend {
        "exact" => Some(Algorithm::Exact),
        "annealer-sim" => Some(Algorithm::Annealing),
        "simulator" | "mock-remote" => Some(Algorithm::Qaoa),
        _ => None,
    }
}

/// Environment variable holding the API token for a provider.
pub fn token_variable(provider: &str) -> String {
    format!("QPLEX_{}_TOKEN", provider.to_uppercase())
}

fn unknown_backend(name: &str) -> BackendError {
    BackendError::UnknownBackend {
        name: name.to_string(),
        registered: REGISTERED_BACKENDS.join(", "),
    }
}

fn algorithm_mismatch(backend: &str, algorithm: Algorithm) -> BackendError {
    BackendError::AlgorithmMismatch {
        backend: backend.to_string(),
        algorithm: algorithm.as_str().to_string(),
    }
}

/// Solver factory: resolve a backend name into a configured solver.
///
/// Remote backends read their token from the environment at construction
/// time and fail fast when it is absent; no backend silently falls back
/// to another.
pub fn get_solver(name: &str, options: &SolveOptions) -> Result<Box<dyn Solver>, BackendError> {
    options.validate()?;
    match name {
        "exact" => {
            if options.algorithm != Algorithm::Exact {
                return Err(algorithm_mismatch(name, options.algorithm));
            }
            Ok(Box::new(solvers::ExactSolver))
        }
        "annealer-sim" => {
            if options.algorithm != Algorithm::Annealing {
                return Err(algorithm_mismatch(name, options.algorithm));
            }
            Ok(Box::new(solvers::AnnealerSimSolver))
        }
        "simulator" => {
            if !options.algorithm.is_gate_based() {
                return Err(algorithm_mismatch(name, options.algorithm));
            }
            Ok(Box::new(solvers::SimulatorSolver))
        }
        "mock-remote" => {
            if options.algorithm == Algorithm::Exact {
                return Err(algorithm_mismatch(name, options.algorithm));
            }
            let url = options
                .provider_url
                .clone()
                .ok_or_else(|| BackendError::ProviderUrlRequired(name.to_string()))?;
            let client = remote::RemoteClient::from_env(name, &url)?;
            Ok(Box::new(solvers::RemoteSolver::new(name, client)))
        }
        other => Err(unknown_backend(other)),
    }
}
