//! The bundled [`Solver`] implementations behind [`super::get_solver`].

use std::time::Instant;

use serde_json::json;

use crate::model::{Model, Solution, SolutionStatus, FEASIBILITY_TOL};
use crate::qubo::{to_qubo, QuboDoc};

use super::annealer::{sample_qubo, AnnealerParams};
use super::exact::{solve_exact, DEFAULT_ENUMERATION_LIMIT};
use super::ggae::{ggae_solve, LocalSimulator};
use super::remote::{JobRequest, PayloadKind, RemoteClient, RemoteExecutor};
use super::{
    select_device, sim, Algorithm, BackendError, Capability, CapabilityKind, DeviceKind,
    SolveOptions, Solver,
};

fn stamp_wall_time(solution: &mut Solution, started: Instant) {
    solution.metadata.insert(
        "wall_time_ms".to_string(),
        json!(started.elapsed().as_millis() as u64),
    );
}

/// Exhaustive enumeration oracle.
pub struct ExactSolver;

impl Solver for ExactSolver {
    fn name(&self) -> &str {
        "exact"
    }

    fn capability(&self) -> Capability {
        Capability {
            kind: CapabilityKind::Classical,
            max_qubits: Some(DEFAULT_ENUMERATION_LIMIT),
        }
    }

    fn solve(&self, model: &Model, _options: &SolveOptions) -> Result<Solution, BackendError> {
        let started = Instant::now();
        let mut solution = solve_exact(model, DEFAULT_ENUMERATION_LIMIT)?;
        stamp_wall_time(&mut solution, started);
        Ok(solution)
    }
}

/// Metropolis-annealing QUBO sampler.
pub struct AnnealerSimSolver;

impl Solver for AnnealerSimSolver {
    fn name(&self) -> &str {
        "annealer-sim"
    }

    fn capability(&self) -> Capability {
        Capability {
            kind: CapabilityKind::Annealer,
            max_qubits: None,
        }
    }

    fn solve(&self, model: &Model, options: &SolveOptions) -> Result<Solution, BackendError> {
        let started = Instant::now();
        let conversion = to_qubo(model, options.penalty)?;
        let params = AnnealerParams {
            num_reads: options.num_reads,
            sweeps: options.sweeps,
            beta_hot: options.beta_hot,
            beta_cold: options.beta_cold,
            seed: options.seed,
        };
        let outcome = sample_qubo(&conversion.qubo, &params);

        let assignment = conversion.decode(&outcome.best_bits)?;
        let feasible = model.check_feasible(&assignment, FEASIBILITY_TOL)?;
        let mut solution = Solution::new(
            if feasible {
                SolutionStatus::Feasible
            } else {
                SolutionStatus::Infeasible
            },
            self.name(),
        );
        solution.objective_value = Some(model.evaluate(&assignment)?);
        solution.assignment = assignment;
        solution.metadata.insert("num_reads".into(), json!(options.num_reads));
        solution.metadata.insert("sweeps".into(), json!(options.sweeps));
        solution
            .metadata
            .insert("best_energy".into(), json!(outcome.best_energy));
        solution
            .metadata
            .insert("penalty".into(), json!(conversion.penalty));
        solution.metadata.insert(
            "samples".into(),
            serde_json::to_value(outcome.samples.counts()).expect("serializable counts"),
        );
        solution
            .metadata
            .insert("shots".into(), json!(outcome.samples.shots()));
        stamp_wall_time(&mut solution, started);
        Ok(solution)
    }
}

/// Local statevector simulator running the gate-based loop.
pub struct SimulatorSolver;

impl Solver for SimulatorSolver {
    fn name(&self) -> &str {
        "simulator"
    }

    fn capability(&self) -> Capability {
        Capability {
            kind: CapabilityKind::Gate,
            max_qubits: Some(sim::MAX_QUBITS),
        }
    }

    fn solve(&self, model: &Model, options: &SolveOptions) -> Result<Solution, BackendError> {
        let started = Instant::now();
        let conversion = to_qubo(model, options.penalty)?;
        let mut executor = LocalSimulator;
        let mut solution = ggae_solve(model, &conversion, options, &mut executor)?;
        solution
            .metadata
            .insert("penalty".into(), json!(conversion.penalty));
        stamp_wall_time(&mut solution, started);
        Ok(solution)
    }
}

/// Remote provider speaking the wire protocol; gate algorithms run the
/// GGAE loop against a selected device, annealing submits the QUBO
/// directly.
pub struct RemoteSolver {
    name: String,
    client: RemoteClient,
}

impl RemoteSolver {
    pub fn new(name: &str, client: RemoteClient) -> Self {
        RemoteSolver {
            name: name.to_string(),
            client,
        }
    }
}

impl Solver for RemoteSolver {
    fn name(&self) -> &str {
        &self.name
    }

    fn capability(&self) -> Capability {
        Capability {
            kind: CapabilityKind::Gate,
            max_qubits: None,
        }
    }

    fn solve(&self, model: &Model, options: &SolveOptions) -> Result<Solution, BackendError> {
        let started = Instant::now();
        let conversion = to_qubo(model, options.penalty)?;

        let wanted_kind = match options.algorithm {
            Algorithm::Annealing => DeviceKind::Annealer,
            Algorithm::Qaoa | Algorithm::Vqe => DeviceKind::Gate,
            Algorithm::Exact => {
                return Err(BackendError::AlgorithmMismatch {
                    backend: self.name.clone(),
                    algorithm: options.algorithm.as_str().to_string(),
                })
            }
        };
        let devices: Vec<_> = self
            .client
            .devices()?
            .into_iter()
            .filter(|d| d.kind == wanted_kind)
            .collect();
        let device = select_device(&devices, conversion.qubo.n)?.clone();

        let mut solution = match options.algorithm {
            Algorithm::Annealing => {
                let payload = serde_json::to_string(&QuboDoc::from_conversion(&conversion))
                    .map_err(|e| BackendError::Protocol(e.to_string()))?;
                let samples = self.client.run_job(&JobRequest {
                    kind: PayloadKind::Annealer,
                    payload,
                    shots: options.num_reads as u64,
                    device: device.name.clone(),
                })?;

                let best = samples
                    .argmin_by(|key| {
                        crate::qubo::string_to_bits(key)
                            .and_then(|bits| conversion.qubo.energy(&bits).ok())
                            .unwrap_or(f64::INFINITY)
                    })
                    .ok_or_else(|| BackendError::Protocol("empty sample set".into()))?;
                let bits = crate::qubo::string_to_bits(&best.0)
                    .ok_or_else(|| BackendError::Protocol("invalid bitstring".into()))?;
                let assignment = conversion.decode(&bits)?;
                let feasible = model.check_feasible(&assignment, FEASIBILITY_TOL)?;
                let mut solution = Solution::new(
                    if feasible {
                        SolutionStatus::Feasible
                    } else {
                        SolutionStatus::Infeasible
                    },
                    self.name(),
                );
                solution.objective_value = Some(model.evaluate(&assignment)?);
                solution.assignment = assignment;
                solution
                    .metadata
                    .insert("best_energy".into(), json!(best.1));
                solution
                    .metadata
                    .insert("num_reads".into(), json!(options.num_reads));
                solution
            }
            _ => {
                if options.shots == 0 {
                    return Err(BackendError::ShotsRequired);
                }
                let mut executor =
                    RemoteExecutor::new(&self.name, self.client.clone(), device.clone());
                ggae_solve(model, &conversion, options, &mut executor)?
            }
        };
        solution.backend_name = self.name.clone();
        solution
            .metadata
            .insert("device".into(), json!(device.name));
        solution
            .metadata
            .insert("penalty".into(), json!(conversion.penalty));
        stamp_wall_time(&mut solution, started);
        Ok(solution)
    }
}
