//! Gate-based algorithm execution loop: build a bound circuit from the
//! current parameters, execute it, estimate the energy, feed the loss to
//! the classical optimizer, repeat, and finally re-sample at the best
//! parameters to pick the winning bitstring.

use serde_json::json;

use crate::circuits::{build_qaoa, build_vqe, AnsatzKind, AnsatzSpec, CircuitIR};
use crate::model::{Model, Solution, SolutionStatus, FEASIBILITY_TOL};
use crate::optimize::{initial_params, minimize, OptimizeError};
use crate::qubo::{index_to_bits, string_to_bits, ConversionResult, IsingModel, Qubo};

use super::{sim, Algorithm, BackendError, SampleSet, SolveOptions};

/// One circuit execution result: exact distribution (shots = 0 on the
/// simulator) or sampled counts.
#[derive(Debug, Clone)]
pub enum ExecutionOutput {
    Probabilities(Vec<f64>),
    Counts(SampleSet),
}

/// Anything that can run a bound circuit: the in-process statevector
/// simulator or a remote device behind the wire protocol.
pub trait GateExecutor {
    fn backend_name(&self) -> &str;
    fn max_qubits(&self) -> usize;
    fn execute(
        &mut self,
        circuit: &CircuitIR,
        shots: u64,
        seed: u64,
    ) -> Result<ExecutionOutput, BackendError>;
}

/// Statevector-backed executor; `shots == 0` returns the exact
/// distribution.
pub struct LocalSimulator;

impl GateExecutor for LocalSimulator {
    fn backend_name(&self) -> &str {
        "simulator"
    }

    fn max_qubits(&self) -> usize {
        sim::MAX_QUBITS
    }

    fn execute(
        &mut self,
        circuit: &CircuitIR,
        shots: u64,
        seed: u64,
    ) -> Result<ExecutionOutput, BackendError> {
        if shots == 0 {
            Ok(ExecutionOutput::Probabilities(sim::probabilities(circuit)?))
        } else {
            Ok(ExecutionOutput::Counts(sim::sample(circuit, shots, seed)?))
        }
    }
}

/// Sample-mean energy of one execution.
fn expected_energy(
    output: &ExecutionOutput,
    energy_table: Option<&[f64]>,
    qubo: &Qubo,
) -> Result<f64, BackendError> {
    match output {
        ExecutionOutput::Probabilities(probs) => {
            let table = energy_table.ok_or_else(|| {
                BackendError::Protocol("probability output without an energy table".into())
            })?;
            Ok(probs.iter().zip(table).map(|(p, e)| p * e).sum())
        }
        ExecutionOutput::Counts(samples) => {
            if samples.shots() == 0 {
                return Err(BackendError::Protocol("empty sample set".into()));
            }
            let mut total = 0.0;
            for (key, &count) in samples.counts() {
                let bits = string_to_bits(key).ok_or_else(|| {
                    BackendError::Protocol(format!("invalid bitstring \"{key}\""))
                })?;
                let energy = qubo
                    .energy(&bits)
                    .map_err(|e| BackendError::Protocol(e.to_string()))?;
                total += count as f64 * energy;
            }
            Ok(total / samples.shots() as f64)
        }
    }
}

struct CircuitFactory<'a> {
    algorithm: Algorithm,
    ising: Option<IsingModel>,
    num_qubits: usize,
    options: &'a SolveOptions,
}

impl CircuitFactory<'_> {
    /// QAOA consumes parameters as all gammas followed by all betas.
    fn build(&self, params: &[f64]) -> Result<CircuitIR, BackendError> {
        match self.algorithm {
            Algorithm::Qaoa => {
                let p = self.options.p;
                let ising = self.ising.as_ref().expect("set for QAOA");
                Ok(build_qaoa(ising, p, &params[..p], &params[p..])?)
            }
            Algorithm::Vqe => Ok(build_vqe(self.num_qubits, self.options.depth, params)?),
            _ => Err(BackendError::AlgorithmMismatch {
                backend: "gate".into(),
                algorithm: self.algorithm.as_str().into(),
            }),
        }
    }
}

/// Run the full variational loop against `executor` and decode the best
/// sampled bitstring. Failures before the loop starts surface as errors;
/// failures mid-loop return a `status = error` solution carrying the
/// partial trace in its metadata.
pub fn ggae_solve(
    model: &Model,
    conversion: &ConversionResult,
    options: &SolveOptions,
    executor: &mut dyn GateExecutor,
) -> Result<Solution, BackendError> {
    let n = conversion.qubo.n;
    let backend_name = executor.backend_name().to_string();

    if !options.algorithm.is_gate_based() {
        return Err(BackendError::AlgorithmMismatch {
            backend: backend_name,
            algorithm: options.algorithm.as_str().to_string(),
        });
    }

    // A fully fixed model encodes to zero qubits; nothing to optimize.
    if n == 0 {
        let assignment = conversion.decode(&[])?;
        let feasible = model.check_feasible(&assignment, FEASIBILITY_TOL)?;
        let mut solution = Solution::new(
            if feasible {
                SolutionStatus::Feasible
            } else {
                SolutionStatus::Infeasible
            },
            backend_name,
        );
        solution.objective_value = Some(model.evaluate(&assignment)?);
        solution.assignment = assignment;
        return Ok(solution.with_meta("iterations", 0));
    }

    if n > executor.max_qubits() {
        return Err(BackendError::CircuitTooWide {
            width: n,
            max: executor.max_qubits(),
        });
    }

    let spec = AnsatzSpec {
        kind: match options.algorithm {
            Algorithm::Qaoa => AnsatzKind::Qaoa,
            _ => AnsatzKind::Vqe,
        },
        layers: match options.algorithm {
            Algorithm::Qaoa => options.p,
            _ => options.depth,
        },
        num_qubits: n,
    };
    let init = match &options.initial_params {
        Some(params) => params.clone(),
        None => initial_params(&spec, options.seed),
    };
    if init.len() != spec.param_count() {
        return Err(BackendError::InvalidOptions(format!(
            "ansatz expects {} parameters, got {}",
            spec.param_count(),
            init.len()
        )));
    }

    let factory = CircuitFactory {
        algorithm: options.algorithm,
        ising: match options.algorithm {
            Algorithm::Qaoa => Some(conversion.qubo.to_ising()),
            _ => None,
        },
        num_qubits: n,
        options,
    };

    // Exact-expectation mode scores the full distribution, so energies
    // per basis index are precomputed once.
    let energy_table: Option<Vec<f64>> = if options.shots == 0 {
        Some(
            (0..(1usize << n))
                .map(|m| {
                    conversion
                        .qubo
                        .energy(&index_to_bits(m, n))
                        .expect("width matches")
                })
                .collect(),
        )
    } else {
        None
    };

    let mut failure: Option<BackendError> = None;
    let mut evaluations: u64 = 0;
    let outcome = {
        let loss = |params: &[f64]| -> f64 {
            if failure.is_some() {
                return f64::NAN;
            }
            evaluations += 1;
            let circuit = match factory.build(params) {
                Ok(c) => c,
                Err(e) => {
                    failure = Some(e);
                    return f64::NAN;
                }
            };
            let output = match executor.execute(
                &circuit,
                options.shots,
                options.seed.wrapping_add(evaluations),
            ) {
                Ok(o) => o,
                Err(e) => {
                    failure = Some(e);
                    return f64::NAN;
                }
            };
            match expected_energy(&output, energy_table.as_deref(), &conversion.qubo) {
                Ok(value) => value,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            }
        };
        minimize(loss, &init, &options.optimizer)
    };

    let trace = match outcome {
        Ok(trace) => trace,
        Err(OptimizeError::NonFiniteLoss { iteration, partial }) => {
            let cause = failure
                .map(|e| e.to_string())
                .unwrap_or_else(|| "loss became non-finite".to_string());
            let mut solution = Solution::new(SolutionStatus::Error, backend_name);
            solution.metadata.insert("error".into(), json!(cause));
            solution.metadata.insert("iterations".into(), json!(partial.iterations));
            solution
                .metadata
                .insert("failed_at_iteration".into(), json!(iteration));
            if partial.best_loss.is_finite() {
                solution
                    .metadata
                    .insert("best_loss".into(), json!(partial.best_loss));
            }
            solution
                .metadata
                .insert("loss_evaluations".into(), json!(partial.records.len()));
            return Ok(solution);
        }
        Err(e) => return Err(e.into()),
    };

    // Re-sample at the best parameters and keep the lowest-energy
    // bitstring actually observed.
    let final_shots = options.shots.max(1024);
    let final_circuit = factory.build(&trace.best_params)?;
    let final_seed = options.seed ^ 0x9e37_79b9_7f4a_7c15;
    let samples = match executor.execute(&final_circuit, final_shots, final_seed)? {
        ExecutionOutput::Counts(samples) => samples,
        ExecutionOutput::Probabilities(_) => {
            return Err(BackendError::Protocol(
                "final execution must return counts".into(),
            ))
        }
    };
    samples.validate()?;

    let mut best: Option<(Vec<u8>, f64)> = None;
    for key in samples.counts().keys() {
        let bits = string_to_bits(key)
            .ok_or_else(|| BackendError::Protocol(format!("invalid bitstring \"{key}\"")))?;
        let energy = conversion
            .qubo
            .energy(&bits)
            .map_err(|e| BackendError::Protocol(e.to_string()))?;
        if best.as_ref().is_none_or(|(_, e)| energy < *e) {
            best = Some((bits, energy));
        }
    }
    let (best_bits, best_energy) =
        best.ok_or_else(|| BackendError::Protocol("empty sample set".into()))?;

    let assignment = conversion.decode(&best_bits)?;
    let feasible = model.check_feasible(&assignment, FEASIBILITY_TOL)?;
    let objective = model.evaluate(&assignment)?;

    let mut solution = Solution::new(
        if feasible {
            SolutionStatus::Feasible
        } else {
            SolutionStatus::Infeasible
        },
        backend_name,
    );
    solution.assignment = assignment;
    solution.objective_value = Some(objective);
    solution.metadata.insert("algorithm".into(), json!(options.algorithm.as_str()));
    solution
        .metadata
        .insert("optimizer".into(), json!(options.optimizer.kind.name()));
    solution.metadata.insert("iterations".into(), json!(trace.iterations));
    solution
        .metadata
        .insert("loss_evaluations".into(), json!(trace.records.len()));
    solution.metadata.insert("best_loss".into(), json!(trace.best_loss));
    solution
        .metadata
        .insert("termination".into(), json!(trace.termination.as_str()));
    solution.metadata.insert("shots".into(), json!(options.shots));
    solution.metadata.insert("final_shots".into(), json!(final_shots));
    solution
        .metadata
        .insert("best_sample_energy".into(), json!(best_energy));
    solution.metadata.insert(
        "best_bitstring".into(),
        json!(crate::qubo::bits_to_string(&best_bits)),
    );
    Ok(solution)
}
