//! Bound (numeric-angle) quantum circuits: the gate-list intermediate
//! representation, QAOA and hardware-efficient VQE builders, and the
//! OpenQASM 3 emitter/parser.
//!
//! Angle conventions are pinned for cross-backend agreement:
//! `rz(t) = exp(-i t Z / 2)`, the QAOA cost layer applies
//! `rzz(2 * gamma * J_ij)` and `rz(2 * gamma * h_i)`, and the mixer
//! applies `rx(2 * beta)` on every qubit.

mod qasm;

pub use qasm::{emit_qasm3, parse_qasm3, QasmError};

use thiserror::Error;

use crate::qubo::IsingModel;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("QAOA needs at least one layer, got {0}")]
    NoLayers(usize),
    #[error("gate references qubit {qubit} but the circuit has {width} qubits")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("gate angle is not finite")]
    NonFiniteAngle,
    #[error("two-qubit gate uses the same qubit {0} twice")]
    DuplicateQubit(usize),
}

/// One gate in execution order. Angles are radians and always bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H { qubit: usize },
    Rx { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    Cx { control: usize, target: usize },
    /// Two-qubit phase `exp(-i angle/2 * Z x Z)`; emitted to QASM as the
    /// standard CX-RZ-CX decomposition.
    Rzz { a: usize, b: usize, angle: f64 },
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H { qubit }
            | Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. } => (qubit, None),
            Gate::Cx { control, target } => (control, Some(target)),
            Gate::Rzz { a, b, .. } => (a, Some(b)),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. }
            | Gate::Ry { angle, .. }
            | Gate::Rz { angle, .. }
            | Gate::Rzz { angle, .. } => Some(angle),
            _ => None,
        }
    }

    fn validate(&self, width: usize) -> Result<(), CircuitError> {
        let (a, b) = self.qubits();
        for q in [Some(a), b].into_iter().flatten() {
            if q >= width {
                return Err(CircuitError::QubitOutOfRange { qubit: q, width });
            }
        }
        if let Some(b) = b {
            if a == b {
                return Err(CircuitError::DuplicateQubit(a));
            }
        }
        if let Some(angle) = self.angle() {
            if !angle.is_finite() {
                return Err(CircuitError::NonFiniteAngle);
            }
        }
        Ok(())
    }
}

/// Gate-list circuit representation; the order of `gates` is execution
/// order and `measure_all` appends a full computational-basis readout.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIR {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub measure_all: bool,
}

impl CircuitIR {
    pub fn new(num_qubits: usize) -> Self {
        CircuitIR {
            num_qubits,
            gates: Vec::new(),
            measure_all: false,
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for gate in &self.gates {
            gate.validate(self.num_qubits)?;
        }
        Ok(())
    }
}

/// Ansatz family selector used for parameter counting and initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnsatzKind {
    Qaoa,
    Vqe,
}

/// Shape of a variational circuit: family, layer count and width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    /// `p` for QAOA, depth `d` for VQE.
    pub layers: usize,
    pub num_qubits: usize,
}

impl AnsatzSpec {
    /// 2p parameters for QAOA, n*(d+1) for the VQE ansatz.
    pub fn param_count(&self) -> usize {
        match self.kind {
            AnsatzKind::Qaoa => 2 * self.layers,
            AnsatzKind::Vqe => self.num_qubits * (self.layers + 1),
        }
    }
}

/// Build a bound QAOA circuit: Hadamards, then per layer the cost
/// unitary `rzz(2 gamma J)` / `rz(2 gamma h)` followed by the
/// transverse-field mixer `rx(2 beta)`.
pub fn build_qaoa(
    ising: &IsingModel,
    p: usize,
    gammas: &[f64],
    betas: &[f64],
) -> Result<CircuitIR, CircuitError> {
    if p < 1 {
        return Err(CircuitError::NoLayers(p));
    }
    if gammas.len() != p || betas.len() != p {
        return Err(CircuitError::ParamCount {
            expected: 2 * p,
            got: gammas.len() + betas.len(),
        });
    }
    let mut circuit = CircuitIR::new(ising.n);
    for q in 0..ising.n {
        circuit.push(Gate::H { qubit: q })?;
    }
    for layer in 0..p {
        let gamma = gammas[layer];
        let beta = betas[layer];
        for (&(i, j), &coupling) in &ising.j {
            circuit.push(Gate::Rzz {
                a: i,
                b: j,
                angle: 2.0 * gamma * coupling,
            })?;
        }
        for (i, &field) in ising.h.iter().enumerate() {
            if field != 0.0 {
                circuit.push(Gate::Rz {
                    qubit: i,
                    angle: 2.0 * gamma * field,
                })?;
            }
        }
        for q in 0..ising.n {
            circuit.push(Gate::Rx {
                qubit: q,
                angle: 2.0 * beta,
            })?;
        }
    }
    circuit.measure_all = true;
    Ok(circuit)
}

/// Build the hardware-efficient VQE ansatz: `depth` blocks of an RY
/// rotation layer plus a linear CX entangling chain, closed by one final
/// RY layer. Parameters are consumed layer by layer, qubit 0 first.
pub fn build_vqe(
    num_qubits: usize,
    depth: usize,
    thetas: &[f64],
) -> Result<CircuitIR, CircuitError> {
    let expected = num_qubits * (depth + 1);
    if thetas.len() != expected {
        return Err(CircuitError::ParamCount {
            expected,
            got: thetas.len(),
        });
    }
    let mut circuit = CircuitIR::new(num_qubits);
    let mut next = thetas.iter().copied();
    for layer in 0..=depth {
        for q in 0..num_qubits {
            circuit.push(Gate::Ry {
                qubit: q,
                angle: next.next().expect("length checked above"),
            })?;
        }
        if layer < depth {
            for q in 0..num_qubits.saturating_sub(1) {
                circuit.push(Gate::Cx {
                    control: q,
                    target: q + 1,
                })?;
            }
        }
    }
    circuit.measure_all = true;
    Ok(circuit)
}
