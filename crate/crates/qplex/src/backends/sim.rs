//! Statevector circuit simulator.
//!
//! Amplitude index convention: qubit `i` is bit `i` of the basis index
//! (qubit 0 least significant), matching the wire bitstring convention
//! where character `i` of a sample is variable `i`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuits::{CircuitIR, Gate};
use crate::qubo::bits_to_string;

use super::{BackendError, SampleSet};

/// Widest circuit the simulator accepts; 2^24 amplitudes keeps memory at
/// desk scale (~256 MB of complex doubles).
pub const MAX_QUBITS: usize = 24;

/// Quantum state over `n` qubits as a dense amplitude vector.
#[derive(Debug, Clone)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The all-zeros computational basis state.
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn apply_single(&mut self, qubit: usize, u: [[Complex64; 2]; 2]) {
        let stride = 1usize << qubit;
        let mut base = 0usize;
        while base < self.amps.len() {
            for offset in base..base + stride {
                let i = offset;
                let j = offset + stride;
                let (a0, a1) = (self.amps[i], self.amps[j]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[j] = u[1][0] * a0 + u[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for m in 0..self.amps.len() {
            if m & cbit != 0 && m & tbit == 0 {
                self.amps.swap(m, m | tbit);
            }
        }
    }

    fn apply_rzz(&mut self, a: usize, b: usize, angle: f64) {
        let abit = 1usize << a;
        let bbit = 1usize << b;
        let same = Complex64::from_polar(1.0, -angle / 2.0);
        let diff = Complex64::from_polar(1.0, angle / 2.0);
        for m in 0..self.amps.len() {
            let equal = ((m & abit) != 0) == ((m & bbit) != 0);
            self.amps[m] *= if equal { same } else { diff };
        }
    }

    pub fn apply(&mut self, gate: &Gate) {
        let zero = Complex64::new(0.0, 0.0);
        match *gate {
            Gate::H { qubit } => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(qubit, [[s, s], [s, -s]]);
            }
            Gate::Rx { qubit, angle } => {
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(angle / 2.0).sin());
                self.apply_single(qubit, [[c, s], [s, c]]);
            }
            Gate::Ry { qubit, angle } => {
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = Complex64::new((angle / 2.0).sin(), 0.0);
                self.apply_single(qubit, [[c, -s], [s, c]]);
            }
            Gate::Rz { qubit, angle } => {
                let phase0 = Complex64::from_polar(1.0, -angle / 2.0);
                let phase1 = Complex64::from_polar(1.0, angle / 2.0);
                self.apply_single(qubit, [[phase0, zero], [zero, phase1]]);
            }
            Gate::Cx { control, target } => self.apply_cx(control, target),
            Gate::Rzz { a, b, angle } => self.apply_rzz(a, b, angle),
        }
    }
}

/// Run the gate list against |0...0> and return the final state.
pub fn simulate(circuit: &CircuitIR) -> Result<Statevector, BackendError> {
    if circuit.num_qubits > MAX_QUBITS {
        return Err(BackendError::CircuitTooWide {
            width: circuit.num_qubits,
            max: MAX_QUBITS,
        });
    }
    circuit.validate()?;
    let mut state = Statevector::zero(circuit.num_qubits);
    for gate in &circuit.gates {
        state.apply(gate);
    }
    Ok(state)
}

/// Exact measurement distribution of the circuit (shots = 0 mode).
pub fn probabilities(circuit: &CircuitIR) -> Result<Vec<f64>, BackendError> {
    Ok(simulate(circuit)?.probabilities())
}

/// Sample `shots` measurements from the circuit's output distribution.
pub fn sample(circuit: &CircuitIR, shots: u64, seed: u64) -> Result<SampleSet, BackendError> {
    let state = simulate(circuit)?;
    let probs = state.probabilities();

    let mut cumulative = Vec::with_capacity(probs.len());
    let mut total = 0.0;
    for &p in &probs {
        total += p;
        cumulative.push(total);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = SampleSet::new();
    for _ in 0..shots {
        let r = rng.gen::<f64>() * total;
        let index = cumulative
            .partition_point(|&c| c <= r)
            .min(probs.len() - 1);
        let bits: Vec<u8> = (0..state.num_qubits())
            .map(|i| ((index >> i) & 1) as u8)
            .collect();
        samples.record(&bits_to_string(&bits), 1);
    }
    samples
        .validate()
        .expect("sampled counts always sum to shots");
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_circuit() -> CircuitIR {
        let mut c = CircuitIR::new(2);
        c.push(Gate::H { qubit: 0 }).unwrap();
        c.push(Gate::Cx { control: 0, target: 1 }).unwrap();
        c.measure_all = true;
        c
    }

    #[test]
    fn hadamard_gives_uniform_pair() {
        let mut c = CircuitIR::new(1);
        c.push(Gate::H { qubit: 0 }).unwrap();
        let probs = probabilities(&c).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!((probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_circuit_stays_in_ground_state() {
        let c = CircuitIR::new(3);
        let samples = sample(&c, 17, 0).unwrap();
        assert_eq!(samples.counts().len(), 1);
        assert_eq!(samples.counts()["000"], 17);
    }

    #[test]
    fn bell_state_probabilities() {
        let probs = probabilities(&bell_circuit()).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!(probs[1].abs() < 1e-12);
        assert!(probs[2].abs() < 1e-12);
        assert!((probs[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bell_sampling_only_hits_00_and_11() {
        let samples = sample(&bell_circuit(), 1000, 7).unwrap();
        assert_eq!(samples.shots(), 1000);
        for key in samples.counts().keys() {
            assert!(key == "00" || key == "11", "unexpected outcome {key}");
        }
    }

    #[test]
    fn rx_pi_flips_the_qubit() {
        let mut c = CircuitIR::new(1);
        c.push(Gate::Rx { qubit: 0, angle: std::f64::consts::PI }).unwrap();
        let probs = probabilities(&c).unwrap();
        assert!(probs[0].abs() < 1e-12);
        assert!((probs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ry_rotates_real_amplitudes() {
        let mut c = CircuitIR::new(1);
        c.push(Gate::Ry { qubit: 0, angle: std::f64::consts::FRAC_PI_2 }).unwrap();
        let probs = probabilities(&c).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        assert!((probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rzz_matches_cx_rz_cx_decomposition() {
        // Prepare a generic product state, then compare the fused RZZ
        // against its emitted decomposition amplitude by amplitude.
        let theta = 0.83;
        let mut fused = CircuitIR::new(2);
        fused.push(Gate::Ry { qubit: 0, angle: 0.4 }).unwrap();
        fused.push(Gate::Ry { qubit: 1, angle: 1.1 }).unwrap();
        fused.push(Gate::Rzz { a: 0, b: 1, angle: theta }).unwrap();

        let mut decomposed = CircuitIR::new(2);
        decomposed.push(Gate::Ry { qubit: 0, angle: 0.4 }).unwrap();
        decomposed.push(Gate::Ry { qubit: 1, angle: 1.1 }).unwrap();
        decomposed.push(Gate::Cx { control: 0, target: 1 }).unwrap();
        decomposed.push(Gate::Rz { qubit: 1, angle: theta }).unwrap();
        decomposed.push(Gate::Cx { control: 0, target: 1 }).unwrap();

        let a = simulate(&fused).unwrap();
        let b = simulate(&decomposed).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn qubit_index_is_bit_position() {
        // Flip qubit 1 of three: expect basis index 0b010 -> string "010".
        let mut c = CircuitIR::new(3);
        c.push(Gate::Rx { qubit: 1, angle: std::f64::consts::PI }).unwrap();
        let samples = sample(&c, 5, 0).unwrap();
        assert_eq!(samples.counts()["010"], 5);
    }

    #[test]
    fn width_limit_enforced() {
        let c = CircuitIR::new(MAX_QUBITS + 1);
        assert!(matches!(
            simulate(&c).unwrap_err(),
            BackendError::CircuitTooWide { .. }
        ));
    }

    #[test]
    fn non_finite_angles_rejected() {
        // Bypass the builder validation to exercise the simulator guard.
        let c = CircuitIR {
            num_qubits: 1,
            gates: vec![Gate::Rx { qubit: 0, angle: f64::NAN }],
            measure_all: false,
        };
        assert!(matches!(
            simulate(&c).unwrap_err(),
            BackendError::Circuit(_)
        ));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample(&bell_circuit(), 500, 11).unwrap();
        let b = sample(&bell_circuit(), 500, 11).unwrap();
        assert_eq!(a.counts(), b.counts());
    }
}
