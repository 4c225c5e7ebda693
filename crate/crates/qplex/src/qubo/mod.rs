//! QUBO and Ising containers, energy evaluation, and the conversion
//! pipeline from constrained models to unconstrained binary form.
//!
//! Everything here is minimization-form: maximization models are negated
//! during conversion and the sign is carried in [`ConversionResult`] so
//! solutions can be reported in the original sense.

mod convert;

pub use convert::{
    to_qubo, variable_encodings, BitEncoding, ConversionError, ConversionResult,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from energy evaluation over explicit bit/spin vectors.
#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("bit vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("spin {index} is {value}, expected +1 or -1")]
    InvalidSpin { index: usize, value: i8 },
}

/// Quadratic unconstrained binary optimization problem, always in
/// minimization sense. Quadratic keys satisfy `i < j` and carry no zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    pub n: usize,
    pub linear: Vec<f64>,
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl Qubo {
    pub fn new(n: usize) -> Self {
        Qubo {
            n,
            linear: vec![0.0; n],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        self.linear[i] += c;
    }

    /// Accumulate a quadratic coefficient; `i == j` folds into the linear
    /// part (bits square to themselves) and zero totals are dropped.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        if i == j {
            self.linear[i] += c;
            return;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        let entry = self.quadratic.entry(key).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.quadratic.remove(&key);
        }
    }

    /// `offset + sum_i linear_i b_i + sum_{i<j} q_ij b_i b_j`.
    pub fn energy(&self, bits: &[u8]) -> Result<f64, EnergyError> {
        if bits.len() != self.n {
            return Err(EnergyError::LengthMismatch {
                expected: self.n,
                got: bits.len(),
            });
        }
        let mut e = self.offset;
        for (i, &c) in self.linear.iter().enumerate() {
            if bits[i] != 0 {
                e += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if bits[i] != 0 && bits[j] != 0 {
                e += c;
            }
        }
        Ok(e)
    }

    /// Convert to the equivalent Ising model under `x = (1 - z) / 2`,
    /// i.e. bit 0 maps to spin +1 and bit 1 to spin -1.
    pub fn to_ising(&self) -> IsingModel {
        let mut h = vec![0.0; self.n];
        let mut j_map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut offset = self.offset;

        for (i, &c) in self.linear.iter().enumerate() {
            h[i] -= c / 2.0;
            offset += c / 2.0;
        }
        for (&(i, j), &c) in &self.quadratic {
            let quarter = c / 4.0;
            if quarter != 0.0 {
                j_map.insert((i, j), quarter);
            }
            h[i] -= quarter;
            h[j] -= quarter;
            offset += quarter;
        }

        IsingModel {
            n: self.n,
            h,
            j: j_map,
            offset,
        }
    }
}

/// Spin-glass form: local fields `h`, couplings `J` with keys `i < j`,
/// and a constant offset. Spins take values +1 or -1.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub n: usize,
    pub h: Vec<f64>,
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    /// `offset + sum_i h_i z_i + sum_{i<j} J_ij z_i z_j`.
    pub fn energy(&self, spins: &[i8]) -> Result<f64, EnergyError> {
        if spins.len() != self.n {
            return Err(EnergyError::LengthMismatch {
                expected: self.n,
                got: spins.len(),
            });
        }
        for (index, &s) in spins.iter().enumerate() {
            if s != 1 && s != -1 {
                return Err(EnergyError::InvalidSpin { index, value: s });
            }
        }
        let mut e = self.offset;
        for (i, &f) in self.h.iter().enumerate() {
            e += f * f64::from(spins[i]);
        }
        for (&(i, j), &c) in &self.j {
            e += c * f64::from(spins[i]) * f64::from(spins[j]);
        }
        Ok(e)
    }
}

/// Map a bit to its spin under the crate-wide convention `x = (1 - z)/2`.
pub fn bit_to_spin(bit: u8) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

/// Bit vector for basis index `m` where bit `i` of the vector equals bit
/// `i` of `m` (variable 0 is the least significant bit).
pub fn index_to_bits(m: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((m >> i) & 1) as u8).collect()
}

/// Render a bit vector as the wire bitstring: character `i` is bit `i`.
pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// Parse a wire bitstring back into a bit vector.
pub fn string_to_bits(s: &str) -> Option<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}

/// Serialized QUBO document written by the CLI `convert` command and
/// accepted as the annealer wire payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuboDoc {
    pub n: usize,
    pub linear: Vec<f64>,
    pub quadratic: Vec<(usize, usize, f64)>,
    pub offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub encodings: Vec<EncodingDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncodingDoc {
    pub name: String,
    pub base: f64,
    pub terms: Vec<(usize, f64)>,
}

impl QuboDoc {
    pub fn from_conversion(result: &ConversionResult) -> Self {
        QuboDoc {
            n: result.qubo.n,
            linear: result.qubo.linear.clone(),
            quadratic: result
                .qubo
                .quadratic
                .iter()
                .map(|(&(i, j), &c)| (i, j, c))
                .collect(),
            offset: result.qubo.offset,
            penalty: Some(result.penalty),
            encodings: result
                .encodings
                .iter()
                .map(|e| EncodingDoc {
                    name: e.name.clone(),
                    base: e.base,
                    terms: e.terms.clone(),
                })
                .collect(),
        }
    }

    pub fn to_qubo(&self) -> Qubo {
        let mut q = Qubo::new(self.n);
        q.offset = self.offset;
        for (i, &c) in self.linear.iter().enumerate() {
            q.linear[i] = c;
        }
        for &(i, j, c) in &self.quadratic {
            q.add_quadratic(i, j, c);
        }
        q
    }
}
