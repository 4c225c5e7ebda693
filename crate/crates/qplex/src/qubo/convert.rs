//! Model-to-QUBO conversion: binary encoding of integer variables, slack
//! variables for inequalities, and quadratic penalties for equalities.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{ConstraintSense, Model, Sense, VarKind};

use super::Qubo;

#[derive(Debug, Error)]
pub enum ConversionError {
    #[error("continuous variable \"{0}\" cannot be encoded; only binary and integer variables are supported")]
    ContinuousVariable(String),
    #[error("variable \"{0}\" has a non-finite bound")]
    NonFiniteBound(String),
    #[error("constraint \"{name}\" is unsatisfiable over the variable bounds (rhs {rhs} < minimum lhs {min_lhs})")]
    Unsatisfiable {
        name: String,
        rhs: f64,
        min_lhs: f64,
    },
    #[error("bit vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Binary encoding of one model variable (or slack): the decoded value is
/// `base + sum over terms of coeff * bit`.
#[derive(Debug, Clone, PartialEq)]
pub struct BitEncoding {
    pub name: String,
    pub base: f64,
    pub terms: Vec<(usize, f64)>,
}

impl BitEncoding {
    pub fn decode(&self, bits: &[u8]) -> f64 {
        let mut value = self.base;
        for &(bit, coeff) in &self.terms {
            if bits[bit] != 0 {
                value += coeff;
            }
        }
        value
    }
}

/// Output of [`to_qubo`]: the QUBO itself plus everything needed to map
/// sampled bitstrings back onto the original model.
#[derive(Debug, Clone)]
pub struct ConversionResult {
    pub qubo: Qubo,
    /// Original variables first (model order), then one slack per
    /// inequality constraint (constraint order).
    pub encodings: Vec<BitEncoding>,
    /// Penalty weight applied to every squared constraint residual.
    pub penalty: f64,
    /// -1 when the original objective was maximization, +1 otherwise.
    pub objective_sign: f64,
    /// Additive correction such that, on penalty-free bit patterns,
    /// `qubo energy = objective_sign * original objective + correction`.
    pub objective_offset_correction: f64,
    num_original: usize,
}

impl ConversionResult {
    /// Number of encodings that correspond to original model variables.
    pub fn num_original_variables(&self) -> usize {
        self.num_original
    }

    /// Decode a full-width bit pattern into an assignment of the original
    /// variables; slack bits are dropped.
    pub fn decode(&self, bits: &[u8]) -> Result<BTreeMap<String, f64>, ConversionError> {
        if bits.len() != self.qubo.n {
            return Err(ConversionError::LengthMismatch {
                expected: self.qubo.n,
                got: bits.len(),
            });
        }
        Ok(self.encodings[..self.num_original]
            .iter()
            .map(|enc| (enc.name.clone(), enc.decode(bits)))
            .collect())
    }

    /// Recover the original-sense objective value from a QUBO energy of a
    /// penalty-free pattern.
    pub fn original_objective(&self, qubo_energy: f64) -> f64 {
        self.objective_sign * (qubo_energy - self.objective_offset_correction)
    }
}

/// Number of bits needed to cover an inclusive integer-like range of the
/// given width: smallest k with `2^k - 1 >= width`.
fn bits_for_range(width: f64) -> usize {
    let mut k = 0usize;
    let mut reach = 0.0;
    while reach < width {
        k += 1;
        reach = (1u64 << k) as f64 - 1.0;
    }
    k
}

/// Bounded binary-encoding coefficients for a range of the given width:
/// powers of two except the last, which is clamped so no bit pattern
/// decodes outside `[0, width]` while `width` itself stays reachable.
fn encoding_coefficients(width: f64) -> Vec<f64> {
    let k = bits_for_range(width);
    if k == 0 {
        return Vec::new();
    }
    let mut coeffs: Vec<f64> = (0..k - 1).map(|b| (1u64 << b) as f64).collect();
    coeffs.push(width - ((1u64 << (k - 1)) as f64 - 1.0));
    coeffs
}

/// Convert a model into minimization-form QUBO.
///
/// Pipeline: integer variables are binary-encoded over their bounds,
/// each inequality gains a slack encoding that turns it into an equality,
/// and each equality residual `g` contributes `penalty * g^2`. A
/// maximization objective is negated first. When no penalty is supplied
/// it defaults to `1 + sum of |objective coefficients|`.
/// Bit encodings for the model's variables alone (no slacks), allocating
/// bits densely in declaration order. This is the shared front half of
/// [`to_qubo`], also used by the exact enumeration solver.
pub fn variable_encodings(model: &Model) -> Result<Vec<BitEncoding>, ConversionError> {
    for v in model.variables() {
        if v.kind == VarKind::Continuous {
            return Err(ConversionError::ContinuousVariable(v.name.clone()));
        }
        if !v.lower.is_finite() || !v.upper.is_finite() {
            return Err(ConversionError::NonFiniteBound(v.name.clone()));
        }
    }
    let mut encodings = Vec::with_capacity(model.num_variables());
    let mut next_bit = 0usize;
    for v in model.variables() {
        let coeffs = encoding_coefficients(v.upper - v.lower);
        let terms: Vec<(usize, f64)> = coeffs
            .into_iter()
            .map(|c| {
                let t = (next_bit, c);
                next_bit += 1;
                t
            })
            .collect();
        encodings.push(BitEncoding {
            name: v.name.clone(),
            base: v.lower,
            terms,
        });
    }
    Ok(encodings)
}

pub fn to_qubo(model: &Model, penalty: Option<f64>) -> Result<ConversionResult, ConversionError> {
    let mut encodings = variable_encodings(model)?;
    let mut next_bit = encodings.iter().map(|e| e.terms.len()).sum::<usize>();
    let num_original = encodings.len();

    // Each constraint becomes an equality residual, linear over bits.
    // Inequalities get a slack encoding appended after the variable bits.
    struct Residual {
        constant: f64,
        terms: Vec<(usize, f64)>,
    }
    let mut residuals = Vec::with_capacity(model.constraints().len());
    for c in model.constraints() {
        let rhs = c.rhs - c.lhs.constant;
        let (coeffs, rhs) = match c.sense {
            ConstraintSense::Ge => (
                c.lhs.linear.iter().map(|(&id, &a)| (id, -a)).collect::<Vec<_>>(),
                -rhs,
            ),
            _ => (c.lhs.linear.iter().map(|(&id, &a)| (id, a)).collect(), rhs),
        };

        let mut residual = Residual {
            constant: -rhs,
            terms: Vec::new(),
        };
        for &(id, a) in &coeffs {
            let enc = &encodings[id];
            residual.constant += a * enc.base;
            for &(bit, coeff) in &enc.terms {
                residual.terms.push((bit, a * coeff));
            }
        }

        if c.sense != ConstraintSense::Eq {
            // lhs + slack = rhs with slack in [0, rhs - min(lhs)].
            let min_lhs: f64 = coeffs
                .iter()
                .map(|&(id, a)| {
                    let v = model.variable(id);
                    (a * v.lower).min(a * v.upper)
                })
                .sum();
            if rhs < min_lhs {
                return Err(ConversionError::Unsatisfiable {
                    name: c.name.clone(),
                    rhs,
                    min_lhs,
                });
            }
            let slack_coeffs = encoding_coefficients(rhs - min_lhs);
            let terms: Vec<(usize, f64)> = slack_coeffs
                .into_iter()
                .map(|coeff| {
                    let t = (next_bit, coeff);
                    next_bit += 1;
                    t
                })
                .collect();
            for &(bit, coeff) in &terms {
                residual.terms.push((bit, coeff));
            }
            encodings.push(BitEncoding {
                name: format!("_slack_{}", c.name),
                base: 0.0,
                terms,
            });
        }
        residuals.push(residual);
    }

    let n = next_bit;
    let mut qubo = Qubo::new(n);

    let objective = model.objective();
    let sign = match objective.sense {
        Sense::Maximize => -1.0,
        Sense::Minimize => 1.0,
    };
    let lambda = penalty.unwrap_or(1.0 + objective.expr.coefficient_magnitude());

    // Objective over bits: substitute each variable's encoding.
    qubo.offset += sign * objective.expr.constant;
    for (&id, &c) in &objective.expr.linear {
        let enc = &encodings[id];
        qubo.offset += sign * c * enc.base;
        for &(bit, coeff) in &enc.terms {
            qubo.add_linear(bit, sign * c * coeff);
        }
    }
    for (&(u, v), &c) in &objective.expr.quadratic {
        let (eu, ev) = (&encodings[u], &encodings[v]);
        let c = sign * c;
        qubo.offset += c * eu.base * ev.base;
        for &(bit, coeff) in &eu.terms {
            qubo.add_linear(bit, c * coeff * ev.base);
        }
        for &(bit, coeff) in &ev.terms {
            qubo.add_linear(bit, c * eu.base * coeff);
        }
        for &(bi, ci) in &eu.terms {
            for &(bj, cj) in &ev.terms {
                qubo.add_quadratic(bi, bj, c * ci * cj);
            }
        }
    }

    // Penalties: lambda * (constant + sum coeff*bit)^2 per residual.
    for r in &residuals {
        qubo.offset += lambda * r.constant * r.constant;
        for &(bit, coeff) in &r.terms {
            qubo.add_linear(bit, lambda * (2.0 * r.constant * coeff + coeff * coeff));
        }
        for (a, &(bi, ci)) in r.terms.iter().enumerate() {
            for &(bj, cj) in &r.terms[a + 1..] {
                qubo.add_quadratic(bi, bj, lambda * 2.0 * ci * cj);
            }
        }
    }

    Ok(ConversionResult {
        qubo,
        encodings,
        penalty: lambda,
        objective_sign: sign,
        objective_offset_correction: 0.0,
        num_original,
    })
}
