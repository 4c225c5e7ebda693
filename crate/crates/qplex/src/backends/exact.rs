//! Exact oracle: enumerate every encoded assignment and return the true
//! optimum. Doubles as the ground truth the sampling backends are
//! measured against.

use std::collections::BTreeMap;

use crate::model::{Model, Sense, Solution, SolutionStatus, FEASIBILITY_TOL};
use crate::qubo::variable_encodings;

use super::BackendError;

/// Default cap on total encoded bits (2^22 assignments).
pub const DEFAULT_ENUMERATION_LIMIT: usize = 22;

/// Enumerate all assignments of a discrete model.
///
/// Patterns are visited in lexicographic bitstring order (character `i`
/// of the string is encoding bit `i`), and only strict improvements are
/// kept, so objective ties resolve toward the lexicographically smallest
/// bitstring.
pub fn solve_exact(model: &Model, limit: usize) -> Result<Solution, BackendError> {
    let encodings = variable_encodings(model)?;
    let total_bits: usize = encodings.iter().map(|e| e.terms.len()).sum();
    if total_bits > limit {
        return Err(BackendError::TooManyBits {
            bits: total_bits,
            limit,
        });
    }

    let maximize = model.objective().sense == Sense::Maximize;
    let mut bits = vec![0u8; total_bits];
    let mut point = vec![0.0f64; model.num_variables()];
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut feasible_count: u64 = 0;

    for pattern in 0u64..(1u64 << total_bits) {
        for (i, bit) in bits.iter_mut().enumerate() {
            *bit = ((pattern >> (total_bits - 1 - i)) & 1) as u8;
        }
        for (v, enc) in encodings.iter().enumerate() {
            point[v] = enc.decode(&bits);
        }
        if !model.is_feasible_point(&point, FEASIBILITY_TOL) {
            continue;
        }
        feasible_count += 1;
        let value = model.evaluate_point(&point);
        let better = match &best {
            None => true,
            Some((_, incumbent)) => {
                if maximize {
                    value > *incumbent
                } else {
                    value < *incumbent
                }
            }
        };
        if better {
            best = Some((point.clone(), value));
        }
    }

    let mut solution = match best {
        Some((point, value)) => {
            let assignment: BTreeMap<String, f64> = model
                .variables()
                .iter()
                .map(|v| (v.name.clone(), point[v.id]))
                .collect();
            let mut s = Solution::new(SolutionStatus::Optimal, "exact");
            s.assignment = assignment;
            s.objective_value = Some(value);
            s
        }
        None => Solution::new(SolutionStatus::Infeasible, "exact"),
    };
    solution = solution
        .with_meta("patterns_evaluated", 1u64 << total_bits)
        .with_meta("feasible_count", feasible_count);
    Ok(solution)
}
