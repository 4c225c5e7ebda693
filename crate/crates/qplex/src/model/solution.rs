//! Solver-independent result type: a decoded assignment, the objective
//! value in the model's original sense, a status, and execution metadata.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionStatus {
    /// Proven optimum (exact enumeration).
    Optimal,
    /// Satisfies every constraint but optimality is not proven.
    Feasible,
    /// No feasible point found (or the returned point violates a
    /// constraint).
    Infeasible,
    /// The solve aborted; see metadata for the cause.
    Error,
}

impl SolutionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolutionStatus::Optimal => "optimal",
            SolutionStatus::Feasible => "feasible",
            SolutionStatus::Infeasible => "infeasible",
            SolutionStatus::Error => "error",
        }
    }
}

/// Result of solving a model through any backend.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub status: SolutionStatus,
    pub assignment: BTreeMap<String, f64>,
    /// Objective value of `assignment` in the model's stated sense;
    /// absent when no assignment was produced.
    pub objective_value: Option<f64>,
    pub backend_name: String,
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl Solution {
    pub fn new(status: SolutionStatus, backend_name: impl Into<String>) -> Self {
        Solution {
            status,
            assignment: BTreeMap::new(),
            objective_value: None,
            backend_name: backend_name.into(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn is_usable(&self) -> bool {
        matches!(
            self.status,
            SolutionStatus::Optimal | SolutionStatus::Feasible
        )
    }
}
