//! Declarative modeling of combinatorial optimization problems.
//!
//! A [`Model`] holds variables (binary, integer or continuous), linear
//! constraints and a quadratic objective. Evaluation and feasibility
//! checking against an assignment are the ground-truth semantics used by
//! every solver in this crate.

mod json;
mod solution;

pub use json::{parse_model, serialize_model};
pub use solution::{Solution, SolutionStatus};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Index of a variable inside its owning [`Model`]. Ids are dense and
/// assigned in declaration order.
pub type VarId = usize;

/// Absolute tolerance used by [`Model::check_feasible`] when none is given.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Errors raised while building, parsing or evaluating a model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model JSON: {0}")]
    MalformedJson(String),
    #[error("unknown variable \"{0}\"")]
    UnknownVariable(String),
    #[error("duplicate variable name \"{0}\"")]
    DuplicateVariable(String),
    #[error("binary variable \"{0}\" must have bounds 0 and 1, got [{1}, {2}]")]
    BinaryBounds(String, f64, f64),
    #[error("variable \"{0}\" requires explicit lower and upper bounds")]
    MissingBounds(String),
    #[error("integer variable \"{0}\" has non-integral bounds [{1}, {2}]")]
    NonIntegralBounds(String, f64, f64),
    #[error("variable \"{0}\" has invalid bounds [{1}, {2}]")]
    InvalidBounds(String, f64, f64),
    #[error("nonlinear constraint unsupported: \"{0}\" carries quadratic terms")]
    NonlinearConstraint(String),
    #[error("model must declare at least one variable")]
    NoVariables,
    #[error("assignment is missing variable \"{0}\"")]
    MissingAssignment(String),
}

/// Variable kinds supported by the modeling layer.
///
/// Continuous variables parse and evaluate normally but are rejected by
/// every bundled solver, which all work over discrete encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Binary => write!(f, "binary"),
            VarKind::Integer => write!(f, "integer"),
            VarKind::Continuous => write!(f, "continuous"),
        }
    }
}

/// A decision variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// Objective direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Constraint comparison operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    /// `lhs <= rhs`
    Le,
    /// `lhs = rhs`
    Eq,
    /// `lhs >= rhs`
    Ge,
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintSense::Le => write!(f, "<="),
            ConstraintSense::Eq => write!(f, "="),
            ConstraintSense::Ge => write!(f, ">="),
        }
    }
}

/// A polynomial of degree at most two over model variables, stored in
/// canonical form: no zero coefficients, quadratic keys ordered `i <= j`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expression {
    pub constant: f64,
    pub linear: BTreeMap<VarId, f64>,
    pub quadratic: BTreeMap<(VarId, VarId), f64>,
}

impl Expression {
    pub fn constant(value: f64) -> Self {
        Expression {
            constant: value,
            ..Default::default()
        }
    }

    /// Add `coeff * x_id` to the expression.
    pub fn add_linear(&mut self, id: VarId, coeff: f64) -> &mut Self {
        let entry = self.linear.entry(id).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.linear.remove(&id);
        }
        self
    }

    /// Add `coeff * x_i * x_j` to the expression; the key is stored with
    /// `i <= j` regardless of argument order.
    pub fn add_quadratic(&mut self, i: VarId, j: VarId, coeff: f64) -> &mut Self {
        let key = if i <= j { (i, j) } else { (j, i) };
        let entry = self.quadratic.entry(key).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.quadratic.remove(&key);
        }
        self
    }

    /// Largest variable id referenced, if any.
    pub fn max_var_id(&self) -> Option<VarId> {
        let lin = self.linear.keys().max().copied();
        let quad = self.quadratic.keys().map(|&(_, j)| j).max();
        lin.into_iter().chain(quad).max()
    }

    /// Sum of |coefficient| over the constant, linear and quadratic parts.
    pub fn coefficient_magnitude(&self) -> f64 {
        self.constant.abs()
            + self.linear.values().map(|c| c.abs()).sum::<f64>()
            + self.quadratic.values().map(|c| c.abs()).sum::<f64>()
    }

    /// Evaluate at a dense point indexed by variable id.
    pub fn value_at(&self, point: &[f64]) -> f64 {
        let mut total = self.constant;
        for (&id, &c) in &self.linear {
            total += c * point[id];
        }
        for (&(i, j), &c) in &self.quadratic {
            total += c * point[i] * point[j];
        }
        total
    }

    /// Fold binary squares (`x^2 = x`) into the linear part and drop zeros.
    fn canonicalize(&mut self, kinds: &[VarKind]) {
        let diagonal: Vec<(VarId, f64)> = self
            .quadratic
            .iter()
            .filter(|&(&(i, j), _)| i == j && kinds[i] == VarKind::Binary)
            .map(|(&(i, _), &c)| (i, c))
            .collect();
        for (i, c) in diagonal {
            self.quadratic.remove(&(i, i));
            self.add_linear(i, c);
        }
        self.linear.retain(|_, c| *c != 0.0);
        self.quadratic.retain(|_, c| *c != 0.0);
    }
}

/// A linear constraint `lhs (<=|=|>=) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub lhs: Expression,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

/// Objective sense plus expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: Sense,
    pub expr: Expression,
}

/// A complete optimization model.
///
/// Immutable after construction; build one through [`ModelBuilder`] or
/// [`parse_model`].
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Objective,
}

impl Model {
    pub fn builder(name: impl Into<String>) -> ModelBuilder {
        ModelBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id]
    }

    pub fn variable_id(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn has_continuous(&self) -> Option<&Variable> {
        self.variables.iter().find(|v| v.kind == VarKind::Continuous)
    }

    /// Turn a name-keyed assignment into a dense id-indexed point.
    fn dense_point(&self, assignment: &BTreeMap<String, f64>) -> Result<Vec<f64>, ModelError> {
        self.variables
            .iter()
            .map(|v| {
                assignment
                    .get(&v.name)
                    .copied()
                    .ok_or_else(|| ModelError::MissingAssignment(v.name.clone()))
            })
            .collect()
    }

    /// Objective value at `assignment`, in the model's stated sense.
    pub fn evaluate(&self, assignment: &BTreeMap<String, f64>) -> Result<f64, ModelError> {
        let point = self.dense_point(assignment)?;
        Ok(self.evaluate_point(&point))
    }

    /// Objective value at an id-indexed point (fast path for solvers
    /// that enumerate assignments).
    pub fn evaluate_point(&self, point: &[f64]) -> f64 {
        self.objective.expr.value_at(point)
    }

    /// True iff every constraint holds within `tol` and every variable is
    /// within bounds and integral where required.
    pub fn check_feasible(
        &self,
        assignment: &BTreeMap<String, f64>,
        tol: f64,
    ) -> Result<bool, ModelError> {
        let point = self.dense_point(assignment)?;
        Ok(self.is_feasible_point(&point, tol))
    }

    /// Feasibility of an id-indexed point.
    pub fn is_feasible_point(&self, point: &[f64], tol: f64) -> bool {
        for v in &self.variables {
            let x = point[v.id];
            if x < v.lower - tol || x > v.upper + tol {
                return false;
            }
            if matches!(v.kind, VarKind::Binary | VarKind::Integer)
                && (x - x.round()).abs() > tol
            {
                return false;
            }
        }
        for c in &self.constraints {
            let lhs = c.lhs.value_at(point);
            let holds = match c.sense {
                ConstraintSense::Le => lhs <= c.rhs + tol,
                ConstraintSense::Eq => (lhs - c.rhs).abs() <= tol,
                ConstraintSense::Ge => lhs >= c.rhs - tol,
            };
            if !holds {
                return false;
            }
        }
        true
    }
}

/// Incremental [`Model`] constructor. Validation that needs the whole
/// model (name references, bound rules) runs in [`ModelBuilder::build`].
pub struct ModelBuilder {
    name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Option<Objective>,
}

impl ModelBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ModelBuilder {
            name: name.into(),
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: None,
        }
    }

    fn add_variable(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.variables.iter().any(|v| v.name == name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        if !lower.is_finite() || !upper.is_finite() || lower > upper {
            return Err(ModelError::InvalidBounds(name, lower, upper));
        }
        if kind == VarKind::Integer && (lower.fract() != 0.0 || upper.fract() != 0.0) {
            return Err(ModelError::NonIntegralBounds(name, lower, upper));
        }
        if kind == VarKind::Binary && (lower != 0.0 || upper != 1.0) {
            return Err(ModelError::BinaryBounds(name, lower, upper));
        }
        let id = self.variables.len();
        self.variables.push(Variable {
            id,
            name,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    pub fn binary(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        self.add_variable(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn integer(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        self.add_variable(name, VarKind::Integer, lower, upper)
    }

    pub fn continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
    ) -> Result<VarId, ModelError> {
        self.add_variable(name, VarKind::Continuous, lower, upper)
    }

    pub fn objective(&mut self, sense: Sense, expr: Expression) -> &mut Self {
        self.objective = Some(Objective { sense, expr });
        self
    }

    pub fn minimize(&mut self, expr: Expression) -> &mut Self {
        self.objective(Sense::Minimize, expr)
    }

    pub fn maximize(&mut self, expr: Expression) -> &mut Self {
        self.objective(Sense::Maximize, expr)
    }

    /// Add a linear constraint from `(var, coeff)` pairs.
    pub fn constraint(
        &mut self,
        name: impl Into<String>,
        terms: &[(VarId, f64)],
        sense: ConstraintSense,
        rhs: f64,
    ) -> Result<&mut Self, ModelError> {
        let name = name.into();
        let mut lhs = Expression::default();
        for &(id, c) in terms {
            if id >= self.variables.len() {
                return Err(ModelError::UnknownVariable(format!("#{id}")));
            }
            lhs.add_linear(id, c);
        }
        self.constraints.push(Constraint {
            name,
            lhs,
            sense,
            rhs,
        });
        Ok(self)
    }

    pub fn build(self) -> Result<Model, ModelError> {
        if self.variables.is_empty() {
            return Err(ModelError::NoVariables);
        }
        let kinds: Vec<VarKind> = self.variables.iter().map(|v| v.kind).collect();
        let mut objective = self.objective.unwrap_or(Objective {
            sense: Sense::Minimize,
            expr: Expression::default(),
        });
        objective.expr.canonicalize(&kinds);
        if let Some(id) = objective.expr.max_var_id() {
            if id >= self.variables.len() {
                return Err(ModelError::UnknownVariable(format!("#{id}")));
            }
        }
        let mut constraints = self.constraints;
        for c in &mut constraints {
            if !c.lhs.quadratic.is_empty() {
                return Err(ModelError::NonlinearConstraint(c.name.clone()));
            }
            c.lhs.canonicalize(&kinds);
        }
        Ok(Model {
            name: self.name,
            variables: self.variables,
            constraints,
            objective,
        })
    }
}
