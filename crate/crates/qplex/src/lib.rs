//! Hardware-agnostic combinatorial optimization toolkit.
//!
//! One declarative [`model::Model`] can be solved interchangeably through
//! an exact enumeration oracle, a simulated-annealing QUBO sampler, or
//! gate-based variational algorithms (QAOA/VQE) executed via an
//! OpenQASM3-based, backend-pluggable pipeline with a classical
//! parameter-optimization loop.
//!
//! The pipeline mirrors the module layout:
//!
//! 1. [`model`] declares variables, linear constraints and a quadratic
//!    objective, or parses them from JSON.
//! 2. [`qubo`] converts the model to minimization-form QUBO (integer
//!    binary encoding, slack variables, quadratic penalties) and maps it
//!    onto an Ising Hamiltonian.
//! 3. [`circuits`] builds bound QAOA/VQE circuits and emits/parses
//!    OpenQASM 3.
//! 4. [`optimize`] minimizes the sampled energy with Nelder-Mead, SPSA
//!    or Adam.
//! 5. [`backends`] hosts the solver factory, the bundled solvers, device
//!    selection and the remote wire protocol.
//!
//! ```
//! use qplex::backends::{get_solver, SolveOptions};
//! use qplex::model::parse_model;
//!
//! let model = parse_model(r#"
//!     { "name": "knapsack",
//!       "variables": [ {"name":"x0","kind":"binary"},
//!                      {"name":"x1","kind":"binary"} ],
//!       "objective": { "sense":"max", "linear": {"x0":3.0,"x1":4.0} },
//!       "constraints": [ {"name":"cap","linear":{"x0":2.0,"x1":3.0},
//!                         "sense":"<=","rhs":4.0} ] }
//! "#).unwrap();
//! let solver = get_solver("exact", &SolveOptions::default()).unwrap();
//! let solution = solver.solve(&model, &SolveOptions::default()).unwrap();
//! assert_eq!(solution.objective_value, Some(4.0));
//! ```

pub mod backends;
pub mod circuits;
pub mod model;
pub mod optimize;
pub mod qubo;

pub use backends::{get_solver, Algorithm, BackendError, SampleSet, SolveOptions, Solver};
pub use model::{parse_model, serialize_model, Model, ModelError, Solution, SolutionStatus};
pub use qubo::{to_qubo, ConversionResult, IsingModel, Qubo};
