//! Derivative-free minimization of sampled losses: Nelder-Mead (the
//! bundled default), SPSA, and Adam driven by SPSA-style gradient
//! estimates. The name `cobyla` is accepted as an alias for Nelder-Mead
//! so existing invocations keep working.
//!
//! Runs are deterministic given (loss, init, config, seed) and terminate
//! either at `max_iter` or once the best loss has improved by less than
//! `tol` over `patience` consecutive iterations.

mod adam;
mod nelder_mead;
mod spsa;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuits::AnsatzSpec;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("loss returned a non-finite value at iteration {iteration}")]
    NonFiniteLoss {
        iteration: usize,
        partial: Box<OptimizationTrace>,
    },
    #[error("cannot optimize over zero parameters")]
    NoParameters,
    #[error("unknown optimizer \"{0}\" (expected nelder-mead, spsa, adam or cobyla)")]
    UnknownOptimizer(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    NelderMead,
    Spsa,
    Adam,
}

impl OptimizerKind {
    /// Resolve an optimizer name. Returns the kind plus whether the name
    /// was the `cobyla` alias (callers may want to log the substitution).
    pub fn from_name(name: &str) -> Result<(Self, bool), OptimizeError> {
        match name {
            "nelder-mead" => Ok((OptimizerKind::NelderMead, false)),
            "spsa" => Ok((OptimizerKind::Spsa, false)),
            "adam" => Ok((OptimizerKind::Adam, false)),
            "cobyla" => Ok((OptimizerKind::NelderMead, true)),
            other => Err(OptimizeError::UnknownOptimizer(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::NelderMead => "nelder-mead",
            OptimizerKind::Spsa => "spsa",
            OptimizerKind::Adam => "adam",
        }
    }
}

/// SPSA gain-sequence parameters. The decayed gains are
/// `a_k = a / (A + k + 1)^alpha` and `c_k = c / (k + 1)^gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpsaParams {
    pub a: f64,
    pub c: f64,
    /// Stability constant `A`; defaults to `max_iter / 10` when unset.
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for SpsaParams {
    fn default() -> Self {
        SpsaParams {
            a: 0.1,
            c: 0.1,
            big_a: None,
            alpha: 0.602,
            gamma: 0.101,
        }
    }
}

impl SpsaParams {
    /// Gains for iteration `k` (0-based) given the resolved `A`.
    pub fn gains(&self, big_a: f64, k: usize) -> (f64, f64) {
        let a_k = self.a / (big_a + k as f64 + 1.0).powf(self.alpha);
        let c_k = self.c / (k as f64 + 1.0).powf(self.gamma);
        (a_k, c_k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadParams {
    pub reflect: f64,
    pub expand: f64,
    pub contract: f64,
    pub shrink: f64,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        NelderMeadParams {
            reflect: 1.0,
            expand: 2.0,
            contract: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub max_iter: usize,
    pub tol: f64,
    pub patience: usize,
    pub seed: u64,
    pub spsa: SpsaParams,
    pub adam: AdamParams,
    pub nelder_mead: NelderMeadParams,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            kind: OptimizerKind::NelderMead,
            max_iter: 200,
            tol: 1e-6,
            patience: 10,
            seed: 0,
            spsa: SpsaParams::default(),
            adam: AdamParams::default(),
            nelder_mead: NelderMeadParams::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_kind(kind: OptimizerKind) -> Self {
        OptimizerConfig {
            kind,
            ..Default::default()
        }
    }

    /// `A` constant for the SPSA gain schedule.
    pub fn resolved_big_a(&self) -> f64 {
        self.spsa.big_a.unwrap_or(self.max_iter as f64 / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    MaxIter,
    Converged,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::MaxIter => "max_iter",
            TerminationReason::Converged => "converged",
        }
    }
}

/// One recorded loss evaluation, tagged with the optimizer iteration it
/// belongs to (iteration 0 covers initialization).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub records: Vec<EvalRecord>,
    pub best_params: Vec<f64>,
    pub best_loss: f64,
    pub termination: TerminationReason,
    pub iterations: usize,
}

/// Records evaluations, tracks the running best and aborts on
/// non-finite losses. Shared by all optimizers.
pub(crate) struct Recorder<F> {
    loss: F,
    records: Vec<EvalRecord>,
    best_params: Vec<f64>,
    best_loss: f64,
    iteration: usize,
}

impl<F: FnMut(&[f64]) -> f64> Recorder<F> {
    fn new(loss: F) -> Self {
        Recorder {
            loss,
            records: Vec::new(),
            best_params: Vec::new(),
            best_loss: f64::INFINITY,
            iteration: 0,
        }
    }

    pub(crate) fn set_iteration(&mut self, iteration: usize) {
        self.iteration = iteration;
    }

    pub(crate) fn eval(&mut self, params: &[f64]) -> Result<f64, OptimizeError> {
        let value = (self.loss)(params);
        if !value.is_finite() {
            return Err(OptimizeError::NonFiniteLoss {
                iteration: self.iteration,
                partial: Box::new(self.snapshot(TerminationReason::MaxIter)),
            });
        }
        self.records.push(EvalRecord {
            iteration: self.iteration,
            params: params.to_vec(),
            loss: value,
        });
        if value < self.best_loss {
            self.best_loss = value;
            self.best_params = params.to_vec();
        }
        Ok(value)
    }

    pub(crate) fn best_loss(&self) -> f64 {
        self.best_loss
    }

    fn snapshot(&self, termination: TerminationReason) -> OptimizationTrace {
        OptimizationTrace {
            records: self.records.clone(),
            best_params: self.best_params.clone(),
            best_loss: self.best_loss,
            termination,
            iterations: self.iteration,
        }
    }

    fn finish(self, termination: TerminationReason) -> OptimizationTrace {
        OptimizationTrace {
            records: self.records,
            best_params: self.best_params,
            best_loss: self.best_loss,
            termination,
            iterations: self.iteration,
        }
    }
}

/// Patience window over best-loss improvement: the run stops once the
/// best loss has improved by less than `tol` across the last `patience`
/// iterations.
pub(crate) struct Convergence {
    tol: f64,
    patience: usize,
    history: std::collections::VecDeque<f64>,
}

impl Convergence {
    fn new(tol: f64, patience: usize, initial_best: f64) -> Self {
        let mut history = std::collections::VecDeque::with_capacity(patience + 1);
        history.push_back(initial_best);
        Convergence {
            tol,
            patience,
            history,
        }
    }

    /// Report the best loss at the end of an iteration; true when the
    /// patience window is exhausted.
    pub(crate) fn note(&mut self, best: f64) -> bool {
        let reference = *self.history.front().expect("seeded with the initial best");
        let converged = self.history.len() >= self.patience && reference - best < self.tol;
        self.history.push_back(best);
        if self.history.len() > self.patience {
            self.history.pop_front();
        }
        converged
    }
}

/// Minimize `loss` starting from `init` under the configured optimizer.
pub fn minimize<F>(
    loss: F,
    init: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizationTrace, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    if init.is_empty() {
        return Err(OptimizeError::NoParameters);
    }
    let mut recorder = Recorder::new(loss);
    recorder.set_iteration(0);

    let termination = match config.kind {
        OptimizerKind::NelderMead => nelder_mead::run(&mut recorder, init, config)?,
        OptimizerKind::Spsa => spsa::run(&mut recorder, init, config)?,
        OptimizerKind::Adam => adam::run(&mut recorder, init, config)?,
    };
    Ok(recorder.finish(termination))
}

/// Draw the starting parameter vector for an ansatz: `param_count`
/// values uniform in `[0, 2*pi)`, deterministic per seed.
pub fn initial_params(spec: &AnsatzSpec, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..spec.param_count())
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
        .collect()
}

/// Rademacher (+1/-1) perturbation vector used by the SPSA estimator.
pub(crate) fn rademacher(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}
