//! Simultaneous perturbation stochastic approximation: one Rademacher
//! perturbation pair per iteration estimates the full gradient at a cost
//! independent of dimension.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{rademacher, Convergence, OptimizeError, OptimizerConfig, Recorder, TerminationReason};

pub(super) fn run<F>(
    recorder: &mut Recorder<F>,
    init: &[f64],
    config: &OptimizerConfig,
) -> Result<TerminationReason, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = init.len();
    let big_a = config.resolved_big_a();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut theta = init.to_vec();
    recorder.eval(&theta)?;
    let mut convergence = Convergence::new(config.tol, config.patience, recorder.best_loss());

    for k in 0..config.max_iter {
        recorder.set_iteration(k + 1);
        let (a_k, c_k) = config.spsa.gains(big_a, k);
        let delta = rademacher(&mut rng, dim);

        let plus: Vec<f64> = theta
            .iter()
            .zip(&delta)
            .map(|(t, d)| t + c_k * d)
            .collect();
        let minus: Vec<f64> = theta
            .iter()
            .zip(&delta)
            .map(|(t, d)| t - c_k * d)
            .collect();
        let y_plus = recorder.eval(&plus)?;
        let y_minus = recorder.eval(&minus)?;

        for (t, d) in theta.iter_mut().zip(&delta) {
            let gradient = (y_plus - y_minus) / (2.0 * c_k * d);
            *t -= a_k * gradient;
        }

        if convergence.note(recorder.best_loss()) {
            return Ok(TerminationReason::Converged);
        }
    }
    Ok(TerminationReason::MaxIter)
}
