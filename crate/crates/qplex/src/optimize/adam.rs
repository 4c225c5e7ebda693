//! Adam with SPSA gradient estimates: each iteration spends one
//! perturbation pair on the gradient, then applies the usual
//! bias-corrected first/second-moment update.

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
    let p = &config.adam;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut theta = init.to_vec();
    let mut first_moment = vec![0.0; dim];
    let mut second_moment = vec![0.0; dim];

    recorder.eval(&theta)?;
    let mut convergence = Convergence::new(config.tol, config.patience, recorder.best_loss());

    for k in 0..config.max_iter {
        recorder.set_iteration(k + 1);
        // Perturbation size follows the SPSA c_k schedule.
        let (_, c_k) = config.spsa.gains(config.resolved_big_a(), k);
        let delta = rademacher(&mut rng, dim);

        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + c_k * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - c_k * d).collect();
        let y_plus = recorder.eval(&plus)?;
        let y_minus = recorder.eval(&minus)?;

        let t = (k + 1) as i32;
        for d in 0..dim {
            let gradient = (y_plus - y_minus) / (2.0 * c_k * delta[d]);
            first_moment[d] = p.beta1 * first_moment[d] + (1.0 - p.beta1) * gradient;
            second_moment[d] = p.beta2 * second_moment[d] + (1.0 - p.beta2) * gradient * gradient;
            let m_hat = first_moment[d] / (1.0 - p.beta1.powi(t));
            let v_hat = second_moment[d] / (1.0 - p.beta2.powi(t));
            theta[d] -= p.learning_rate * m_hat / (v_hat.sqrt() + p.epsilon);
        }

        if convergence.note(recorder.best_loss()) {
            return Ok(TerminationReason::Converged);
        }
    }
    Ok(TerminationReason::MaxIter)
}
