//! Downhill simplex method with the standard reflect / expand /
//! contract / shrink moves.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Convergence, OptimizeError, OptimizerConfig, Recorder, TerminationReason};

/// Scatter radius for the seeded initial simplex. Circuit parameters
/// live on an angle scale, so an eighth of the period per coordinate
/// gives the simplex real volume to survey before it contracts, while
/// staying coherent enough to polish what it finds.
const INITIAL_SCATTER: f64 = std::f64::consts::FRAC_PI_4;

/// Initial simplex: the start point plus one seeded scattered vertex per
/// dimension.
fn initial_simplex(init: &[f64], seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut simplex = vec![init.to_vec()];
    for _ in 0..init.len() {
        let vertex = init
            .iter()
            .map(|x| x + (rng.gen::<f64>() * 2.0 - 1.0) * INITIAL_SCATTER)
            .collect();
        simplex.push(vertex);
    }
    simplex
}

pub(super) fn run<F>(
    recorder: &mut Recorder<F>,
    init: &[f64],
    config: &OptimizerConfig,
) -> Result<TerminationReason, OptimizeError>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = init.len();
    let p = &config.nelder_mead;

    let mut simplex = initial_simplex(init, config.seed);
    let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
    for vertex in &simplex {
        values.push(recorder.eval(vertex)?);
    }

    let mut convergence = Convergence::new(config.tol, config.patience, recorder.best_loss());

    for iteration in 1..=config.max_iter {
        recorder.set_iteration(iteration);

        // Stable order: ties resolve by insertion index.
        let mut order: Vec<usize> = (0..simplex.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let second_worst = order[dim.saturating_sub(1).min(order.len() - 2)];
        let worst = order[dim];

        let centroid: Vec<f64> = (0..dim)
            .map(|d| {
                order[..dim]
                    .iter()
                    .map(|&v| simplex[v][d])
                    .sum::<f64>()
                    / dim as f64
            })
            .collect();

        let along = |scale: f64| -> Vec<f64> {
            (0..dim)
                .map(|d| centroid[d] + scale * (centroid[d] - simplex[worst][d]))
                .collect()
        };

        let reflected = along(p.reflect);
        let f_reflected = recorder.eval(&reflected)?;

        if f_reflected < values[best] {
            let expanded = along(p.reflect * p.expand);
            let f_expanded = recorder.eval(&expanded)?;
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            // Contract toward the better of the reflected point and the
            // worst vertex; shrink the whole simplex if that fails too.
            let (contracted, threshold) = if f_reflected < values[worst] {
                (along(p.reflect * p.contract), f_reflected)
            } else {
                (along(-p.contract), values[worst])
            };
            let f_contracted = recorder.eval(&contracted)?;
            if f_contracted <= threshold {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                let anchor = simplex[best].clone();
                for &v in &order[1..] {
                    for d in 0..dim {
                        simplex[v][d] = anchor[d] + p.shrink * (simplex[v][d] - anchor[d]);
                    }
                    values[v] = recorder.eval(&simplex[v])?;
                }
            }
        }

        if convergence.note(recorder.best_loss()) {
            return Ok(TerminationReason::Converged);
        }
    }
    Ok(TerminationReason::MaxIter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::minimize;

    #[test]
    fn quartic_valley_converges() {
        let config = OptimizerConfig::default();
        let loss = |p: &[f64]| (p[0] - 1.0).powi(4) + (p[1] + 2.0).powi(2);
        let trace = minimize(loss, &[0.0, 0.0], &config).unwrap();
        assert!(trace.best_loss < 1e-5, "best loss {}", trace.best_loss);
        assert!((trace.best_params[1] + 2.0).abs() < 1e-2);
    }

    #[test]
    fn four_dimensional_sphere_under_500_evals() {
        let config = OptimizerConfig {
            max_iter: 500,
            ..Default::default()
        };
        let trace = minimize(
            |p: &[f64]| p.iter().map(|x| x * x).sum(),
            &[1.0, 1.0, 1.0, 1.0],
            &config,
        )
        .unwrap();
        let evals_to_target = trace
            .records
            .iter()
            .position(|r| r.loss < 1e-6)
            .expect("should reach 1e-6");
        assert!(
            evals_to_target < 500,
            "took {evals_to_target} evaluations"
        );
    }
}

