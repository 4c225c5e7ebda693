//! Classical stand-in for a quantum annealer: restarted Metropolis
//! sampling of a QUBO over a geometric inverse-temperature schedule.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::qubo::{bits_to_string, Qubo};

use super::SampleSet;

#[derive(Debug, Clone)]
pub struct AnnealerParams {
    /// Independent restarts; each contributes its best sample.
    pub num_reads: usize,
    /// Metropolis sweeps per read (one sweep touches every bit once).
    pub sweeps: usize,
    pub beta_hot: f64,
    pub beta_cold: f64,
    pub seed: u64,
}

impl Default for AnnealerParams {
    fn default() -> Self {
        AnnealerParams {
            num_reads: 100,
            sweeps: 1000,
            beta_hot: 0.1,
            beta_cold: 10.0,
            seed: 0,
        }
    }
}

/// Result of an annealing run: the per-read best samples and the overall
/// winner.
#[derive(Debug, Clone)]
pub struct AnnealOutcome {
    pub samples: SampleSet,
    pub best_bits: Vec<u8>,
    pub best_energy: f64,
}

/// Geometric interpolation from `beta_hot` to `beta_cold` across the
/// sweep count.
fn beta_schedule(params: &AnnealerParams, sweeps: usize) -> Vec<f64> {
    if sweeps <= 1 {
        return vec![params.beta_hot; sweeps];
    }
    let log_hot = params.beta_hot.ln();
    let log_cold = params.beta_cold.ln();
    let step = (log_cold - log_hot) / (sweeps - 1) as f64;
    (0..sweeps)
        .map(|t| (log_hot + step * t as f64).exp())
        .collect()
}

/// Sample a QUBO with restarted Metropolis annealing. Deterministic per
/// seed; the returned [`SampleSet`] holds one best bitstring per read.
pub fn sample_qubo(qubo: &Qubo, params: &AnnealerParams) -> AnnealOutcome {
    let n = qubo.n;
    let mut samples = SampleSet::new();

    if n == 0 {
        samples.record("", params.num_reads as u64);
        return AnnealOutcome {
            samples,
            best_bits: Vec::new(),
            best_energy: qubo.offset,
        };
    }

    // Neighbor lists for O(degree) flip deltas.
    let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (&(i, j), &c) in &qubo.quadratic {
        neighbors[i].push((j, c));
        neighbors[j].push((i, c));
    }
    let schedule = beta_schedule(params, params.sweeps);

    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let mut global_best: Option<(Vec<u8>, f64)> = None;

    for _ in 0..params.num_reads {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen::<u64>());
        let mut bits: Vec<u8> = (0..n).map(|_| u8::from(rng.gen::<bool>())).collect();
        let mut energy = qubo.energy(&bits).expect("widths match by construction");
        let mut read_best = (bits.clone(), energy);

        for &beta in &schedule {
            for i in 0..n {
                let mut local = qubo.linear[i];
                for &(j, c) in &neighbors[i] {
                    if bits[j] != 0 {
                        local += c;
                    }
                }
                let delta = if bits[i] == 0 { local } else { -local };
                if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                    bits[i] ^= 1;
                    energy += delta;
                    if energy < read_best.1 {
                        read_best = (bits.clone(), energy);
                    }
                }
            }
        }

        samples.record(&bits_to_string(&read_best.0), 1);
        if global_best
            .as_ref()
            .is_none_or(|(_, best)| read_best.1 < *best)
        {
            global_best = Some(read_best);
        }
    }

    let (best_bits, best_energy) = global_best.expect("num_reads >= 1");
    AnnealOutcome {
        samples,
        best_bits,
        best_energy,
    }
}
