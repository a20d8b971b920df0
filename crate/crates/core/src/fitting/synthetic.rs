use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{FitError, RidgePoint, VISIBILITY_FLOOR};
use crate::hamiltonian::ModelConfig;
use crate::spectra::{bright_transitions, Levels};

/// Settings for generating ridge data from a known model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOptions {
    /// Standard deviation of the additive frequency noise (GHz).
    pub noise_sigma: f64,
    pub seed: u64,
    /// Only lines inside `[min_freq, max_freq]` are emitted.
    pub min_freq: f64,
    pub max_freq: f64,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        Self {
            noise_sigma: 0.01,
            seed: 0,
            min_freq: 0.0,
            max_freq: f64::INFINITY,
        }
    }
}

/// One ridge point per bright line per gate charge, with Gaussian noise on
/// the frequency only. Each point is hinted with its bright-line ordinal.
pub fn synthetic_ridges(
    model: &ModelConfig,
    grid: &[f64],
    options: &SyntheticOptions,
) -> Result<Vec<RidgePoint>, FitError> {
    let noise = Normal::new(0.0, options.noise_sigma)
        .map_err(|e| FitError::InvalidProblem(format!("noise sigma: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut points = Vec::new();
    for &n_g in grid {
        let levels = Levels::solve(model, n_g)?;
        let mut lines: Vec<f64> = bright_transitions(&levels, VISIBILITY_FLOOR)
            .into_iter()
            .map(|(_, f)| f)
            .collect();
        lines.sort_by(f64::total_cmp);
        for (ordinal, f) in lines.into_iter().enumerate() {
            if f < options.min_freq || f > options.max_freq {
                continue;
            }
            let jitter = if options.noise_sigma > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            points.push(RidgePoint {
                n_g,
                freq: f + jitter,
                weight: 1.0,
                branch_hint: Some(ordinal),
            });
        }
    }
    Ok(points)
}
