//! Stochastic checks: Metropolis samplers for the β-Jacobi and circular gases,
//! the argmax of GUE characteristic polynomials and the argmin of fBm0.

mod fbm;
mod gas;
mod gue;
pub mod tridiag;

use std::fmt;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use fbm::{fbm0_covariance, sample_fbm0_argmin, Fbm0Argmin, Fbm0Factor};
pub use gas::{
    circular_cos_moments, jacobi_moments, CircularParams, Gas, JacobiParams, MetropolisChain,
};
pub use gue::{finite_size_variable, sample_gue_argmax, GueArgmax};

pub const DEFAULT_SEED: u64 = 0x5eed_1e55_0f_c0ffee;

/// Mean of a Monte Carlo observable with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Independent units behind `stderr`: draws for direct samplers, batches for chains.
    pub samples: u64,
    pub seed: u64,
    pub wall: Duration,
}

impl McEstimate {
    /// Sample mean and σ/√n of independent draws.
    pub fn from_iid(xs: &[f64], seed: u64, wall: Duration) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        McEstimate { mean, stderr: (var / n).sqrt(), samples: xs.len() as u64, seed, wall }
    }

    /// Batch means over a correlated series: the batch averages are treated as independent.
    pub fn from_batches(xs: &[f64], batches: usize, seed: u64, wall: Duration) -> Self {
        let size = xs.len() / batches;
        let means: Vec<f64> = xs.chunks_exact(size).take(batches).map(|c| c.iter().sum::<f64>() / size as f64).collect();
        McEstimate::from_iid(&means, seed, wall)
    }

    pub fn z_score(&self, exact: f64) -> f64 {
        (self.mean - exact) / self.stderr
    }

    pub fn within(&self, exact: f64, sigmas: f64) -> bool {
        self.z_score(exact).abs() <= sigmas
    }
}

impl fmt::Display for McEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.6} ± {:.6} (n={}, seed={:#x}, {:.2}s)",
            self.mean,
            self.stderr,
            self.samples,
            self.seed,
            self.wall.as_secs_f64()
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    /// Recorded sweeps for chains.
    pub sweeps: u64,
    pub burn_in: u64,
    pub thin: u64,
    /// Batches for the batch-means standard error.
    pub batches: usize,
    /// Independent realizations for direct samplers.
    pub realizations: usize,
    /// Grid size for argmax/argmin searches.
    pub grid: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            sweeps: 100_000,
            burn_in: 10_000,
            thin: 1,
            batches: 100,
            realizations: 1000,
            grid: 8192,
            seed: DEFAULT_SEED,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.sweeps {
            return Err(Error::Invalid("burn-in must be shorter than the run".into()));
        }
        if self.grid < 256 {
            return Err(Error::Invalid("grid resolution must be at least 256".into()));
        }
        if self.thin == 0 || self.batches < 2 || self.realizations < 2 {
            return Err(Error::Invalid("thinning ≥ 1, at least 2 batches and 2 realizations".into()));
        }
        if self.sweeps / self.thin < self.batches as u64 {
            return Err(Error::Invalid("fewer recorded sweeps than batches".into()));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for substream `index` of `seed` (ChaCha8).
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ splitmix64(index))
}

/// Metropolis acceptance from the log of the target ratio.
pub fn metropolis_accept<R: Rng>(log_ratio: f64, rng: &mut R) -> bool {
    log_ratio >= 0.0 || rng.gen::<f64>().ln() < log_ratio
}

/// Metropolis chain on {0, …, m−1} with uniform proposals, for checking the
/// acceptance rule against a known stationary law.
pub fn discrete_metropolis(log_weights: &[f64], steps: usize, seed: u64) -> Vec<usize> {
    let mut rng = substream(seed, 0);
    let m = log_weights.len();
    let mut s = 0;
    let mut path = Vec::with_capacity(steps);
    for _ in 0..steps {
        let t = rng.gen_range(0..m);
        if metropolis_accept(log_weights[t] - log_weights[s], &mut rng) {
            s = t;
        }
        path.push(s);
    }
    path
}

/// Transition matrix of [`discrete_metropolis`].
pub fn discrete_transition_matrix(log_weights: &[f64]) -> Vec<Vec<f64>> {
    let m = log_weights.len();
    let mut p = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                p[i][j] = (log_weights[j] - log_weights[i]).exp().min(1.0) / m as f64;
            }
        }
        p[i][i] = 1.0 - p[i].iter().sum::<f64>();
    }
    p
}
