use std::time::Instant;

use nalgebra::{Cholesky, DMatrix};
use rand_distr::{Distribution, StandardNormal};

use super::{substream, McEstimate, SamplerConfig};
use crate::error::{Error, Result};

const BATCH: usize = 256;

fn phi(x: f64, eta: f64) -> f64 {
    0.25 * ((x * x + 4.0 * eta * eta) / (4.0 * eta * eta)).ln()
}

/// Covariance of B(x_j), x_j = L j / grid for j = 1..grid (B(0) = 0 is pinned).
pub fn fbm0_covariance(grid: usize, eta: f64, length: f64) -> DMatrix<f64> {
    let x = |j: usize| length * (j + 1) as f64 / grid as f64;
    DMatrix::from_fn(grid, grid, |i, j| phi(x(i), eta) + phi(x(j), eta) - phi(x(i) - x(j), eta))
}

/// Lower Cholesky factor of the grid covariance, with the diagonal jitter that was needed.
pub struct Fbm0Factor {
    pub grid: usize,
    pub eta: f64,
    pub length: f64,
    pub jitter: f64,
    lower: DMatrix<f64>,
}

impl Fbm0Factor {
    pub fn new(grid: usize, eta: f64, length: f64) -> Result<Self> {
        if !(eta > 0.0 && length > 0.0) {
            return Err(Error::Invalid("η and L must be positive".into()));
        }
        if grid < 256 {
            return Err(Error::Invalid("grid resolution must be at least 256".into()));
        }
        if length / grid as f64 > eta {
            return Err(Error::Invalid(format!("grid spacing {} does not resolve η = {eta}", length / grid as f64)));
        }
        let cov = fbm0_covariance(grid, eta, length);
        let mean_diag = cov.diagonal().mean();
        let mut jitter = 0.0;
        loop {
            let mut m = cov.clone();
            for i in 0..grid {
                m[(i, i)] += jitter;
            }
            if let Some(c) = Cholesky::new(m) {
                return Ok(Fbm0Factor { grid, eta, length, jitter, lower: c.l() });
            }
            jitter = if jitter == 0.0 { 1e-12 * mean_diag } else { jitter * 100.0 };
            if jitter > 1e-4 * mean_diag {
                return Err(Error::Numerical(format!(
                    "covariance not positive definite for grid={grid}, η={eta}, L={length} even with jitter {jitter:e}"
                )));
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fbm0Argmin {
    /// ⟨y_m^k⟩ for k = 1..=4
    pub moments: Vec<McEstimate>,
    /// ⟨y_m − ½⟩
    pub centered: McEstimate,
    pub positions: Vec<f64>,
}

/// Position y_m ∈ [0, 1] of the minimum of V = 2B over the grid including y = 0.
pub fn sample_fbm0_argmin(cfg: &SamplerConfig, factor: &Fbm0Factor) -> Result<Fbm0Argmin> {
    if cfg.realizations < 2 {
        return Err(Error::Invalid("at least 2 realizations".into()));
    }
    let start = Instant::now();
    let g = factor.grid;
    let mut positions = Vec::with_capacity(cfg.realizations);
    for first in (0..cfg.realizations).step_by(BATCH) {
        let cols = BATCH.min(cfg.realizations - first);
        let mut z = DMatrix::<f64>::zeros(g, cols);
        for c in 0..cols {
            let mut rng = substream(cfg.seed, (first + c) as u64);
            for i in 0..g {
                z[(i, c)] = StandardNormal.sample(&mut rng);
            }
        }
        let b = &factor.lower * z;
        for c in 0..cols {
            let (mut jmin, mut vmin) = (0usize, 0.0f64);
            for (i, v) in b.column(c).iter().enumerate() {
                if 2.0 * v < vmin {
                    vmin = 2.0 * v;
                    jmin = i + 1;
                }
            }
            positions.push(jmin as f64 / g as f64);
        }
    }
    let wall = start.elapsed();
    let est = |f: &dyn Fn(f64) -> f64| {
        let v: Vec<f64> = positions.iter().map(|&y| f(y)).collect();
        McEstimate::from_iid(&v, cfg.seed, wall)
    };
    let moments = (1..=4).map(|k| est(&|y: f64| y.powi(k))).collect();
    let centered = est(&|y| y - 0.5);
    Ok(Fbm0Argmin { moments, centered, positions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increment_variance() {
        // E[(B(x) − B(y))²] = ½ ln((|x−y|² + 4η²)/4η²)
        let (g, eta) = (256, 1.0 / 64.0);
        let c = fbm0_covariance(g, eta, 1.0);
        let (i, j) = (10, 200);
        let d = (j - i) as f64 / g as f64;
        let v = c[(i, i)] + c[(j, j)] - 2.0 * c[(i, j)];
        assert!((v - 0.5 * ((d * d + 4.0 * eta * eta) / (4.0 * eta * eta)).ln()).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_rejected() {
        assert!(Fbm0Factor::new(256, 1e-3, 1.0).is_err());
    }
}
