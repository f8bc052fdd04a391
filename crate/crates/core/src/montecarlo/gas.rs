use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{metropolis_accept, substream, McEstimate, SamplerConfig};
use crate::error::{Error, Result};

/// Log-density of a one-dimensional gas: Σ single(xᵢ) + Σ_{i<j} pair(xᵢ, xⱼ).
pub trait Gas {
    fn single(&self, x: f64) -> f64;
    fn pair(&self, x: f64, y: f64) -> f64;
    /// Symmetric proposal; `None` leaves the support.
    fn propose(&self, x: f64, step: f64, rng: &mut ChaCha8Rng) -> Option<f64>;
    fn initial(&self) -> Vec<f64>;
    fn initial_step(&self) -> f64;
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiParams {
    pub kappa: f64,
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl JacobiParams {
    pub fn new(kappa: f64, a: f64, b: f64, n: usize) -> Result<Self> {
        if !(kappa >= 0.0 && a > -1.0 && b > -1.0 && n >= 1) {
            return Err(Error::Invalid(format!("Jacobi gas needs κ ≥ 0, a, b > −1, n ≥ 1 (got κ={kappa}, a={a}, b={b}, n={n})")));
        }
        Ok(JacobiParams { kappa, a, b, n })
    }
}

impl Gas for JacobiParams {
    fn single(&self, x: f64) -> f64 {
        self.a * x.ln() + self.b * (1.0 - x).ln()
    }

    fn pair(&self, x: f64, y: f64) -> f64 {
        2.0 * self.kappa * (x - y).abs().ln()
    }

    fn propose(&self, x: f64, step: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
        let y = x + step * (2.0 * rng.gen::<f64>() - 1.0);
        (y > 0.0 && y < 1.0).then_some(y)
    }

    fn initial(&self) -> Vec<f64> {
        (0..self.n).map(|i| (i as f64 + 0.5) / self.n as f64).collect()
    }

    fn initial_step(&self) -> f64 {
        0.5 / self.n as f64
    }
}

/// Angles θ ∈ [−π, π) with weight |1 + e^{iθ}|^{2μ} and |e^{iθ} − e^{iφ}|^{2κ} repulsion.
#[derive(Clone, Debug, PartialEq)]
pub struct CircularParams {
    pub kappa: f64,
    pub mu: f64,
    pub n: usize,
}

impl CircularParams {
    pub fn new(kappa: f64, mu: f64, n: usize) -> Result<Self> {
        if !(kappa >= 0.0 && mu > -0.5 && n >= 1) {
            return Err(Error::Invalid(format!("circular gas needs κ ≥ 0, μ > −1/2, n ≥ 1 (got κ={kappa}, μ={mu}, n={n})")));
        }
        Ok(CircularParams { kappa, mu, n })
    }
}

impl Gas for CircularParams {
    fn single(&self, t: f64) -> f64 {
        if self.mu == 0.0 {
            0.0
        } else {
            self.mu * (2.0 + 2.0 * t.cos()).ln()
        }
    }

    fn pair(&self, t: f64, s: f64) -> f64 {
        self.kappa * (2.0 - 2.0 * (t - s).cos()).ln()
    }

    fn propose(&self, t: f64, step: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
        let s = t + step * (2.0 * rng.gen::<f64>() - 1.0);
        Some((s + PI).rem_euclid(2.0 * PI) - PI)
    }

    fn initial(&self) -> Vec<f64> {
        (0..self.n).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / self.n as f64).collect()
    }

    fn initial_step(&self) -> f64 {
        PI / self.n as f64
    }
}

/// Single-coordinate random-walk Metropolis; the step adapts only during burn-in.
pub struct MetropolisChain<G: Gas> {
    gas: G,
    x: Vec<f64>,
    step: f64,
    rng: ChaCha8Rng,
    accepted: u64,
    proposed: u64,
}

impl<G: Gas> MetropolisChain<G> {
    pub fn new(gas: G, seed: u64) -> Self {
        let x = gas.initial();
        let step = gas.initial_step();
        MetropolisChain { gas, x, step, rng: substream(seed, 0), accepted: 0, proposed: 0 }
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    pub fn acceptance(&self) -> f64 {
        self.accepted as f64 / self.proposed.max(1) as f64
    }

    pub fn sweep(&mut self) -> &[f64] {
        for i in 0..self.x.len() {
            self.proposed += 1;
            let old = self.x[i];
            let Some(new) = self.gas.propose(old, self.step, &mut self.rng) else { continue };
            let mut delta = self.gas.single(new) - self.gas.single(old);
            for (j, &xj) in self.x.iter().enumerate() {
                if j != i {
                    delta += self.gas.pair(new, xj) - self.gas.pair(old, xj);
                }
            }
            if delta.is_nan() {
                continue;
            }
            if metropolis_accept(delta, &mut self.rng) {
                self.x[i] = new;
                self.accepted += 1;
            }
        }
        &self.x
    }

    pub fn burn_in(&mut self, sweeps: u64) {
        const WINDOW: u64 = 100;
        for s in 0..sweeps {
            self.sweep();
            if (s + 1) % WINDOW == 0 {
                let rate = self.acceptance();
                self.step = (self.step * (rate - 0.4).exp()).clamp(1e-6, 4.0);
                self.accepted = 0;
                self.proposed = 0;
            }
        }
        self.accepted = 0;
        self.proposed = 0;
    }

    /// Records `observables` of the state every `thin` sweeps.
    pub fn record(&mut self, cfg: &SamplerConfig, observables: &[&dyn Fn(&[f64]) -> f64]) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity((cfg.sweeps / cfg.thin) as usize); observables.len()];
        for s in 0..cfg.sweeps {
            self.sweep();
            if s % cfg.thin == 0 {
                for (o, f) in out.iter_mut().zip(observables) {
                    o.push(f(&self.x));
                }
            }
        }
        out
    }
}

fn run<G: Gas>(cfg: &SamplerConfig, gas: G, observables: &[&dyn Fn(&[f64]) -> f64]) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    let start = Instant::now();
    let mut chain = MetropolisChain::new(gas, cfg.seed);
    chain.burn_in(cfg.burn_in);
    let series = chain.record(cfg, observables);
    let wall = start.elapsed();
    Ok(series.iter().map(|s| McEstimate::from_batches(s, cfg.batches, cfg.seed, wall)).collect())
}

/// Estimates of ⟨(1/n) Σ yⱼ^k⟩ for each k.
pub fn jacobi_moments(cfg: &SamplerConfig, params: &JacobiParams, ks: &[i32]) -> Result<Vec<McEstimate>> {
    let fs: Vec<Box<dyn Fn(&[f64]) -> f64>> = ks
        .iter()
        .map(|&k| Box::new(move |y: &[f64]| y.iter().map(|v| v.powi(k)).sum::<f64>() / y.len() as f64) as Box<dyn Fn(&[f64]) -> f64>)
        .collect();
    let refs: Vec<&dyn Fn(&[f64]) -> f64> = fs.iter().map(|f| f.as_ref()).collect();
    run(cfg, params.clone(), &refs)
}

/// Estimates of ⟨(1/n) Σ cos(k θⱼ)⟩ for each k.
pub fn circular_cos_moments(cfg: &SamplerConfig, params: &CircularParams, ks: &[u32]) -> Result<Vec<McEstimate>> {
    let fs: Vec<Box<dyn Fn(&[f64]) -> f64>> = ks
        .iter()
        .map(|&k| {
            Box::new(move |t: &[f64]| t.iter().map(|v| (k as f64 * v).cos()).sum::<f64>() / t.len() as f64)
                as Box<dyn Fn(&[f64]) -> f64>
        })
        .collect();
    let refs: Vec<&dyn Fn(&[f64]) -> f64> = fs.iter().map(|f| f.as_ref()).collect();
    run(cfg, params.clone(), &refs)
}
