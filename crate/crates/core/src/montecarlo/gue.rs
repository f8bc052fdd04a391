use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use super::tridiag::SymTridiagonal;
use super::{substream, McEstimate, SamplerConfig};
use crate::error::{Error, Result};

/// Moments of the position x_m ∈ [−1, 1] of the maximum of the centered
/// log-modulus of GUE characteristic polynomials.
#[derive(Clone, Debug)]
pub struct GueArgmax {
    pub n: usize,
    pub x2: McEstimate,
    pub x4: McEstimate,
    /// E (1 − x_m)^{−1}
    pub inverse: McEstimate,
    pub kurtosis: McEstimate,
    /// (1/N) Σ λᵢ², 1/4 for the semicircle on [−1, 1]
    pub spectrum_m2: McEstimate,
    pub scale_variable: f64,
    pub discarded: usize,
    pub positions: Vec<f64>,
}

/// 1/[10 (ln N)³]
pub fn finite_size_variable(n: usize) -> f64 {
    1.0 / (10.0 * (n as f64).ln().powi(3))
}

/// Spectrum of the tridiagonal β = 2 Hermite model, scaled to the semicircle on [−1, 1].
fn gue_spectrum(n: usize, seed: u64, index: u64) -> Result<Vec<f64>> {
    let mut rng = substream(seed, index);
    let diag: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let off: Vec<f64> = (1..n)
        .map(|i| Gamma::new((n - i) as f64, 1.0).expect("positive shape").sample(&mut rng).sqrt())
        .collect();
    let scale = 1.0 / (2.0 * (n as f64).sqrt());
    let t = SymTridiagonal::new(diag.iter().map(|d| d * scale).collect(), off.iter().map(|o| o * scale).collect())?;
    t.eigenvalues()
}

/// 2 Σ ln|x − λᵢ| minus its large-N mean N(2x² − 1 − 2 ln 2).
fn centered_log_modulus(x: f64, spectrum: &[f64]) -> f64 {
    let mut s = 0.0;
    for chunk in spectrum.chunks(8) {
        let p: f64 = chunk.iter().map(|l| (x - l).abs()).product();
        s += p.ln();
    }
    2.0 * s - spectrum.len() as f64 * (2.0 * x * x - 1.0 - 2.0 * LN_2)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Argmax over Chebyshev nodes, refined by golden section inside the eigenvalue
/// gaps of the best nodes (the objective is concave within each gap).
fn argmax(spectrum: &[f64], grid: usize) -> f64 {
    const CANDIDATES: usize = 4;
    let f = |x: f64| centered_log_modulus(x, spectrum);
    let mut nodes: Vec<(f64, f64)> = (0..grid)
        .map(|j| {
            let x = (PI * (j as f64 + 0.5) / grid as f64).cos();
            (x, f(x))
        })
        .collect();
    nodes.sort_by(|p, q| q.1.total_cmp(&p.1));
    let mut best = nodes[0];
    for &(x, _) in nodes.iter().take(CANDIDATES) {
        let i = spectrum.partition_point(|&l| l < x);
        let lo = if i > 0 { spectrum[i - 1].max(-1.0) } else { -1.0 };
        let hi = if i < spectrum.len() { spectrum[i].min(1.0) } else { 1.0 };
        if lo < hi {
            let cand = golden_max(f, lo, hi);
            if cand.1 > best.1 {
                best = cand;
            }
        }
    }
    best.0
}

fn jackknife_kurtosis(xs: &[f64], blocks: usize, seed: u64, wall: std::time::Duration) -> McEstimate {
    let kurt = |sel: &mut dyn Iterator<Item = &f64>| {
        let (mut m2, mut m4, mut c) = (0.0, 0.0, 0.0);
        for x in sel {
            let x2 = x * x;
            m2 += x2;
            m4 += x2 * x2;
            c += 1.0;
        }
        (m4 / c) / (m2 / c).powi(2) - 3.0
    };
    let full = kurt(&mut xs.iter());
    let size = xs.len() / blocks;
    let leave: Vec<f64> = (0..blocks)
        .map(|b| kurt(&mut xs[..b * size].iter().chain(&xs[(b + 1) * size..blocks * size])))
        .collect();
    let mean = leave.iter().sum::<f64>() / blocks as f64;
    let var = leave.iter().map(|v| (v - mean).powi(2)).sum::<f64>() * (blocks - 1) as f64 / blocks as f64;
    McEstimate { mean: full, stderr: var.sqrt(), samples: xs.len() as u64, seed, wall }
}

pub fn sample_gue_argmax(cfg: &SamplerConfig, n: usize) -> Result<GueArgmax> {
    if n < 50 {
        return Err(Error::Invalid("GUE argmax needs N ≥ 50".into()));
    }
    if cfg.grid < 256 || cfg.realizations < 2 {
        return Err(Error::Invalid("grid ≥ 256 and at least 2 realizations".into()));
    }
    let start = Instant::now();
    let runs: Vec<Option<(f64, f64)>> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let spectrum = gue_spectrum(n, cfg.seed, r).ok()?;
            let m2 = spectrum.iter().map(|l| l * l).sum::<f64>() / n as f64;
            Some((argmax(&spectrum, cfg.grid), m2))
        })
        .collect();
    let wall = start.elapsed();
    let kept: Vec<(f64, f64)> = runs.iter().flatten().copied().collect();
    let discarded = runs.len() - kept.len();
    if kept.len() < 2 {
        return Err(Error::Numerical(format!("{discarded} of {} realizations failed", runs.len())));
    }
    let xs: Vec<f64> = kept.iter().map(|p| p.0).collect();
    let col = |f: &dyn Fn(f64) -> f64| -> Vec<f64> { xs.iter().map(|&x| f(x)).collect() };
    let est = |v: Vec<f64>| McEstimate::from_iid(&v, cfg.seed, wall);
    Ok(GueArgmax {
        n,
        x2: est(col(&|x| x * x)),
        x4: est(col(&|x| x.powi(4))),
        inverse: est(col(&|x| 1.0 / (1.0 - x))),
        kurtosis: jackknife_kurtosis(&xs, 20.min(xs.len()), cfg.seed, wall),
        spectrum_m2: est(kept.iter().map(|p| p.1).collect()),
        scale_variable: finite_size_variable(n),
        discarded,
        positions: xs,
    })
}
