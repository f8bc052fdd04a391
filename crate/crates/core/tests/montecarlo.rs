use std::f64::consts::PI;

use logmax::jacobi_moments::moment;
use logmax::montecarlo::*;
use logmax::replica::circular_conjecture_eval;
use logmax::{MomentQuery, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn exact(kappa: Rational, a: Rational, b: Rational, n: i64, k: i64) -> f64 {
    moment(&MomentQuery::new(kappa, a, b, Rational::integer(n), k)).unwrap().to_f64()
}

fn chain_cfg(sweeps: u64, seed: u64) -> SamplerConfig {
    SamplerConfig { sweeps, burn_in: 5_000, batches: 500, seed, ..Default::default() }
}

#[test]
fn jacobi_gas_matches_exact_moments() {
    let p = JacobiParams::new(0.5, 1.0, 2.0, 5).unwrap();
    let ks = [1, 2, -1];
    let est = jacobi_moments(&chain_cfg(200_000, 11), &p, &ks).unwrap();
    for (k, e) in ks.iter().zip(&est) {
        let x = exact(r(1, 2), r(1, 1), r(2, 1), 5, *k as i64);
        assert!(e.within(x, 3.0), "k={k}: {e} vs {x}");
    }
}

#[test]
fn product_measure_at_zero_kappa() {
    let p = JacobiParams::new(0.0, 1.5, 0.5, 3).unwrap();
    let e = &jacobi_moments(&chain_cfg(100_000, 12), &p, &[1]).unwrap()[0];
    assert!(e.within(2.5 / 4.0, 3.0), "{e}");
}

#[test]
fn negative_moment_at_a_three() {
    let p = JacobiParams::new(1.0, 3.0, 1.0, 3).unwrap();
    let e = &jacobi_moments(&chain_cfg(200_000, 13), &p, &[-1]).unwrap()[0];
    let x = exact(r(1, 1), r(3, 1), r(1, 1), 3, -1);
    assert!(e.within(x, 3.0), "{e} vs {x}");
}

#[test]
fn jacobi_params_validated() {
    assert!(JacobiParams::new(-0.1, 1.0, 1.0, 2).is_err());
    assert!(JacobiParams::new(1.0, -1.0, 1.0, 2).is_err());
    assert!(JacobiParams::new(1.0, 1.0, 1.0, 0).is_err());
}

#[test]
fn circular_single_particle_matches_quadrature() {
    let mu = 0.75;
    let m = 200_000;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..m {
        let t = -PI + 2.0 * PI * (i as f64 + 0.5) / m as f64;
        let w = (2.0 + 2.0 * t.cos()).powf(mu);
        num += w * t.cos();
        den += w;
    }
    let p = CircularParams::new(0.0, mu, 1).unwrap();
    let e = &circular_cos_moments(&chain_cfg(200_000, 21), &p, &[1]).unwrap()[0];
    assert!(e.within(num / den, 3.0), "{e} vs {}", num / den);
}

#[test]
fn circular_gas_matches_conjecture() {
    let v = circular_conjecture_eval(&r(1, 1), &r(1, 1), &r(2, 1), 1).unwrap().0.to_f64();
    let p = CircularParams::new(1.0, 1.0, 2).unwrap();
    let e = &circular_cos_moments(&chain_cfg(400_000, 22), &p, &[1]).unwrap()[0];
    assert!(e.within(v, 3.0), "{e} vs {v}");
}

#[test]
fn circular_rotation_symmetry_without_weight() {
    let p = CircularParams::new(1.5, 0.0, 3).unwrap();
    let e = &circular_cos_moments(&chain_cfg(100_000, 23), &p, &[1]).unwrap()[0];
    assert!(e.within(0.0, 3.0), "{e}");
}

#[test]
fn detailed_balance_on_three_states() {
    let w = [0.2f64, 0.5, 0.3];
    let lw: Vec<f64> = w.iter().map(|x| x.ln()).collect();
    let p = discrete_transition_matrix(&lw);
    for i in 0..3 {
        assert!((p[i].iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for j in 0..3 {
            assert!((w[i] * p[i][j] - w[j] * p[j][i]).abs() < 1e-15);
        }
    }
    let path = discrete_metropolis(&lw, 400_000, 31);
    for (s, &target) in w.iter().enumerate() {
        let ind: Vec<f64> = path.iter().map(|&x| (x == s) as u8 as f64).collect();
        let e = McEstimate::from_batches(&ind, 400, 31, Default::default());
        assert!(e.within(target, 3.0), "state {s}: {e}");
    }
}

#[test]
fn chains_are_reproducible() {
    let p = JacobiParams::new(0.5, 1.0, 2.0, 4).unwrap();
    let cfg = chain_cfg(20_000, 41);
    let a = jacobi_moments(&cfg, &p, &[1, 2]).unwrap();
    let b = jacobi_moments(&cfg, &p, &[1, 2]).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.mean.to_bits(), y.mean.to_bits());
        assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
    }
    let c = jacobi_moments(&chain_cfg(20_000, 42), &p, &[1]).unwrap();
    assert_ne!(a[0].mean.to_bits(), c[0].mean.to_bits());
}

#[test]
fn stderr_shrinks_like_inverse_root() {
    let p = JacobiParams::new(0.5, 1.0, 2.0, 3).unwrap();
    let cfg = |sweeps, seed| SamplerConfig { sweeps, burn_in: 5_000, batches: 2000, seed, ..Default::default() };
    let short = &jacobi_moments(&cfg(400_000, 51), &p, &[1]).unwrap()[0];
    let long = &jacobi_moments(&cfg(800_000, 52), &p, &[1]).unwrap()[0];
    let ratio = short.stderr / long.stderr;
    assert!((1.3..=1.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn gue_spectrum_and_argmax_sanity() {
    let cfg = SamplerConfig { realizations: 200, grid: 1024, seed: 61, ..Default::default() };
    let g = sample_gue_argmax(&cfg, 100).unwrap();
    assert_eq!(g.discarded, 0);
    assert!(g.spectrum_m2.within(0.25, 3.0), "{}", g.spectrum_m2);
    assert!(g.positions.iter().all(|x| (-1.0..=1.0).contains(x)));
    let mean = McEstimate::from_iid(&g.positions, 61, Default::default());
    assert!(mean.within(0.0, 3.0), "{mean}");
    let again = sample_gue_argmax(&cfg, 100).unwrap();
    assert_eq!(g.positions, again.positions);
    assert!(sample_gue_argmax(&cfg, 10).is_err());
}

#[test]
fn finite_size_variable_values() {
    assert!((finite_size_variable(1000) - 1.0 / (10.0 * 1000f64.ln().powi(3))).abs() < 1e-18);
    assert!(finite_size_variable(1000) < finite_size_variable(200));
}

#[test]
fn fbm0_argmin_symmetry_small() {
    let f = Fbm0Factor::new(512, 1.0 / 128.0, 1.0).unwrap();
    let cfg = SamplerConfig { realizations: 1000, seed: 71, ..Default::default() };
    let a = sample_fbm0_argmin(&cfg, &f).unwrap();
    assert!(a.centered.within(0.0, 3.0), "{}", a.centered);
    let b = sample_fbm0_argmin(&cfg, &f).unwrap();
    assert_eq!(a.positions, b.positions);
}

#[test]
fn fbm0_wide_regularization_pushes_minimum_to_edges() {
    let cfg = SamplerConfig { realizations: 1000, seed: 72, ..Default::default() };
    let edge_fraction = |eta: f64| {
        let f = Fbm0Factor::new(256, eta, 1.0).unwrap();
        let a = sample_fbm0_argmin(&cfg, &f).unwrap();
        a.positions.iter().filter(|&&y| y == 0.0 || y == 1.0).count() as f64 / a.positions.len() as f64
    };
    let fr: Vec<f64> = [1.0 / 64.0, 1.0 / 8.0, 1.0].iter().map(|&e| edge_fraction(e)).collect();
    assert!(fr[0] < fr[1] && fr[1] < fr[2], "{fr:?}");
}
