//! Independent oracles shared by integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use logmax::Rational;

/// Moment of the density ∝ Π y^a(1−y)^b |Δ|^{2κ} for integer κ by expanding the
/// Vandermonde power into monomials and integrating each one with Beta ratios.
pub fn brute_force_moment(kappa: u32, a: &Rational, b: &Rational, n: usize, k: i64) -> Rational {
    let weight = vandermonde_power(n, kappa);
    let beta = |p: i64| beta_ratio(a, b, p);
    let mut norm = Rational::zero();
    let mut acc = Rational::zero();
    for (exps, c) in &weight {
        let base: Vec<Rational> = exps.iter().map(|&e| beta(e)).collect();
        norm = norm + c * &base.iter().cloned().product::<Rational>();
        for i in 0..n {
            let mut t = c.clone();
            for (j, &e) in exps.iter().enumerate() {
                t = t * if i == j { beta(e + k) } else { base[j].clone() };
            }
            acc = acc + t;
        }
    }
    acc.checked_div(&(norm * n as i64)).unwrap()
}

/// ⟨P⟩ for a polynomial given as monomial map, same measure.
pub fn brute_force_average(kappa: u32, a: &Rational, b: &Rational, n: usize, poly: &HashMap<Vec<i64>, Rational>) -> Rational {
    let weight = vandermonde_power(n, kappa);
    let mut norm = Rational::zero();
    let mut acc = Rational::zero();
    for (exps, c) in &weight {
        norm = norm + c * &exps.iter().map(|&e| beta_ratio(a, b, e)).product::<Rational>();
        for (pe, pc) in poly {
            let t: Rational = exps.iter().zip(pe).map(|(&e, &f)| beta_ratio(a, b, e + f)).product();
            acc = acc + c * pc * t;
        }
    }
    acc.checked_div(&norm).unwrap()
}

/// ∫y^{a+p}(1−y)^b / ∫y^a(1−y)^b = Π_{i<p}(a+1+i)/(a+b+2+i), also for p < 0.
pub fn beta_ratio(a: &Rational, b: &Rational, p: i64) -> Rational {
    let mut r = Rational::one();
    if p >= 0 {
        for i in 0..p {
            r = r * (a + 1 + i);
            r = r.checked_div(&(a + b + 2 + i)).unwrap();
        }
    } else {
        for i in p..0 {
            r = r * (a + b + 2 + i);
            r = r.checked_div(&(a + 1 + i)).unwrap();
        }
    }
    r
}

/// Π_{i<j}(y_i − y_j)^{2κ} as a map from exponent vectors to coefficients.
pub fn vandermonde_power(n: usize, kappa: u32) -> HashMap<Vec<i64>, Rational> {
    let mut poly: HashMap<Vec<i64>, Rational> = HashMap::new();
    poly.insert(vec![0; n], Rational::one());
    for i in 0..n {
        for j in i + 1..n {
            for _ in 0..2 * kappa {
                let mut next: HashMap<Vec<i64>, Rational> = HashMap::new();
                for (e, c) in &poly {
                    let mut ei = e.clone();
                    ei[i] += 1;
                    *next.entry(ei).or_insert_with(Rational::zero) += c;
                    let mut ej = e.clone();
                    ej[j] += 1;
                    *next.entry(ej).or_insert_with(Rational::zero) -= c;
                }
                next.retain(|_, c| !c.is_zero());
                poly = next;
            }
        }
    }
    poly
}
