//! Value of the global minimum V_m (Laplace transform and cumulants, through
//! Barnes G, polygamma and ζ at configurable precision) and the correlations
//! between position and value, from the n-dependence of the moments at β = 1.

use rug::float::Constant;
use rug::ops::Pow;
pub use rug::Float;

use crate::error::{Error, Result};
use crate::exactnum::{reconstruct, with_adaptive_order, Laurent, Poly, RatFunc, Rational, Scalar};
use crate::jacobi_moments::{laguerre_moment, moment_partition_sum, MomentQuery};
use crate::replica::Model;

pub const DEFAULT_DIGITS: u32 = 50;

/// Caveat attached to every fBm0 quantity that goes beyond position moments.
pub const FBM0_CAVEAT: &str =
    "fbm0: the edge exponent depends on n, so the continuation in n is unverified for this model";

/// Frozen (β = 1) edge exponents of a model with n-independent a, b.
#[derive(Clone, Debug, PartialEq)]
pub struct VmSpec {
    pub a: Rational,
    pub b: Rational,
    pub digits: u32,
}

impl VmSpec {
    pub fn new(a: Rational, b: Rational, digits: u32) -> Result<Self> {
        if !(&a + 2 > 0 && &b + 2 > 0 && &a + &b + 4 > 0) {
            return Err(Error::Invalid(format!("edge exponents a={a}, b={b} are in the binding regime")));
        }
        if digits == 0 {
            return Err(Error::Invalid("precision must be at least one digit".into()));
        }
        Ok(VmSpec { a, b, digits })
    }

    pub fn for_model(model: &Model<Rational>, digits: u32) -> Result<Self> {
        match model {
            Model::Gue { q } => {
                let a = (q + 1) / Rational::integer(2);
                VmSpec::new(a.clone(), a, digits)
            }
            Model::Lcgp { abar, bbar } => VmSpec::new(abar.clone(), bbar.clone(), digits),
            Model::Fbm0 => Err(Error::Invalid(format!(
                "{FBM0_CAVEAT}; the continued Laplace transform of V_m is not that of a probability and is not exposed"
            ))),
            other => Err(Error::Invalid(format!("no value-of-minimum formula for {}", other.name()))),
        }
    }

    /// Working precision in bits, with guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64
    }
}

pub fn to_float(q: &Rational, bits: u32) -> Float {
    let n = Float::with_val(bits, Float::parse(q.numer().to_string()).expect("integer literal"));
    let d = Float::with_val(bits, Float::parse(q.denom().to_string()).expect("integer literal"));
    n / d
}

/// Decimal rendering with `digits` significant digits.
pub fn format_float(x: &Float, digits: u32) -> String {
    x.to_string_radix(10, Some(digits as usize))
}

fn bernoulli_even(count: usize) -> Vec<Rational> {
    // B_0..B_{2·count}, returned at even indices only
    let m = 2 * count;
    let mut b = vec![Rational::one()];
    for n in 1..=m {
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += &(Rational::binomial(n as u32 + 1, k as u32) * bk.clone());
        }
        b.push(-s / Rational::integer(n as i64 + 1));
    }
    (1..=count).map(|j| b[2 * j].clone()).collect()
}

/// Hurwitz ζ(s, z) for integer s ≥ 2 and z > 0, by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: u32, z: &Float) -> Result<Float> {
    if s < 2 {
        return Err(Error::Invalid("Hurwitz zeta needs s ≥ 2".into()));
    }
    if *z <= 0 {
        return Err(Error::Invalid("Hurwitz zeta needs z > 0".into()));
    }
    let bits = z.prec();
    let digits = (bits as f64 / std::f64::consts::LOG2_10) as usize;
    let n = 2 * digits + 20;
    let terms = digits / 2 + 10;
    let mut sum = Float::with_val(bits, 0);
    for k in 0..n {
        let t = Float::with_val(bits, z + k as u32);
        sum += t.pow(-(s as i32));
    }
    let w = Float::with_val(bits, z + n as u32);
    let ws = Float::with_val(bits, w.clone().pow(-(s as i32)));
    sum += Float::with_val(bits, &ws * &w) / (s - 1);
    sum += Float::with_val(bits, &ws / 2u32);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j−2) · w^{−s−2j+1}
    let w2 = Float::with_val(bits, &w * &w);
    let mut pow = Float::with_val(bits, &ws / &w);
    let mut rising = Rational::integer(s as i64);
    let mut fact = Rational::integer(2);
    for (j, b) in bernoulli_even(terms).iter().enumerate() {
        let j = j as i64 + 1;
        if j > 1 {
            rising = rising * (Rational::integer(s as i64 + 2 * j - 3) * Rational::integer(s as i64 + 2 * j - 2));
            fact = fact * Rational::integer((2 * j - 1) * 2 * j);
            pow /= &w2;
        }
        let c = b.clone() * rising.clone() / fact.clone();
        sum += to_float(&c, bits) * &pow;
    }
    Ok(sum)
}

/// Polygamma ψ_m(z), z > 0; ψ₀ is the digamma function.
pub fn polygamma(m: u32, z: &Float) -> Result<Float> {
    if m == 0 {
        return Ok(z.clone().digamma());
    }
    let f = to_float(&Rational::factorial(m), z.prec());
    let h = hurwitz_zeta(m + 1, z)?;
    let v = f * h;
    Ok(if m % 2 == 1 { v } else { -v })
}

/// ln G(z) for real z > 0 (Barnes G), from the Taylor series of ln G(1 + x)
/// on |x| ≤ ½ and the recursion G(z+1) = Γ(z)G(z).
pub fn ln_barnes_g(z: &Float) -> Result<Float> {
    if *z <= 0 {
        return Err(Error::Invalid(format!("Barnes G argument {} is not positive", z.to_f64())));
    }
    let bits = z.prec();
    let mut w = z.clone();
    let mut shift = Float::with_val(bits, 0);
    while w >= 1.5 {
        w -= 1u32;
        shift += w.clone().ln_gamma();
    }
    while w < 0.5 {
        shift -= w.clone().ln_gamma();
        w += 1u32;
    }
    let x = Float::with_val(bits, &w - 1u32);
    let pi = Float::with_val(bits, Constant::Pi);
    let euler = Float::with_val(bits, Constant::Euler);
    let ln2pi = Float::with_val(bits, &pi * 2u32).ln();
    let mut acc = Float::with_val(bits, &x * (ln2pi - 1u32)) / 2u32;
    let x2 = Float::with_val(bits, &x * &x);
    acc -= Float::with_val(bits, &x2 * (euler + 1u32)) / 2u32;
    let mut xp = Float::with_val(bits, &x2 * &x);
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32)));
    for k in 3u32.. {
        let t = Float::with_val(bits, Float::zeta_u(k - 1)) * &xp / k;
        if k % 2 == 0 {
            acc -= &t;
        } else {
            acc += &t;
        }
        if t.clone().abs() < eps {
            break;
        }
        xp *= &x;
    }
    Ok(acc + shift)
}

/// E e^{−n V_m} = Γ(1−n) S(n) with S the Barnes G ratio; n < 1.
pub fn vm_laplace(spec: &VmSpec, n: &Rational) -> Result<Float> {
    if *n >= 1 {
        return Err(Error::Invalid("the Laplace transform of V_m needs n < 1".into()));
    }
    let bits = spec.bits();
    let f = |q: Rational| to_float(&q, bits);
    let (a, b) = (&spec.a, &spec.b);
    let g = |q: Rational| ln_barnes_g(&f(q));
    let num = g(a + 2)? + g(b + 2)? + g(a + b + 4 - n * 2)?;
    let den = g(Rational::one() - n)? + g(a + 2 - n)? + g(b + 2 - n)? + g(a + b + 4 - n)?;
    let lg = f(Rational::one() - n).ln_gamma();
    Ok((lg + num - den).exp())
}

fn phi(p: u32, z: &Float) -> Result<Float> {
    let zm1 = Float::with_val(z.prec(), z - 1u32);
    let mut v = zm1 * polygamma(p - 1, z)?;
    if p >= 2 {
        v += polygamma(p - 2, z)? * (p - 1);
    }
    Ok(v)
}

/// p-th cumulant of V_m.
pub fn vm_cumulant(spec: &VmSpec, p: u32) -> Result<Float> {
    if p == 0 {
        return Err(Error::Invalid("cumulant order must be positive".into()));
    }
    let bits = spec.bits();
    let f = |q: Rational| to_float(&q, bits);
    let (a, b) = (&spec.a, &spec.b);
    let scale = Float::with_val(bits, (1u64 << p) - 1);
    let mut v = scale * phi(p, &f(a + b + 4))? - phi(p, &f(a + 2))? - phi(p, &f(b + 2))?;
    let euler = Float::with_val(bits, Constant::Euler);
    let pi = Float::with_val(bits, Constant::Pi);
    let gumbel = match p {
        1 => -euler - Float::with_val(bits, &pi * 2u32).ln(),
        2 => euler + Float::with_val(bits, &pi * &pi) / 6u32,
        _ => {
            let z = Float::with_val(bits, Float::zeta_u(p)) + Float::with_val(bits, Float::zeta_u(p - 1));
            let s = to_float(&Rational::factorial(p - 1), bits) * z;
            if p % 2 == 0 {
                s
            } else {
                -s
            }
        }
    };
    v += gumbel;
    Ok(v)
}

/// Query at inverse temperature β with n replicas: κ = −β², and the fBm0 edge
/// exponent a = 2β²n.
fn query_with_n<S: Scalar>(model: &Model<Rational>, beta: &S, n: &S, k: i64) -> Result<MomentQuery<S>> {
    let t = beta.mul(beta);
    let c = |q: &Rational| beta.lift(q);
    let (a, b) = match model {
        Model::Gue { q } => {
            let a = c(q).add(&t).mul_rat(&Rational::new(1, 2));
            (a.clone(), a)
        }
        Model::Lcgp { abar, bbar } => (beta.mul(&c(abar)), beta.mul(&c(bbar))),
        Model::Fbm0 => (t.mul(n).mul_int(2), beta.lift_int(0)),
        Model::Laguerre { abar } => (beta.mul(&c(abar)), beta.lift_int(0)),
        Model::Gaussian => return Err(Error::Invalid("no n-dependent moments for the Gaussian model".into())),
    };
    Ok(MomentQuery::new(t.neg(), a, b, n.clone(), k))
}

/// M̄_k(s): the k-th moment at β → 1 with βn = s held fixed.
pub fn mbar_at(model: &Model<Rational>, s: &Rational, k: i64) -> Result<Rational> {
    with_adaptive_order(8 + k.unsigned_abs() as usize, 1024, |order| {
        let beta = Laurent::<Rational>::var(order).add_int(1);
        let n = beta.lift(s).div(&beta)?;
        let q = query_with_n(model, &beta, &n, k)?;
        let v = match model {
            Model::Laguerre { .. } => laguerre_moment(&q)?.div(&beta.powi(k.unsigned_abs() as u32))?,
            _ => moment_partition_sum(&q)?,
        };
        v.constant_term()
    })
}

/// M̄_k as a rational function of s.
pub fn mbar_function(model: &Model<Rational>, k: i64) -> Result<RatFunc<Rational>> {
    if k <= 0 {
        return Err(Error::Invalid("M̄_k is defined for k ≥ 1".into()));
    }
    reconstruct(|s: &Rational| mbar_at(model, s, k), 400)
}

/// M̄ of the observable Σ_j c_j y^j (c_0 is the constant term).
pub fn mbar_polynomial(model: &Model<Rational>, observable: &Poly<Rational>) -> Result<RatFunc<Rational>> {
    let mut acc = RatFunc::constant(observable.coeff(0));
    for (j, c) in observable.coeffs().iter().enumerate().skip(1) {
        if !c.is_zero() {
            acc = acc.add(&mbar_function(model, j as i64)?.mul(&RatFunc::constant(c.clone())));
        }
    }
    Ok(acc)
}

/// Position–value correlation of an observable of y_m.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationQuery {
    pub model: Model<Rational>,
    pub observable: Poly<Rational>,
    /// 1: ⟨(O − ⟨O⟩)(V − ⟨V⟩)⟩ = −M̄′(0); 2: ⟨(O − ⟨O⟩)(V − ⟨V⟩)²⟩ = M̄″(0).
    pub order: u32,
}

impl CorrelationQuery {
    /// Observable y^k.
    pub fn moment(model: Model<Rational>, k: usize, order: u32) -> Self {
        let mut c = vec![Rational::zero(); k + 1];
        c[k] = Rational::one();
        CorrelationQuery { model, observable: Poly::new(c), order }
    }

    /// Observable x^k with x = 1 − 2y.
    pub fn x_moment(model: Model<Rational>, k: u32, order: u32) -> Self {
        let x = Poly::from_ints(&[1, -2]);
        CorrelationQuery { model, observable: x.pow(k), order }
    }
}

/// Sign conventions: the first-order LCGP correlation is (b̄ − ā)/(ā + b̄ + 4)².
pub fn position_value_correlation(q: &CorrelationQuery) -> Result<Rational> {
    let m = mbar_polynomial(&q.model, &q.observable)?;
    let zero = Rational::zero();
    match q.order {
        1 => Ok(-m.derivative().eval(&zero)?),
        2 => m.derivative().derivative().eval(&zero),
        o => Err(Error::Invalid(format!("correlation order {o} is not supported (1 or 2)"))),
    }
}

/// Caveat that must accompany n-dependent quantities of this model.
pub fn caveat(model: &Model<Rational>) -> Option<&'static str> {
    matches!(model, Model::Fbm0).then_some(FBM0_CAVEAT)
}

/// Finite-difference weights for the m-th derivative at 0 on the given offsets.
pub fn fd_weights(m: usize, offsets: &[f64]) -> Vec<f64> {
    // Fornberg's recursion
    let n = offsets.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// E(O | V_m = v) on a uniform grid, as (1/Q) M̄(∂_v) Q with M̄ truncated at
/// `order` and derivatives by central differences of width `2·half_width + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalMoment {
    pub values: Vec<Option<f64>>,
    pub caveat: Option<&'static str>,
}

pub fn conditional_moment(
    model: &Model<Rational>,
    observable: &Poly<Rational>,
    q: &[f64],
    h: f64,
    order: usize,
    half_width: usize,
) -> Result<ConditionalMoment> {
    if h <= 0.0 {
        return Err(Error::Invalid("grid spacing must be positive".into()));
    }
    if half_width * 2 < order {
        return Err(Error::Invalid("stencil too narrow for the truncation order".into()));
    }
    let m = mbar_polynomial(model, observable)?;
    let taylor = with_adaptive_order(order + 2, 1024, |o| {
        let l = Laurent::from_ratfunc_at(&m, &Rational::zero(), o)?;
        (0..=order as i64).map(|j| l.coeff(j).ok_or(Error::Precision)).collect::<Result<Vec<_>>>()
    })?;
    let offsets: Vec<f64> = (-(half_width as i64)..=half_width as i64).map(|i| i as f64).collect();
    let weights: Vec<Vec<f64>> = (0..=order)
        .map(|j| fd_weights(j, &offsets).into_iter().map(|w| w / h.powi(j as i32)).collect())
        .collect();
    let w = half_width;
    let mut values = vec![None; q.len()];
    for i in w..q.len().saturating_sub(w) {
        if !(q[i] > 0.0) {
            return Err(Error::Invalid(format!("density is not positive at grid point {i}")));
        }
        let mut acc = 0.0;
        for (j, c) in taylor.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d: f64 = weights[j].iter().zip(&q[i - w..=i + w]).map(|(a, b)| a * b).sum();
            acc += c.to_f64() * d;
        }
        values[i] = Some(acc / q[i]);
    }
    Ok(ConditionalMoment { values, caveat: caveat(model) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: &Float, y: f64, tol: f64) -> bool {
        (x.to_f64() - y).abs() < tol
    }

    #[test]
    fn barnes_g_integers() {
        let bits = 200;
        for (z, g) in [(1u32, 1.0f64), (2, 1.0), (3, 1.0), (4, 2.0), (5, 12.0), (6, 288.0)] {
            let v = ln_barnes_g(&Float::with_val(bits, z)).unwrap().exp();
            assert!(close(&v, g, 1e-12), "G({z})");
        }
    }

    #[test]
    fn polygamma_at_one() {
        // ψ₁(1) = π²/6, ψ₂(1) = −2ζ(3)
        let one = Float::with_val(200, 1);
        let pi = std::f64::consts::PI;
        assert!(close(&polygamma(1, &one).unwrap(), pi * pi / 6.0, 1e-14));
        assert!(close(&polygamma(2, &one).unwrap(), -2.0 * 1.2020569031595942, 1e-14));
    }

    #[test]
    fn laplace_normalized() {
        let s = VmSpec::new(Rational::new(1, 2), Rational::integer(3), 30).unwrap();
        assert!(close(&vm_laplace(&s, &Rational::zero()).unwrap(), 1.0, 1e-25));
    }

    #[test]
    fn fbm0_refused() {
        assert!(VmSpec::for_model(&Model::Fbm0, 30).is_err());
    }

    #[test]
    fn fornberg_second_derivative() {
        let w = fd_weights(2, &[-1.0, 0.0, 1.0]);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
    }
}
