//! Replica (n → 0) disorder averages of the scaled log-correlated models,
//! their freezing at β = 1, and the ensembles derived from the Jacobi one.
//!
//! A model fixes the Jacobi edge exponents as functions of the inverse
//! temperature β, with κ = −β² and n = 0. Every average is computed by the same
//! generic partition sum, so β can be a rational point, the indeterminate of a
//! rational function, or β₀ + ε inside a Laurent series.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{pochhammer, ratfunc_limit_at, reconstruct, with_adaptive_order, Embed, Field, Laurent, RatFunc, Rational, Scalar};
use crate::jacobi_moments::{laguerre_moment, moment, moment_partition_sum, MomentQuery};
use crate::partitions::{enumerate_partitions, Partition};

const MAX_ORDER: usize = 1024;
const RECONSTRUCT_POINTS: usize = 400;

/// Disordered models, parameters in the coefficient field `F`.
#[derive(Clone, Debug, PartialEq)]
pub enum Model<F> {
    /// Characteristic polynomial of GUE: a = b = (q+β²)/2, x = 1 − 2y.
    Gue { q: F },
    /// Log-correlated process on an interval with edge charges: a = βā, b = βb̄.
    Lcgp { abar: F, bbar: F },
    /// Fractional Brownian motion with H → 0 on the unit interval: a = b = 0.
    Fbm0,
    /// Background potential −ā ln z + z; moments are those of z = z_L/β.
    Laguerre { abar: F },
    /// Quadratic background potential; moments are those of z = √(8ā)(y − ½) as ā → ∞.
    Gaussian,
}

impl<F> Model<F> {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Gue { .. } => "gue",
            Model::Lcgp { .. } => "lcgp",
            Model::Fbm0 => "fbm0",
            Model::Laguerre { .. } => "laguerre",
            Model::Gaussian => "gaussian",
        }
    }

    /// Models whose moments are those of y ∈ [0,1].
    pub fn is_jacobi(&self) -> bool {
        matches!(self, Model::Gue { .. } | Model::Lcgp { .. } | Model::Fbm0)
    }
}

impl Model<Rational> {
    pub fn gue() -> Self {
        Model::Gue { q: Rational::one() }
    }
}

impl<F: fmt::Display> fmt::Display for Model<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Gue { q } => write!(f, "gue(q={q})"),
            Model::Lcgp { abar, bbar } => write!(f, "lcgp(abar={abar}, bbar={bbar})"),
            Model::Fbm0 => write!(f, "fbm0"),
            Model::Laguerre { abar } => write!(f, "laguerre(abar={abar})"),
            Model::Gaussian => write!(f, "gaussian"),
        }
    }
}

/// Jacobi query (κ = −β², n = 0) of a Jacobi-type or Laguerre model.
pub fn replica_query<F: Field, S: Embed<F>>(model: &Model<F>, beta: &S, k: i64) -> Result<MomentQuery<S>> {
    let zero = beta.lift_int(0);
    let t = beta.mul(beta);
    let (a, b) = match model {
        Model::Gue { q } => {
            let a = beta.embed(q).add(&t).mul_rat(&Rational::new(1, 2));
            (a.clone(), a)
        }
        Model::Lcgp { abar, bbar } => (beta.mul(&beta.embed(abar)), beta.mul(&beta.embed(bbar))),
        Model::Fbm0 => (zero.clone(), zero.clone()),
        Model::Laguerre { abar } => (beta.mul(&beta.embed(abar)), zero.clone()),
        Model::Gaussian => return Err(Error::Invalid("the Gaussian model has no finite Jacobi parameters".into())),
    };
    Ok(MomentQuery::new(t.neg(), a, b, zero, k))
}

/// Disorder average ⟨y^k⟩ (⟨z^k⟩ for Laguerre) at a scalar β, through the
/// symbolic-n partition sum.
fn replica_moment<F: Field, S: Embed<F>>(model: &Model<F>, beta: &S, k: i64) -> Result<S> {
    let q = replica_query(model, beta, k)?;
    match model {
        Model::Laguerre { .. } => {
            let m = laguerre_moment(&q)?;
            let bk = beta.powi(k.unsigned_abs() as u32);
            if k > 0 {
                m.div(&bk)
            } else {
                Ok(m.mul(&bk))
            }
        }
        _ => moment_partition_sum(&q),
    }
}

/// Disorder average as a rational function of β.
pub fn disorder_moment<F: Field>(model: &Model<F>, k: i64) -> Result<RatFunc<F>> {
    if k == 0 {
        return Err(Error::Invalid("moment order must be nonzero".into()));
    }
    match model {
        Model::Gaussian => {
            if k < 0 {
                return Err(Error::Invalid("Gaussian moments are defined for k > 0".into()));
            }
            reconstruct(|b: &F| gaussian_moment(b, k as u32), RECONSTRUCT_POINTS)
        }
        _ => replica_moment(model, &RatFunc::<F>::x(), k),
    }
}

/// Disorder average at β = β₀, taken as the limit β → β₀ so that points where
/// single partitions are singular are handled exactly.
pub fn disorder_moment_near<F: Field>(model: &Model<F>, beta0: &F, k: i64) -> Result<F> {
    if k == 0 {
        return Err(Error::Invalid("moment order must be nonzero".into()));
    }
    if let Model::Gaussian = model {
        return ratfunc_limit_at(&disorder_moment(model, k)?, beta0);
    }
    with_adaptive_order(8 + k.unsigned_abs() as usize, MAX_ORDER, |order| {
        let beta = Laurent::var(order).add(&Laurent::constant(beta0.clone(), order));
        match replica_moment(model, &beta, k) {
            Ok(v) => v.constant_term(),
            Err(Error::Pole { partition, factor }) => {
                Err(Error::Divergent(format!("partition {partition}: {factor} vanishes identically")))
            }
            Err(e) => Err(e),
        }
    })
}

/// Disorder average at a rational β.
pub fn disorder_moment_at(model: &Model<Rational>, beta: &Rational, k: i64) -> Result<Rational> {
    match model {
        Model::Gue { .. } | Model::Lcgp { .. } | Model::Fbm0 => {
            let q = replica_query(model, beta, k)?;
            match moment_partition_sum(&q) {
                Err(Error::Pole { .. }) | Err(Error::DivisionByZero) => disorder_moment_near(model, beta, k),
                other => other,
            }
        }
        _ => disorder_moment_near(model, beta, k),
    }
}

/// Frozen value: the β → 1 limit of the disorder average.
pub fn freeze<F: Field>(model: &Model<F>, k: i64) -> Result<F> {
    disorder_moment_near(model, &F::one(), k)
}

/// Frozen moments of orders 1..=kmax, computed in parallel.
pub fn frozen_moments<F: Field>(model: &Model<F>, kmax: u32) -> Result<Vec<F>> {
    (1..=kmax as i64).into_par_iter().map(|k| freeze(model, k)).collect()
}

/// Disorder average through the explicit n = 0 sum Σ_λ C¹_λ C²_λ with t = β².
pub fn disorder_moment_explicit<S: Scalar>(t: &S, a: &S, b: &S, k: u32) -> Result<S> {
    if k == 0 {
        return Err(Error::Invalid("moment order must be positive".into()));
    }
    let mut total = t.lift_int(0);
    for lambda in enumerate_partitions(k as usize) {
        total = total.add(&explicit_term(&lambda, t, a, b, k)?);
    }
    Ok(total)
}

fn explicit_term<S: Scalar>(lambda: &Partition, t: &S, a: &S, b: &S, k: u32) -> Result<S> {
    let pole = |factor: &str| Error::Pole { partition: lambda.clone(), factor: factor.to_string() };
    let ell = lambda.length() as i64;
    let part = |i: i64| lambda.part(i as usize) as i64;
    let mut num = t.mul_int(-(k as i64)).mul_rat(&Rational::factorial(part(1) as u32 - 1).pow(2));
    let mut den = t.lift_int(1);
    for i in 1..=ell {
        let li = part(i);
        if i >= 2 {
            let p = pochhammer(&t.mul_int(i - 1), li)?;
            num = num.mul(&p).mul(&p);
        }
        num = num.mul(&pochhammer(&a.add_int(1).add(&t.mul_int(i)), li)?);
        den = den.mul(&pochhammer(&a.add(b).add_int(2).add(&t.mul_int(i + 1)), li)?);
        den = den.mul(&pochhammer(&t.mul_int(i - ell).add_int(1), li)?);
        den = den.mul(&pochhammer(&t.mul_int(i - ell - 1), li)?);
        for j in i + 1..=ell {
            let d = li - part(j);
            num = num.mul(&t.mul_int(i - j).add_int(d));
            den = den.mul(&t.mul_int(i - j));
            num = num.mul(&pochhammer(&t.mul_int(i - j - 1), d)?);
            den = den.mul(&pochhammer(&t.mul_int(i + 1 - j).add_int(1), d)?);
        }
    }
    num.div(&den).map_err(|e| match e {
        Error::DivisionByZero => pole("C¹C² denominator"),
        e => e,
    })
}

/// Raw moments m_1..m_N to cumulants κ_1..κ_N.
pub fn cumulants_from_moments<F: Field>(m: &[F]) -> Vec<F> {
    let mut c: Vec<F> = Vec::with_capacity(m.len());
    for n in 1..=m.len() {
        let mut v = m[n - 1].clone();
        for j in 1..n {
            let w = Rational::binomial(n as u32 - 1, j as u32 - 1);
            v = v.sub(&c[j - 1].mul(&m[n - j - 1]).mul_rat(&w));
        }
        c.push(v);
    }
    c
}

/// Moments of shift + scale·y from the raw moments m_1..m_N of y.
pub fn affine_moments<F: Field>(m: &[F], shift: &F, scale: &F) -> Vec<F> {
    let raw = |j: usize| if j == 0 { F::one() } else { m[j - 1].clone() };
    (1..=m.len())
        .map(|n| {
            (0..=n).fold(F::zero(), |acc, j| {
                let term = raw(j)
                    .mul(&scale.powi(j as u32))
                    .mul(&shift.powi((n - j) as u32))
                    .mul_rat(&Rational::binomial(n as u32, j as u32));
                acc.add(&term)
            })
        })
        .collect()
}

/// Moments about the mean, orders 1..=N.
pub fn central_moments<F: Field>(m: &[F]) -> Vec<F> {
    match m.first() {
        None => Vec::new(),
        Some(mean) => affine_moments(m, &mean.neg(), &F::one()),
    }
}

/// Shape statistics from the first four cumulants; square roots are avoided
/// by reporting the squared skewness with the sign of κ₃.
#[derive(Clone, Debug, PartialEq)]
pub struct Shape<F> {
    pub mean: F,
    pub variance: F,
    pub skewness_squared: F,
    pub skewness_sign: i8,
    pub kurtosis: F,
}

pub fn shape<F>(cumulants: &[F]) -> Result<Shape<F>>
where
    F: Field + Signed,
{
    if cumulants.len() < 4 {
        return Err(Error::Invalid("four cumulants are needed".into()));
    }
    let k2 = &cumulants[1];
    let k3 = &cumulants[2];
    Ok(Shape {
        mean: cumulants[0].clone(),
        variance: k2.clone(),
        skewness_squared: k3.mul(k3).div(&k2.powi(3))?,
        skewness_sign: k3.signum(),
        kurtosis: cumulants[3].div(&k2.mul(k2))?,
    })
}

/// Sign of an element, where it is defined.
pub trait Signed {
    fn signum(&self) -> i8;
}

impl Signed for Rational {
    fn signum(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }
}

/// ⟨z^p⟩ of the Gaussian model at inverse temperature β, from the a = b → ∞
/// expansion of the Jacobi moments in δ = 1/ā. The centered moment must vanish
/// to order δ^{p/2}; an earlier term is an invariant violation.
pub fn gaussian_moment<F: Field>(beta: &F, p: u32) -> Result<F> {
    if p == 0 {
        return Ok(F::one());
    }
    if p % 2 == 1 {
        return Ok(F::zero());
    }
    let half = (p / 2) as i64;
    with_adaptive_order(p as usize + 4, MAX_ORDER, |order| {
        let delta = Laurent::<F>::var(order);
        let b = Laurent::constant(beta.clone(), order);
        let a = b.div(&delta)?;
        let zero = delta.lift_int(0);
        let mut centered = Laurent::constant(F::from_rational(&Rational::new(-1, 2).pow(p as i32)), order);
        for j in 1..=p {
            let q = MomentQuery::new(b.mul(&b).neg(), a.clone(), a.clone(), zero.clone(), j as i64);
            let mj = moment_partition_sum(&q)?;
            let w = Rational::binomial(p, j).mul(&Rational::new(-1, 2).pow((p - j) as i32));
            centered = centered.add(&mj.mul_rat(&w));
        }
        let lead = centered.leading_at(half).map_err(|e| match e {
            Error::Divergent(m) => Error::Internal(format!("Gaussian moment of order {p}: {m}")),
            e => e,
        })?;
        Ok(lead.mul_rat(&Rational::integer(8).pow(half as i32)))
    })
}

/// Gaussian moments ⟨z^p⟩ for p = 1..=pmax.
pub fn gaussian_moments<F: Field>(beta: &F, pmax: u32) -> Result<Vec<F>> {
    (1..=pmax).into_par_iter().map(|p| gaussian_moment(beta, p)).collect()
}

pub fn gaussian_cumulants<F: Field>(beta: &F, pmax: u32) -> Result<Vec<F>> {
    Ok(cumulants_from_moments(&gaussian_moments(beta, pmax)?))
}

/// Gaussian moments ⟨z^p⟩, p = 1..=pmax, as rational functions of β, rebuilt
/// from exact values at rational β.
pub fn gaussian_moments_symbolic(pmax: u32) -> Result<Vec<RatFunc<Rational>>> {
    (1..=pmax)
        .into_par_iter()
        .map(|p| reconstruct(|b: &Rational| gaussian_moment(b, p), RECONSTRUCT_POINTS))
        .collect()
}

/// Cumulant of order p as a rational function of β.
pub fn gaussian_cumulant_symbolic(p: u32) -> Result<RatFunc<Rational>> {
    let c = cumulants_from_moments(&gaussian_moments_symbolic(p)?);
    Ok(c[p as usize - 1].clone())
}

/// Cumulant of order p at a rational β; β = 1 is the frozen value.
pub fn gaussian_cumulant(beta: &Rational, p: u32) -> Result<Rational> {
    ratfunc_limit_at(&gaussian_cumulant_symbolic(p)?, beta)
}

/// Frozen Laguerre moment ⟨z_m^k⟩ at edge charge ā.
pub fn laguerre_frozen<F: Field>(abar: &F, k: i64) -> Result<F> {
    freeze(&Model::Laguerre { abar: abar.clone() }, k)
}

/// A value that rests on an unproven correspondence.
#[derive(Clone, Debug, PartialEq)]
pub struct Conjecture<T>(pub T);

impl<T: fmt::Display> fmt::Display for Conjecture<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (CONJECTURE)", self.0)
    }
}

/// ⟨cos kθ⟩ in the circular ensemble with weight |1 + e^{iθ}|^{2μ}.
pub fn circular_conjecture_eval(kappa: &Rational, mu: &Rational, n: &Rational, k: i64) -> Result<Conjecture<Rational>> {
    let a = -mu - 1 - kappa * (n - 1);
    let b = mu * 2;
    signed_moment(MomentQuery::new(kappa.clone(), a, b, n.clone(), k))
}

/// ⟨Re((i − z)/(i + z))^k⟩ in the Cauchy ensemble with weight (1 + z²)^{−ρ}.
pub fn cauchy_conjecture_eval(kappa: &Rational, rho: &Rational, n: &Rational, k: i64) -> Result<Conjecture<Rational>> {
    let a = -rho.clone();
    let b = rho * 2 - 2 - kappa * (n - 1) * 2;
    signed_moment(MomentQuery::new(kappa.clone(), a, b, n.clone(), k))
}

fn signed_moment(q: MomentQuery<Rational>) -> Result<Conjecture<Rational>> {
    let sign = if q.k % 2 == 0 { 1 } else { -1 };
    Ok(Conjecture(moment(&q)? * sign))
}

/// Jacobi exponent a for the inverse weight z^{−c}(z−1)^b on z > 1, z = 1/y;
/// then ⟨z^k⟩ is the Jacobi moment of order −k.
pub fn inverse_jacobi_a(kappa: &Rational, c: &Rational, b: &Rational, n: &Rational) -> Rational {
    c - 2 - b - kappa * (n - 1) * 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn lcgp_first_moment_symbolic() {
        let m = Model::Lcgp { abar: r(3, 2), bbar: r(1, 3) };
        let f = disorder_moment(&m, 1).unwrap();
        let beta = r(2, 5);
        let expect = (&beta * r(3, 2) + 1 + &beta * &beta) / (&beta * (r(3, 2) + r(1, 3)) + 2 + &beta * &beta * 2);
        assert_eq!(f.eval(&beta).unwrap(), expect);
    }

    #[test]
    fn fbm0_second_moment_symbolic() {
        let f = disorder_moment(&Model::<Rational>::Fbm0, 2).unwrap();
        let t = RatFunc::<Rational>::x().mul(&RatFunc::x());
        let num = t.mul(&t).mul_int(4).add(&t.mul_int(9)).add_int(4);
        let den = t.mul_int(2).add_int(3).mul(&t.mul_int(3).add_int(2)).mul_int(2);
        assert_eq!(f, num.div(&den).unwrap());
    }

    #[test]
    fn gue_frozen_x_moments() {
        let m = frozen_moments(&Model::gue(), 4).unwrap();
        let x = affine_moments(&m, &Rational::one(), &Rational::integer(-2));
        assert_eq!(x[1], r(13, 49));
        assert_eq!(x[3], r(20, 147));
        assert!(x[0].is_zero() && x[2].is_zero());
    }

    #[test]
    fn near_matches_direct_at_regular_point() {
        let m = Model::Lcgp { abar: r(1, 2), bbar: r(2, 1) };
        let beta = r(3, 7);
        for k in [1, 2, 3, -1] {
            assert_eq!(disorder_moment_at(&m, &beta, k).unwrap(), disorder_moment_near(&m, &beta, k).unwrap());
        }
    }

    #[test]
    fn explicit_route_matches() {
        let beta = r(2, 3);
        let m = Model::Lcgp { abar: r(1, 1), bbar: r(5, 2) };
        let q = replica_query(&m, &beta, 1).unwrap();
        for k in 1..=5u32 {
            let e = disorder_moment_explicit(&(&beta * &beta), &q.a, &q.b, k).unwrap();
            assert_eq!(e, disorder_moment_at(&m, &beta, k as i64).unwrap(), "k={k}");
        }
    }

    #[test]
    fn cumulant_recursion() {
        // Poisson(λ): all cumulants equal λ; moments 2, 6, 22 at λ = 2
        let m = vec![r(2, 1), r(6, 1), r(22, 1)];
        assert_eq!(cumulants_from_moments(&m), vec![r(2, 1); 3]);
    }

    #[test]
    fn laguerre_means() {
        let abar = r(3, 4);
        let beta = r(1, 2);
        let m = Model::Laguerre { abar: abar.clone() };
        assert_eq!(disorder_moment_at(&m, &beta, 1).unwrap(), r(2, 1) + &abar + r(1, 2));
        assert_eq!(laguerre_frozen(&abar, 1).unwrap(), &abar + 2);
    }

    #[test]
    fn gaussian_second_moment() {
        assert_eq!(gaussian_moment(&r(1, 2), 2).unwrap(), r(5, 2));
        assert_eq!(gaussian_cumulant(&r(1, 1), 4).unwrap(), r(-1, 1));
    }

    #[test]
    fn circular_first_moment_at_kappa_zero() {
        let mu = r(3, 2);
        let v = circular_conjecture_eval(&Rational::zero(), &mu, &Rational::one(), 1).unwrap();
        assert_eq!(v.0, mu.clone() / (&mu + 1));
        assert!(v.to_string().ends_with("(CONJECTURE)"));
    }

    #[test]
    fn cauchy_at_kappa_zero() {
        let rho = r(7, 2);
        for k in 1..=4 {
            let v = cauchy_conjecture_eval(&Rational::zero(), &rho, &r(3, 1), k).unwrap();
            let y = pochhammer(&(r(1, 1) - &rho), k).unwrap() / pochhammer(&rho, k).unwrap();
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(v.0, y * sign);
        }
    }
}
