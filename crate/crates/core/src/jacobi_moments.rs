//! Integer moments ⟨(1/n)Σ y_j^k⟩ of the β-Jacobi density
//! ∝ Π y^a (1−y)^b |Δ(y)|^{2κ} on [0,1]^n, as exact sums over partitions of |k|.
//!
//! Everything is generic over [`Scalar`], so the same code evaluates at rational
//! points, symbolically in one indeterminate, or as a Laurent expansion around a
//! singular point. Normalization prefactors that cancel in normalized moments
//! are never computed.
//!
//! The factor (1/n)(κn)_{λ₁} is always rewritten as κ(κn+1)_{λ₁−1}, so every
//! formula stays finite at n = 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{pochhammer, ratfunc_limit_at, with_adaptive_order, Field, Laurent, RatFunc, Rational, Scalar};
use crate::partitions::{c_norm, enumerate_partitions, theta_onek, Partition};

/// Parameters (κ, a, b, n) and signed order k of one moment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentQuery<S> {
    pub kappa: S,
    pub a: S,
    pub b: S,
    pub n: S,
    pub k: i64,
}

impl<S: Scalar> MomentQuery<S> {
    pub fn new(kappa: S, a: S, b: S, n: S, k: i64) -> Self {
        MomentQuery { kappa, a, b, n, k }
    }

    pub fn with_k(&self, k: i64) -> Self {
        MomentQuery { k, ..self.clone() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MomentQuery<T> {
        MomentQuery { kappa: f(&self.kappa), a: f(&self.a), b: f(&self.b), n: f(&self.n), k: self.k }
    }
}

impl MomentQuery<Rational> {
    pub fn from_ints(kappa: (i64, i64), a: (i64, i64), b: (i64, i64), n: i64, k: i64) -> Self {
        MomentQuery {
            kappa: Rational::new(kappa.0, kappa.1),
            a: Rational::new(a.0, a.1),
            b: Rational::new(b.0, b.1),
            n: Rational::integer(n),
            k,
        }
    }
}

/// Accumulates numerator and denominator products separately and divides once,
/// naming the first vanishing denominator factor.
struct Fraction<'a, S> {
    num: S,
    den: S,
    lambda: &'a Partition,
}

impl<'a, S: Scalar> Fraction<'a, S> {
    fn new(unit: &S, lambda: &'a Partition) -> Self {
        Fraction { num: unit.lift_int(1), den: unit.lift_int(1), lambda }
    }

    fn times(&mut self, f: &S) {
        self.num = self.num.mul(f);
    }

    fn over(&mut self, f: &S, label: impl FnOnce() -> String) -> Result<()> {
        if f.is_zero() {
            if let Err(Error::Precision) = f.inv() {
                return Err(Error::Precision);
            }
            return Err(Error::Pole { partition: self.lambda.clone(), factor: label() });
        }
        self.den = self.den.mul(f);
        Ok(())
    }

    /// Multiply by (x)_m, factor by factor.
    fn poch(&mut self, x: &S, m: i64, label: impl Fn() -> String) -> Result<()> {
        if m >= 0 {
            for i in 0..m {
                self.times(&x.add_int(i));
            }
        } else {
            for i in m..0 {
                self.over(&x.add_int(i), &label)?;
            }
        }
        Ok(())
    }

    /// Divide by (x)_m.
    fn over_poch(&mut self, x: &S, m: i64, label: impl Fn() -> String) -> Result<()> {
        if m >= 0 {
            for i in 0..m {
                self.over(&x.add_int(i), &label)?;
            }
        } else {
            for i in m..0 {
                self.times(&x.add_int(i));
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<S> {
        if self.num.is_zero() {
            return Ok(self.num);
        }
        self.num.div(&self.den)
    }
}

/// At integer n < ℓ(λ) the factor (κ(n−i+1))_{λᵢ} vanishes at i = n+1: Jack
/// polynomials in fewer variables than parts are zero, whatever the other factors do.
fn too_long<S: Scalar>(lambda: &Partition, n: &S) -> bool {
    (2..=lambda.length() as i64).any(|i| n.add_int(1 - i).is_zero())
}

/// A_λ: the parameter-free part of each partition term (depends on κ, n).
fn coefficient<S: Scalar>(f: &mut Fraction<S>, lambda: &Partition, kappa: &S, n: &S, k: i64) -> Result<()> {
    let l = lambda.length() as i64;
    let part = |i: i64| lambda.part(i as usize) as i64;
    let l1 = part(1);
    f.times(&kappa.lift_int(k));
    f.times(&kappa.lift(&Rational::factorial((l1 - 1) as u32)));
    f.over_poch(&kappa.mul_int(l - 1).add_int(1), l1, || "(κ(ℓ−1)+1)_{λ₁}".into())?;
    for i in 2..=l {
        f.poch(&kappa.mul_int(1 - i), part(i), || format!("(κ(1−i))_{{λᵢ}}, i={i}"))?;
        f.over_poch(&kappa.mul_int(l - i).add_int(1), part(i), || format!("(κ(ℓ−i)+1)_{{λᵢ}}, i={i}"))?;
    }
    for i in 1..=l {
        for j in i + 1..=l {
            let d = part(i) - part(j);
            let kj = kappa.mul_int(j - i);
            f.times(&kj.add_int(d));
            f.over(&kj, || format!("κ(j−i), i={i} j={j}"))?;
        }
    }
    // (1/n)(κn)_{λ₁} = κ(κn+1)_{λ₁−1}
    let kn = kappa.mul(n);
    f.times(kappa);
    f.poch(&kn.add_int(1), l1 - 1, || "(κn+1)_{λ₁−1}".into())?;
    f.over_poch(&kappa.mul_int(l), l1, || "(κℓ)_{λ₁}".into())?;
    for i in 2..=l {
        f.poch(&kn.add(&kappa.mul_int(1 - i)), part(i), || format!("(κ(n−i+1))_{{λᵢ}}, i={i}"))?;
        f.over_poch(&kappa.mul_int(l - i + 1), part(i), || format!("(κ(ℓ−i+1))_{{λᵢ}}, i={i}"))?;
    }
    for i in 1..=l {
        for j in i + 1..=l {
            let d = part(i) - part(j);
            f.poch(&kappa.mul_int(j - i + 1), d, || format!("(κ(j−i+1))_{{λᵢ−λⱼ}}, i={i} j={j}"))?;
            f.over_poch(&kappa.mul_int(j - i - 1).add_int(1), d, || format!("(κ(j−i−1)+1)_{{λᵢ−λⱼ}}, i={i} j={j}"))?;
        }
    }
    Ok(())
}

/// Jacobi weight y^a(1−y)^b, or its b → ∞ limit z^a e^{−z} with y = z/b.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Weight {
    Jacobi,
    Laguerre,
}

/// Edge-parameter factor for k > 0.
fn edge_positive<S: Scalar>(f: &mut Fraction<S>, lambda: &Partition, q: &MomentQuery<S>, w: Weight) -> Result<()> {
    let ab2 = q.a.add(&q.b).add_int(2);
    for i in 1..=lambda.length() as i64 {
        let li = lambda.part(i as usize) as i64;
        let ni = q.n.add_int(-i);
        f.poch(&q.a.add_int(1).add(&q.kappa.mul(&ni)), li, || format!("(a+1+κ(n−i))_{{λᵢ}}, i={i}"))?;
        if w == Weight::Laguerre {
            continue;
        }
        let x = ab2.add(&q.kappa.mul(&q.n.mul_int(2).add_int(-i - 1)));
        f.over_poch(&x, li, || format!("(a+b+2+κ(2n−i−1))_{{λᵢ}}, i={i}"))?;
    }
    Ok(())
}

/// Edge-parameter factor for k < 0, with the shift l (l = 0 is the plain form).
fn edge_negative<S: Scalar>(f: &mut Fraction<S>, lambda: &Partition, q: &MomentQuery<S>, l: i64, w: Weight) -> Result<()> {
    for i in 1..=lambda.length() as i64 {
        let li = lambda.part(i as usize) as i64;
        let top = q.a.add_int(1 - l).add(&q.kappa.mul_int(i - 1));
        if w == Weight::Laguerre {
            f.poch(&top, l - li, || format!("(a−l+1+κ(i−1))_{{l−λᵢ}}, i={i}"))?;
            f.over_poch(&top, l, || format!("(a−l+1+κ(i−1))_l, i={i}"))?;
            continue;
        }
        let bot = q.a.add(&q.b).add_int(2 - l).add(&q.kappa.mul(&q.n.add_int(i - 2)));
        f.poch(&top, l - li, || format!("(a−l+1+κ(i−1))_{{l−λᵢ}}, i={i}"))?;
        f.over_poch(&bot, l - li, || format!("(a−l+b+2+κ(n+i−2))_{{l−λᵢ}}, i={i}"))?;
        if l != 0 {
            f.poch(&bot, l, || format!("(a−l+b+2+κ(n+i−2))_l, i={i}"))?;
            f.over_poch(&top, l, || format!("(a−l+1+κ(i−1))_l, i={i}"))?;
        }
    }
    Ok(())
}

/// A_λ·a^±_λ for one partition of |k|.
pub fn partition_term<S: Scalar>(lambda: &Partition, q: &MomentQuery<S>) -> Result<S> {
    partition_term_shifted(lambda, q, 0, Weight::Jacobi)
}

fn partition_term_shifted<S: Scalar>(lambda: &Partition, q: &MomentQuery<S>, l: i64, w: Weight) -> Result<S> {
    if too_long(lambda, &q.n) {
        return Ok(q.kappa.lift_int(0));
    }
    let mut f = Fraction::new(&q.kappa, lambda);
    coefficient(&mut f, lambda, &q.kappa, &q.n, q.k.abs())?;
    if q.k > 0 {
        edge_positive(&mut f, lambda, q, w)?;
    } else {
        edge_negative(&mut f, lambda, q, l, w)?;
    }
    f.finish()
}

/// (a+1)_k/(a+b+2)_k: the decoupled κ = 0 moment, either sign of k.
pub fn moment_kappa_zero<S: Scalar>(q: &MomentQuery<S>) -> Result<S> {
    let x = pochhammer(&q.a.add_int(1), q.k);
    let y = pochhammer(&q.a.add(&q.b).add_int(2), q.k);
    match (x, y) {
        (Ok(x), Ok(y)) => x.div(&y).map_err(|_| Error::Divergent("(a+b+2)_k vanishes".into())),
        _ => Err(Error::Divergent(format!("κ=0 moment of order {} has a pole", q.k))),
    }
}

/// Per-partition contributions, in enumeration order.
pub fn moment_terms<S: Scalar>(q: &MomentQuery<S>) -> Result<Vec<(Partition, S)>> {
    if q.k == 0 {
        return Err(Error::Invalid("moment order must be nonzero".into()));
    }
    let parts = enumerate_partitions(q.k.unsigned_abs() as usize);
    parts
        .into_par_iter()
        .map(|p| {
            let t = partition_term(&p, q)?;
            Ok((p, t))
        })
        .collect()
}

/// Σ_{|λ|=|k|} A_λ a^±_λ.
pub fn moment_partition_sum<S: Scalar>(q: &MomentQuery<S>) -> Result<S> {
    if q.kappa.is_zero() {
        return moment_kappa_zero(q);
    }
    let terms = moment_terms(q)?;
    Ok(sum(&q.kappa, terms.into_iter().map(|(_, t)| t)))
}

fn sum<S: Scalar>(unit: &S, it: impl Iterator<Item = S>) -> S {
    it.fold(unit.lift_int(0), |acc, t| acc.add(&t))
}

/// Moments ⟨(1/n)Σ z_j^k⟩ of the Laguerre weight z^a e^{−z}: the partition sum
/// without the (a+b+2+…) factors, either sign of k.
pub fn laguerre_moment<S: Scalar>(q: &MomentQuery<S>) -> Result<S> {
    if q.k == 0 {
        return Err(Error::Invalid("moment order must be nonzero".into()));
    }
    if q.kappa.is_zero() {
        return pochhammer(&q.a.add_int(1), q.k).map_err(|_| Error::Divergent(format!("κ=0 Laguerre moment of order {} has a pole", q.k)));
    }
    let parts = enumerate_partitions(q.k.unsigned_abs() as usize);
    let terms: Result<Vec<S>> = parts.par_iter().map(|p| partition_term_shifted(p, q, 0, Weight::Laguerre)).collect();
    Ok(sum(&q.kappa, terms?.into_iter()))
}

/// Negative moment through the l-shifted edge factor.
pub fn moment_negative_lshift<S: Scalar>(q: &MomentQuery<S>, l: i64) -> Result<S> {
    if q.k >= 0 {
        return Err(Error::Invalid("l-shifted form applies to negative orders".into()));
    }
    if l < 0 {
        return Err(Error::Invalid("shift l must be nonnegative".into()));
    }
    let parts = enumerate_partitions(q.k.unsigned_abs() as usize);
    let terms: Result<Vec<S>> = parts.iter().map(|p| partition_term_shifted(p, q, l, Weight::Jacobi)).collect();
    Ok(sum(&q.kappa, terms?.into_iter()))
}

/// ⟨J^{(1/κ)}_λ⟩ = κ^{−|λ|} Π (a+1+κ(n−i))_{λᵢ}(κ(n−i+1))_{λᵢ}/(a+b+2+κ(2n−i−1))_{λᵢ}.
pub fn jack_average<S: Scalar>(lambda: &Partition, kappa: &S, a: &S, b: &S, n: &S) -> Result<S> {
    let q = MomentQuery::new(kappa.clone(), a.clone(), b.clone(), n.clone(), lambda.size().max(1) as i64);
    let mut f = Fraction::new(kappa, lambda);
    if lambda.is_empty() {
        return Ok(kappa.lift_int(1));
    }
    edge_positive(&mut f, lambda, &q, Weight::Jacobi)?;
    for i in 1..=lambda.length() as i64 {
        f.poch(&kappa.mul(&n.add_int(1 - i)), lambda.part(i as usize) as i64, || String::new())?;
    }
    for _ in 0..lambda.size() {
        f.over(kappa, || "κ".into())?;
    }
    f.finish()
}

/// Positive moment as Σ γ^λ_(k)(α)⟨J_λ⟩/n with α = 1/κ, using normalizations and θ
/// computed box by box.
pub fn moment_jack_route<S: Scalar>(q: &MomentQuery<S>) -> Result<S> {
    if q.k <= 0 {
        return Err(Error::Invalid("Jack route covers positive orders".into()));
    }
    let alpha = q.kappa.inv()?;
    let one = alpha.lift_int(1);
    let mut total = alpha.lift_int(0);
    for lambda in enumerate_partitions(q.k as usize) {
        if too_long(&lambda, &q.n) {
            continue;
        }
        let c1 = c_norm(&lambda, &alpha, &one);
        let c2 = c_norm(&lambda, &alpha, &alpha);
        let gamma = alpha.mul_int(q.k).mul(&theta_onek(&lambda, &alpha)).div(&c1.mul(&c2))?;
        // ⟨J_λ⟩/n with (κn)_{λ₁}/n → κ(κn+1)_{λ₁−1}
        let mut f = Fraction::new(&q.kappa, &lambda);
        edge_positive(&mut f, &lambda, q, Weight::Jacobi)?;
        let kn = q.kappa.mul(&q.n);
        f.times(&q.kappa);
        f.poch(&kn.add_int(1), lambda.part(1) as i64 - 1, String::new)?;
        for i in 2..=lambda.length() as i64 {
            f.poch(&kn.add(&q.kappa.mul_int(1 - i)), lambda.part(i as usize) as i64, String::new)?;
        }
        for _ in 0..q.k {
            f.over(&q.kappa, || "κ".into())?;
        }
        total = total.add(&gamma.mul(&f.finish()?));
    }
    Ok(total)
}

/// Positive moment as (k/n)Σ_λ Π_{s∈λ} B_λ(s), products over boxes only.
pub fn moment_geometric<S: Scalar>(q: &MomentQuery<S>) -> Result<S> {
    if q.k <= 0 {
        return Err(Error::Invalid("box-product form covers positive orders".into()));
    }
    let kap = &q.kappa;
    let mut total = kap.lift_int(0);
    for lambda in enumerate_partitions(q.k as usize) {
        if too_long(&lambda, &q.n) {
            continue;
        }
        let mut f = Fraction::new(kap, &lambda);
        f.times(&kap.lift_int(q.k));
        for (i, j, arm, leg) in lambda.legs() {
            let (i, j) = (i as i64, j as i64);
            let ni = q.n.add_int(-i);
            if (i, j) == (1, 1) {
                // (κn)/n → κ, and the (j−1−(i−1)κ) factor is omitted
                f.times(kap);
            } else {
                f.times(&kap.mul_int(-(i - 1)).add_int(j - 1));
                f.times(&kap.mul(&ni.add_int(1)).add_int(j - 1));
            }
            f.times(&q.a.add(&kap.mul(&ni)).add_int(j));
            let h = kap.mul_int(leg as i64).add_int(arm as i64);
            f.over(&h.add_int(1), || format!("hook ({i},{j})"))?;
            f.over(&h.add(kap), || format!("hook ({i},{j})"))?;
            let d = q.a.add(&q.b).add_int(1 + j).add(&kap.mul(&q.n.mul_int(2).add_int(-i - 1)));
            f.over(&d, || format!("(a+b+1+κ(2n−i−1)+j) at ({i},{j})"))?;
        }
        total = total.add(&f.finish()?);
    }
    Ok(total)
}

/// Selberg normalization for positive integer n, exact whenever the Γ factors telescope.
pub fn selberg(kappa: &Rational, a: &Rational, b: &Rational, n: u32) -> Result<Rational> {
    let mut num: Vec<Rational> = Vec::new();
    let mut den: Vec<Rational> = Vec::new();
    let nn = n as i64;
    for j in 0..nn {
        num.push(a + 1 + kappa * j);
        num.push(b + 1 + kappa * j);
        num.push(kappa * (j + 1) + 1);
        den.push(a + b + 2 + kappa * (nn + j - 1));
        den.push(kappa + 1);
    }
    for x in num.iter().chain(den.iter()) {
        if x.is_integer() && (x.is_negative() || x.is_zero()) {
            return Err(Error::Divergent(format!("Γ({x}) has a pole")));
        }
    }
    let mut acc = Rational::one();
    let mut unmatched_num = Vec::new();
    for x in num {
        match den.iter().position(|y| (&x - y).is_integer()) {
            Some(p) => {
                let y = den.swap_remove(p);
                let m = (&x - &y).to_i64().ok_or_else(|| Error::Invalid("shift too large".into()))?;
                acc = acc * pochhammer(&y, m)?;
            }
            None => unmatched_num.push(x),
        }
    }
    for x in unmatched_num {
        acc = acc * gamma_at_positive_integer(&x)?;
    }
    for y in den {
        acc = acc.checked_div(&gamma_at_positive_integer(&y)?)?;
    }
    Ok(acc)
}

fn gamma_at_positive_integer(x: &Rational) -> Result<Rational> {
    match x.to_i64() {
        Some(m) if m >= 1 => Ok(Rational::factorial((m - 1) as u32)),
        _ => Err(Error::Invalid(format!("Selberg value is not rational (Γ({x}) does not telescope)"))),
    }
}

/// κ' = 1/κ, n' = −κn, a' = −a/κ, b' = −b/κ: the map β → 1/β, n → β²n, a → a/β², b → b/β² at κ = −β².
pub fn duality_map<S: Scalar>(q: &MomentQuery<S>) -> Result<MomentQuery<S>> {
    let ki = q.kappa.inv()?;
    Ok(MomentQuery {
        kappa: ki.clone(),
        a: q.a.mul(&ki).neg(),
        b: q.b.mul(&ki).neg(),
        n: q.n.mul(&q.kappa).neg(),
        k: q.k,
    })
}

/// Moment at a rational point. Where single partition terms are singular but the
/// sum is not, the value is taken as the limit κ → κ₀ at fixed (a, b, n); a
/// surviving pole is reported as divergence.
pub fn moment(q: &MomentQuery<Rational>) -> Result<Rational> {
    match moment_partition_sum(q) {
        Err(Error::Pole { .. }) | Err(Error::DivisionByZero) => moment_limit_in_kappa(q),
        other => other,
    }
}

/// Same as [`moment`], with per-partition contributions; singular contributions
/// are replaced by the constant term of their expansion in κ − κ₀, which still
/// sums to the moment when the poles cancel.
pub fn moment_with_terms(q: &MomentQuery<Rational>) -> Result<(Rational, Vec<(Partition, Rational)>)> {
    if q.kappa.is_zero() {
        let v = moment_kappa_zero(q)?;
        let p = Partition::new(vec![q.k.unsigned_abs() as usize]);
        return Ok((v.clone(), vec![(p, v)]));
    }
    match moment_terms(q) {
        Ok(terms) => {
            let v = terms.iter().map(|(_, t)| t.clone()).sum();
            Ok((v, terms))
        }
        Err(Error::Pole { .. }) | Err(Error::DivisionByZero) => {
            let v = moment_limit_in_kappa(q)?;
            let zero = Rational::zero();
            let terms = moment_terms(&perturbed(q))?
                .into_iter()
                .map(|(p, t)| {
                    let c = with_adaptive_order(8, 512, |order| {
                        let l = Laurent::from_ratfunc_at(&t, &zero, order)?;
                        l.coeff(0).ok_or(Error::Precision)
                    })?;
                    Ok((p, c))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((v, terms))
        }
        Err(e) => Err(e),
    }
}

/// κ → κ₀ + ε with ε the indeterminate; all factors stay exact polynomials in ε.
fn perturbed(q: &MomentQuery<Rational>) -> MomentQuery<RatFunc<Rational>> {
    let c = |x: &Rational| RatFunc::from_rational(x);
    MomentQuery { kappa: RatFunc::x().add(&c(&q.kappa)), a: c(&q.a), b: c(&q.b), n: c(&q.n), k: q.k }
}

fn moment_limit_in_kappa(q: &MomentQuery<Rational>) -> Result<Rational> {
    match moment_partition_sum(&perturbed(q)) {
        Ok(f) => ratfunc_limit_at(&f, &Rational::zero()),
        Err(Error::Pole { partition, factor }) => {
            Err(Error::Divergent(format!("pole independent of κ at partition {partition}: {factor}")))
        }
        Err(e) => Err(e),
    }
}
