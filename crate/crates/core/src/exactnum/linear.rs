use std::fmt;

use serde::Serialize;

use super::Rational;
use crate::error::{Error, Result};

/// c0 + Σ c_i u_i over a fixed number of variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Affine {
    pub c0: Rational,
    pub coeffs: Vec<Rational>,
}

impl Affine {
    pub fn constant(c0: Rational, nvars: usize) -> Self {
        Affine { c0, coeffs: vec![Rational::zero(); nvars] }
    }

    /// c0 + c·u_var
    pub fn single(c0: Rational, var: usize, c: Rational, nvars: usize) -> Self {
        let mut a = Affine::constant(c0, nvars);
        a.coeffs[var] = c;
        a
    }

    /// u_j - u_i + c0
    pub fn diff(j: usize, i: usize, c0: Rational, nvars: usize) -> Self {
        let mut a = Affine::constant(c0, nvars);
        a.coeffs[j] = a.coeffs[j].clone() + 1;
        a.coeffs[i] = a.coeffs[i].clone() - 1;
        a
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.is_constant()
    }

    /// Depends on `var` and nothing after it.
    pub fn depends_only_up_to(&self, var: usize) -> bool {
        !self.coeffs[var].is_zero() && self.coeffs[var + 1..].iter().all(|c| c.is_zero())
    }

    /// Depends on `var` only.
    pub fn depends_only_on(&self, var: usize) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| (i == var) != c.is_zero())
    }

    pub fn substitute(&self, var: usize, value: &Rational) -> Self {
        let mut a = self.clone();
        let c = std::mem::replace(&mut a.coeffs[var], Rational::zero());
        a.c0 = &a.c0 + &(c * value);
        a
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Affine { c0: &self.c0 * s, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Splits off the scalar that makes the first nonzero entry (variables first,
    /// then the constant) equal to one.
    pub fn normalize(&self) -> (Rational, Affine) {
        let lead = self.coeffs.iter().find(|c| !c.is_zero()).unwrap_or(&self.c0).clone();
        if lead.is_zero() || lead.is_one() {
            return (Rational::one(), self.clone());
        }
        let inv = lead.recip().expect("nonzero");
        (lead, self.scale(&inv))
    }

    pub fn eval(&self, u: &[Rational]) -> Rational {
        let mut acc = self.c0.clone();
        for (c, x) in self.coeffs.iter().zip(u) {
            if !c.is_zero() {
                acc += &(c * x);
            }
        }
        acc
    }
}

impl fmt::Debug for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = format!("u{}", i + 1);
            parts.push(if c.is_one() {
                v
            } else if *c == -1 {
                format!("-{v}")
            } else {
                format!("{c}*{v}")
            });
        }
        if !self.c0.is_zero() || parts.is_empty() {
            parts.push(self.c0.to_string());
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(r) => s.push_str(&format!(" - {r}")),
                None => s.push_str(&format!(" + {p}")),
            }
        }
        write!(f, "({s})")
    }
}

/// prefactor · Π num / Π den with affine factors.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LinearFactorTerm {
    pub prefactor: Rational,
    pub num: Vec<Affine>,
    pub den: Vec<Affine>,
}

impl fmt::Debug for LinearFactorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LinearFactorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.prefactor)?;
        for a in &self.num {
            write!(f, "·{a}")?;
        }
        if !self.den.is_empty() {
            write!(f, " / [")?;
            for (i, a) in self.den.iter().enumerate() {
                if i > 0 {
                    write!(f, "·")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl LinearFactorTerm {
    pub fn new(prefactor: Rational, num: Vec<Affine>, den: Vec<Affine>) -> Result<Self> {
        if den.iter().any(|d| d.is_zero()) {
            return Err(Error::Invalid("identically zero denominator factor".into()));
        }
        Ok(LinearFactorTerm { prefactor, num, den }.canonical())
    }

    pub fn nvars(&self) -> usize {
        self.num.first().or(self.den.first()).map_or(0, |a| a.coeffs.len())
    }

    pub fn is_zero(&self) -> bool {
        self.prefactor.is_zero()
    }

    /// Folds constants into the prefactor, normalizes factors, cancels common
    /// factors and sorts, so equal terms compare equal.
    pub fn canonical(mut self) -> Self {
        let mut pre = self.prefactor;
        let mut num = Vec::with_capacity(self.num.len());
        for a in self.num.drain(..) {
            if a.is_constant() {
                pre = pre * &a.c0;
            } else {
                let (s, n) = a.normalize();
                pre = pre * s;
                num.push(n);
            }
        }
        let mut den = Vec::with_capacity(self.den.len());
        for a in self.den.drain(..) {
            if a.is_constant() {
                pre = pre.checked_div(&a.c0).expect("nonzero constant denominator");
            } else {
                let (s, n) = a.normalize();
                pre = pre.checked_div(&s).expect("nonzero scale");
                den.push(n);
            }
        }
        if pre.is_zero() {
            return LinearFactorTerm { prefactor: pre, num: Vec::new(), den: Vec::new() };
        }
        num.sort();
        den.sort();
        // cancel common factors (both lists sorted)
        let (mut i, mut j) = (0, 0);
        let (mut kn, mut kd) = (Vec::new(), Vec::new());
        while i < num.len() && j < den.len() {
            match num[i].cmp(&den[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Less => {
                    kn.push(num[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    kd.push(den[j].clone());
                    j += 1;
                }
            }
        }
        kn.extend_from_slice(&num[i..]);
        kd.extend_from_slice(&den[j..]);
        LinearFactorTerm { prefactor: pre, num: kn, den: kd }
    }

    /// Structural key without the prefactor, for merging like terms.
    pub fn shape(&self) -> (Vec<Affine>, Vec<Affine>) {
        (self.num.clone(), self.den.clone())
    }

    /// Constant poles in `var` (locations where a denominator factor depending on
    /// `var` alone vanishes), with denominator multiplicity.
    pub fn constant_poles(&self, var: usize) -> Vec<(Rational, usize)> {
        let mut out: Vec<(Rational, usize)> = Vec::new();
        for d in &self.den {
            if d.depends_only_on(var) {
                let p = -(&d.c0 / &d.coeffs[var]);
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some(e) => e.1 += 1,
                    None => out.push((p, 1)),
                }
            }
        }
        out
    }

    /// Numeric value at a point (all variables bound).
    pub fn eval(&self, u: &[Rational]) -> Result<Rational> {
        let mut acc = self.prefactor.clone();
        for a in &self.num {
            acc = acc * a.eval(u);
        }
        for a in &self.den {
            acc = acc.checked_div(&a.eval(u))?;
        }
        Ok(acc)
    }

    /// Value when no variable dependence is left.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.num.is_empty() && self.den.is_empty() {
            Some(self.prefactor.clone())
        } else {
            None
        }
    }
}

/// Residue at a simple pole u_var = pole: drop the vanishing denominator factor,
/// substitute the pole elsewhere and divide by that factor's slope.
pub fn residue_simple(term: &LinearFactorTerm, var: usize, pole: &Rational) -> Result<LinearFactorTerm> {
    let vanishes = |a: &Affine| a.depends_only_on(var) && a.substitute(var, pole).is_zero();
    let hits: Vec<usize> = term.den.iter().enumerate().filter(|(_, a)| vanishes(a)).map(|(i, _)| i).collect();
    let zeros = term.num.iter().filter(|a| vanishes(a)).count();
    match (hits.len(), zeros) {
        (0, _) => Err(Error::Invalid(format!("u{} = {pole} is not a pole", var + 1))),
        (1, 0) => {
            let slope = term.den[hits[0]].coeffs[var].clone();
            let num = term.num.iter().map(|a| a.substitute(var, pole)).collect();
            let den = term
                .den
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != hits[0])
                .map(|(_, a)| a.substitute(var, pole))
                .collect();
            LinearFactorTerm::new(term.prefactor.checked_div(&slope)?, num, den)
        }
        _ => Err(Error::Invalid(format!("u{} = {pole} is not a simple pole", var + 1))),
    }
}

/// Residue at u_var = pole of any order, as a sum of terms.
///
/// With u_var = pole + ε every factor becomes A + cε; the residue is the
/// coefficient of ε^{m-1} in the expansion of the non-vanishing factors, where
/// m is the net pole order.
pub fn residue(term: &LinearFactorTerm, var: usize, pole: &Rational) -> Result<Vec<LinearFactorTerm>> {
    let mut pre = term.prefactor.clone();
    let mut m: i64 = 0;
    let mut num: Vec<(Affine, Rational)> = Vec::new();
    let mut den: Vec<(Affine, Rational)> = Vec::new();
    for a in &term.num {
        let s = a.substitute(var, pole);
        let c = a.coeffs[var].clone();
        if s.is_zero() {
            m -= 1;
            pre = pre * &c;
        } else {
            num.push((s, c));
        }
    }
    for a in &term.den {
        let s = a.substitute(var, pole);
        let c = a.coeffs[var].clone();
        if s.is_zero() {
            m += 1;
            pre = pre.checked_div(&c)?;
        } else {
            den.push((s, c));
        }
    }
    if m <= 0 {
        return Ok(Vec::new());
    }
    if m == 1 {
        let t = LinearFactorTerm::new(
            pre,
            num.into_iter().map(|(a, _)| a).collect(),
            den.into_iter().map(|(a, _)| a).collect(),
        )?;
        return Ok(vec![t]);
    }
    let need = (m - 1) as usize;
    let mut out = Vec::new();
    let mut picks_num = vec![false; num.len()];
    let mut pows_den = vec![0usize; den.len()];
    expand(&num, &den, 0, need, &mut picks_num, &mut pows_den, &pre, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    num: &[(Affine, Rational)],
    den: &[(Affine, Rational)],
    pos: usize,
    left: usize,
    picks: &mut Vec<bool>,
    pows: &mut Vec<usize>,
    pre: &Rational,
    out: &mut Vec<LinearFactorTerm>,
) -> Result<()> {
    let total = num.len() + den.len();
    if left == 0 {
        let mut p = pre.clone();
        let mut n = Vec::new();
        let mut d = Vec::new();
        for (i, (a, c)) in num.iter().enumerate() {
            if picks[i] {
                p = p * c;
            } else {
                n.push(a.clone());
            }
        }
        for (i, (a, c)) in den.iter().enumerate() {
            let e = pows[i];
            if e > 0 {
                p = p * (-c).pow(e as i32);
            }
            for _ in 0..=e {
                d.push(a.clone());
            }
        }
        if !p.is_zero() {
            out.push(LinearFactorTerm::new(p, n, d)?);
        }
        return Ok(());
    }
    if pos == total {
        return Ok(());
    }
    if pos < num.len() {
        expand(num, den, pos + 1, left, picks, pows, pre, out)?;
        if !num[pos].1.is_zero() {
            picks[pos] = true;
            expand(num, den, pos + 1, left - 1, picks, pows, pre, out)?;
            picks[pos] = false;
        }
    } else {
        let i = pos - num.len();
        if den[i].1.is_zero() {
            return expand(num, den, pos + 1, left, picks, pows, pre, out);
        }
        for e in 0..=left {
            pows[i] = e;
            expand(num, den, pos + 1, left - e, picks, pows, pre, out)?;
        }
        pows[i] = 0;
    }
    Ok(())
}
