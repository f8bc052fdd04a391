use std::fmt;

use super::{Field, Poly, Rational, Scalar};
use crate::error::{Error, Result};

/// Reduced quotient of polynomials with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::from_poly(Poly::zero()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        Ok(RatFunc::normalized(num, den))
    }

    /// Caller guarantees the pair is coprime.
    fn normalized(num: Poly<F>, den: Poly<F>) -> Self {
        let l = den.leading().expect("nonzero denominator").clone();
        if l == F::one() {
            RatFunc { num, den }
        } else {
            let li = l.inv().expect("nonzero leading coefficient");
            RatFunc { num: num.scale(&li), den: den.scale(&li) }
        }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(c: F) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// The indeterminate.
    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value if this is a constant function.
    pub fn as_constant(&self) -> Option<F> {
        if self.den.is_one() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn eval(&self, x: &F) -> Result<F> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Divergent("denominator vanishes at evaluation point".into()));
        }
        self.num.eval(x).div(&d)
    }

    /// f(1/x)
    pub fn reciprocal_argument(&self) -> Self {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let m = dn.max(dd);
        let n = self.num.reversed(dn).mul(&monomial(m - dn));
        let d = self.den.reversed(dd).mul(&monomial(m - dd));
        RatFunc::new(n, d).expect("nonzero denominator")
    }

    /// f(-x)
    pub fn reflect(&self) -> Self {
        RatFunc::new(self.num.reflect(), self.den.reflect()).expect("nonzero denominator")
    }

    /// g with f(x) = g(x²), if f is even.
    pub fn even_as_square(&self) -> Option<Self> {
        let n = self.num.even_part_as_square()?;
        let d = self.den.even_part_as_square()?;
        RatFunc::new(n, d).ok()
    }

    /// f(x²)
    pub fn in_square(&self) -> Self {
        let sq = Poly::new(vec![F::zero(), F::zero(), F::one()]);
        RatFunc::new(self.num.compose(&sq), self.den.compose(&sq)).expect("nonzero denominator")
    }

    /// f(g(x)) for a rational function g.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let eval = |p: &Poly<F>| -> RatFunc<F> {
            let mut acc = RatFunc::zero();
            for c in p.coeffs().iter().rev() {
                acc = acc.mul(g).add(&RatFunc::constant(c.clone()));
            }
            acc
        };
        eval(&self.num).div(&eval(&self.den))
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Degree of numerator minus degree of denominator (None for zero).
    pub fn degree_balance(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap_or(0) as i64)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Result<RatFunc<G>> {
        RatFunc::new(self.num.map(&f), self.den.map(&f))
    }
}

fn monomial<F: Field>(d: usize) -> Poly<F> {
    let mut c = vec![F::zero(); d + 1];
    c[d] = F::one();
    Poly::new(c)
}

impl<F: Field> Scalar for RatFunc<F> {
    fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(self.num.add(&o.num));
        }
        // Henrici: only gcd(num, g) can survive
        let g = self.den.gcd(&o.den);
        if g.is_one() {
            let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
            return RatFunc::normalized(n, self.den.mul(&o.den));
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = o.den.div_exact(&g).expect("gcd divides");
        let n = self.num.mul(&d1).add(&o.num.mul(&b1));
        if n.is_zero() {
            return RatFunc::zero();
        }
        let h = n.gcd(&g);
        let den = b1.mul(&o.den);
        if h.is_one() {
            RatFunc::normalized(n, den)
        } else {
            RatFunc::normalized(n.div_exact(&h).expect("gcd divides"), den.div_exact(&h).expect("gcd divides"))
        }
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(self.num.mul(&o.num));
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), o.den.clone())
        } else {
            (self.num.div_exact(&g1).expect("gcd divides"), o.den.div_exact(&g1).expect("gcd divides"))
        };
        let (c, b) = if g2.is_one() {
            (o.num.clone(), self.den.clone())
        } else {
            (o.num.div_exact(&g2).expect("gcd divides"), self.den.div_exact(&g2).expect("gcd divides"))
        };
        RatFunc::normalized(a.mul(&c), b.mul(&d))
    }

    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::normalized(self.den.clone(), self.num.clone()))
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn lift(&self, q: &Rational) -> Self {
        RatFunc::from_rational(q)
    }
}

impl<F: Field> Field for RatFunc<F> {
    fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }
    fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }
    fn from_rational(q: &Rational) -> Self {
        RatFunc::constant(F::from_rational(q))
    }
}

impl<F: Field> RatFunc<F> {
    pub fn display(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.display(var);
        }
        let n = self.num.display(var);
        let d = self.den.display(var);
        let wrap = |s: String, p: &Poly<F>| {
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(n, &self.num), wrap(d, &self.den))
    }
}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("x"))
    }
}

impl<F: Field> fmt::Debug for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("x"))
    }
}

/// Value of the reduced function at `x0`; a surviving pole is reported as divergence.
pub fn ratfunc_limit_at<F: Field>(f: &RatFunc<F>, x0: &F) -> Result<F> {
    f.eval(x0)
}

/// Rebuilds a rational function from exact samples by Thiele interpolation.
///
/// Points where `f` fails are skipped. The continued fraction is accepted once it
/// predicts three further samples; `max_points` bounds the total work.
pub fn reconstruct<F: Field>(mut f: impl FnMut(&F) -> Result<F>, max_points: usize) -> Result<RatFunc<F>> {
    const CHECKS: usize = 3;
    let mut xs: Vec<F> = Vec::new();
    let mut coef: Vec<F> = Vec::new();
    let mut verified = 0;
    let mut j: i64 = 0;
    while (j as usize) < max_points {
        let x = F::from_rational(&sample_point(j));
        j += 1;
        let Ok(y) = f(&x) else { continue };
        if !coef.is_empty() {
            if let Ok(v) = thiele_eval(&xs, &coef, &x) {
                if v == y {
                    verified += 1;
                    if verified == CHECKS {
                        return thiele_build(&xs, &coef);
                    }
                    continue;
                }
            }
        }
        verified = 0;
        // inverse differences of the new point against the stored nodes
        let mut phi = y;
        let mut ok = true;
        for (xk, ak) in xs.iter().zip(&coef) {
            let d = phi.sub(ak);
            if d.is_zero() {
                ok = false;
                break;
            }
            phi = x.sub(xk).div(&d)?;
        }
        if ok {
            xs.push(x);
            coef.push(phi);
        }
    }
    Err(Error::Precision)
}

fn sample_point(j: i64) -> Rational {
    Rational::new(3 + 7 * j, 5 + 3 * j) + Rational::new(j, 11)
}

fn thiele_eval<F: Field>(xs: &[F], coef: &[F], x: &F) -> Result<F> {
    let m = coef.len();
    let mut acc = coef[m - 1].clone();
    for k in (0..m - 1).rev() {
        acc = coef[k].add(&x.sub(&xs[k]).div(&acc)?);
    }
    Ok(acc)
}

fn thiele_build<F: Field>(xs: &[F], coef: &[F]) -> Result<RatFunc<F>> {
    let m = coef.len();
    let x = RatFunc::<F>::x();
    let mut acc = RatFunc::constant(coef[m - 1].clone());
    for k in (0..m - 1).rev() {
        acc = RatFunc::constant(coef[k].clone()).add(&x.sub(&RatFunc::constant(xs[k].clone())).div(&acc)?);
    }
    Ok(acc)
}
