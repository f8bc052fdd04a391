use super::{Field, Poly, RatFunc, Rational, Scalar};
use crate::error::{Error, Result};

const EXACT: i64 = i64::MAX / 4;

/// Truncated Laurent series Σ c_e ε^e with known coefficients for `val <= e < prec`.
///
/// Every element carries the relative working precision `order` used when it
/// creates constants; multiplication keeps the smaller relative precision of its
/// operands, so poles and cancellations shrink the known range honestly.
#[derive(Clone, PartialEq)]
pub struct Laurent<F> {
    val: i64,
    coeffs: Vec<F>,
    prec: i64,
    order: usize,
}

impl<F: Field> std::fmt::Debug for Laurent<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Laurent(val={}, prec={}, {:?})", self.val, self.prec, self.coeffs)
    }
}

impl<F: Field> Laurent<F> {
    fn build(val: i64, mut coeffs: Vec<F>, prec: i64, order: usize) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        if lead == coeffs.len() {
            return Laurent { val: prec.min(EXACT), coeffs: Vec::new(), prec: prec.min(EXACT), order };
        }
        coeffs.drain(..lead);
        Laurent { val: val + lead as i64, coeffs, prec, order }
    }

    pub fn constant(c: F, order: usize) -> Self {
        if c.is_zero() {
            return Laurent { val: EXACT, coeffs: Vec::new(), prec: EXACT, order };
        }
        let mut v = vec![F::zero(); order.max(1)];
        v[0] = c;
        Laurent { val: 0, coeffs: v, prec: order.max(1) as i64, order }
    }

    /// The expansion variable ε.
    pub fn var(order: usize) -> Self {
        Laurent::from_poly(&Poly::x(), order)
    }

    /// Exact polynomial, kept to `order` coefficients past its lowest term.
    pub fn from_poly(p: &Poly<F>, order: usize) -> Self {
        match p.valuation() {
            None => Laurent::constant(F::zero(), order),
            Some(v) => {
                let mut c: Vec<F> = (v..v + order.max(1)).map(|i| p.coeff(i)).collect();
                if c.is_empty() {
                    c.push(F::zero());
                }
                Laurent { val: v as i64, coeffs: c, prec: (v + order.max(1)) as i64, order }
            }
        }
    }

    /// Expansion of f(x0 + ε).
    pub fn from_ratfunc_at(f: &RatFunc<F>, x0: &F, order: usize) -> Result<Self> {
        let n = Laurent::from_poly(&f.num().shift(x0), order);
        let d = Laurent::from_poly(&f.den().shift(x0), order);
        n.div(&d)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Coefficient of ε^e, or None if it lies beyond the known precision.
    pub fn coeff(&self, e: i64) -> Option<F> {
        if e >= self.prec {
            return None;
        }
        if e < self.val {
            return Some(F::zero());
        }
        Some(self.coeffs[(e - self.val) as usize].clone())
    }

    /// Value at ε = 0: errors on a nonvanishing principal part or lost precision.
    pub fn constant_term(&self) -> Result<F> {
        if self.val < 0 && !self.coeffs.is_empty() {
            if self.prec > self.val {
                return Err(Error::Divergent(format!("pole of order {} in the limit", -self.val)));
            }
        }
        self.coeff(0).ok_or(Error::Precision)
    }

    /// Coefficient at ε^e with the same error semantics as [`Laurent::constant_term`]
    /// applied to ε^{-e} times the series.
    pub fn leading_at(&self, e: i64) -> Result<F> {
        if self.val < e && !self.coeffs.is_empty() {
            return Err(Error::Divergent(format!("unexpected term of order {} below {}", self.val, e)));
        }
        self.coeff(e).ok_or(Error::Precision)
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    /// Multiply by ε^s.
    pub fn shift(&self, s: i64) -> Self {
        if self.coeffs.is_empty() && self.prec == EXACT {
            return self.clone();
        }
        Laurent { val: self.val + s, coeffs: self.coeffs.clone(), prec: self.prec + s, order: self.order }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Laurent<G> {
        Laurent::build(self.val, self.coeffs.iter().map(f).collect(), self.prec, self.order)
    }

    /// Substitute ε → c·ε.
    pub fn scale_var(&self, c: &F) -> Self {
        let mut pw = F::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        // c^val
        let base = if self.val >= 0 {
            (0..self.val).fold(F::one(), |a, _| a.mul(c))
        } else {
            let ci = c.inv().expect("nonzero scale");
            (0..-self.val).fold(F::one(), |a, _| a.mul(&ci))
        };
        for x in &self.coeffs {
            v.push(x.mul(&base).mul(&pw));
            pw = pw.mul(c);
        }
        Laurent::build(self.val, v, self.prec, self.order)
    }
}

impl<F: Field> Scalar for Laurent<F> {
    fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let order = self.order.max(o.order);
        let lo = self.val.min(o.val);
        if lo >= prec {
            return Laurent { val: prec, coeffs: Vec::new(), prec, order };
        }
        let mut c = Vec::with_capacity((prec - lo) as usize);
        for e in lo..prec {
            let a = if e >= self.val { self.coeffs.get((e - self.val) as usize) } else { None };
            let b = if e >= o.val { o.coeffs.get((e - o.val) as usize) } else { None };
            c.push(match (a, b) {
                (Some(x), Some(y)) => x.add(y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => F::zero(),
            });
        }
        Laurent::build(lo, c, prec, order)
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Self) -> Self {
        let order = self.order.max(o.order);
        match (self.coeffs.is_empty(), o.coeffs.is_empty()) {
            (true, true) => {
                let p = (self.prec + o.prec).min(EXACT);
                return Laurent { val: p, coeffs: Vec::new(), prec: p, order };
            }
            (true, false) => {
                let p = (self.prec + o.val).min(EXACT);
                return Laurent { val: p, coeffs: Vec::new(), prec: p, order };
            }
            (false, true) => {
                let p = (o.prec + self.val).min(EXACT);
                return Laurent { val: p, coeffs: Vec::new(), prec: p, order };
            }
            _ => {}
        }
        let r = self.coeffs.len().min(o.coeffs.len());
        let mut c = vec![F::zero(); r];
        for i in 0..r {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..r - i {
                if !o.coeffs[j].is_zero() {
                    c[i + j] = c[i + j].add(&self.coeffs[i].mul(&o.coeffs[j]));
                }
            }
        }
        let val = self.val + o.val;
        Laurent::build(val, c, val + r as i64, order)
    }

    fn neg(&self) -> Self {
        Laurent {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            prec: self.prec,
            order: self.order,
        }
    }

    fn inv(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(if self.prec >= EXACT { Error::DivisionByZero } else { Error::Precision });
        }
        let r = self.coeffs.len();
        let a0i = self.coeffs[0].inv()?;
        let mut b: Vec<F> = Vec::with_capacity(r);
        b.push(a0i.clone());
        for n in 1..r {
            let mut s = F::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    s = s.add(&self.coeffs[i].mul(&b[n - i]));
                }
            }
            b.push(s.mul(&a0i).neg());
        }
        Ok(Laurent { val: -self.val, coeffs: b, prec: -self.val + r as i64, order: self.order })
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn lift(&self, q: &Rational) -> Self {
        Laurent::constant(F::from_rational(q), self.order)
    }
}

/// Run `f` with growing relative precision until it no longer reports exhaustion.
pub fn with_adaptive_order<T>(start: usize, max: usize, mut f: impl FnMut(usize) -> Result<T>) -> Result<T> {
    let mut order = start.max(1);
    loop {
        match f(order) {
            Err(Error::Precision) if order < max => order *= 2,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type L = Laurent<Rational>;

    #[test]
    fn removable_pole_cancels() {
        // ((1+ε)² - 1)/ε = 2 + ε
        let e = L::var(6);
        let one = e.lift_int(1);
        let f = one.add(&e).mul(&one.add(&e)).sub(&one).div(&e).unwrap();
        assert_eq!(f.constant_term().unwrap(), Rational::integer(2));
        assert_eq!(f.coeff(1).unwrap(), Rational::one());
    }

    #[test]
    fn pole_detected() {
        let e = L::var(4);
        let f = e.lift_int(3).div(&e).unwrap().add(&e.lift_int(1));
        assert!(matches!(f.constant_term(), Err(Error::Divergent(_))));
    }

    #[test]
    fn precision_exhaustion_and_retry() {
        // 1/ε³ · (ε³ + ε⁴): with order 1 the numerator is only known to O(ε⁴)
        let run = |order: usize| -> Result<Rational> {
            let e = L::var(order);
            let num = e.powi(3).add(&e.powi(4));
            let den = e.powi(3);
            let x = num.div(&den)?;
            let y = x.sub(&x.lift_int(1)).div(&e)?;
            y.constant_term()
        };
        assert_eq!(with_adaptive_order(1, 64, run).unwrap(), Rational::one());
    }

    #[test]
    fn ratfunc_expansion() {
        // f(t) = (t² - 1)/(t - 1)² around t=1: 2/ε + 1
        let f = RatFunc::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[1, -2, 1])).unwrap();
        let s = L::from_ratfunc_at(&f, &Rational::one(), 5).unwrap();
        assert_eq!(s.valuation(), -1);
        assert_eq!(s.coeff(-1).unwrap(), Rational::integer(2));
        assert_eq!(s.coeff(0).unwrap(), Rational::one());
    }
}
