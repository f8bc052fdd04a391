//! Exact scalars: rationals, univariate polynomials and rational functions,
//! truncated Laurent series for one-sided limits, and products of affine
//! factors for residue calculus.

mod laurent;
mod linear;
mod poly;
mod ratfunc;
mod rational;

use std::fmt::Debug;

pub use laurent::{with_adaptive_order, Laurent};
pub use linear::{residue, residue_simple, Affine, LinearFactorTerm};
pub use poly::Poly;
pub use ratfunc::{ratfunc_limit_at, reconstruct, RatFunc};
pub use rational::Rational;

use crate::error::Result;

/// Ring-with-division operations shared by every exact number type.
///
/// `lift` builds a constant of the same kind as `self`, which lets series types
/// carry their working precision into freshly created constants.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn lift(&self, q: &Rational) -> Self;

    fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    fn lift_int(&self, n: i64) -> Self {
        self.lift(&Rational::integer(n))
    }

    fn add_int(&self, n: i64) -> Self {
        self.add(&self.lift_int(n))
    }

    fn mul_int(&self, n: i64) -> Self {
        self.mul(&self.lift_int(n))
    }

    fn mul_rat(&self, q: &Rational) -> Self {
        self.mul(&self.lift(q))
    }

    fn powi(&self, e: u32) -> Self {
        let mut acc = self.lift_int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// A scalar with context-free constants.
pub trait Field: Scalar + std::fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
}

/// Scalars that contain a copy of the field `F` (constants of a symbolic or series type).
pub trait Embed<F>: Scalar {
    fn embed(&self, c: &F) -> Self;
}

impl Embed<Rational> for Rational {
    fn embed(&self, c: &Rational) -> Self {
        c.clone()
    }
}

impl<F: Field> Embed<F> for RatFunc<F> {
    fn embed(&self, c: &F) -> Self {
        RatFunc::constant(c.clone())
    }
}

impl<F: Field> Embed<F> for Laurent<F> {
    fn embed(&self, c: &F) -> Self {
        Laurent::constant(c.clone(), self.order())
    }
}

impl Scalar for Rational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self> {
        self.recip()
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.checked_div(o)
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn lift(&self, q: &Rational) -> Self {
        q.clone()
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

/// Rising factorial (x)_m; for negative m this is 1/((x+m)_{-m}).
pub fn pochhammer<S: Scalar>(x: &S, m: i64) -> Result<S> {
    let mut acc = x.lift_int(1);
    if m >= 0 {
        for i in 0..m {
            acc = acc.mul(&x.add_int(i));
        }
        Ok(acc)
    } else {
        for i in m..0 {
            acc = acc.mul(&x.add_int(i));
        }
        acc.inv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&Rational::integer(2), 2).unwrap(), Rational::integer(6));
        assert_eq!(pochhammer(&Rational::new(1, 2), -1).unwrap(), Rational::integer(-2));
        assert_eq!(pochhammer(&Rational::new(7, 3), 0).unwrap(), Rational::one());
        // (a+1)_2/(a+b+2)_2 at a=b=0
        let r = pochhammer(&Rational::integer(1), 2).unwrap().div(&pochhammer(&Rational::integer(2), 2).unwrap());
        assert_eq!(r.unwrap(), Rational::new(1, 3));
    }

    #[test]
    fn pochhammer_negative_pole() {
        assert_eq!(pochhammer(&Rational::integer(2), -2), Err(Error::DivisionByZero));
    }

    #[test]
    fn pochhammer_reflection() {
        // (x)_m (x+m)_{-m} = 1
        let x = Rational::new(5, 7);
        for m in -4..=4 {
            let p = pochhammer(&x, m).unwrap();
            let q = pochhammer(&(&x + m), -m).unwrap();
            assert_eq!(p * q, Rational::one());
        }
    }
}
