//! Fraction field of the bivariate Laurent ring, used for dependence solving
//! by Gaussian elimination. Normalization is partial (monomial content,
//! (z1-z2) factors, rational content, opportunistic exact division); equality
//! is decided by cross-multiplication.

use crate::laurent::LaurentPoly;
use crate::q::Q;
use crate::ring::RingElem;
use num::{One, Zero};
use std::fmt;

#[derive(Clone, Debug)]
pub struct RatFunc {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl RatFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = Self { num, den };
        r.reduce();
        r
    }

    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_ring(e: &RingElem) -> Self {
        Self::new(e.num.clone(), RingElem::dz_power(e.dpow).num)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        // move monomial content of the denominator into the numerator
        if let Some((e1, e2)) = self.den.min_exponents() {
            if e1 != 0 || e2 != 0 {
                self.den = self.den.mul_monomial(-e1, -e2, &Q::one());
                self.num = self.num.mul_monomial(-e1, -e2, &Q::one());
            }
        }
        // opportunistic full cancellation
        if let Some(q) = self.num.divide_exact(&self.den) {
            self.num = q;
            self.den = LaurentPoly::one();
        } else {
            // cancel common (z1 - z2) factors
            let dz = LaurentPoly::z1_minus_z2();
            loop {
                match (self.num.divide_exact(&dz), self.den.divide_exact(&dz)) {
                    (Some(n), Some(d)) => {
                        self.num = n;
                        self.den = d;
                    }
                    _ => break,
                }
            }
        }
        // monic-ish denominator
        let l = self.den.leading_coeff().unwrap();
        if !l.is_one() {
            self.den = self.den.scale(&l.recip());
            self.num = self.num.scale(&l.recip());
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "division by zero");
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn equals(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    /// Convert back into R when the denominator is a unit times a power of
    /// (z1 - z2), or divides the numerator exactly.
    pub fn to_ring(&self) -> Option<RingElem> {
        RingElem::new(self.num.clone(), 0).divide_exact(&RingElem::new(self.den.clone(), 0))
    }

    pub fn eval(&self, q1: &Q, q2: &Q) -> Option<Q> {
        let d = self.den.eval(q1, q2)?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(q1, q2)? / d)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == LaurentPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::{qi, qr};

    #[test]
    fn field_ops() {
        let dz = RatFunc::from_ring(&RingElem::dz_power(-1));
        let a = RatFunc::new(LaurentPoly::monomial(1, 0, qi(1)), LaurentPoly::one());
        let s = dz.mul(&a).add(&dz.neg());
        // z1/(z1-z2) - 1/(z1-z2) = (z1-1)/(z1-z2)
        let expect = RatFunc::new(
            LaurentPoly::monomial(1, 0, qi(1)).add(&LaurentPoly::constant(qi(-1))),
            LaurentPoly::z1_minus_z2(),
        );
        assert!(s.equals(&expect));
        assert!(s.sub(&expect).is_zero());
    }

    #[test]
    fn to_ring_roundtrip() {
        let e = RingElem::new(LaurentPoly::monomial(2, -1, qr(3, 7)), 2);
        let r = RatFunc::from_ring(&e);
        assert_eq!(r.to_ring().unwrap(), e);
        // 1/(z1 + z2) is not in R
        let bad = RatFunc::new(
            LaurentPoly::one(),
            LaurentPoly::monomial(1, 0, qi(1)).add(&LaurentPoly::monomial(0, 1, qi(1))),
        );
        assert!(bad.to_ring().is_none());
    }
}
