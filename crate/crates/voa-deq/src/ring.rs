//! Canonical elements of the localized ring R = Q[z1^±, z2^±, (z1-z2)^{-1}]:
//! a Laurent-polynomial numerator over a nonnegative power of (z1 - z2),
//! with (z1 - z2)-divisibility of the numerator removed by trial division.

use crate::error::Error;
use crate::laurent::{qpow, LaurentPoly};
use crate::q::{binom, neg_one_pow, qi, Q};
use crate::series::{Region, RegionSeries};
use crate::Result;
use num::{One, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RingElem {
    pub num: LaurentPoly,
    /// Exponent n of the denominator (z1 - z2)^n, n >= 0.
    pub dpow: i64,
}

impl RingElem {
    pub fn new(num: LaurentPoly, dpow: i64) -> Self {
        let mut e = Self { num, dpow };
        e.canonicalize();
        e
    }

    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), dpow: 0 }
    }

    pub fn one() -> Self {
        Self { num: LaurentPoly::one(), dpow: 0 }
    }

    pub fn constant(c: Q) -> Self {
        Self { num: LaurentPoly::constant(c), dpow: 0 }
    }

    pub fn monomial(e1: i64, e2: i64, c: Q) -> Self {
        Self { num: LaurentPoly::monomial(e1, e2, c), dpow: 0 }
    }

    /// (z1 - z2)^k for any integer k.
    pub fn dz_power(k: i64) -> Self {
        if k >= 0 {
            let mut p = LaurentPoly::one();
            for _ in 0..k {
                p = p.mul(&LaurentPoly::z1_minus_z2());
            }
            Self { num: p, dpow: 0 }
        } else {
            Self { num: LaurentPoly::one(), dpow: -k }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.dpow = 0;
            return;
        }
        let dz = LaurentPoly::z1_minus_z2();
        while self.dpow > 0 {
            match self.num.divide_exact(&dz) {
                Some(q) => {
                    self.num = q;
                    self.dpow -= 1;
                }
                None => break,
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.dpow.max(other.dpow);
        let a = self.num.mul(&RingElem::dz_power(n - self.dpow).num);
        let b = other.num.mul(&RingElem::dz_power(n - other.dpow).num);
        Self::new(a.add(&b), n)
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), dpow: self.dpow }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), dpow: self.dpow }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.dpow + other.dpow)
    }

    /// Multiply by z1^e1 z2^e2 (z1-z2)^dk.
    pub fn mul_units(&self, e1: i64, e2: i64, dk: i64) -> Self {
        let shifted = self.num.mul_monomial(e1, e2, &Q::one());
        let e = Self { num: shifted, dpow: self.dpow };
        e.mul(&Self::dz_power(dk))
    }

    /// Exact division; None when not exact in R.
    pub fn divide_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        // self / other = (self.num / other.num) * (z1-z2)^{other.dpow - self.dpow}
        // Division by a monomial is always exact; otherwise try polynomial
        // exact division, allowing extra (z1-z2) factors from the numerator.
        let mut num = self.num.clone();
        let mut dpow = self.dpow - other.dpow;
        if other.num.terms.len() == 1 {
            let (&(e1, e2), c) = other.num.terms.iter().next().unwrap();
            num = num.mul_monomial(-e1, -e2, &c.recip());
            return Some(if dpow >= 0 {
                Self { num, dpow }
            } else {
                Self::new(num.mul(&Self::dz_power(-dpow).num), 0)
            });
        }
        // Allow the divisor numerator to contain (z1-z2) factors that the
        // canonical numerator lacks by borrowing from the denominator power.
        let dz = LaurentPoly::z1_minus_z2();
        let mut den = other.num.clone();
        let mut borrowed = 0;
        loop {
            if let Some(q) = num.divide_exact(&den) {
                num = q;
                break;
            }
            match den.divide_exact(&dz) {
                Some(d2) => {
                    den = d2;
                    borrowed += 1;
                }
                None => return None,
            }
        }
        dpow += borrowed;
        Some(if dpow >= 0 {
            Self { num, dpow }
        } else {
            Self::new(num.mul(&Self::dz_power(-dpow).num), 0)
        })
    }

    /// Uniform total degree under deg z1 = deg z2 = -1 (the denominator
    /// contributes +dpow); None when the element is not homogeneous.
    pub fn ring_degree(&self) -> Option<i64> {
        if self.is_zero() {
            return Some(0);
        }
        self.num.uniform_degree().map(|d| d + self.dpow)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.ring_degree().is_some()
    }

    /// Pole order at z1 = z2 (exact: canonical form keeps the numerator
    /// coprime to (z1 - z2) whenever dpow > 0). May be conservative (an
    /// upper bound) when dpow = 0 and the numerator vanishes on z1 = z2.
    pub fn pole_dz(&self) -> i64 {
        self.dpow
    }

    /// Pole order at z1 = 0: -(min z1-exponent of the numerator), at least 0.
    pub fn pole_z1(&self) -> i64 {
        self.num.min_exponents().map_or(0, |(e1, _)| (-e1).max(0))
    }

    /// Pole order at z2 = 0.
    pub fn pole_z2(&self) -> i64 {
        self.num.min_exponents().map_or(0, |(_, e2)| (-e2).max(0))
    }

    /// Evaluate at a rational point off the locus z1 z2 (z1 - z2) = 0.
    pub fn ring_eval(&self, q1: &Q, q2: &Q) -> Result<Q> {
        if q1.is_zero() || q2.is_zero() || q1 == q2 {
            return Err(Error::ForbiddenPoint);
        }
        let n = self.num.eval(q1, q2).ok_or(Error::ForbiddenPoint)?;
        let d = qpow(&(q1 - q2), -self.dpow).ok_or(Error::ForbiddenPoint)?;
        Ok(n * d)
    }

    /// d/dz1.
    pub fn d_z1(&self) -> Self {
        // d/dz1 [num (z1-z2)^{-n}] = num' (z1-z2)^{-n} - n num (z1-z2)^{-n-1}
        let a = Self::new(self.num.d_z1(), self.dpow);
        let b = Self::new(self.num.scale(&qi(-self.dpow)), self.dpow + 1);
        a.add(&b)
    }

    /// d/dz2.
    pub fn d_z2(&self) -> Self {
        let a = Self::new(self.num.d_z2(), self.dpow);
        let b = Self::new(self.num.scale(&qi(self.dpow)), self.dpow + 1);
        a.add(&b)
    }

    /// Laurent-expand in the given region, exact through terms whose
    /// small-variable exponent is at most (minimal small exponent) + order.
    pub fn ring_expand(&self, region: Region, order: i64) -> RegionSeries {
        let mut out = RegionSeries::empty(region, qi(0));
        if self.is_zero() {
            out.small_cut = qi(order);
            return out;
        }
        let n = self.dpow;
        match region {
            Region::Product => {
                // small variable z2; (z1-z2)^{-n} = sum_k C(n-1+k,k) z2^k z1^{-n-k}
                let min_e2 = self.num.terms.keys().map(|&(_, e2)| e2).min().unwrap();
                let cut = min_e2 + order;
                out.small_cut = qi(cut);
                for (&(e1, e2), c) in &self.num.terms {
                    if n == 0 {
                        if e2 <= cut {
                            out.add_term(qi(e1), qi(e2), c.clone());
                        }
                        continue;
                    }
                    for k in 0..=(cut - e2).max(-1) {
                        let coef = binom(n - 1 + k, k as u32);
                        out.add_term(qi(e1 - n - k), qi(e2 + k), c * coef);
                    }
                }
            }
            Region::Reversed => {
                // small variable z1; (z1-z2)^{-n} = (-1)^n sum_k C(n-1+k,k) z1^k z2^{-n-k}
                let min_e1 = self.num.terms.keys().map(|&(e1, _)| e1).min().unwrap();
                let cut = min_e1 + order;
                out.small_cut = qi(cut);
                for (&(e1, e2), c) in &self.num.terms {
                    if n == 0 {
                        if e1 <= cut {
                            // big variable z2, small variable z1
                            out.add_term(qi(e2), qi(e1), c.clone());
                        }
                        continue;
                    }
                    let sign = neg_one_pow(n);
                    for k in 0..=(cut - e1).max(-1) {
                        let coef = binom(n - 1 + k, k as u32) * &sign;
                        out.add_term(qi(e2 - n - k), qi(e1 + k), c * coef);
                    }
                }
            }
            Region::Iterate => {
                // small variable y = z1 - z2; z1^{e1} = sum_j C(e1,j) z2^{e1-j} y^j
                out.small_cut = qi(-n + order);
                for (&(e1, e2), c) in &self.num.terms {
                    let jmax = order; // y-exponent j - n <= -n + order
                    let upper = if e1 >= 0 { e1.min(jmax) } else { jmax };
                    for j in 0..=upper.max(-1) {
                        let coef = binom(e1, j as u32);
                        out.add_term(qi(e1 - j + e2), qi(j - n), c * coef);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dpow == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) * (z1-z2)^-{}", self.num, self.dpow)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::qr;

    fn dz() -> RingElem {
        RingElem::dz_power(1)
    }

    #[test]
    fn canonical_strips_dz_factors() {
        // (z1 - z2) * z1 / (z1 - z2)^2 -> z1 / (z1 - z2)
        let num = LaurentPoly::z1_minus_z2().mul(&LaurentPoly::monomial(1, 0, qi(1)));
        let e = RingElem::new(num, 2);
        assert_eq!(e.dpow, 1);
        assert_eq!(e.num, LaurentPoly::monomial(1, 0, qi(1)));
    }

    #[test]
    fn add_mul_consistency_at_points() {
        let a = RingElem::new(LaurentPoly::monomial(1, -2, qr(3, 4)), 1);
        let b = RingElem::new(LaurentPoly::z1_minus_z2().add(&LaurentPoly::one()), 2);
        let p1 = qi(3);
        let p2 = qi(5);
        let sum = a.add(&b).ring_eval(&p1, &p2).unwrap();
        assert_eq!(sum, a.ring_eval(&p1, &p2).unwrap() + b.ring_eval(&p1, &p2).unwrap());
        let prod = a.mul(&b).ring_eval(&p1, &p2).unwrap();
        assert_eq!(prod, a.ring_eval(&p1, &p2).unwrap() * b.ring_eval(&p1, &p2).unwrap());
    }

    #[test]
    fn degree_counts_denominator() {
        // z1 z2 / (z1-z2)^3: degree -(1+1) + 3 = 1
        let e = RingElem::new(LaurentPoly::monomial(1, 1, qi(1)), 3);
        assert_eq!(e.ring_degree(), Some(1));
        assert_eq!(RingElem::monomial(1, -1, qi(2)).ring_degree(), Some(0));
        let mixed = RingElem::monomial(1, 0, qi(1)).add(&RingElem::one());
        assert_eq!(mixed.ring_degree(), None);
    }

    #[test]
    fn derivative_product_rule() {
        let a = RingElem::new(LaurentPoly::monomial(2, -1, qi(1)), 1);
        let b = dz();
        let lhs = a.mul(&b).d_z1();
        let rhs = a.d_z1().mul(&b).add(&a.mul(&b.d_z1()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn expansion_matches_eval() {
        // check 1/(z1-z2) in all three regions against the rational value
        let e = RingElem::dz_power(-1);
        // product region: z1=4, z2=1 -> 1/3; series sum_k z2^k z1^{-1-k}
        let s = e.ring_expand(Region::Product, 30);
        let v = s.eval_f64(4.0, 1.0);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let s = e.ring_expand(Region::Reversed, 30);
        let v = s.eval_f64(4.0, 1.0); // (z1, z2) = (1, 4): 1/(1-4)
        assert!((v + 1.0 / 3.0).abs() < 1e-12);
        let s = e.ring_expand(Region::Iterate, 5);
        // iterate region basis (z2, y): exact single term y^{-1}
        let v = s.eval_f64(7.0, 0.5); // z2=7, y=1/2
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expansion_linear_multiplicative() {
        let a = RingElem::new(LaurentPoly::monomial(0, 2, qi(5)), 1);
        let b = RingElem::new(LaurentPoly::monomial(-1, 0, qi(1)), 2);
        for region in [Region::Product, Region::Iterate, Region::Reversed] {
            let sa = a.ring_expand(region, 8);
            let sb = b.ring_expand(region, 8);
            let sum = a.add(&b).ring_expand(region, 8);
            assert!(sa.add(&sb).sub(&sum).is_zero_through_cut());
            let prod = a.mul(&b).ring_expand(region, 8);
            let sp = sa.mul(&sb);
            assert!(sp.sub(&prod.truncate_to(&sp.small_cut)).is_zero_through_cut());
        }
    }

    #[test]
    fn divide_exact_roundtrip() {
        let a = RingElem::new(LaurentPoly::monomial(1, -2, qr(3, 4)).add(&LaurentPoly::one()), 1);
        let b = RingElem::new(LaurentPoly::z1_minus_z2().add(&LaurentPoly::monomial(0, 1, qi(2))), 2);
        let p = a.mul(&b);
        let q = p.divide_exact(&b).unwrap();
        assert_eq!(q, a);
        assert!(RingElem::one().divide_exact(&b.mul(&b)).is_none());
    }

    #[test]
    fn forbidden_point_rejected() {
        let e = RingElem::one();
        assert!(e.ring_eval(&qi(0), &qi(1)).is_err());
        assert!(e.ring_eval(&qi(2), &qi(2)).is_err());
        assert!(e.ring_eval(&qi(2), &qi(1)).is_ok());
    }
}
