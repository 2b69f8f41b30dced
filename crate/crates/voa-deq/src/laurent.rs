//! Sparse Laurent polynomials in z1, z2 over the rationals.

use crate::q::{q_str, qi, Q};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse bivariate Laurent polynomial: map from (e1, e2) to coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LaurentPoly {
    pub terms: BTreeMap<(i64, i64), Q>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, Q::one())
    }

    pub fn monomial(e1: i64, e2: i64, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((e1, e2), c);
        }
        Self { terms }
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(0, 0, c)
    }

    /// z1 - z2.
    pub fn z1_minus_z2() -> Self {
        let mut p = Self::monomial(1, 0, Q::one());
        p.add_term(0, 1, -Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e1: i64, e2: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((e1, e2)).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(e1, e2));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(e1, e2), c) in &other.terms {
            out.add_term(e1, e2, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn mul_monomial(&self, e1: i64, e2: i64, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), v)| ((a + e1, b + e2), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a1, a2), c) in &self.terms {
            for (&(b1, b2), d) in &other.terms {
                out.add_term(a1 + b1, a2 + b2, c * d);
            }
        }
        out
    }

    /// Leading term in lexicographic order (e1, then e2), largest first.
    fn leading(&self) -> Option<((i64, i64), &Q)> {
        self.terms.iter().next_back().map(|(k, v)| (*k, v))
    }

    /// Exact division in the Laurent ring: returns `self / divisor` when the
    /// division leaves no remainder. Both operands are shifted by monomials
    /// into the polynomial ring (monomials are units here), where lex
    /// leading-term reduction with a component-wise divisibility test is a
    /// sound and terminating exactness check.
    pub fn divide_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (s1, s2) = self.min_exponents().unwrap();
        let (d1, d2) = divisor.min_exponents().unwrap();
        let num = self.mul_monomial(-s1, -s2, &Q::one());
        let den = divisor.mul_monomial(-d1, -d2, &Q::one());
        let mut rem = num;
        let mut quot = Self::zero();
        let (dk, dc) = den.leading().unwrap();
        let dc = dc.clone();
        while !rem.is_zero() {
            let (rk, rc) = rem.leading().unwrap();
            if rk.0 < dk.0 || rk.1 < dk.1 {
                return None;
            }
            let t = (rk.0 - dk.0, rk.1 - dk.1);
            let c = rc / &dc;
            quot.add_term(t.0, t.1, c.clone());
            rem = rem.sub(&den.mul_monomial(t.0, t.1, &c));
        }
        Some(quot.mul_monomial(s1 - d1, s2 - d2, &Q::one()))
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, q1: &Q, q2: &Q) -> Option<Q> {
        let mut acc = Q::zero();
        for (&(e1, e2), c) in &self.terms {
            acc += c * qpow(q1, e1)? * qpow(q2, e2)?;
        }
        Some(acc)
    }

    /// Uniform degree under deg z1 = deg z2 = -1, i.e. every monomial has
    /// e1 + e2 equal to the same value; returns -(e1+e2).
    pub fn uniform_degree(&self) -> Option<i64> {
        let mut deg = None;
        for &(e1, e2) in self.terms.keys() {
            let d = -(e1 + e2);
            match deg {
                None => deg = Some(d),
                Some(x) if x == d => {}
                _ => return None,
            }
        }
        deg
    }

    /// d/dz1.
    pub fn d_z1(&self) -> Self {
        let mut out = Self::zero();
        for (&(e1, e2), c) in &self.terms {
            if e1 != 0 {
                out.add_term(e1 - 1, e2, c * qi(e1));
            }
        }
        out
    }

    /// d/dz2.
    pub fn d_z2(&self) -> Self {
        let mut out = Self::zero();
        for (&(e1, e2), c) in &self.terms {
            if e2 != 0 {
                out.add_term(e1, e2 - 1, c * qi(e2));
            }
        }
        out
    }

    /// Minimum exponents over the support.
    pub fn min_exponents(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        let mut m = first;
        for &(a, b) in it {
            m.0 = m.0.min(a);
            m.1 = m.1.min(b);
        }
        Some(m)
    }

    /// Maximum exponents over the support.
    pub fn max_exponents(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        let mut m = first;
        for &(a, b) in it {
            m.0 = m.0.max(a);
            m.1 = m.1.max(b);
        }
        Some(m)
    }

    /// Leading (lex-largest) coefficient.
    pub fn leading_coeff(&self) -> Option<Q> {
        self.leading().map(|(_, c)| c.clone())
    }
}

/// q^e for integer e (negative allowed; None when q = 0 and e < 0).
pub fn qpow(q: &Q, e: i64) -> Option<Q> {
    if e == 0 {
        return Some(Q::one());
    }
    if q.is_zero() {
        return if e > 0 { Some(Q::zero()) } else { None };
    }
    let mut acc = Q::one();
    let base = if e > 0 { q.clone() } else { q.recip() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    Some(acc)
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(e1, e2), c) in self.terms.iter().rev() {
            let mut parts = Vec::new();
            if !c.is_one() || (e1 == 0 && e2 == 0) {
                parts.push(format!("({})", q_str(c)));
            }
            if e1 != 0 {
                parts.push(if e1 == 1 { "z1".into() } else { format!("z1^{}", e1) });
            }
            if e2 != 0 {
                parts.push(if e2 == 1 { "z2".into() } else { format!("z2^{}", e2) });
            }
            let term = parts.join("*");
            if first {
                write!(f, "{}", term)?;
                first = false;
            } else {
                write!(f, " + {}", term)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::qr;

    #[test]
    fn mul_and_divide_exact() {
        let a = LaurentPoly::z1_minus_z2();
        let mut b = LaurentPoly::monomial(-2, 1, qi(3));
        b.add_term(0, 0, qr(1, 2));
        let prod = a.mul(&b);
        assert_eq!(prod.divide_exact(&a), Some(b.clone()));
        assert_eq!(prod.divide_exact(&b), Some(a.clone()));
        // Not divisible: (z1 - z2) + 1 by (z1 - z2)
        let c = a.add(&LaurentPoly::one());
        assert!(c.divide_exact(&a).is_none());
    }

    #[test]
    fn eval_and_derivative() {
        let p = LaurentPoly::monomial(2, -1, qi(1)); // z1^2 / z2
        assert_eq!(p.eval(&qi(3), &qi(2)), Some(qr(9, 2)));
        assert!(LaurentPoly::monomial(0, -1, qi(1)).eval(&qi(1), &qi(0)).is_none());
        let d = p.d_z1();
        assert_eq!(d, LaurentPoly::monomial(1, -1, qi(2)));
    }

    #[test]
    fn uniform_degree_check() {
        let mut p = LaurentPoly::monomial(1, -1, qi(1));
        assert_eq!(p.uniform_degree(), Some(0));
        p.add_term(0, 0, qi(5));
        assert_eq!(p.uniform_degree(), Some(0));
        p.add_term(1, 0, qi(1));
        assert_eq!(p.uniform_degree(), None);
    }
}
