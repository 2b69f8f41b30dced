//! Three-variable analogue of the coefficient ring, for 5-point functions:
//! Q[z1^±, z2^±, z3^±, (z1-z2)^{-1}, (z1-z3)^{-1}, (z2-z3)^{-1}].

use crate::q::{q_str, qi, Q};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub const NPAIRS: usize = 3; // (z1-z2), (z1-z3), (z2-z3)

/// Sparse Laurent polynomial in z1, z2, z3.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MPoly {
    pub terms: BTreeMap<[i64; 3], Q>,
}

impl MPoly {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial([0; 3], Q::one())
    }

    pub fn monomial(e: [i64; 3], c: Q) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(e, c);
        }
        Self { terms: t }
    }

    /// z_i - z_j for the pair index 0:(1,2), 1:(1,3), 2:(2,3).
    pub fn diff(pair: usize) -> Self {
        let (i, j) = pair_vars(pair);
        let mut p = Self::zero();
        let mut ei = [0i64; 3];
        ei[i] = 1;
        p.add_term(ei, Q::one());
        let mut ej = [0i64; 3];
        ej[j] = 1;
        p.add_term(ej, -Q::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: [i64; 3], c: Q) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(e).or_insert_with(Q::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect() }
    }

    pub fn mul_monomial(&self, e: [i64; 3], s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(a, c)| ([a[0] + e[0], a[1] + e[1], a[2] + e[2]], c * s))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], c * d);
            }
        }
        out
    }

    fn min_exponents(&self) -> Option<[i64; 3]> {
        let mut it = self.terms.keys();
        let mut m = *it.next()?;
        for e in it {
            for k in 0..3 {
                m[k] = m[k].min(e[k]);
            }
        }
        Some(m)
    }

    fn leading(&self) -> Option<([i64; 3], &Q)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// Exact division (see the bivariate version for the method).
    pub fn divide_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let s = self.min_exponents().unwrap();
        let d = divisor.min_exponents().unwrap();
        let num = self.mul_monomial([-s[0], -s[1], -s[2]], &Q::one());
        let den = divisor.mul_monomial([-d[0], -d[1], -d[2]], &Q::one());
        let mut rem = num;
        let mut quot = Self::zero();
        let (dk, dc) = den.leading().unwrap();
        let dc = dc.clone();
        while !rem.is_zero() {
            let (rk, rc) = rem.leading().unwrap();
            if (0..3).any(|i| rk[i] < dk[i]) {
                return None;
            }
            let t = [rk[0] - dk[0], rk[1] - dk[1], rk[2] - dk[2]];
            let c = rc / &dc;
            quot.add_term(t, c.clone());
            rem = rem.sub(&den.mul_monomial(t, &c));
        }
        Some(quot.mul_monomial([s[0] - d[0], s[1] - d[1], s[2] - d[2]], &Q::one()))
    }

    pub fn eval(&self, p: &[Q; 3]) -> Option<Q> {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for k in 0..3 {
                t *= crate::laurent::qpow(&p[k], e[k])?;
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn d_z(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[var] != 0 {
                let mut e2 = *e;
                e2[var] -= 1;
                out.add_term(e2, c * qi(e[var]));
            }
        }
        out
    }
}

pub fn pair_vars(pair: usize) -> (usize, usize) {
    match pair {
        0 => (0, 1),
        1 => (0, 2),
        2 => (1, 2),
        _ => panic!("bad pair"),
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut s = format!("({})", q_str(c));
            for (k, name) in ["z1", "z2", "z3"].iter().enumerate() {
                if e[k] != 0 {
                    s.push_str(&format!("*{}^{}", name, e[k]));
                }
            }
            parts.push(s);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Element num / prod (z_i - z_j)^{dpow[pair]} in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MRing {
    pub num: MPoly,
    pub dpow: [i64; NPAIRS],
}

impl MRing {
    pub fn new(num: MPoly, dpow: [i64; NPAIRS]) -> Self {
        let mut e = Self { num, dpow };
        e.canonicalize();
        e
    }

    pub fn zero() -> Self {
        Self { num: MPoly::zero(), dpow: [0; NPAIRS] }
    }

    pub fn one() -> Self {
        Self { num: MPoly::one(), dpow: [0; NPAIRS] }
    }

    pub fn constant(c: Q) -> Self {
        Self { num: MPoly::monomial([0; 3], c), dpow: [0; NPAIRS] }
    }

    pub fn monomial(e: [i64; 3], c: Q) -> Self {
        Self { num: MPoly::monomial(e, c), dpow: [0; NPAIRS] }
    }

    /// (z_i - z_j)^k for pair index and any integer k.
    pub fn diff_power(pair: usize, k: i64) -> Self {
        if k >= 0 {
            let mut p = MPoly::one();
            let d = MPoly::diff(pair);
            for _ in 0..k {
                p = p.mul(&d);
            }
            Self { num: p, dpow: [0; NPAIRS] }
        } else {
            let mut dpow = [0; NPAIRS];
            dpow[pair] = -k;
            Self { num: MPoly::one(), dpow }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.dpow = [0; NPAIRS];
            return;
        }
        for pair in 0..NPAIRS {
            let d = MPoly::diff(pair);
            while self.dpow[pair] > 0 {
                match self.num.divide_exact(&d) {
                    Some(q) => {
                        self.num = q;
                        self.dpow[pair] -= 1;
                    }
                    None => break,
                }
            }
        }
    }

    fn denom_poly(dpow: &[i64; NPAIRS]) -> MPoly {
        let mut p = MPoly::one();
        for pair in 0..NPAIRS {
            for _ in 0..dpow[pair] {
                p = p.mul(&MPoly::diff(pair));
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut dpow = [0; NPAIRS];
        for k in 0..NPAIRS {
            dpow[k] = self.dpow[k].max(o.dpow[k]);
        }
        let a_extra: [i64; NPAIRS] = std::array::from_fn(|k| dpow[k] - self.dpow[k]);
        let b_extra: [i64; NPAIRS] = std::array::from_fn(|k| dpow[k] - o.dpow[k]);
        let a = self.num.mul(&Self::denom_poly(&a_extra));
        let b = o.num.mul(&Self::denom_poly(&b_extra));
        Self::new(a.add(&b), dpow)
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), dpow: self.dpow }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(s), dpow: self.dpow }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let dpow = std::array::from_fn(|k| self.dpow[k] + o.dpow[k]);
        Self::new(self.num.mul(&o.num), dpow)
    }

    pub fn divide_exact(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        // self/o = (self.num * denom(o)) / (o.num * denom(self)); try to
        // keep it in the ring by polynomial exact division with borrowing.
        let mut num = self.num.mul(&Self::denom_poly(&o.dpow));
        let mut dpow = self.dpow;
        let mut den = o.num.clone();
        for pair in 0..NPAIRS {
            let d = MPoly::diff(pair);
            loop {
                if let Some(q) = den.divide_exact(&d) {
                    den = q;
                    dpow[pair] += 1;
                } else {
                    break;
                }
            }
        }
        if den.terms.len() == 1 {
            let (e, c) = den.leading().unwrap();
            num = num.mul_monomial([-e[0], -e[1], -e[2]], &c.recip());
            return Some(Self::new(num, dpow));
        }
        num.divide_exact(&den).map(|q| Self::new(q, dpow))
    }

    pub fn eval(&self, p: &[Q; 3]) -> Option<Q> {
        let n = self.num.eval(p)?;
        let mut acc = n;
        for pair in 0..NPAIRS {
            let (i, j) = pair_vars(pair);
            let d = &p[i] - &p[j];
            acc *= crate::laurent::qpow(&d, -self.dpow[pair])?;
        }
        Some(acc)
    }

    pub fn d_z(&self, var: usize) -> Self {
        // quotient rule over the pair denominators
        let mut out = Self::new(self.num.d_z(var), self.dpow);
        for pair in 0..NPAIRS {
            if self.dpow[pair] == 0 {
                continue;
            }
            let (i, j) = pair_vars(pair);
            let sign = if var == i {
                -qi(self.dpow[pair])
            } else if var == j {
                qi(self.dpow[pair])
            } else {
                continue;
            };
            let mut dpow = self.dpow;
            dpow[pair] += 1;
            out = out.add(&Self::new(self.num.scale(&sign), dpow));
        }
        out
    }
}

impl fmt::Display for MRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.num)?;
        let names = ["(z1-z2)", "(z1-z3)", "(z2-z3)"];
        for pair in 0..NPAIRS {
            if self.dpow[pair] > 0 {
                write!(f, " * {}^-{}", names[pair], self.dpow[pair])?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::qr;

    fn pt() -> [Q; 3] {
        [qi(5), qi(3), qi(2)]
    }

    #[test]
    fn ring_ops_at_points() {
        let a = MRing::new(MPoly::monomial([1, -1, 0], qr(2, 3)), [1, 0, 2]);
        let b = MRing::diff_power(0, -1).add(&MRing::one());
        let p = pt();
        let sum = a.add(&b).eval(&p).unwrap();
        assert_eq!(sum, a.eval(&p).unwrap() + b.eval(&p).unwrap());
        let prod = a.mul(&b).eval(&p).unwrap();
        assert_eq!(prod, a.eval(&p).unwrap() * b.eval(&p).unwrap());
    }

    #[test]
    fn canonical_and_division() {
        let d01 = MRing::diff_power(0, 1);
        let a = MRing::new(d01.num.mul(&MPoly::monomial([0, 0, 1], qi(1))), [2, 1, 0]);
        assert_eq!(a.dpow, [1, 1, 0]);
        let b = MRing::new(MPoly::monomial([1, 0, 0], qi(2)), [0, 1, 0]);
        let q = a.mul(&b).divide_exact(&b).unwrap();
        assert_eq!(q, a);
    }

    #[test]
    fn derivative_check() {
        // d/dz1 of 1/(z1-z3) = -1/(z1-z3)^2
        let e = MRing::diff_power(1, -1);
        let d = e.d_z(0);
        assert_eq!(d, MRing::diff_power(1, -2).scale(&qi(-1)));
        // d/dz3 of 1/(z1-z3) = +1/(z1-z3)^2
        assert_eq!(e.d_z(2), MRing::diff_power(1, -2));
    }
}
