//! Truncated expansions of ring elements and correlators in the three
//! expansion regions, with rational exponents.

use crate::q::{q_str, q_to_f64, Q};
use num::traits::Pow;
use num::Zero;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Expansion region. The "big"/"small" variable pairs are:
/// Product  |z1| > |z2|:        (z1, z2)
/// Iterate  |z2| > |z1 - z2|:   (z2, z1 - z2)
/// Reversed |z2| > |z1|:        (z2, z1)
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Region {
    Product,
    Iterate,
    Reversed,
}

impl Region {
    pub fn all() -> [Region; 3] {
        [Region::Product, Region::Iterate, Region::Reversed]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Region::Product => "product",
            Region::Iterate => "iterate",
            Region::Reversed => "reversed",
        }
    }
}

impl FromStr for Region {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(Region::Product),
            "iterate" => Ok(Region::Iterate),
            "reversed" => Ok(Region::Reversed),
            other => Err(crate::Error::UnknownRegion(other.to_string())),
        }
    }
}

/// Truncated sum of c * big^a * small^b with rational exponents; exact for
/// all terms with small-exponent b <= small_cut.
#[derive(Clone, Debug)]
pub struct RegionSeries {
    pub region: Region,
    pub terms: BTreeMap<(Q, Q), Q>,
    pub small_cut: Q,
}

impl RegionSeries {
    pub fn empty(region: Region, small_cut: Q) -> Self {
        Self { region, terms: BTreeMap::new(), small_cut }
    }

    pub fn add_term(&mut self, big: Q, small: Q, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((big, small)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn min_small(&self) -> Option<Q> {
        self.terms.keys().map(|(_, s)| s.clone()).min()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.region, other.region);
        let mut out = Self::empty(self.region, self.small_cut.clone().min(other.small_cut.clone()));
        for ((b, s), c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(b.clone(), s.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::empty(self.region, self.small_cut.clone());
        if c.is_zero() {
            return out;
        }
        for ((b, s), v) in &self.terms {
            out.add_term(b.clone(), s.clone(), v * c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::from_integer(1.into()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.region, other.region);
        let a_min = self.min_small().unwrap_or_else(Q::zero);
        let b_min = other.min_small().unwrap_or_else(Q::zero);
        let cut = (self.small_cut.clone() + b_min).min(other.small_cut.clone() + a_min);
        let mut out = Self::empty(self.region, cut);
        for ((ab, asm), ac) in &self.terms {
            for ((bb, bsm), bc) in &other.terms {
                let s = asm + bsm;
                if s <= out.small_cut {
                    out.add_term(ab + bb, s, ac * bc);
                }
            }
        }
        out
    }

    /// Drop terms above the cut and lower the cut.
    pub fn truncate_to(&self, cut: &Q) -> Self {
        let mut out = Self::empty(self.region, cut.clone().min(self.small_cut.clone()));
        for ((b, s), c) in &self.terms {
            if *s <= out.small_cut {
                out.add_term(b.clone(), s.clone(), c.clone());
            }
        }
        out
    }

    /// True when every retained term through the validity cut vanishes.
    pub fn is_zero_through_cut(&self) -> bool {
        self.terms.iter().all(|((_, s), c)| s > &self.small_cut || c.is_zero())
    }

    /// First (smallest small-exponent) nonzero term within the cut, if any.
    pub fn first_nonzero(&self) -> Option<((Q, Q), Q)> {
        self.terms
            .iter()
            .filter(|((_, s), c)| s <= &self.small_cut && !c.is_zero())
            .min_by(|a, b| (a.0 .1).cmp(&b.0 .1))
            .map(|(k, v)| (k.clone(), v.clone()))
    }

    /// Approximate numeric evaluation (tests only); arguments are the values
    /// of the region's (big, small) variable pair.
    pub fn eval_f64(&self, big: f64, small: f64) -> f64 {
        self.terms
            .iter()
            .map(|((b, s), c)| q_to_f64(c) * big.powf(q_to_f64(b)) * small.powf(q_to_f64(s)))
            .sum()
    }
}

impl fmt::Display for RegionSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (bv, sv) = match self.region {
            Region::Product => ("z1", "z2"),
            Region::Iterate => ("z2", "(z1-z2)"),
            Region::Reversed => ("z2", "z1"),
        };
        if self.terms.is_empty() {
            return write!(f, "0 + O[{}^({})]", sv, q_str(&self.small_cut));
        }
        let mut parts = Vec::new();
        for ((b, s), c) in &self.terms {
            parts.push(format!("({})*{}^({})*{}^({})", q_str(c), bv, q_str(b), sv, q_str(s)));
        }
        write!(f, "{} + O[{}^(>{})]", parts.join(" + "), sv, q_str(&self.small_cut))
    }
}

/// Rational-exponent binomial coefficient C(q, k).
pub fn binom_q(q: &Q, k: u32) -> Q {
    let mut acc = Q::from_integer(1.into());
    for i in 0..k as i64 {
        acc *= (q - Q::from_integer(i.into())) / Q::from_integer((i + 1).into());
    }
    acc
}

/// Expansion of the generalized monomial z1^p1 z2^p2 (z1-z2)^p12 in a region,
/// exact through (minimal small exponent) + order. For the reversed region
/// the branch (z2 - z1)^p12 is used; relation-kernel statements are
/// insensitive to this overall normalization.
pub fn gen_monomial_series(p1: &Q, p2: &Q, p12: &Q, region: Region, order: i64) -> RegionSeries {
    let mut out;
    match region {
        Region::Product => {
            // z1^{p1+p12} z2^{p2} (1 - z2/z1)^{p12}
            out = RegionSeries::empty(region, p2 + Q::from_integer(order.into()));
            for k in 0..=order.max(0) {
                let c = binom_q(p12, k as u32) * crate::q::neg_one_pow(k);
                out.add_term(p1 + p12 - Q::from_integer(k.into()), p2 + Q::from_integer(k.into()), c);
            }
        }
        Region::Reversed => {
            // (z2-z1)^{p12} branch: z2^{p2+p12} z1^{p1} (1 - z1/z2)^{p12}
            out = RegionSeries::empty(region, p1 + Q::from_integer(order.into()));
            for k in 0..=order.max(0) {
                let c = binom_q(p12, k as u32) * crate::q::neg_one_pow(k);
                out.add_term(p2 + p12 - Q::from_integer(k.into()), p1 + Q::from_integer(k.into()), c);
            }
        }
        Region::Iterate => {
            // z1^{p1} = z2^{p1} (1 + y/z2)^{p1}, y = z1 - z2
            out = RegionSeries::empty(region, p12 + Q::from_integer(order.into()));
            for k in 0..=order.max(0) {
                let c = binom_q(p1, k as u32);
                out.add_term(p1 + p2 - Q::from_integer(k.into()), p12 + Q::from_integer(k.into()), c);
            }
        }
    }
    out
}

/// Rational power q^e for rational q > 0 when e is an integer, used by tests.
pub fn qpow_q(q: &Q, e: &Q) -> Option<Q> {
    crate::q::to_i64(e).and_then(|i| {
        if q.is_zero() && i < 0 {
            None
        } else if q.is_zero() {
            Some(if i == 0 { Q::from_integer(1.into()) } else { Q::zero() })
        } else {
            Some(Pow::pow(q.clone(), i))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::{qi, qr};

    #[test]
    fn monomial_series_matches_numerics() {
        // z1^{1/2} z2^{-1} (z1-z2)^{2} at z1=4, z2=1 -> 2 * 9 = 18
        let s = gen_monomial_series(&qr(1, 2), &qi(-1), &qi(2), Region::Product, 40);
        assert!((s.eval_f64(4.0, 1.0) - 18.0).abs() < 1e-9);
        let s = gen_monomial_series(&qr(1, 2), &qi(-1), &qi(2), Region::Iterate, 40);
        // basis (z2, y): z2=1, y=3 is outside |y|<|z2|; use z1=1.2, z2=1
        let v = 1.2f64.sqrt() * 0.2f64.powi(2);
        assert!((s.eval_f64(1.0, 0.2) - v).abs() < 1e-9);
    }

    #[test]
    fn series_product_linearity() {
        let a = gen_monomial_series(&qi(1), &qi(0), &qi(-1), Region::Product, 12);
        let b = gen_monomial_series(&qi(-1), &qi(0), &qi(1), Region::Product, 12);
        let prod = a.mul(&b);
        // product should be 1 through the cut
        let one = {
            let mut s = RegionSeries::empty(Region::Product, prod.small_cut.clone());
            s.add_term(qi(0), qi(0), qi(1));
            s
        };
        assert!(prod.sub(&one).is_zero_through_cut());
    }

    #[test]
    fn binom_q_rational() {
        assert_eq!(binom_q(&qr(1, 2), 2), qr(-1, 8));
        assert_eq!(binom_q(&qi(3), 2), qi(3));
    }
}
