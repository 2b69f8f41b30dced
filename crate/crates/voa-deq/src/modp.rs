//! Laurent polynomials and module membership over GF(p) for a word-sized
//! prime: a fast mirror of the exact Q[x^±] solver, used only to locate
//! candidate solutions (localization exponent and participating columns).
//! Every candidate is re-solved and replayed exactly afterwards, so a bad
//! reduction can cost time but never correctness.

use crate::q::Q;
use crate::uni::LaurentUni;

/// The Mersenne prime 2^61 - 1.
pub const P: u64 = (1u64 << 61) - 1;

fn mod_p(a: u64) -> u64 {
    a % P
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    acc
}

fn inv(a: u64) -> u64 {
    debug_assert!(a != 0);
    pow(a, P - 2)
}

fn bigint_mod(n: &num::BigInt) -> u64 {
    use num::bigint::Sign;
    use num::ToPrimitive;
    let (sign, m) = (n.sign(), (n.magnitude() % P).to_u64().unwrap());
    if sign == Sign::Minus && m != 0 {
        P - m
    } else {
        m
    }
}

/// Image of a rational number; None when the denominator vanishes mod p.
pub fn q_mod(q: &Q) -> Option<u64> {
    let d = bigint_mod(&q.denom().clone().into());
    if d == 0 {
        return None;
    }
    Some(mul(bigint_mod(&q.numer().clone().into()), inv(d)))
}

/// Laurent polynomial over GF(p): x^shift * (c[0] + c[1] x + ...) with
/// c[0] != 0 and trimmed top, zero as (0, []).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LFp {
    pub shift: i64,
    pub c: Vec<u64>,
}

impl LFp {
    pub fn zero() -> Self {
        LFp { shift: 0, c: vec![] }
    }

    pub fn new(shift: i64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x = mod_p(*x);
        }
        while matches!(c.last(), Some(0)) {
            c.pop();
        }
        let z = c.iter().take_while(|&&x| x == 0).count();
        if z == c.len() {
            return Self::zero();
        }
        LFp { shift: shift + z as i64, c: c[z..].to_vec() }
    }

    pub fn one() -> Self {
        LFp { shift: 0, c: vec![1] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn size(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    /// Image of an exact Laurent polynomial; None on bad reduction.
    pub fn from_exact(l: &LaurentUni) -> Option<Self> {
        let c: Option<Vec<u64>> = l.poly.c.iter().map(q_mod).collect();
        Some(Self::new(l.shift, c?))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(o.shift);
        let n = ((self.shift - s) as usize + self.c.len())
            .max((o.shift - s) as usize + o.c.len());
        let mut c = vec![0u64; n];
        for (i, &a) in self.c.iter().enumerate() {
            c[i + (self.shift - s) as usize] = a;
        }
        for (i, &b) in o.c.iter().enumerate() {
            let k = i + (o.shift - s) as usize;
            c[k] = add(c[k], b);
        }
        Self::new(s, c)
    }

    pub fn neg(&self) -> Self {
        LFp {
            shift: self.shift,
            c: self.c.iter().map(|&a| if a == 0 { 0 } else { P - a }).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = add(c[i + j], mul(a, b));
            }
        }
        LFp { shift: self.shift + o.shift, c }
    }

    /// Euclidean division a = q*b + r with size(r) < size(b) (or r = 0).
    pub fn divrem(&self, b: &Self) -> (Self, Self) {
        assert!(!b.is_zero());
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let db = b.c.len() - 1;
        let linv = inv(*b.c.last().unwrap());
        let mut rem = self.c.clone();
        let mut quot = vec![0u64; rem.len().saturating_sub(db)];
        while rem.len() > db {
            let lead = *rem.last().unwrap();
            if lead != 0 {
                let k = rem.len() - 1 - db;
                let f = mul(lead, linv);
                quot[k] = f;
                for (i, &bc) in b.c.iter().enumerate() {
                    rem[k + i] = sub(rem[k + i], mul(f, bc));
                }
            }
            rem.pop();
        }
        (
            Self::new(self.shift - b.shift, quot),
            Self::new(self.shift, rem),
        )
    }

    /// Exact division in GF(p)[x^±]; None when not divisible.
    pub fn divide_exact(&self, b: &Self) -> Option<Self> {
        if b.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (q, r) = self.divrem(b);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

/// Mirror of the exact Laurent module membership solver: solve
/// sum_j c_j * cols[j] = rhs over GF(p)[x^±]. Returns None when rhs is not
/// in the column span mod p.
pub fn module_solve_fp(cols: &[Vec<LFp>], rhs: &[LFp]) -> Option<Vec<LFp>> {
    let ncols = cols.len();
    if ncols == 0 {
        return if rhs.iter().all(LFp::is_zero) {
            Some(vec![])
        } else {
            None
        };
    }
    let nrows = cols[0].len();
    let mut work: Vec<(Vec<LFp>, Vec<LFp>)> = cols
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let mut coord = vec![LFp::zero(); ncols];
            coord[j] = LFp::one();
            (col.clone(), coord)
        })
        .collect();
    let mut pivots: Vec<(usize, Vec<LFp>, Vec<LFp>)> = Vec::new();
    let mut active: Vec<usize> = (0..work.len()).collect();
    for row in 0..nrows {
        loop {
            let nz: Vec<usize> = active
                .iter()
                .cloned()
                .filter(|&j| !work[j].0[row].is_zero())
                .collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    let (col, coord) = work[j].clone();
                    pivots.push((row, col, coord));
                    active.retain(|&k| k != j);
                }
                break;
            }
            let mut b = nz[0];
            for &j in &nz {
                if work[j].0[row].size() < work[b].0[row].size() {
                    b = j;
                }
            }
            let a = *nz.iter().find(|&&j| j != b).unwrap();
            let (q, _r) = work[a].0[row].divrem(&work[b].0[row]);
            let (colb, coordb) = work[b].clone();
            let wa = &mut work[a];
            for i in 0..nrows {
                wa.0[i] = wa.0[i].sub(&q.mul(&colb[i]));
            }
            for i in 0..ncols {
                wa.1[i] = wa.1[i].sub(&q.mul(&coordb[i]));
            }
        }
    }
    let mut target = rhs.to_vec();
    let mut sol = vec![LFp::zero(); ncols];
    for (row, col, coord) in &pivots {
        if target[*row].is_zero() {
            continue;
        }
        let c = target[*row].divide_exact(&col[*row])?;
        for i in 0..nrows {
            target[i] = target[i].sub(&c.mul(&col[i]));
        }
        for i in 0..ncols {
            sol[i] = sol[i].add(&c.mul(&coord[i]));
        }
    }
    if target.iter().all(LFp::is_zero) {
        Some(sol)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q::{qi, qr};
    use crate::uni::UniPoly;

    #[test]
    fn field_arithmetic_and_reduction() {
        assert_eq!(mul(inv(7), 7), 1);
        assert_eq!(q_mod(&qi(-1)).unwrap(), P - 1);
        let half = q_mod(&qr(1, 2)).unwrap();
        assert_eq!(add(half, half), 1);
    }

    #[test]
    fn laurent_fp_euclid_roundtrip() {
        let a = LFp::new(-2, vec![1, 0, 3]);
        let b = LFp::new(1, vec![2, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.size().unwrap_or(0) < b.size().unwrap());
    }

    #[test]
    fn membership_matches_exact_solver() {
        // same instance as the exact solver's unit test
        let c1 = vec![LFp::new(1, vec![1]), LFp::zero()];
        let c2 = vec![LFp::new(0, vec![1, 1]), LFp::new(1, vec![1])];
        let rhs = vec![LFp::new(0, vec![1]), LFp::new(1, vec![P - 1])];
        let sol = module_solve_fp(&[c1.clone(), c2.clone()], &rhs).unwrap();
        for i in 0..2 {
            let got = sol[0].mul(&c1[i]).add(&sol[1].mul(&c2[i]));
            assert_eq!(got, rhs[i]);
        }
        let d = vec![LFp::new(0, vec![1, 1]), LFp::zero()];
        let rhs2 = vec![LFp::new(0, vec![1]), LFp::zero()];
        assert!(module_solve_fp(&[d], &rhs2).is_none());
    }

    #[test]
    fn from_exact_images() {
        let l = LaurentUni::new(-1, UniPoly::from_coeffs(vec![qr(1, 2), qi(3)]));
        let f = LFp::from_exact(&l).unwrap();
        assert_eq!(f.shift, -1);
        assert_eq!(f.c, vec![q_mod(&qr(1, 2)).unwrap(), 3]);
    }
}
