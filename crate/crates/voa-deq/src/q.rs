//! Exact rational scalars and small helpers used throughout the crate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// True if `q` is an integer.
pub fn is_int(q: &Q) -> bool {
    q.denom().is_one()
}

/// `q` as i64 if it is an integer in range.
pub fn to_i64(q: &Q) -> Option<i64> {
    if !is_int(q) {
        return None;
    }
    let n = q.numer();
    let (sign, digits) = n.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => {
            let v = digits[0];
            match sign {
                num::bigint::Sign::Minus => {
                    if v <= (i64::MAX as u64) + 1 {
                        Some((v as i128 * -1) as i64)
                    } else {
                        None
                    }
                }
                _ => {
                    if v <= i64::MAX as u64 {
                        Some(v as i64)
                    } else {
                        None
                    }
                }
            }
        }
        _ => None,
    }
}

/// Largest integer strictly less than `q`.
pub fn strict_floor(q: &Q) -> BigInt {
    let f = q.floor();
    if &f == q {
        f.numer() - BigInt::one()
    } else {
        f.numer().clone()
    }
}

/// Binomial coefficient C(k, j) for integer (possibly negative) k and j >= 0.
pub fn binom(k: i64, j: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..j as i64 {
        acc *= qi(k - i) / qi(i as i64 + 1);
    }
    acc
}

/// n! as a rational.
pub fn factorial(n: u32) -> Q {
    let mut acc = Q::one();
    for i in 2..=n as i64 {
        acc *= qi(i);
    }
    acc
}

/// (-1)^n for possibly negative n.
pub fn neg_one_pow(n: i64) -> Q {
    if n.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Render a rational as "n" or "n/d".
pub fn q_str(q: &Q) -> String {
    if is_int(q) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse "n" or "n/d".
pub fn q_parse(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

/// Signed decimal-ish magnitude used for heuristic bounds: |q| as f64.
pub fn q_to_f64(q: &Q) -> f64 {
    let n = q.numer();
    let d = q.denom();
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// Absolute value.
pub fn q_abs(q: &Q) -> Q {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_negative_upper() {
        assert_eq!(binom(-1, 3), qi(-1));
        assert_eq!(binom(-1, 4), qi(1));
        assert_eq!(binom(-2, 2), qi(3));
        assert_eq!(binom(4, 2), qi(6));
        assert_eq!(binom(3, 5), qi(0));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3", "-7/2", "0", "22/7"] {
            let q = q_parse(s).unwrap();
            assert_eq!(q_parse(&q_str(&q)).unwrap(), q);
        }
        assert!(q_parse("1/0").is_none());
    }

    #[test]
    fn floor_strict() {
        assert_eq!(strict_floor(&qi(3)), BigInt::from(2));
        assert_eq!(strict_floor(&qr(1, 2)), BigInt::from(0));
        assert_eq!(strict_floor(&qr(-1, 2)), BigInt::from(-1));
    }

    #[test]
    fn i64_conversion() {
        assert_eq!(to_i64(&qi(-5)), Some(-5));
        assert_eq!(to_i64(&qr(1, 2)), None);
    }
}
