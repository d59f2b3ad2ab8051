//! Exact rationals in canonical form (`BigRational` keeps `gcd = 1` and a
//! positive denominator), plus the handful of integer helpers the rest of
//! the crate needs.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `"p/q"` or `"p"`, rejecting zero denominators.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Domain("empty rational".into()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim())
            .map_err(|_| Error::Domain(format!("malformed numerator in {t:?}")))?;
        let d = BigInt::from_str(d.trim())
            .map_err(|_| Error::Domain(format!("malformed denominator in {t:?}")))?;
        if d.is_zero() {
            return Err(Error::Domain(format!("zero denominator in {t:?}")));
        }
        Ok(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| Error::Domain(format!("malformed rational {t:?}")))?;
        Ok(Rational::from_integer(n))
    }
}

/// Renders as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow_i(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), e.unsigned_abs() as usize)
    }
}

/// `floor(log2 |x|)` for nonzero `x`.
pub fn floor_log2(x: &Rational) -> i64 {
    debug_assert!(!x.is_zero());
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^e <= n/d < 2^(e+1) after at most one correction
    let (shifted_n, shifted_d) = if e >= 0 {
        (n.clone(), d << (e as u64))
    } else {
        (n << ((-e) as u64), d.clone())
    };
    if shifted_n < shifted_d {
        e -= 1;
    }
    e
}

pub fn to_f64(x: &Rational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let e = floor_log2(x);
    // scale into [2^52, 2^53) for an integer conversion
    let shift = 52 - e;
    let scaled = if shift >= 0 {
        (x.numer() << (shift as u64)) / x.denom()
    } else {
        x.numer() / (x.denom() << ((-shift) as u64))
    };
    let m = scaled.to_f64().unwrap_or(f64::NAN);
    m * 2f64.powi(-(shift.clamp(-1074, 1074) as i32))
}

pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Exact integer `k`-th root when `x >= 0` is a perfect `k`-th power.
pub fn exact_root(x: &Rational, k: u32) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().magnitude();
    let d = x.denom().magnitude();
    let rn = n.nth_root(k);
    let rd = d.nth_root(k);
    if num_traits::pow(rn.clone(), k as usize) == *n && num_traits::pow(rd.clone(), k as usize) == *d {
        Some(Rational::new(BigInt::from(rn), BigInt::from(rd)))
    } else {
        None
    }
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: &BigUint) -> i64 {
    debug_assert!(!n.is_zero());
    let mut m = n.magnitude().clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rational, p: &BigUint) -> i64 {
    int_valuation(x.numer(), p) - int_valuation(x.denom(), p)
}

pub fn biguint(n: &BigInt) -> BigUint {
    n.magnitude().clone()
}

pub fn is_negative_int(n: &BigInt) -> bool {
    n.sign() == Sign::Minus
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Serde adapter for the `"p/q"` wire form.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
