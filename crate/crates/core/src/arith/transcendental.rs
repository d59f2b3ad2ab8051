//! Certified logarithms, exponentials and pi.
//!
//! Series are summed in binary fixed point (integers scaled by `2^p`) with
//! truncating division, so every partial result is a lower bound. The
//! accumulated truncation deficit and the series tail are bounded explicitly
//! in units of `2^-p` and added to form the upper endpoint.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::CertifiedInterval;
use super::rational::{self, floor_log2, Rational};
use crate::error::{Error, Result};

fn scaled_floor(x: &Rational, p: u64) -> BigInt {
    rational::floor(&(x * Rational::from_integer(BigInt::one() << p)))
}

fn from_fixed(n: BigInt, p: u64) -> Rational {
    Rational::new(n, BigInt::one() << p)
}

/// Terms needed so that `3^(2N+3) >= 2^p`; `1.58 < log2 3`.
fn atanh_terms(p: u64) -> u64 {
    let t = (p as f64 / 1.58 - 3.0) / 2.0;
    if t <= 0.0 {
        0
    } else {
        t.ceil() as u64
    }
}

/// `atanh(z) * 2^p` for `0 <= z <= 1/3` as `(lower, error_ulps)`; the true
/// value lies in `[lower, lower + error_ulps]`.
fn atanh_fixed(z: &Rational, p: u64) -> (BigInt, u64) {
    debug_assert!(!z.is_negative() && z <= &Rational::new(BigInt::from(1), BigInt::from(3)));
    atanh_fixed_parts(z.numer(), z.denom(), p)
}

/// As [`atanh_fixed`] for `z = num/den`, without normalizing the fraction.
fn atanh_fixed_parts(num: &BigInt, den: &BigInt, p: u64) -> (BigInt, u64) {
    if num.is_zero() {
        return (BigInt::zero(), 0);
    }
    let n_terms = atanh_terms(p);
    let zf = (num << p) / den;
    let q = (&zf * &zf) >> p;
    let mut t = zf;
    let mut sum = BigInt::zero();
    for j in 0..=n_terms {
        sum += &t / BigInt::from(2 * j + 1);
        t = (&t * &q) >> p;
        if t.is_zero() {
            break;
        }
    }
    // per-term deficit < 3, tail < 1 ulp
    (sum, 3 * (n_terms + 1) + 1)
}

fn bit_len(n: u64) -> u64 {
    64 - n.leading_zeros() as u64
}

/// Enclosure of `ln x` of width at most `2^-bits`.
///
/// `x = 2^k y` with `y` in `[1, 2)`, then `ln x = 2 atanh(z) + 2k atanh(1/3)`
/// where `z = (y-1)/(y+1)` lies in `[0, 1/3)`.
pub fn enclose_log(x: &Rational, bits: u32) -> Result<CertifiedInterval> {
    if !x.is_positive() {
        return Err(Error::Domain(format!(
            "logarithm of non-positive value {}",
            rational::format_rational(x)
        )));
    }
    if x.is_one() {
        return Ok(CertifiedInterval::zero());
    }
    let k = floor_log2(x);
    // y = num/den in [1, 2); z = (num - den)/(num + den) kept unreduced
    let (num, den) = if k >= 0 {
        (x.numer().clone(), x.denom() << (k as u64))
    } else {
        (x.numer() << ((-k) as u64), x.denom().clone())
    };
    let z_num = &num - &den;
    let z_den = &num + &den;
    let third = Rational::new(BigInt::from(1), BigInt::from(3));
    let kabs = k.unsigned_abs();

    // smallest p whose error budget fits in 2^-bits
    let mut p = bits as u64 + 4;
    loop {
        let err = atanh_terms(p) * 3 + 4;
        let total = 2 * err * (1 + kabs);
        if bit_len(total) + bits as u64 <= p {
            break;
        }
        p += 1;
    }

    let (sz, ez) = atanh_fixed_parts(&z_num, &z_den, p);
    let (s2, e2) = if k != 0 { atanh_fixed(&third, p) } else { (BigInt::zero(), 0) };
    let kb = BigInt::from(k);
    let two = BigInt::from(2);
    let (lo, hi) = if k >= 0 {
        (
            &two * &sz + &two * &kb * &s2,
            &two * (&sz + ez) + &two * &kb * (&s2 + e2),
        )
    } else {
        (
            &two * &sz + &two * &kb * (&s2 + e2),
            &two * (&sz + ez) + &two * &kb * &s2,
        )
    };
    Ok(CertifiedInterval::from_sorted(from_fixed(lo, p), from_fixed(hi, p)))
}

/// `atan(1/n) * 2^p` as `(value, error_ulps)` with the true value in
/// `[value - err, value + err]`.
fn atan_inv_fixed(n: u64, p: u64) -> (BigInt, u64) {
    let n2 = BigInt::from(n * n);
    let mut t = (BigInt::one() << p) / BigInt::from(n);
    let mut sum = BigInt::zero();
    let mut j = 0u64;
    while !t.is_zero() {
        let term = &t / BigInt::from(2 * j + 1);
        if j.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        t /= &n2;
        j += 1;
    }
    // deficit < 3 per term; the first omitted term is below one ulp
    (sum, 3 * j + 1)
}

/// Enclosure of pi by Machin's formula, width about `2^-bits`.
pub fn enclose_pi(bits: u32) -> CertifiedInterval {
    let p = bits as u64 + 16;
    let (a, ea) = atan_inv_fixed(5, p);
    let (b, eb) = atan_inv_fixed(239, p);
    let mid = BigInt::from(16) * &a - BigInt::from(4) * &b;
    let err = BigInt::from(16 * ea + 4 * eb);
    CertifiedInterval::from_sorted(from_fixed(&mid - &err, p), from_fixed(&mid + &err, p))
}

/// Smallest `N` with `2^N (N+1)! >= 2^p`.
fn exp_terms(p: u64) -> u64 {
    let mut log2_acc = 0.0f64;
    let mut n = 0u64;
    while log2_acc < p as f64 + 1.0 {
        n += 1;
        log2_acc += 1.0 + ((n + 1) as f64).log2();
    }
    n
}

/// `exp(y) * 2^p` for `0 <= y <= 1/2` as `(lower, error_ulps)`.
fn exp_fixed(y: &Rational, p: u64) -> (BigInt, u64) {
    let one = BigInt::one() << p;
    if y.is_zero() {
        return (one, 0);
    }
    let n_terms = exp_terms(p);
    let yf = scaled_floor(y, p);
    let mut t = one.clone();
    let mut sum = BigInt::zero();
    for j in 0..=n_terms {
        sum += &t;
        t = ((&t * &yf) >> p) / BigInt::from(j + 1);
        if t.is_zero() {
            break;
        }
    }
    (sum, 3 * (n_terms + 1) + 1)
}

/// Enclosure of `e^x` with relative width about `2^-bits`.
pub fn enclose_exp(x: &Rational, bits: u32) -> CertifiedInterval {
    if x.is_zero() {
        return CertifiedInterval::one();
    }
    let ax = x.abs();
    // |x| / 2^s <= 1/2
    let s = (floor_log2(&ax) + 2).max(0) as u64;
    let y = &ax / Rational::from_integer(BigInt::one() << s);
    let mut p = bits as u64 + s + 16;
    loop {
        let (v, e) = exp_fixed(&y, p);
        let base = CertifiedInterval::from_sorted(from_fixed(v.clone(), p), from_fixed(v + e, p));
        let mut acc = base;
        for _ in 0..s {
            acc = (&acc * &acc).round_outward(p as u32);
        }
        let result = if x.is_negative() {
            acc.recip().expect("exp enclosure is positive").round_outward(p as u32)
        } else {
            acc
        };
        let rel = result.relative_width();
        if rel.is_zero() || floor_log2(&rel) < -(bits as i64) {
            return result;
        }
        p += 32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    #[test]
    fn log_one_is_exact_zero() {
        assert_eq!(enclose_log(&int(1), 30).unwrap(), CertifiedInterval::zero());
        assert!(enclose_log(&int(0), 30).is_err());
        assert!(enclose_log(&int(-3), 30).is_err());
    }

    #[test]
    fn pi_digits() {
        let pi = enclose_pi(100);
        // 3.14159265358979323846264338327950288...
        let lo = Rational::new(
            "314159265358979323846264338327".parse().unwrap(),
            num_traits::pow(BigInt::from(10), 29),
        );
        let hi = &lo + Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 29));
        assert!(pi.is_subset_of(&CertifiedInterval::new(lo, hi).unwrap()));
    }

    #[test]
    fn exp_brackets() {
        let e = enclose_exp(&int(1), 80);
        // e = 2.718281828459045235360287...
        let lo = rat(2718281828459045, 1_000_000_000_000_000);
        let hi = rat(2718281828459046, 1_000_000_000_000_000);
        assert!(e.is_subset_of(&CertifiedInterval::new(lo, hi).unwrap()));
        let small = enclose_exp(&int(-20), 60);
        let large = enclose_exp(&int(20), 60);
        assert!((&small * &large).contains(&int(1)));
    }
}
