//! Certified `ln(n!)`.
//!
//! Up to [`EXACT_LIMIT`] the factorial is formed exactly and its logarithm
//! enclosed directly. Above it the Stirling series
//!
//! `ln n! = (n + 1/2) ln n - n + ln(2 pi)/2 + sum_k B_2k / (2k (2k-1) n^(2k-1)) + R_K`
//!
//! is used, with `|R_K|` bounded by the first omitted term.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use super::interval::CertifiedInterval;
use super::rational::{floor_log2, int, Rational};
use super::transcendental::{enclose_log, enclose_pi};
use crate::error::{Error, Result};

pub const EXACT_LIMIT: u64 = 10_000;

/// `n!` by a balanced product tree.
pub fn factorial(n: u64) -> BigInt {
    fn range_product(lo: u64, hi: u64) -> BigInt {
        if hi <= lo {
            return BigInt::one();
        }
        if hi - lo <= 16 {
            return (lo + 1..=hi).fold(BigInt::one(), |acc, k| acc * k);
        }
        let mid = lo + (hi - lo) / 2;
        range_product(lo, mid) * range_product(mid, hi)
    }
    range_product(0, n)
}

/// Bernoulli numbers `B_0 ..= B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += Rational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(j))) * bj;
            }
        }
        b.push(-acc / int(m as i64 + 1));
    }
    b
}

/// Enclosure of `ln(n!)` with width at most `2^-bits` times the midpoint.
/// `n = 0` and `n = 1` give `[0, 0]`.
pub fn log_factorial_bounds(n: i64, bits: u32) -> Result<CertifiedInterval> {
    if n < 0 {
        return Err(Error::Domain(format!("factorial of negative integer {n}")));
    }
    let n = n as u64;
    if n <= 1 {
        return Ok(CertifiedInterval::zero());
    }
    if n <= EXACT_LIMIT {
        // ln n! >= ln 2 > 1/2, so absolute width 2^-(bits+1) is enough
        return enclose_log(&Rational::from_integer(factorial(n)), bits + 1);
    }
    log_factorial_stirling(n, bits)
}

/// Stirling-series branch on its own, for any `n >= 2`.
pub fn log_factorial_stirling(n: u64, bits: u32) -> Result<CertifiedInterval> {
    let mut extra = 4u32;
    loop {
        let enc = stirling_enclosure(n, bits + extra)?;
        let rel = enc.relative_width();
        if rel.is_zero() || floor_log2(&rel) < -(bits as i64) {
            return Ok(enc);
        }
        extra += 16;
    }
}

fn stirling_enclosure(n: u64, bits: u32) -> Result<CertifiedInterval> {
    let nr = int(n as i64);
    let ln_n = enclose_log(&nr, bits + 4)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let two_pi = enclose_pi(bits + 8).scale(&int(2));
    let ln_two_pi = two_pi.ln(bits + 8)?;

    let mut acc = &ln_n.scale(&(&nr + &half)) + &ln_two_pi.scale(&half);
    acc = acc.shift(&-&nr);

    // absolute budget for the series tail: n 2^-bits / 4 relative to ln n! >= n
    let budget = &nr / Rational::from_integer(BigInt::one() << (bits as u64 + 2));
    let max_k = 40usize;
    let b = bernoulli(2 * max_k + 2);
    let mut series = Rational::zero();
    let mut n_pow = nr.clone(); // n^(2k-1)
    let n_sq = &nr * &nr;
    for k in 1..=max_k {
        let two_k = 2 * k as i64;
        series += &b[2 * k] / (int(two_k * (two_k - 1)) * &n_pow);
        n_pow = &n_pow * &n_sq;
        let tail = (&b[2 * k + 2] / (int((two_k + 2) * (two_k + 1)) * &n_pow)).abs();
        if tail <= budget {
            let tail_iv = CertifiedInterval::from_sorted(-&tail, tail);
            let total = &acc + &tail_iv.shift(&series);
            return Ok(total.round_outward(bits + 64));
        }
    }
    Err(Error::Domain(format!("Stirling series does not reach 2^-{bits} for n = {n}")))
}
