//! Closed intervals with exact rational endpoints.
//!
//! Arithmetic is exact on the endpoints; the only source of widening is the
//! explicit outward rounding in [`CertifiedInterval::round_outward`] and the
//! transcendental enclosures, which keeps every result a true enclosure.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, floor_log2, Rational};
use super::transcendental;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CertifiedInterval {
    #[serde(with = "rational::serde_str")]
    lo: Rational,
    #[serde(with = "rational::serde_str")]
    hi: Rational,
}

/// Outcome of comparing two enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Comparison {
    Less,
    Greater,
    Overlap,
}

/// `Less` iff `a.hi < b.lo`, `Greater` iff `a.lo > b.hi`, otherwise `Overlap`.
pub fn certified_compare(a: &CertifiedInterval, b: &CertifiedInterval) -> Comparison {
    if a.hi < b.lo {
        Comparison::Less
    } else if a.lo > b.hi {
        Comparison::Greater
    } else {
        Comparison::Overlap
    }
}

impl CertifiedInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!(
                "interval endpoints out of order: {} > {}",
                rational::format_rational(&lo),
                rational::format_rational(&hi)
            )));
        }
        Ok(CertifiedInterval { lo, hi })
    }

    pub(crate) fn from_sorted(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        CertifiedInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        CertifiedInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn one() -> Self {
        Self::point(Rational::one())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    /// The exact value when the enclosure is a single point.
    pub fn exact(&self) -> Option<&Rational> {
        (self.lo == self.hi).then_some(&self.lo)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= Rational::zero() && Rational::zero() <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn hull(&self, other: &Self) -> Self {
        CertifiedInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Width relative to the larger endpoint magnitude; zero for point
    /// intervals.
    pub fn relative_width(&self) -> Rational {
        let w = self.width();
        if w.is_zero() {
            return w;
        }
        let mag = self.lo.abs().max(self.hi.abs());
        if mag.is_zero() {
            return w;
        }
        w / mag
    }

    /// `width <= 2^-bits`.
    pub fn width_within(&self, bits: i64) -> bool {
        let w = self.width();
        w.is_zero() || floor_log2(&w) < -bits
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            CertifiedInterval { lo: b, hi: a }
        } else {
            CertifiedInterval { lo: a, hi: b }
        }
    }

    pub fn shift(&self, c: &Rational) -> Self {
        CertifiedInterval { lo: &self.lo + c, hi: &self.hi + c }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            CertifiedInterval { lo: Rational::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        } else if self.hi <= Rational::zero() {
            CertifiedInterval { lo: -&self.hi, hi: -&self.lo }
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::Domain("reciprocal of an interval containing zero".into()));
        }
        Ok(CertifiedInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// Non-negative integer power.
    pub fn powi(&self, e: u64) -> Self {
        if e == 0 {
            return Self::one();
        }
        if e.is_multiple_of(2) {
            let a = self.abs();
            CertifiedInterval {
                lo: num_traits::pow(a.lo, e as usize),
                hi: num_traits::pow(a.hi, e as usize),
            }
        } else {
            CertifiedInterval {
                lo: num_traits::pow(self.lo.clone(), e as usize),
                hi: num_traits::pow(self.hi.clone(), e as usize),
            }
        }
    }

    /// Integer power by squaring with outward rounding to `prec` significant
    /// bits after every step. Intended for large exponents where the exact
    /// endpoints would be enormous.
    pub fn powi_rounded(&self, e: u64, prec: u32) -> Self {
        let mut base = self.round_outward(prec);
        let mut acc = Self::one();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = (&acc * &base).round_outward(prec);
            }
            k >>= 1;
            if k > 0 {
                base = (&base * &base).round_outward(prec);
            }
        }
        acc
    }

    /// Rounds both endpoints outward to dyadic rationals carrying `prec`
    /// significant bits. Zero endpoints stay zero.
    pub fn round_outward(&self, prec: u32) -> Self {
        CertifiedInterval {
            lo: round_dyadic(&self.lo, prec, false),
            hi: round_dyadic(&self.hi, prec, true),
        }
    }

    /// Natural logarithm of a positive interval, each endpoint enclosed to
    /// absolute width `2^-bits`.
    pub fn ln(&self, bits: u32) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(Error::Domain("logarithm of a non-positive interval".into()));
        }
        let lo = transcendental::enclose_log(&self.lo, bits)?;
        if self.lo == self.hi {
            return Ok(lo);
        }
        let hi = transcendental::enclose_log(&self.hi, bits)?;
        Ok(CertifiedInterval { lo: lo.lo, hi: hi.hi })
    }

    /// Exponential with relative width about `2^-bits`.
    pub fn exp(&self, bits: u32) -> Self {
        let lo = transcendental::enclose_exp(&self.lo, bits);
        if self.lo == self.hi {
            return lo;
        }
        let hi = transcendental::enclose_exp(&self.hi, bits);
        CertifiedInterval { lo: lo.lo, hi: hi.hi }
    }

    /// Principal `n`-th root of a non-negative interval. Exact when the
    /// interval is a point whose root is rational.
    pub fn nth_root(&self, n: u32, bits: u32) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::Domain("root of a negative interval".into()));
        }
        if n == 0 {
            return Err(Error::Domain("zeroth root".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        if let Some(x) = self.exact() {
            if let Some(r) = rational::exact_root(x, n) {
                return Ok(Self::point(r));
            }
        }
        let scale_ref = if self.hi.is_zero() { Rational::one() } else { self.hi.clone() };
        let root_log = floor_log2(&scale_ref) / n as i64;
        let k = (bits as i64 + 4 - root_log).max(0) as u64;
        let nk = k * n as u64;
        let lo_scaled = rational::floor(&(&self.lo * Rational::from_integer(BigInt::one() << nk)));
        let hi_scaled = rational::ceil(&(&self.hi * Rational::from_integer(BigInt::one() << nk)));
        let lo_root = lo_scaled.magnitude().nth_root(n);
        let hi_root = hi_scaled.magnitude().nth_root(n) + 1u32;
        let denom = BigInt::one() << k;
        Ok(CertifiedInterval {
            lo: Rational::new(BigInt::from(lo_root), denom.clone()),
            hi: Rational::new(BigInt::from(hi_root), denom),
        })
    }

    pub fn sqrt(&self, bits: u32) -> Result<Self> {
        self.nth_root(2, bits)
    }

    pub fn min_abs(&self) -> Rational {
        if self.contains_zero() {
            Rational::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn max_abs(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (rational::to_f64(&self.lo), rational::to_f64(&self.hi))
    }
}

fn round_dyadic(x: &Rational, prec: u32, up: bool) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    if x.denom().is_one() && x.numer().bits() <= prec as u64 {
        return x.clone();
    }
    let e = floor_log2(x);
    let frac_bits = prec as i64 - e;
    let scaled = if frac_bits >= 0 {
        x * Rational::from_integer(BigInt::one() << (frac_bits as u64))
    } else {
        x / Rational::from_integer(BigInt::one() << ((-frac_bits) as u64))
    };
    let n = if up { rational::ceil(&scaled) } else { rational::floor(&scaled) };
    if frac_bits >= 0 {
        Rational::new(n, BigInt::one() << (frac_bits as u64))
    } else {
        Rational::from_integer(n << ((-frac_bits) as u64))
    }
}

impl fmt::Debug for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64_bounds();
        write!(f, "[{a:e}, {b:e}]")
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational::format_rational(&self.lo),
            rational::format_rational(&self.hi)
        )
    }
}

impl<'a> Add<&'a CertifiedInterval> for &'a CertifiedInterval {
    type Output = CertifiedInterval;
    fn add(self, rhs: &CertifiedInterval) -> CertifiedInterval {
        CertifiedInterval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }
}

impl<'a> Sub<&'a CertifiedInterval> for &'a CertifiedInterval {
    type Output = CertifiedInterval;
    fn sub(self, rhs: &CertifiedInterval) -> CertifiedInterval {
        CertifiedInterval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }
}

impl<'a> Mul<&'a CertifiedInterval> for &'a CertifiedInterval {
    type Output = CertifiedInterval;
    fn mul(self, rhs: &CertifiedInterval) -> CertifiedInterval {
        let products = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = products.iter().min().cloned().unwrap_or_default();
        let hi = products.iter().max().cloned().unwrap_or_default();
        CertifiedInterval { lo, hi }
    }
}

impl Neg for &CertifiedInterval {
    type Output = CertifiedInterval;
    fn neg(self) -> CertifiedInterval {
        CertifiedInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

impl Add for CertifiedInterval {
    type Output = CertifiedInterval;
    fn add(self, rhs: CertifiedInterval) -> CertifiedInterval {
        &self + &rhs
    }
}

impl Sub for CertifiedInterval {
    type Output = CertifiedInterval;
    fn sub(self, rhs: CertifiedInterval) -> CertifiedInterval {
        &self - &rhs
    }
}

impl Mul for CertifiedInterval {
    type Output = CertifiedInterval;
    fn mul(self, rhs: CertifiedInterval) -> CertifiedInterval {
        &self * &rhs
    }
}

impl Neg for CertifiedInterval {
    type Output = CertifiedInterval;
    fn neg(self) -> CertifiedInterval {
        -&self
    }
}
