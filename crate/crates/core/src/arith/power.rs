//! Positive rationals raised to rational exponents, `base^exp`.
//!
//! Local absolute values are almost always of this shape (`NP^(-ord/n)`,
//! `N(x)^(1/2)`, ...). Keeping them symbolic allows exact comparisons, which
//! interval arithmetic can never settle when two sides are equal.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::interval::CertifiedInterval;
use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Exponent magnitudes above this are compared through logarithms only.
const EXACT_EXPONENT_LIMIT: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPower {
    base: Rational,
    exp: Rational,
}

impl RationalPower {
    pub fn new(base: Rational, exp: Rational) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::Domain("power base must be positive".into()));
        }
        Ok(RationalPower { base, exp })
    }

    pub fn of(base: Rational) -> Result<Self> {
        Self::new(base, Rational::one())
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn exp(&self) -> &Rational {
        &self.exp
    }

    pub fn is_one(&self) -> bool {
        self.base.is_one() || self.exp.is_zero()
    }

    /// The value itself when it is rational.
    pub fn exact(&self) -> Option<Rational> {
        if self.is_one() {
            return Some(Rational::one());
        }
        let n = self.exp.numer().to_i64()?;
        let d = self.exp.denom().to_u32()?;
        if n.unsigned_abs() > EXACT_EXPONENT_LIMIT {
            return None;
        }
        let root = rational::exact_root(&self.base, d)?;
        Some(rational::pow_i(&root, n))
    }

    pub fn ln(&self, bits: u32) -> Result<CertifiedInterval> {
        if self.is_one() {
            return Ok(CertifiedInterval::zero());
        }
        let extra = rational::floor_log2(&self.exp.abs()).max(0) as u32 + 2;
        Ok(self.base.ln_interval(bits + extra)?.scale(&self.exp))
    }

    /// Enclosure of the value, relative width about `2^-bits`.
    pub fn enclose(&self, bits: u32) -> Result<CertifiedInterval> {
        if let Some(x) = self.exact() {
            return Ok(CertifiedInterval::point(x));
        }
        let n = self.exp.numer().to_i64();
        let d = self.exp.denom().to_u32();
        match (n, d) {
            (Some(n), Some(d)) if n.unsigned_abs() <= EXACT_EXPONENT_LIMIT => {
                let powered = rational::pow_i(&self.base, n);
                CertifiedInterval::point(powered).nth_root(d, bits + 8)
            }
            _ => Ok(self.ln(bits + 8)?.exp(bits)),
        }
    }

    pub fn mul(&self, other: &RationalPower) -> Option<RationalPower> {
        if self.exp == other.exp {
            return Some(RationalPower { base: &self.base * &other.base, exp: self.exp.clone() });
        }
        if self.base == other.base {
            return Some(RationalPower { base: self.base.clone(), exp: &self.exp + &other.exp });
        }
        None
    }

    /// Exact comparison when the common integer exponents stay small.
    pub fn cmp_exact(&self, other: &RationalPower) -> Option<Ordering> {
        let l = self.exp.denom().lcm(other.exp.denom());
        let e1 = (&self.exp * Rational::from_integer(l.clone())).to_integer();
        let e2 = (&other.exp * Rational::from_integer(l)).to_integer();
        let (e1, e2) = (e1.to_i64()?, e2.to_i64()?);
        if e1.unsigned_abs() > EXACT_EXPONENT_LIMIT || e2.unsigned_abs() > EXACT_EXPONENT_LIMIT {
            return None;
        }
        let estimate = rational::floor_log2(&self.base).unsigned_abs().max(1) * e1.unsigned_abs()
            + rational::floor_log2(&other.base).unsigned_abs().max(1) * e2.unsigned_abs();
        if estimate > 1 << 22 {
            return None;
        }
        Some(rational::pow_i(&self.base, e1).cmp(&rational::pow_i(&other.base, e2)))
    }

    /// Certified comparison: exact when feasible, otherwise through
    /// logarithms refined up to `ceiling` bits.
    pub fn compare(&self, other: &RationalPower, bits: u32, ceiling: u32) -> Result<Ordering> {
        if let Some(o) = self.cmp_exact(other) {
            return Ok(o);
        }
        let mut b = bits;
        loop {
            let l = self.ln(b)?;
            let r = other.ln(b)?;
            match super::interval::certified_compare(&l, &r) {
                super::interval::Comparison::Less => return Ok(Ordering::Less),
                super::interval::Comparison::Greater => return Ok(Ordering::Greater),
                super::interval::Comparison::Overlap if b < ceiling => b = (b * 2).min(ceiling),
                super::interval::Comparison::Overlap => {
                    return Err(Error::Indeterminate { what: "power comparison".into(), bits: b })
                }
            }
        }
    }
}

trait LnInterval {
    fn ln_interval(&self, bits: u32) -> Result<CertifiedInterval>;
}

impl LnInterval for Rational {
    fn ln_interval(&self, bits: u32) -> Result<CertifiedInterval> {
        super::transcendental::enclose_log(self, bits)
    }
}

pub fn is_integer_power_of_two(x: &BigInt) -> bool {
    x.is_positive() && (x & (x - BigInt::one())).is_zero()
}
