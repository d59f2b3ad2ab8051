//! Certified re-verification of the explicit constants behind the
//! subspace-counting argument:
//!
//! - `E = m^2 (m+1) / 240` and `F = (7/2) m (m!)^2 (m/480)^m`
//! - the gap condition `Q^(delta^2) > 2^(600 m F)`
//! - greedy covering of parameters by intervals `(Q, Q^E]`
//! - the count `m (1 + (4/delta) ln E) + 1 + (4/delta) ln(300 F / delta)`
//!   and its estimates for `m = floor(28800 / delta^2) + 1`
//! - the final solution-count arithmetic for `delta = 1/9`
//!
//! All logarithms are natural.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::factorial::{factorial, log_factorial_bounds};
use crate::arith::interval::{certified_compare, Comparison};
use crate::arith::power::RationalPower;
use crate::arith::rational::{self, int, rat, Rational};
use crate::arith::transcendental::enclose_log;
use crate::roth::Verdict;
use crate::subspace::prop21_line_bound;
use crate::{CertifiedInterval, Error, Result};

/// Exact `F` is produced up to this `m`.
pub const EXACT_F_LIMIT: u64 = 20;
/// Precision ceiling for escalating comparisons.
pub const DEFAULT_CEILING_BITS: u32 = 1024;

#[derive(Debug, Clone, Serialize)]
pub struct Lemma41Constants {
    pub m: u64,
    #[serde(with = "rational::serde_str")]
    pub e: Rational,
    pub f_log: CertifiedInterval,
    #[serde(serialize_with = "ser_opt_rational")]
    pub f_exact: Option<Rational>,
}

fn ser_opt_rational<S: serde::Serializer>(x: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(r) => s.serialize_some(&rational::format_rational(r)),
        None => s.serialize_none(),
    }
}

pub fn e_constant(m: u64) -> Rational {
    let mr = int(m as i64);
    &mr * &mr * (&mr + int(1)) / int(240)
}

pub fn f_exact(m: u64) -> Rational {
    let mr = int(m as i64);
    let mf = Rational::from_integer(factorial(m));
    rat(7, 2) * &mr * &mf * &mf * rational::pow_i(&(&mr / int(480)), m as i64)
}

/// Enclosure of `ln F = ln(7/2) + ln m + 2 ln m! + m ln(m/480)`.
pub fn log_f(m: u64, bits: u32) -> Result<CertifiedInterval> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let mr = int(m as i64);
    let lift = 64 - m.leading_zeros();
    let b = bits + lift + 8;
    let parts = [
        enclose_log(&rat(7, 2), b)?,
        enclose_log(&mr, b)?,
        log_factorial_bounds(m as i64, b)?.scale(&int(2)),
        enclose_log(&(&mr / int(480)), b + lift)?.scale(&mr),
    ];
    let sum = parts.iter().fold(CertifiedInterval::zero(), |acc, p| &acc + p);
    Ok(sum.round_outward(b + 16))
}

pub fn lemma41_constants(m: u64, bits: u32) -> Result<Lemma41Constants> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    Ok(Lemma41Constants {
        m,
        e: e_constant(m),
        f_log: log_f(m, bits)?,
        f_exact: (m <= EXACT_F_LIMIT).then(|| f_exact(m)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    LessEq,
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "=")]
    Equal,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: CertifiedInterval,
    pub relation: Relation,
    pub rhs: CertifiedInterval,
    pub comparison: Comparison,
    pub verdict: Verdict,
    pub bits: u32,
}

fn verdict_of(relation: Relation, l: &CertifiedInterval, r: &CertifiedInterval) -> (Comparison, Option<bool>) {
    if let (Some(x), Some(y)) = (l.exact(), r.exact()) {
        let c = match x.cmp(y) {
            Ordering::Less => Comparison::Less,
            Ordering::Greater => Comparison::Greater,
            Ordering::Equal => Comparison::Overlap,
        };
        let v = match relation {
            Relation::Less => x < y,
            Relation::LessEq => x <= y,
            Relation::Greater => x > y,
            Relation::Equal => x == y,
        };
        return (c, Some(v));
    }
    let c = certified_compare(l, r);
    let v = match (relation, c) {
        (_, Comparison::Overlap) => None,
        (Relation::Less | Relation::LessEq, c) => Some(c == Comparison::Less),
        (Relation::Greater, c) => Some(c == Comparison::Greater),
        (Relation::Equal, _) => Some(false),
    };
    (c, v)
}

/// Evaluates both sides at increasing precision until they separate.
pub fn certify<F>(name: &str, relation: Relation, mut sides: F, bits: u32, ceiling: u32) -> Result<InequalityCheck>
where
    F: FnMut(u32) -> Result<(CertifiedInterval, CertifiedInterval)>,
{
    let mut b = bits.max(8);
    loop {
        let (lhs, rhs) = sides(b)?;
        let (comparison, v) = verdict_of(relation, &lhs, &rhs);
        let done = v.is_some() || b >= ceiling;
        if done {
            let verdict = match v {
                Some(true) => Verdict::Holds,
                Some(false) => Verdict::Fails,
                None => Verdict::Indeterminate,
            };
            return Ok(InequalityCheck { name: name.to_string(), lhs, relation, rhs, comparison, verdict, bits: b });
        }
        b = b.saturating_mul(2).min(ceiling);
    }
}

fn exact_check(name: &str, relation: Relation, lhs: Rational, rhs: Rational) -> InequalityCheck {
    certify(
        name,
        relation,
        |_| Ok((CertifiedInterval::point(lhs.clone()), CertifiedInterval::point(rhs.clone()))),
        0,
        0,
    )
    .expect("exact sides")
}

fn check_delta(delta: &Rational) -> Result<()> {
    if !(delta.is_positive() && delta < &Rational::one()) {
        return Err(Error::Domain(format!("delta = {} outside (0, 1)", rational::format_rational(delta))));
    }
    Ok(())
}

/// Certified `delta^2 ln Q > 600 m F ln 2`.
pub fn check_condition9(log_q: &CertifiedInterval, delta: &Rational, m: u64, bits: u32) -> Result<InequalityCheck> {
    check_condition9_with_ceiling(log_q, delta, m, bits, DEFAULT_CEILING_BITS.max(bits))
}

pub fn check_condition9_with_ceiling(
    log_q: &CertifiedInterval,
    delta: &Rational,
    m: u64,
    bits: u32,
    ceiling: u32,
) -> Result<InequalityCheck> {
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let d2 = delta * delta;
    let coef = int(600 * m as i64);
    if m <= EXACT_F_LIMIT {
        let f = f_exact(m);
        return certify(
            "delta^2 ln Q > 600 m F ln 2",
            Relation::Greater,
            |b| {
                let rhs = enclose_log(&int(2), b)?.scale(&(&coef * &f));
                Ok((log_q.scale(&d2), rhs))
            },
            bits,
            ceiling,
        );
    }
    // F is astronomically large here; compare logarithms of both sides
    if !log_q.lo().is_positive() {
        let rhs = log_f(m, bits)?;
        return Ok(InequalityCheck {
            name: "ln(delta^2 ln Q) > ln(600 m ln 2) + ln F".into(),
            lhs: log_q.scale(&d2),
            relation: Relation::Greater,
            rhs,
            comparison: Comparison::Less,
            verdict: if log_q.hi().is_positive() { Verdict::Indeterminate } else { Verdict::Fails },
            bits,
        });
    }
    certify(
        "ln(delta^2 ln Q) > ln(600 m ln 2) + ln F",
        Relation::Greater,
        |b| {
            let lhs = &log_q.ln(b)? + &enclose_log(&d2, b)?;
            let ln2 = enclose_log(&int(2), b + 8)?;
            let rhs = &ln2.scale(&coef).ln(b)? + &log_f(m, b)?;
            Ok((lhs, rhs))
        },
        bits,
        ceiling,
    )
}

/// Greedy count of intervals `[w, w^E]` anchored at input values that cover
/// all values.
pub fn count_gap_intervals(values: &[Rational], e: &Rational) -> Result<usize> {
    if e <= &Rational::one() {
        return Err(Error::Domain("E must exceed 1".into()));
    }
    if let Some(v) = values.iter().find(|v| *v <= &Rational::one()) {
        return Err(Error::Domain(format!("value {} is not > 1", rational::format_rational(v))));
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("values must be sorted ascending".into()));
    }
    let mut count = 0;
    let mut anchor: Option<RationalPower> = None;
    for v in values {
        let vp = RationalPower::of(v.clone())?;
        let covered = match &anchor {
            Some(top) => vp.compare(top, 64, 8192)? != Ordering::Greater,
            None => false,
        };
        if !covered {
            count += 1;
            anchor = Some(RationalPower::new(v.clone(), e.clone())?);
        }
    }
    Ok(count)
}

/// `m (1 + (4/delta) ln E) + (1 + (4/delta) ln(300 F / delta))`.
pub fn subspace_count_formula(m: u64, delta: &Rational, bits: u32) -> Result<CertifiedInterval> {
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let lift = 64 - m.leading_zeros() + rational::floor_log2(&delta.recip()) as u32 + 4;
    let b = bits + lift;
    let four_over = int(4) / delta;
    let ln_e = enclose_log(&e_constant(m), b)?;
    let first = ln_e.scale(&four_over).shift(&int(1)).scale(&int(m as i64));
    let ln_300 = &enclose_log(&(int(300) / delta), b)? + &log_f(m, b)?;
    let second = ln_300.scale(&four_over).shift(&int(1));
    Ok((&first + &second).round_outward(b + 16))
}

/// `floor(28800 / delta^2) + 1`.
pub fn choose_m(delta: &Rational) -> Result<u64> {
    check_delta(delta)?;
    let q = int(28800) / (delta * delta);
    (rational::floor(&q) + BigInt::one())
        .to_u64()
        .ok_or_else(|| Error::Unsupported("m does not fit in 64 bits".into()))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    #[serde(serialize_with = "ser_opt_rational")]
    pub delta: Option<Rational>,
    pub m: Option<u64>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub epsilon: Option<Rational>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub gamma: Option<Rational>,
    pub checks: Vec<InequalityCheck>,
    pub notes: Vec<String>,
    pub indeterminate: bool,
    pub all_hold: bool,
}

impl BoundReport {
    fn finish(mut self) -> Self {
        self.indeterminate = self.checks.iter().any(|c| c.verdict == Verdict::Indeterminate);
        self.all_hold = self.checks.iter().all(|c| c.verdict == Verdict::Holds);
        self
    }

    pub fn max_bits(&self) -> u32 {
        self.checks.iter().map(|c| c.bits).max().unwrap_or(0)
    }

    pub fn check(&self, name_prefix: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name.starts_with(name_prefix))
    }
}

pub fn verify_prop21_derivation(delta: &Rational, bits: u32) -> Result<BoundReport> {
    verify_prop21_derivation_with_ceiling(delta, bits, DEFAULT_CEILING_BITS.max(bits))
}

pub fn verify_prop21_derivation_with_ceiling(delta: &Rational, bits: u32, ceiling: u32) -> Result<BoundReport> {
    let m = choose_m(delta)?;
    let mr = int(m as i64);
    let inv = delta.recip();
    let inv2 = &inv * &inv;
    let epsilon = delta / int(60);
    let gamma = delta / int(10);
    let mut checks = Vec::new();

    checks.push(exact_check("m > 28800 delta^-2", Relation::Greater, mr.clone(), int(28800) * &inv2));
    checks.push(exact_check("m <= 28801 delta^-2", Relation::LessEq, mr.clone(), int(28801) * &inv2));

    checks.push(certify(
        "(a) ln E < 26 + 6 ln(1/delta)",
        Relation::Less,
        |b| {
            let lhs = enclose_log(&e_constant(m), b)?;
            let rhs = enclose_log(&inv, b + 3)?.scale(&int(6)).shift(&int(26));
            Ok((lhs, rhs))
        },
        bits,
        ceiling,
    )?);

    checks.push(certify(
        "(b) ln(300 F / delta) < 767865 delta^-2 ln(1/delta)",
        Relation::Less,
        |b| {
            let lhs = &enclose_log(&(int(300) * &inv), b)? + &log_f(m, b)?;
            let lift = rational::floor_log2(&(int(767865) * &inv2)).max(0) as u32;
            let rhs = enclose_log(&inv, b + lift)?.scale(&(int(767865) * &inv2));
            Ok((lhs, rhs))
        },
        bits,
        ceiling,
    )?);

    checks.push(certify(
        "(c) count formula <= 2^(227/10) delta^-3 ln(1/delta)",
        Relation::LessEq,
        |b| Ok((subspace_count_formula(m, delta, b)?, prop21_line_bound(delta, b)?)),
        bits,
        ceiling,
    )?);

    // the proof chain 480 < 480/delta = 8/epsilon < m epsilon
    checks.push(exact_check("480 < 480/delta", Relation::Less, int(480), int(480) * &inv));
    let eight_over_eps = int(8) / &epsilon;
    checks.push(exact_check("480/delta = 8/epsilon", Relation::Equal, int(480) * &inv, eight_over_eps.clone()));
    checks.push(exact_check("8/epsilon < m epsilon", Relation::Less, eight_over_eps, &mr * &epsilon));

    let notes = vec![
        "chain printed as 480 < 8.60/delta, read as 8*60/delta".to_string(),
        format!("epsilon = delta/60 = {}, Gamma = delta/10 = {}", rational::format_rational(&epsilon), rational::format_rational(&gamma)),
    ];
    Ok(BoundReport {
        delta: Some(delta.clone()),
        m: Some(m),
        epsilon: Some(epsilon),
        gamma: Some(gamma),
        checks,
        notes,
        indeterminate: false,
        all_hold: false,
    }
    .finish())
}

/// The grid of deltas verified by `bounds verify --all`.
pub fn standard_deltas() -> Vec<Rational> {
    vec![rat(9, 10), rat(1, 2), rat(1, 5), rat(1, 9), rat(1, 100)]
}

/// One delta per worker.
pub fn verify_delta_grid(deltas: &[Rational], bits: u32) -> Result<Vec<BoundReport>> {
    deltas.par_iter().map(|d| verify_prop21_derivation(d, bits)).collect()
}

/// `2 (2^7 4800 36 ln 4 + 1 + 2^(227/10) 6^12 ln 3)`.
pub fn theorem_lhs(bits: u32) -> Result<CertifiedInterval> {
    let b = bits + 64;
    let c1 = int(22118400);
    let c2 = Rational::from_integer(BigInt::from(6).pow(12));
    let t1 = enclose_log(&int(4), b)?.scale(&c1);
    let two_pow = RationalPower::new(int(2), rat(227, 10))?.enclose(b)?;
    let t2 = (&two_pow * &enclose_log(&int(3), b)?).scale(&c2);
    Ok((&t1 + &t2).shift(&int(1)).scale(&int(2)).round_outward(b))
}

pub fn verify_theorem_arithmetic(bits: u32) -> Result<BoundReport> {
    let ceiling = DEFAULT_CEILING_BITS.max(bits);
    let mut checks = Vec::new();
    checks.push(exact_check(
        "2^7 * 4800 * 36 = 22118400",
        Relation::Equal,
        int(128 * 4800 * 36),
        int(22118400),
    ));
    checks.push(exact_check(
        "6^12 = 2176782336",
        Relation::Equal,
        Rational::from_integer(BigInt::from(6).pow(12)),
        int(2176782336i64),
    ));
    let two57 = Rational::from_integer(BigInt::one() << 57u32);
    checks.push(certify(
        "2(2^7*4800*36 ln 4 + 1 + 2^(227/10) 6^12 ln 3) < 2^57",
        Relation::Less,
        |b| Ok((theorem_lhs(b)?, CertifiedInterval::point(two57.clone()))),
        bits,
        ceiling,
    )?);

    let delta = rat(1, 9);
    let per_pair_ln3 = |b: u32| -> Result<CertifiedInterval> {
        let two_pow = RationalPower::new(int(2), rat(227, 10))?.enclose(b + 16)?;
        Ok((&two_pow * &enclose_log(&int(3), b + 16)?).scale(&int(729)))
    };
    let bound = prop21_line_bound(&delta, bits)?;
    let pair = per_pair_ln3(bits)?;
    let ratio = bound.div(&pair)?;
    let mut notes = vec![
        format!("per-pair count as used: 2^(227/10) 3^6 ln 3 = {pair:?}"),
        format!("line bound at delta = 1/9: 2^(227/10) 9^3 ln 9 = {bound:?}"),
    ];
    if !ratio.contains(&Rational::one()) {
        notes.push(format!(
            "mismatch: the two counts differ by the factor ln 9 / ln 3 = 2 (ratio enclosure {ratio:?})"
        ));
    }
    notes.push("parameters used: delta = 1/9 and Q > 4^9".into());
    Ok(BoundReport {
        delta: Some(delta),
        m: None,
        epsilon: None,
        gamma: None,
        checks,
        notes,
        indeterminate: false,
        all_hold: false,
    }
    .finish())
}

/// Bounds for the two per-pair line counts reported alongside the final
/// arithmetic: `(2^(227/10) 3^6 ln 3, 2^(227/10) 9^3 ln 9)`.
pub fn per_pair_counts(bits: u32) -> Result<(CertifiedInterval, CertifiedInterval)> {
    let two_pow = RationalPower::new(int(2), rat(227, 10))?.enclose(bits + 16)?;
    let a = (&two_pow * &enclose_log(&int(3), bits + 16)?).scale(&int(729));
    Ok((a, prop21_line_bound(&rat(1, 9), bits)?))
}

/// Whether an interval lies strictly below zero; used for small-m formula
/// values that are negative.
pub fn is_negative(x: &CertifiedInterval) -> bool {
    x.hi().is_negative() && !x.hi().is_zero()
}
