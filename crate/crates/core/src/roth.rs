//! Roth's-lemma instances: the multidegree ratio hypothesis, the height
//! hypothesis and the index conclusion, each checked independently.
//!
//! With `m` blocks, weight `theta` and multidegree `r`:
//! - ratios: `r_h / r_{h+1} >= m^2 (m+1) / theta` for `1 <= h < m`
//! - heights: `r_h log H(L_h) >= C (sum r_i + log H(P))` with
//!   `C = 7 m (m!)^2 m^m / (2 theta^m)`
//! - conclusion: the index of `P` at the vanishing points of the forms is
//!   below `theta`

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::factorial::factorial;
use crate::arith::interval::{certified_compare, Comparison};
use crate::arith::rational::{self, int, Rational};
use crate::heights::{log_height_vector, BinaryLinearForm, ProjectivePoint};
use crate::index::{index, vanishing_point, IndexValue, MultihomogPolynomial};
use crate::{CertifiedInterval, Error, Result};

/// Largest precision tried before a comparison is reported indeterminate.
pub const DEFAULT_CEILING_BITS: u32 = 4096;

#[derive(Debug, Clone)]
pub struct RothInstance {
    theta: Rational,
    p: MultihomogPolynomial,
    forms: Vec<BinaryLinearForm>,
}

fn theta_bound(m: usize) -> Rational {
    int((m * m * (m + 1)) as i64)
}

fn check_parameters(m: usize, r: &[u32], theta: &Rational) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("m = {m}; at least two blocks are required")));
    }
    if r.len() != m {
        return Err(Error::Domain(format!("multidegree has {} entries, expected {m}", r.len())));
    }
    if r.contains(&0) {
        return Err(Error::Domain("multidegree entries must be positive".into()));
    }
    if !theta.is_positive() || theta > &theta_bound(m) {
        return Err(Error::Domain(format!(
            "theta = {} outside (0, m^2(m+1)] = (0, {}]",
            rational::format_rational(theta),
            m * m * (m + 1)
        )));
    }
    Ok(())
}

impl RothInstance {
    pub fn new(theta: Rational, p: MultihomogPolynomial, forms: Vec<BinaryLinearForm>) -> Result<Self> {
        let m = p.m();
        check_parameters(m, p.multidegree(), &theta)?;
        if p.is_zero() {
            return Err(Error::Domain("zero polynomial".into()));
        }
        if forms.len() != m {
            return Err(Error::Domain(format!("{} forms given, expected {m}", forms.len())));
        }
        if let Some(h) = forms.iter().position(|l| !l.has_rational_coefficients()) {
            return Err(Error::Domain(format!("form L_{} must have rational coefficients", h + 1)));
        }
        Ok(RothInstance { theta, p, forms })
    }

    pub fn m(&self) -> usize {
        self.p.m()
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    pub fn polynomial(&self) -> &MultihomogPolynomial {
        &self.p
    }

    pub fn forms(&self) -> &[BinaryLinearForm] {
        &self.forms
    }
}

/// Per-`h` verdicts of the ratio hypothesis, exact.
pub fn check_hypothesis_ratios(m: usize, r: &[u32], theta: &Rational) -> Result<Vec<bool>> {
    check_parameters(m, r, theta)?;
    let threshold = theta_bound(m) / theta;
    Ok(r.windows(2).map(|w| Rational::new(w[0].into(), w[1].into()) >= threshold).collect())
}

/// `7 m (m!)^2 m^m / (2 theta^m)`, exact.
pub fn leading_coefficient(m: usize, theta: &Rational) -> Rational {
    let mf = Rational::from_integer(factorial(m as u64));
    let mm = rational::pow_i(&int(m as i64), m as i64);
    int(7 * m as i64) * &mf * &mf * mm / (int(2) * rational::pow_i(theta, m as i64))
}

/// Enclosure of `C (sum r_i + log H(P))`.
pub fn height_condition_threshold(
    m: usize,
    theta: &Rational,
    r: &[u32],
    log_hp: &CertifiedInterval,
) -> Result<CertifiedInterval> {
    check_parameters(m, r, theta)?;
    if log_hp.lo().is_negative() {
        return Err(Error::Domain("log H(P) must be non-negative".into()));
    }
    let sum_r: u64 = r.iter().map(|&d| d as u64).sum();
    Ok(log_hp.shift(&int(sum_r as i64)).scale(&leading_coefficient(m, theta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeightCheck {
    pub h: usize,
    /// `r_h log H(L_h)`
    pub lhs: CertifiedInterval,
    pub rhs: CertifiedInterval,
    pub verdict: Verdict,
    pub bits: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct RothReport {
    pub m: usize,
    #[serde(with = "rational::serde_str")]
    pub theta: Rational,
    pub r: Vec<u32>,
    pub ratio_ok: Vec<bool>,
    pub height_ok: Vec<HeightCheck>,
    #[serde(with = "rational::serde_str")]
    pub leading_coefficient: Rational,
    pub log_height_p: CertifiedInterval,
    pub vanishing_points: Vec<ProjectivePoint>,
    pub conclusion_index: IndexValue,
    pub conclusion_holds: bool,
    /// `Holds` iff every hypothesis verdict holds, `Indeterminate` if any
    /// height comparison could not be separated.
    pub hypotheses: Verdict,
}

/// Certified `lhs >= rhs`, computing both sides at increasing precision.
fn certified_at_least<F>(mut sides: F, bits: u32, ceiling: u32) -> Result<(CertifiedInterval, CertifiedInterval, Verdict, u32)>
where
    F: FnMut(u32) -> Result<(CertifiedInterval, CertifiedInterval)>,
{
    let mut b = bits;
    loop {
        let (l, r) = sides(b)?;
        let verdict = match (l.exact(), r.exact()) {
            (Some(x), Some(y)) => Some(Verdict::from_bool(x >= y)),
            _ => match certified_compare(&l, &r) {
                Comparison::Greater => Some(Verdict::Holds),
                Comparison::Less => Some(Verdict::Fails),
                Comparison::Overlap => None,
            },
        };
        match verdict {
            Some(v) => return Ok((l, r, v, b)),
            None if b >= ceiling => return Ok((l, r, Verdict::Indeterminate, b)),
            None => b = (b.saturating_mul(2)).min(ceiling),
        }
    }
}

pub fn check_roth_instance(inst: &RothInstance, bits: u32) -> Result<RothReport> {
    check_roth_instance_with_ceiling(inst, bits, DEFAULT_CEILING_BITS.max(bits))
}

pub fn check_roth_instance_with_ceiling(inst: &RothInstance, bits: u32, ceiling: u32) -> Result<RothReport> {
    let m = inst.m();
    let r = inst.p.multidegree().to_vec();
    let ratio_ok = check_hypothesis_ratios(m, &r, &inst.theta)?;
    let coefficient = leading_coefficient(m, &inst.theta);

    let mut height_ok = Vec::with_capacity(m);
    let mut log_hp = inst.p.log_height(bits)?;
    for (h, form) in inst.forms.iter().enumerate() {
        let (lhs, rhs, verdict, used) = certified_at_least(
            |b| {
                let lh = log_height_vector(&form.coefficients(), b + 8)?.scale(&int(r[h] as i64));
                let lp = inst.p.log_height(b + 8)?;
                let rhs = height_condition_threshold(m, &inst.theta, &r, &lp)?;
                Ok((lh, rhs))
            },
            bits,
            ceiling,
        )?;
        if used > bits {
            log_hp = inst.p.log_height(used)?;
        }
        height_ok.push(HeightCheck { h: h + 1, lhs, rhs, verdict, bits: used });
    }

    let vanishing_points: Vec<ProjectivePoint> = inst.forms.iter().map(vanishing_point).collect();
    let conclusion_index = index(&inst.p, &vanishing_points)?;
    let conclusion_holds = conclusion_index.value < inst.theta;

    let hypotheses = if height_ok.iter().any(|c| c.verdict == Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::from_bool(ratio_ok.iter().all(|&b| b) && height_ok.iter().all(|c| c.verdict == Verdict::Holds))
    };

    Ok(RothReport {
        m,
        theta: inst.theta.clone(),
        r,
        ratio_ok,
        height_ok,
        leading_coefficient: coefficient,
        log_height_p: log_hp,
        vanishing_points,
        conclusion_index,
        conclusion_holds,
        hypotheses,
    })
}

/// `ceil(e^x)` for a rational `x`, certified.
pub fn ceil_exp(x: &Rational) -> BigInt {
    let mut bits = 64 + (rational::to_f64(x).abs() * 1.5) as u32;
    loop {
        let e = CertifiedInterval::point(x.clone()).exp(bits);
        let lo = rational::ceil(e.lo());
        let hi = rational::ceil(e.hi());
        if lo == hi {
            return lo;
        }
        bits *= 2;
    }
}

/// The forms `x1 - N_h x2` of the feasible family with
/// `N_1 = ceil(e^52)`, `N_2 = ceil(e^360)`, `theta = 19/10`, `r = (7, 1)`.
pub fn feasible_family_forms() -> Vec<BinaryLinearForm> {
    [52, 360]
        .iter()
        .map(|&e| {
            let n = ceil_exp(&int(e));
            BinaryLinearForm::new(
                crate::FieldElement::one_in(crate::Field::Rationals),
                crate::FieldElement::rational(Rational::from_integer(-n)),
            )
            .expect("nonzero")
        })
        .collect()
}

pub fn feasible_family_theta() -> Rational {
    Rational::new(19.into(), 10.into())
}

pub const FEASIBLE_FAMILY_MULTIDEGREE: [u32; 2] = [7, 1];

/// Exact `r_h/r_{h+1}` thresholds for display.
pub fn ratio_threshold(m: usize, theta: &Rational) -> Rational {
    if theta.is_zero() {
        return Rational::one();
    }
    theta_bound(m) / theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::FieldElement;

    #[test]
    fn ratio_examples() {
        assert_eq!(check_hypothesis_ratios(2, &[4, 4], &int(12)).unwrap(), vec![true]);
        assert_eq!(check_hypothesis_ratios(2, &[4, 5], &int(12)).unwrap(), vec![false]);
        assert_eq!(check_hypothesis_ratios(3, &[1296, 36, 1], &int(1)).unwrap(), vec![true, true]);
        assert!(check_hypothesis_ratios(2, &[1, 1], &int(0)).is_err());
        assert!(check_hypothesis_ratios(2, &[1, 1], &int(13)).is_err());
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(leading_coefficient(2, &int(12)), rat(7, 9));
        assert_eq!(leading_coefficient(3, &int(1)), int(10206));
        let t = height_condition_threshold(2, &int(12), &[1, 1], &CertifiedInterval::zero()).unwrap();
        assert_eq!(t, CertifiedInterval::point(rat(14, 9)));
    }

    fn det_poly() -> MultihomogPolynomial {
        let fe = FieldElement::from_int;
        MultihomogPolynomial::new(vec![1, 1], vec![(vec![(1, 0), (0, 1)], fe(1)), (vec![(0, 1), (1, 0)], fe(-1))])
            .unwrap()
    }

    #[test]
    fn instance_examples() {
        let x2 = BinaryLinearForm::from_ints(0, 1).unwrap();
        let inst = RothInstance::new(rat(3, 2), det_poly(), vec![x2.clone(), x2.clone()]).unwrap();
        let rep = check_roth_instance(&inst, 64).unwrap();
        assert_eq!(rep.conclusion_index.value, int(1));
        assert!(rep.conclusion_holds);
        // H(x2) = 1 so the height hypothesis fails, and is reported as such
        assert_eq!(rep.hypotheses, Verdict::Fails);

        let q = MultihomogPolynomial::new(vec![2, 1], vec![(vec![(0, 2), (1, 0)], FieldElement::from_int(1))]).unwrap();
        let x1 = BinaryLinearForm::from_ints(1, 0).unwrap();
        let inst = RothInstance::new(int(1), q, vec![x2, x1]).unwrap();
        let rep = check_roth_instance(&inst, 64).unwrap();
        assert_eq!(rep.conclusion_index.value, int(2));
        assert!(!rep.conclusion_holds);
    }

    #[test]
    fn ceil_exp_small() {
        assert_eq!(ceil_exp(&int(1)), BigInt::from(3));
        assert_eq!(ceil_exp(&int(10)), BigInt::from(22027));
    }
}
