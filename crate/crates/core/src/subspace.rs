//! Subspace-theorem experiments over `K^2`: exponent systems, the twisted
//! inequality system, clustering of solutions into lines and the line-count
//! bound `2^(227/10) delta^-3 log(1/delta)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::power::RationalPower;
use crate::arith::rational::{self, int, rat, Rational};
use crate::arith::transcendental::enclose_log;
use crate::heights::{FormTriple, ProjectivePoint};
use crate::places::{Place, PlaceKind};
use crate::{CertifiedInterval, Error, Field, FieldElement, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentEntry {
    pub place: Place,
    pub forms: [FormTriple; 2],
    #[serde(serialize_with = "ser_pair")]
    pub e: [Rational; 2],
}

fn ser_pair<S: serde::Serializer>(e: &[Rational; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for x in e {
        seq.serialize_element(&rational::format_rational(x))?;
    }
    seq.end()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentSystem {
    field: Field,
    entries: Vec<ExponentEntry>,
}

impl ExponentSystem {
    pub fn new(field: Field, entries: Vec<ExponentEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if e.place.field() != field {
                return Err(Error::Domain(format!("place {} is not a place of {field}", e.place)));
            }
            if e.forms[0] == e.forms[1] {
                return Err(Error::Domain(format!("duplicate form {:?} at place {}", e.forms[0], e.place)));
            }
            if !seen.insert(e.place.clone()) {
                return Err(Error::Domain(format!("place {} listed twice", e.place)));
            }
        }
        for v in Place::infinite(field) {
            if !seen.contains(&v) {
                return Err(Error::Domain(format!("S must contain the infinite place {v}")));
            }
        }
        Ok(ExponentSystem { field, entries })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> &[ExponentEntry] {
        &self.entries
    }

    pub fn contains(&self, v: &Place) -> bool {
        self.entries.iter().any(|e| &e.place == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentCheck {
    #[serde(with = "rational::serde_str")]
    pub total: Rational,
    /// Largest subset sum over all choice functions.
    #[serde(with = "rational::serde_str")]
    pub max_partial: Rational,
    #[serde(with = "rational::serde_str")]
    pub min_partial: Rational,
    pub holds: bool,
}

/// `sum (e1 + e2) = 0` and every partial sum over a subset with one
/// exponent per place lies in `[-1, 1]`; the extremes are
/// `sum max(e1, e2, 0)` and `sum min(e1, e2, 0)`.
pub fn check_exponent_system(sys: &ExponentSystem) -> ExponentCheck {
    let mut total = Rational::zero();
    let mut hi = Rational::zero();
    let mut lo = Rational::zero();
    for e in &sys.entries {
        total += &e.e[0] + &e.e[1];
        hi += e.e[0].clone().max(e.e[1].clone()).max(Rational::zero());
        lo += e.e[0].clone().min(e.e[1].clone()).min(Rational::zero());
    }
    let holds = total.is_zero() && hi <= Rational::one() && lo >= -Rational::one();
    ExponentCheck { total, max_partial: hi, min_partial: lo, holds }
}

#[derive(Debug, Clone)]
pub struct SubspaceQuery {
    pub system: ExponentSystem,
    pub q: Rational,
    pub delta: Rational,
    /// Reads the integrality line of the system literally, as a condition
    /// at the places of `S` instead of outside `S`.
    pub strict_printed_form: bool,
}

/// `Q > 4^delta`, exact: `Q^den > 4^num`.
pub fn precondition_holds(q: &Rational, delta: &Rational) -> bool {
    let (Ok(lhs), Ok(rhs)) = (RationalPower::of(q.clone()), RationalPower::new(int(4), delta.clone())) else {
        return false;
    };
    matches!(lhs.compare(&rhs, 128, 4096), Ok(Ordering::Greater))
}

impl SubspaceQuery {
    pub fn new(system: ExponentSystem, q: Rational, delta: Rational) -> Result<Self> {
        if !(delta.is_positive() && delta < Rational::one()) {
            return Err(Error::Domain("delta must lie in (0, 1)".into()));
        }
        if q <= Rational::one() {
            return Err(Error::Domain("Q must exceed 1".into()));
        }
        if !precondition_holds(&q, &delta) {
            return Err(Error::Domain(format!(
                "Q = {} does not satisfy Q > 4^delta",
                rational::format_rational(&q)
            )));
        }
        Ok(SubspaceQuery { system, q, delta, strict_printed_form: false })
    }

    pub fn strict(mut self, on: bool) -> Self {
        self.strict_printed_form = on;
        self
    }
}

/// `|y|_v` compared against `Q^exp`; `strict` asks for `<`.
fn compare_local(
    y: &FieldElement,
    v: &Place,
    q: &Rational,
    exp: &Rational,
    strict: bool,
    bits: u32,
) -> Result<bool> {
    if y.is_zero() {
        return Ok(true);
    }
    let rhs = RationalPower::new(q.clone(), exp.clone())?;
    let ord = match v.absolute_value_power(y)? {
        Some(lhs) => lhs.compare(&rhs, bits, bits.max(1024) * 4)?,
        None => {
            let mut b = bits;
            loop {
                let l = v.absolute_value(y, b)?.ln(b)?;
                let r = rhs.ln(b)?;
                if l.hi() < r.lo() {
                    break Ordering::Less;
                }
                if l.lo() > r.hi() {
                    break Ordering::Greater;
                }
                if b >= 4096 {
                    return Err(Error::Indeterminate { what: format!("|L(x)|_{v} against Q^e"), bits: b });
                }
                b *= 2;
            }
        }
    };
    Ok(if strict { ord == Ordering::Less } else { ord != Ordering::Greater })
}

/// `||x||_v <= 1` at a finite place: both coordinates integral there.
fn integral_at(x: &[FieldElement; 2], v: &Place) -> Result<bool> {
    for c in x {
        if let Some(o) = v.ord(c)? {
            if o < 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `||x||_v <= 1` at an infinite place: squared Euclidean norm at most 1.
fn unit_ball_at(x: &[FieldElement; 2], v: &Place, bits: u32) -> Result<bool> {
    let mut exact = Rational::zero();
    let mut enclosed = CertifiedInterval::zero();
    let mut all_exact = true;
    for c in x {
        match c.abs_squared_exact() {
            Some(s) => exact += s,
            None => {
                all_exact = false;
                let neg = matches!(v.kind(), PlaceKind::Real { index: 1 });
                let e = c.real_embedding(neg, bits)?;
                enclosed = &enclosed + &(&e * &e);
            }
        }
    }
    if all_exact {
        return Ok(exact <= Rational::one());
    }
    let total = enclosed.shift(&exact);
    if total.hi() <= &Rational::one() {
        Ok(true)
    } else if total.lo() > &Rational::one() {
        Ok(false)
    } else {
        Err(Error::Indeterminate { what: "||x||_v <= 1".into(), bits })
    }
}

/// Primes at which a coordinate may fail to be integral.
fn denominator_primes(x: &[FieldElement; 2]) -> Vec<num_bigint::BigUint> {
    let l = x[0].denominator().lcm(&x[1].denominator());
    let mut ps = crate::arith::factor::prime_divisors(l.magnitude());
    ps.sort();
    ps
}

/// Whether `x` solves the inequality system of the query.
pub fn satisfies_system(x: &[FieldElement; 2], q: &SubspaceQuery, bits: u32) -> Result<bool> {
    if x[0].is_zero() && x[1].is_zero() {
        return Err(Error::Domain("zero vector".into()));
    }
    let field = q.system.field;
    let x = [x[0].in_field(field)?, x[1].in_field(field)?];
    let n = int(field.degree() as i64);
    for entry in &q.system.entries {
        let v = &entry.place;
        for i in 0..2 {
            let y = entry.forms[i].evaluate(&x[0], &x[1])?;
            let ok = if v.is_infinite() {
                let exp = &entry.e[i] - &q.delta * int(v.local_degree() as i64) / &n;
                compare_local(&y, v, &q.q, &exp, true, bits)?
            } else {
                compare_local(&y, v, &q.q, &entry.e[i], false, bits)?
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    if q.strict_printed_form {
        for entry in &q.system.entries {
            let v = &entry.place;
            let ok = if v.is_infinite() { unit_ball_at(&x, v, bits)? } else { integral_at(&x, v)? };
            if !ok {
                return Ok(false);
            }
        }
    } else {
        for p in denominator_primes(&x) {
            for v in Place::above(field, &p)? {
                if !q.system.contains(&v) && !integral_at(&x, &v)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineCluster {
    pub representative: ProjectivePoint,
    pub count: usize,
}

/// Groups nonzero vectors of `K^2` by the line they span. Output is sorted
/// by canonical representative.
pub fn cluster_into_lines(points: &[[FieldElement; 2]]) -> Result<Vec<LineCluster>> {
    let mut map: BTreeMap<Vec<FieldElement>, (ProjectivePoint, usize)> = BTreeMap::new();
    for p in points {
        let pp = ProjectivePoint::new(vec![p[0].clone(), p[1].clone()])?;
        let key = pp.dehomogenized().coords().to_vec();
        map.entry(key).or_insert_with(|| (pp.canonical(), 0)).1 += 1;
    }
    Ok(map
        .into_values()
        .map(|(representative, count)| LineCluster { representative, count })
        .collect())
}

/// `2^(227/10) delta^-3 ln(1/delta)`.
pub fn prop21_line_bound(delta: &Rational, bits: u32) -> Result<CertifiedInterval> {
    if !(delta.is_positive() && delta < &Rational::one()) {
        return Err(Error::Domain("delta must lie in (0, 1)".into()));
    }
    let two_pow = RationalPower::new(int(2), rat(227, 10))?.enclose(bits + 8)?;
    let inv = delta.recip();
    let cube = &inv * &inv * &inv;
    let log = enclose_log(&inv, bits + 8 + rational::floor_log2(&cube).max(0) as u32)?;
    Ok((&two_pow * &log).scale(&cube).round_outward(bits + 16))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub box_radius: i64,
    pub candidates: usize,
    pub solutions: usize,
    pub lines: Vec<LineCluster>,
    pub line_count: usize,
    pub bound: CertifiedInterval,
    pub within_bound: bool,
    pub precondition_note: String,
}

/// Exhaustive scan of integer points with coprime coordinates in
/// `[-radius, radius]^2`, one `x1` column per worker.
pub fn scan_box(q: &SubspaceQuery, radius: i64, bits: u32) -> Result<ScanReport> {
    let columns: Vec<Result<(usize, Vec<[FieldElement; 2]>)>> = (-radius..=radius)
        .into_par_iter()
        .map(|a| {
            let mut count = 0usize;
            let mut hits = Vec::new();
            for b in -radius..=radius {
                if a.gcd(&b) != 1 {
                    continue;
                }
                count += 1;
                let x = [FieldElement::from_int(a), FieldElement::from_int(b)];
                if satisfies_system(&x, q, bits)? {
                    hits.push(x);
                }
            }
            Ok((count, hits))
        })
        .collect();
    let mut candidates = 0;
    let mut sols = Vec::new();
    for c in columns {
        let (n, hits) = c?;
        candidates += n;
        sols.extend(hits);
    }
    let lines = cluster_into_lines(&sols)?;
    let bound = prop21_line_bound(&q.delta, bits)?;
    let within_bound = Rational::from_integer(BigInt::from(lines.len())) <= *bound.hi();
    Ok(ScanReport {
        box_radius: radius,
        candidates,
        solutions: sols.len(),
        line_count: lines.len(),
        lines,
        bound,
        within_bound,
        precondition_note: "Q > 4^delta checked as stated; note that 4^delta < 4 for every delta in (0, 1)".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(place: Place, e1: Rational, e2: Rational) -> ExponentEntry {
        ExponentEntry { place, forms: [FormTriple::L1, FormTriple::L2], e: [e1, e2] }
    }

    fn rational_system(e1: Rational, e2: Rational) -> ExponentSystem {
        ExponentSystem::new(Field::Rationals, vec![entry(Place::infinite(Field::Rationals)[0].clone(), e1, e2)])
            .unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert!(check_exponent_system(&rational_system(rat(1, 2), rat(-1, 2))).holds);
        assert!(!check_exponent_system(&rational_system(int(2), int(-2))).holds);
        let inf = Place::infinite(Field::Rationals)[0].clone();
        let two = Place::finite(Field::Rationals, 2, 0).unwrap();
        let sys = ExponentSystem::new(
            Field::Rationals,
            vec![entry(inf, rat(1, 2), rat(-1, 2)), entry(two, rat(1, 2), rat(-1, 2))],
        )
        .unwrap();
        let c = check_exponent_system(&sys);
        assert!(c.holds);
        assert_eq!(c.max_partial, int(1));
    }

    #[test]
    fn malformed_systems() {
        let inf = Place::infinite(Field::Rationals)[0].clone();
        let dup = ExponentEntry { place: inf, forms: [FormTriple::L3, FormTriple::L3], e: [int(0), int(0)] };
        assert!(ExponentSystem::new(Field::Rationals, vec![dup]).is_err());
        let two = Place::finite(Field::Rationals, 2, 0).unwrap();
        assert!(ExponentSystem::new(Field::Rationals, vec![entry(two, int(0), int(0))]).is_err());
    }

    #[test]
    fn inequality_examples() {
        let q = SubspaceQuery::new(rational_system(rat(1, 2), rat(-1, 2)), int(100), rat(1, 10)).unwrap();
        let x = |a, b| [FieldElement::from_int(a), FieldElement::from_int(b)];
        assert!(satisfies_system(&x(1, 0), &q, 64).unwrap());
        assert!(!satisfies_system(&x(0, 1), &q, 64).unwrap());
        let q2 = SubspaceQuery::new(rational_system(rat(-1, 2), rat(1, 2)), int(100), rat(1, 10)).unwrap();
        assert!(!satisfies_system(&x(1, 0), &q2, 64).unwrap());
        let half = [FieldElement::rational(rat(1, 2)), FieldElement::from_int(0)];
        assert!(!satisfies_system(&half, &q, 64).unwrap());
    }

    #[test]
    fn preconditions() {
        assert!(precondition_holds(&rat(3, 2), &rat(1, 10)));
        assert!(!precondition_holds(&rat(11, 10), &rat(1, 2)));
        assert!(SubspaceQuery::new(rational_system(int(0), int(0)), rat(11, 10), rat(1, 2)).is_err());
        assert!(SubspaceQuery::new(rational_system(int(0), int(0)), int(100), int(1)).is_err());
    }

    #[test]
    fn clustering_examples() {
        let x = |a, b| [FieldElement::from_int(a), FieldElement::from_int(b)];
        assert_eq!(cluster_into_lines(&[x(1, 2), x(2, 4), x(3, 6)]).unwrap().len(), 1);
        assert_eq!(cluster_into_lines(&[x(1, 0), x(0, 1)]).unwrap().len(), 2);
        assert!(cluster_into_lines(&[]).unwrap().is_empty());
        assert!(cluster_into_lines(&[x(0, 0)]).is_err());
    }

    #[test]
    fn line_bound_examples() {
        let b = prop21_line_bound(&rat(1, 9), 64).unwrap();
        let mid = rational::to_f64(&b.midpoint());
        assert!((mid / 1.09e10 - 1.0).abs() < 0.01, "{mid}");
        let b3 = prop21_line_bound(&rat(1, 3), 64).unwrap();
        let mid3 = rational::to_f64(&b3.midpoint());
        assert!((mid3 / 2.02e8 - 1.0).abs() < 0.01, "{mid3}");
        assert!(prop21_line_bound(&int(1), 64).is_err());
    }
}
