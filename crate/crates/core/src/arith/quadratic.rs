//! Elements of the rationals and of quadratic fields `Q(sqrt d)`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::factor::factorize;
use super::interval::CertifiedInterval;
use super::rational::{self, int, Rational};
use crate::error::{Error, Result};

/// The coefficient field: the rationals or `Q(sqrt d)` with `d` squarefree
/// and `d` not in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Quadratic(i64),
}

impl Field {
    pub fn quadratic(d: i64) -> Result<Field> {
        if d == 0 || d == 1 {
            return Err(Error::Domain(format!("d = {d} does not define a quadratic field")));
        }
        if !is_squarefree(d.unsigned_abs()) {
            return Err(Error::Domain(format!("d = {d} is not squarefree")));
        }
        Ok(Field::Quadratic(d))
    }

    /// `[K:Q]`.
    pub fn degree(&self) -> u32 {
        match self {
            Field::Rationals => 1,
            Field::Quadratic(_) => 2,
        }
    }

    pub fn d(&self) -> Option<i64> {
        match self {
            Field::Rationals => None,
            Field::Quadratic(d) => Some(*d),
        }
    }

    pub fn is_imaginary(&self) -> bool {
        matches!(self, Field::Quadratic(d) if *d < 0)
    }

    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Result<Field> {
        match (self, other) {
            (Field::Rationals, f) | (f, Field::Rationals) => Ok(f),
            (Field::Quadratic(a), Field::Quadratic(b)) if a == b => Ok(self),
            (Field::Quadratic(a), Field::Quadratic(b)) => Err(Error::FieldMismatch(format!(
                "Q(sqrt {a}) and Q(sqrt {b}) have no common quadratic field"
            ))),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    factorize(&BigUint::from(n)).iter().all(|(_, e)| *e == 1)
}

/// `a + b sqrt(d)` in a fixed field. Elements of `Q` embedded in a quadratic
/// field keep the field tag, which matters for place normalizations;
/// equality and hashing are by value.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct FieldElement {
    a: Rational,
    b: Rational,
    field: Field,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ElementRepr {
    Rational(String),
    Quadratic { a: String, b: String, d: i64 },
}

impl TryFrom<ElementRepr> for FieldElement {
    type Error = Error;
    fn try_from(r: ElementRepr) -> Result<Self> {
        match r {
            ElementRepr::Rational(s) => Ok(FieldElement::rational(rational::parse_rational(&s)?)),
            ElementRepr::Quadratic { a, b, d } => FieldElement::new(
                rational::parse_rational(&a)?,
                rational::parse_rational(&b)?,
                Field::quadratic(d)?,
            ),
        }
    }
}

impl From<FieldElement> for ElementRepr {
    fn from(x: FieldElement) -> ElementRepr {
        match x.field {
            Field::Rationals => ElementRepr::Rational(rational::format_rational(&x.a)),
            Field::Quadratic(d) => ElementRepr::Quadratic {
                a: rational::format_rational(&x.a),
                b: rational::format_rational(&x.b),
                d,
            },
        }
    }
}

impl FieldElement {
    pub fn new(a: Rational, b: Rational, field: Field) -> Result<Self> {
        if field == Field::Rationals && !b.is_zero() {
            return Err(Error::Domain("irrational part given for an element of Q".into()));
        }
        Ok(FieldElement { a, b, field })
    }

    pub fn rational(a: Rational) -> Self {
        FieldElement { a, b: Rational::zero(), field: Field::Rationals }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn zero_in(field: Field) -> Self {
        FieldElement { a: Rational::zero(), b: Rational::zero(), field }
    }

    pub fn one_in(field: Field) -> Self {
        FieldElement { a: Rational::one(), b: Rational::zero(), field }
    }

    /// `sqrt(d)` itself.
    pub fn generator(field: Field) -> Result<Self> {
        match field {
            Field::Rationals => Err(Error::Domain("Q has no quadratic generator".into())),
            Field::Quadratic(_) => Ok(FieldElement { a: Rational::zero(), b: Rational::one(), field }),
        }
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Re-tags the element as living in `field`, which must contain it.
    pub fn in_field(&self, field: Field) -> Result<Self> {
        let joined = self.field.join(field)?;
        if joined != field && !self.b.is_zero() {
            return Err(Error::FieldMismatch(format!("{self} does not lie in {field}")));
        }
        Ok(FieldElement { a: self.a.clone(), b: self.b.clone(), field })
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    fn d_rat(&self) -> Rational {
        int(self.field.d().unwrap_or(0))
    }

    pub fn conjugate(&self) -> Self {
        FieldElement { a: self.a.clone(), b: -&self.b, field: self.field }
    }

    /// Field norm to `Q`: `a^2 - d b^2`, or `a` itself over `Q`.
    pub fn norm(&self) -> Rational {
        match self.field {
            Field::Rationals => self.a.clone(),
            Field::Quadratic(_) => &self.a * &self.a - self.d_rat() * &self.b * &self.b,
        }
    }

    pub fn trace(&self) -> Rational {
        match self.field {
            Field::Rationals => self.a.clone(),
            Field::Quadratic(_) => &self.a + &self.a,
        }
    }

    fn joined(&self, other: &Self) -> Field {
        match self.field.join(other.field) {
            Ok(f) => f,
            // arithmetic across distinct quadratic fields is a caller bug;
            // public entry points validate fields before computing
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let field = self.field.join(other.field)?;
        Ok(FieldElement { a: &self.a + &other.a, b: &self.b + &other.b, field })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let field = self.field.join(other.field)?;
        let d = int(field.d().unwrap_or(0));
        Ok(FieldElement {
            a: &self.a * &other.a + d * &self.b * &other.b,
            b: &self.a * &other.b + &self.b * &other.a,
            field,
        })
    }

    /// Inverse, defined iff `a^2 - d b^2 != 0`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        match self.field {
            Field::Rationals => Ok(FieldElement::rational(self.a.recip())),
            Field::Quadratic(_) => Ok(FieldElement { a: &self.a / &n, b: -&self.b / &n, field: self.field }),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = FieldElement::one_in(self.field);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FieldElement { a: &self.a * c, b: &self.b * c, field: self.field }
    }

    /// Least common denominator of both coordinates.
    pub fn denominator(&self) -> BigInt {
        rational::lcm_denominators([&self.a, &self.b])
    }

    /// Magnitude used to rank coordinates: `|N(x)|`, which orders rationals
    /// like `|x|`.
    pub fn magnitude_key(&self) -> Rational {
        match self.field {
            Field::Rationals => self.a.abs(),
            Field::Quadratic(_) => self.norm().abs(),
        }
    }

    /// Enclosure of the real value under the real embedding sending
    /// `sqrt d` to `sign * sqrt d` (`d > 0`), or of `Q` elements as-is.
    pub fn real_embedding(&self, negate_root: bool, bits: u32) -> Result<CertifiedInterval> {
        match self.field {
            Field::Rationals => Ok(CertifiedInterval::point(self.a.clone())),
            Field::Quadratic(d) if d > 0 => {
                if self.b.is_zero() {
                    return Ok(CertifiedInterval::point(self.a.clone()));
                }
                let b = if negate_root { -&self.b } else { self.b.clone() };
                let extra = rational::floor_log2(&b.abs()).max(0) as u32 + 2;
                let root = CertifiedInterval::point(int(d)).sqrt(bits + extra)?;
                Ok(root.scale(&b).shift(&self.a))
            }
            Field::Quadratic(_) => Err(Error::Domain("imaginary field has no real embedding".into())),
        }
    }

    /// Squared modulus under an infinite embedding; rational for imaginary
    /// fields and for rational elements.
    pub fn abs_squared_exact(&self) -> Option<Rational> {
        match self.field {
            Field::Rationals => Some(&self.a * &self.a),
            Field::Quadratic(d) if d < 0 => Some(self.norm()),
            Field::Quadratic(_) if self.b.is_zero() => Some(&self.a * &self.a),
            Field::Quadratic(_) => None,
        }
    }

    /// Rational approximation for display and heuristics only.
    pub fn approx(&self) -> (f64, f64) {
        let a = rational::to_f64(&self.a);
        let b = rational::to_f64(&self.b);
        match self.field {
            Field::Rationals => (a, 0.0),
            Field::Quadratic(d) if d > 0 => (a + b * (d as f64).sqrt(), 0.0),
            Field::Quadratic(d) => (a, b * ((-d) as f64).sqrt()),
        }
    }

    /// A square root inside the same field, if one exists.
    pub fn sqrt_in_field(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        match self.field {
            Field::Rationals => rational_sqrt(&self.a).map(FieldElement::rational),
            Field::Quadratic(d) => {
                let dr = int(d);
                let field = self.field;
                if self.b.is_zero() {
                    if let Some(s) = rational_sqrt(&self.a) {
                        return Some(FieldElement { a: s, b: Rational::zero(), field });
                    }
                    // a = d t^2
                    return rational_sqrt(&(&self.a / &dr))
                        .map(|t| FieldElement { a: Rational::zero(), b: t, field });
                }
                // (s + t sqrt d)^2 = a + b sqrt d: s^2 + d t^2 = a, 2 s t = b
                let n = rational_sqrt(&self.norm())?;
                let two = int(2);
                for cand in [(&self.a + &n) / &two, (&self.a - &n) / &two] {
                    if let Some(s) = rational_sqrt(&cand) {
                        if s.is_zero() {
                            continue;
                        }
                        let t = &self.b / (&two * &s);
                        let r = FieldElement { a: s, b: t, field };
                        if &(&r * &r) == self {
                            return Some(r);
                        }
                    }
                }
                None
            }
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_rational() && self.a.is_integer() {
            self.a.numer().to_i64()
        } else {
            None
        }
    }
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    rational::exact_root(x, 2)
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.field == other.field)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !self.b.is_zero() {
            self.field.hash(state);
        }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on `(a, b, d)`; a structural order for canonical keys, not
/// an order on the field.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        let fd = |x: &FieldElement| if x.b.is_zero() { 0 } else { x.field.d().unwrap_or(0) };
        self.a
            .cmp(&other.a)
            .then_with(|| self.b.cmp(&other.b))
            .then_with(|| fd(self).cmp(&fd(other)))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field {
            Field::Rationals => write!(f, "{}", rational::format_rational(&self.a)),
            Field::Quadratic(d) => {
                if self.b.is_zero() {
                    write!(f, "{}", rational::format_rational(&self.a))
                } else if self.a.is_zero() {
                    write!(f, "{}*sqrt({d})", rational::format_rational(&self.b))
                } else {
                    write!(
                        f,
                        "{} + {}*sqrt({d})",
                        rational::format_rational(&self.a),
                        rational::format_rational(&self.b)
                    )
                }
            }
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        let field = self.joined(rhs);
        FieldElement { a: &self.a + &rhs.a, b: &self.b + &rhs.b, field }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        let field = self.joined(rhs);
        FieldElement { a: &self.a - &rhs.a, b: &self.b - &rhs.b, field }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        let field = self.joined(rhs);
        let d = int(field.d().unwrap_or(0));
        FieldElement {
            a: &self.a * &rhs.a + d * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            field,
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { a: -&self.a, b: -&self.b, field: self.field }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl From<Rational> for FieldElement {
    fn from(a: Rational) -> Self {
        FieldElement::rational(a)
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FieldElement::from_int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    fn q(a: i64, b: i64, d: i64) -> FieldElement {
        FieldElement::new(int(a), int(b), Field::quadratic(d).unwrap()).unwrap()
    }

    #[test]
    fn field_validation() {
        assert!(Field::quadratic(0).is_err());
        assert!(Field::quadratic(1).is_err());
        assert!(Field::quadratic(12).is_err());
        assert!(Field::quadratic(-1).is_ok());
        assert!(Field::quadratic(-3).is_ok());
        assert!(Field::Quadratic(2).join(Field::Quadratic(3)).is_err());
    }

    #[test]
    fn arithmetic_and_inverse() {
        let x = q(1, 1, -1);
        assert_eq!(x.norm(), int(2));
        assert_eq!(&x * &x, q(0, 2, -1));
        let inv = x.inverse().unwrap();
        assert!((&x * &inv).is_one());
        assert!(FieldElement::zero_in(Field::Quadratic(5)).inverse().is_err());
        assert_eq!(x.pow(-2).unwrap(), (&x * &x).inverse().unwrap());
    }

    #[test]
    fn value_equality_across_tags() {
        let three_q = FieldElement::from_int(3);
        let three_i = three_q.in_field(Field::Quadratic(-1)).unwrap();
        assert_eq!(three_q, three_i);
        assert!(q(1, 1, 2).in_field(Field::Quadratic(3)).is_err());
    }

    #[test]
    fn square_roots() {
        let x = q(3, 2, 2); // (1 + sqrt 2)^2
        let r = x.sqrt_in_field().unwrap();
        assert_eq!(&r * &r, x);
        assert_eq!(FieldElement::rational(rat(9, 4)).sqrt_in_field(), Some(FieldElement::rational(rat(3, 2))));
        assert!(FieldElement::from_int(5).sqrt_in_field().is_none());
        let five = FieldElement::from_int(5).in_field(Field::Quadratic(5)).unwrap();
        assert_eq!(five.sqrt_in_field().unwrap(), q(0, 1, 5));
    }

    #[test]
    fn real_embeddings() {
        let x = q(1, 1, 2);
        let plus = x.real_embedding(false, 60).unwrap();
        let minus = x.real_embedding(true, 60).unwrap();
        assert!(plus.lo() > &int(2) && plus.hi() < &int(3));
        assert!(minus.hi() < &int(0));
        assert!((&plus * &minus).contains(&int(-1)));
    }
}
