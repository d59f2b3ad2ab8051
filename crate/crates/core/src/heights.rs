//! Absolute multiplicative heights of projective points, linear forms and
//! coefficient sequences.
//!
//! `H(x) = prod_v ||x||_v` with the max norm at finite places and the
//! Euclidean norm of the embedded vector, raised to `[K_v:R]/[K:Q]`, at
//! infinite places. The product is computed symbolically: some integer
//! power `H^k` is an exact rational, and only its root is enclosed.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::factor::prime_divisors;
use crate::arith::rational::{self, int, Rational};
use crate::arith::transcendental::enclose_log;
use crate::places::Place;
use crate::{CertifiedInterval, Error, Field, FieldElement, Result};

/// A point of projective space over `K`, given by homogeneous coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<FieldElement>", into = "Vec<FieldElement>")]
pub struct ProjectivePoint {
    coords: Vec<FieldElement>,
    field: Field,
}

fn common_field(coords: &[FieldElement]) -> Result<Field> {
    coords.iter().try_fold(Field::Rationals, |f, c| f.join(c.field()))
}

fn embed_all(coords: &[FieldElement], field: Field) -> Result<Vec<FieldElement>> {
    coords.iter().map(|c| c.in_field(field)).collect()
}

impl ProjectivePoint {
    pub fn new(coords: Vec<FieldElement>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain("a projective point needs at least two coordinates".into()));
        }
        if coords.iter().all(FieldElement::is_zero) {
            return Err(Error::Domain("zero vector is not a projective point".into()));
        }
        let field = common_field(&coords)?;
        Ok(ProjectivePoint { coords: embed_all(&coords, field)?, field })
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| FieldElement::from_int(c)).collect())
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The same point viewed over a larger field.
    pub fn in_field(&self, field: Field) -> Result<Self> {
        Ok(ProjectivePoint { coords: embed_all(&self.coords, field)?, field })
    }

    pub fn scale(&self, lambda: &FieldElement) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::Domain("scaling by zero".into()));
        }
        let field = self.field.join(lambda.field())?;
        let coords = embed_all(&self.coords, field)?
            .iter()
            .map(|c| c.try_mul(lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectivePoint { coords, field })
    }

    /// Representative whose first nonzero coordinate is 1.
    pub fn dehomogenized(&self) -> Self {
        let lead = self.coords.iter().find(|c| !c.is_zero()).expect("nonzero point");
        let inv = lead.inverse().expect("nonzero lead");
        let coords = self.coords.iter().map(|c| c * &inv).collect();
        ProjectivePoint { coords, field: self.field }
    }

    /// Representative with coprime integer entries (over `Z` or, for
    /// quadratic points, in the coordinates `a_i, b_i`) whose first nonzero
    /// coordinate is positive when rational. Only rescales by rationals.
    pub fn canonical(&self) -> Self {
        let mut coords = primitive_integral(&self.dehomogenized().coords);
        if let Some(lead) = coords.iter().find(|c| !c.is_zero()) {
            let sign_negative = if lead.is_rational() { lead.a().is_negative() } else { false };
            if sign_negative {
                coords = coords.iter().map(|c| -c).collect();
            }
        }
        ProjectivePoint { coords, field: self.field }
    }
}

/// Rescales by a rational so that all `a_i, b_i` are integers with gcd 1.
fn primitive_integral(coords: &[FieldElement]) -> Vec<FieldElement> {
    let l = rational::lcm_denominators(coords.iter().flat_map(|c| [c.a(), c.b()]));
    let lr = Rational::from_integer(l);
    let mut g = BigInt::zero();
    for c in coords {
        g = g.gcd(&(c.a() * &lr).to_integer()).gcd(&(c.b() * &lr).to_integer());
    }
    let factor = lr / Rational::from_integer(g);
    coords.iter().map(|c| c.scale(&factor)).collect()
}

impl PartialEq for ProjectivePoint {
    /// Proportionality over `K`.
    fn eq(&self, other: &Self) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let Ok(field) = self.field.join(other.field) else { return false };
        let a = self.in_field(field).map(|p| p.dehomogenized());
        let b = other.in_field(field).map(|p| p.dehomogenized());
        matches!((a, b), (Ok(a), Ok(b)) if a.coords == b.coords)
    }
}

impl Eq for ProjectivePoint {}

impl TryFrom<Vec<FieldElement>> for ProjectivePoint {
    type Error = Error;
    fn try_from(v: Vec<FieldElement>) -> Result<Self> {
        ProjectivePoint::new(v)
    }
}

impl From<ProjectivePoint> for Vec<FieldElement> {
    fn from(p: ProjectivePoint) -> Self {
        p.coords
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " : ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The binary form `c1 x1 + c2 x2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[FieldElement; 2]", into = "[FieldElement; 2]")]
pub struct BinaryLinearForm {
    c1: FieldElement,
    c2: FieldElement,
}

impl BinaryLinearForm {
    pub fn new(c1: FieldElement, c2: FieldElement) -> Result<Self> {
        if c1.is_zero() && c2.is_zero() {
            return Err(Error::Domain("zero linear form".into()));
        }
        let field = c1.field().join(c2.field())?;
        Ok(BinaryLinearForm { c1: c1.in_field(field)?, c2: c2.in_field(field)? })
    }

    pub fn from_ints(c1: i64, c2: i64) -> Result<Self> {
        Self::new(FieldElement::from_int(c1), FieldElement::from_int(c2))
    }

    pub fn c1(&self) -> &FieldElement {
        &self.c1
    }

    pub fn c2(&self) -> &FieldElement {
        &self.c2
    }

    pub fn field(&self) -> Field {
        self.c1.field()
    }

    pub fn has_rational_coefficients(&self) -> bool {
        self.c1.is_rational() && self.c2.is_rational()
    }

    pub fn evaluate(&self, x1: &FieldElement, x2: &FieldElement) -> Result<FieldElement> {
        self.c1.try_mul(x1)?.try_add(&self.c2.try_mul(x2)?)
    }

    pub fn coefficients(&self) -> [FieldElement; 2] {
        [self.c1.clone(), self.c2.clone()]
    }

    /// Proportional forms define the same vanishing point.
    pub fn is_proportional_to(&self, other: &BinaryLinearForm) -> bool {
        let cross = (&self.c1 * &other.c2) - (&self.c2 * &other.c1);
        cross.is_zero()
    }
}

impl TryFrom<[FieldElement; 2]> for BinaryLinearForm {
    type Error = Error;
    fn try_from([c1, c2]: [FieldElement; 2]) -> Result<Self> {
        BinaryLinearForm::new(c1, c2)
    }
}

impl From<BinaryLinearForm> for [FieldElement; 2] {
    fn from(l: BinaryLinearForm) -> Self {
        [l.c1, l.c2]
    }
}

impl fmt::Display for BinaryLinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*x1 + ({})*x2", self.c1, self.c2)
    }
}

/// The three forms `x1`, `x2`, `x1 + x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormTriple {
    L1,
    L2,
    L3,
}

impl FormTriple {
    pub const ALL: [FormTriple; 3] = [FormTriple::L1, FormTriple::L2, FormTriple::L3];

    pub fn form(self) -> BinaryLinearForm {
        let (a, b) = match self {
            FormTriple::L1 => (1, 0),
            FormTriple::L2 => (0, 1),
            FormTriple::L3 => (1, 1),
        };
        BinaryLinearForm::from_ints(a, b).expect("nonzero")
    }

    pub fn evaluate(self, x1: &FieldElement, x2: &FieldElement) -> Result<FieldElement> {
        self.form().evaluate(x1, x2)
    }
}

/// `H^k = value` for an exact rational `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactHeightPower {
    pub k: u32,
    pub value: Rational,
}

/// `H^k` of a nonzero coefficient vector as an exact rational.
pub fn height_power(coords: &[FieldElement]) -> Result<ExactHeightPower> {
    if coords.is_empty() || coords.iter().all(FieldElement::is_zero) {
        return Err(Error::Domain("height of the zero vector".into()));
    }
    let field = common_field(coords)?;
    let coords = primitive_integral(&embed_all(coords, field)?);
    let sum_sq = |xs: &[FieldElement]| xs.iter().fold(FieldElement::zero_in(field), |acc, c| &acc + &(c * c));
    match field {
        Field::Rationals => {
            // primitive integer vector: every finite place contributes 1
            let s = coords.iter().map(|c| c.a() * c.a()).fold(Rational::zero(), |a, b| a + b);
            Ok(ExactHeightPower { k: 2, value: s })
        }
        Field::Quadratic(d) => {
            let r = finite_part(&coords, field)?;
            if d < 0 {
                let s = coords.iter().map(|c| c.norm()).fold(Rational::zero(), |a, b| a + b);
                Ok(ExactHeightPower { k: 2, value: r * s })
            } else {
                let n = sum_sq(&coords).norm();
                Ok(ExactHeightPower { k: 4, value: &r * &r * n })
            }
        }
    }
}

/// `prod_P NP^(-min_i ord_P(a_i))` for integral coordinates with coprime
/// rational content; equals the square of the finite part of `H`.
fn finite_part(coords: &[FieldElement], field: Field) -> Result<Rational> {
    let nonzero: Vec<&FieldElement> = coords.iter().filter(|c| !c.is_zero()).collect();
    let g = nonzero
        .iter()
        .map(|c| c.norm().to_integer())
        .fold(BigInt::zero(), |acc, n| acc.gcd(&n));
    let mut r = Rational::one();
    if g.is_zero() || g.is_one() {
        return Ok(r);
    }
    for p in prime_divisors(g.magnitude()) {
        for place in Place::above(field, &p)? {
            let min_ord = nonzero
                .iter()
                .map(|c| place.ord(c).map(|o| o.expect("nonzero")))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .min()
                .expect("nonempty");
            if min_ord != 0 {
                let np = Rational::from_integer(BigInt::from(place.residue_norm().unwrap()));
                r *= rational::pow_i(&np, -min_ord);
            }
        }
    }
    Ok(r)
}

/// `H` of a nonzero coefficient vector of any length.
pub fn height_vector(coords: &[FieldElement], bits: u32) -> Result<CertifiedInterval> {
    let hp = height_power(coords)?;
    CertifiedInterval::point(hp.value).nth_root(hp.k, bits + 4)
}

/// Enclosure of `ln H`.
pub fn log_height_vector(coords: &[FieldElement], bits: u32) -> Result<CertifiedInterval> {
    let hp = height_power(coords)?;
    Ok(enclose_log(&hp.value, bits + 3)?.scale(&int(hp.k as i64).recip()))
}

pub fn height_point(x: &ProjectivePoint, bits: u32) -> Result<CertifiedInterval> {
    height_vector(x.coords(), bits)
}

/// `H(L)`, the height of the coefficient vector; also `H(V(L))`.
pub fn height_linear_form(l: &BinaryLinearForm, bits: u32) -> Result<CertifiedInterval> {
    height_vector(&l.coefficients(), bits)
}

/// `||x||_v`: max of `|a_i|_v` at finite places, Euclidean norm of the
/// embedded vector to the power `[K_v:R]/[K:Q]` at infinite places.
pub fn local_norm(coords: &[FieldElement], place: &Place, bits: u32) -> Result<CertifiedInterval> {
    let field = place.field();
    let coords = embed_all(coords, field)?;
    if !place.is_infinite() {
        let mut best: Option<CertifiedInterval> = None;
        let mut best_ord = i64::MAX;
        for c in coords.iter().filter(|c| !c.is_zero()) {
            let o = place.ord(c)?.expect("nonzero");
            if o < best_ord {
                best_ord = o;
                best = Some(place.absolute_value(c, bits)?);
            }
        }
        return best.ok_or_else(|| Error::Domain("norm of the zero vector".into()));
    }
    let exponent = Rational::new(BigInt::from(place.local_degree()), BigInt::from(2 * field.degree()));
    let mut sq = CertifiedInterval::zero();
    for c in &coords {
        let term = match c.abs_squared_exact() {
            Some(s) => CertifiedInterval::point(s),
            None => {
                let neg = matches!(place.kind(), crate::places::PlaceKind::Real { index: 1 });
                let e = c.real_embedding(neg, bits + 16)?;
                &e * &e
            }
        };
        sq = &sq + &term;
    }
    // (sum)^(num/den) with a small exponent
    let num = exponent.numer().to_u64().expect("small exponent");
    let den = exponent.denom().to_u32().expect("small exponent");
    sq.powi(num).nth_root(den, bits + 4)
}
