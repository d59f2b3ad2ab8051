//! Places of `Q` and of quadratic fields, their normalized absolute values
//! and the product formula.
//!
//! Normalizations, with `n = [K:Q]`:
//! - real embedding `s`: `|x|_v = |s(x)|^(1/n)`
//! - complex pair: `|x|_v = |s(x)|^(2/n)`
//! - prime ideal `P`: `|x|_v = NP^(-ord_P(x)/n)`

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::factor::{is_probable_prime, prime_divisors};
use crate::arith::power::RationalPower;
use crate::arith::rational::{self, int, rat, Rational};
use crate::{CertifiedInterval, Error, Field, FieldElement, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceKind {
    /// Real embedding. Index 0 sends `sqrt d` to the positive root, 1 to
    /// the negative one; `Q` has only index 0.
    Real { index: u8 },
    /// The complex-conjugate pair of an imaginary quadratic field.
    Complex { index: u8 },
    /// A prime ideal above `p`. `splitting` is `None` over `Q`. For split
    /// primes the selector picks one of the two ideals.
    Finite { p: BigUint, splitting: Option<Splitting>, selector: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Place {
    field: Field,
    kind: PlaceKind,
}

/// Decomposition type of the rational prime `p` in `Q(sqrt d)`.
pub fn splitting_type(d: i64, p: &BigUint) -> Splitting {
    let db = BigInt::from(d);
    if p == &BigUint::from(2u32) {
        return match d.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        };
    }
    let pi = BigInt::from(p.clone());
    let r = db.mod_floor(&pi);
    if r.is_zero() {
        return Splitting::Ramified;
    }
    if legendre(&r.to_biguint().unwrap(), p) == 1 {
        Splitting::Split
    } else {
        Splitting::Inert
    }
}

fn legendre(a: &BigUint, p: &BigUint) -> i8 {
    let e = (p - 1u32) >> 1;
    let t = a.modpow(&e, p);
    if t.is_zero() {
        0
    } else if t.is_one() {
        1
    } else {
        -1
    }
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
fn sqrt_mod_prime(a: &BigUint, p: &BigUint) -> BigUint {
    let a = a % p;
    if a.is_zero() {
        return a;
    }
    let p1 = p - 1u32;
    let s = p1.trailing_zeros().unwrap_or(0);
    let q = &p1 >> s;
    if s == 1 {
        return a.modpow(&((p + 1u32) >> 2), p);
    }
    let mut z = BigUint::from(2u32);
    while legendre(&z, p) != -1 {
        z += 1u32;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (t * &c) % p;
        r = (r * b) % p;
    }
    r
}

/// A square root of `d` modulo `p^k` for a prime `p` that splits, chosen by
/// `selector` (0: the root below `p/2` modulo `p`, or `1 mod 4` for `p = 2`).
fn split_root(d: i64, p: &BigUint, k: u32, selector: u8) -> BigUint {
    let two = BigUint::from(2u32);
    let modulus = num_traits::pow(p.clone(), k as usize);
    let dm = BigInt::from(d).mod_floor(&BigInt::from(modulus.clone())).to_biguint().unwrap();
    let root = if *p == two {
        // s^2 = d mod 2^(j+1) determines s mod 2^j
        let target_bits = k as u64 + 2;
        let mut s = BigUint::one();
        let full = BigInt::from(d);
        for j in 3..=target_bits {
            let m = BigInt::one() << (j + 1);
            let sq = BigInt::from(&s * &s);
            if !(sq - &full).mod_floor(&m).is_zero() {
                s += BigUint::one() << (j - 1);
            }
        }
        s % &modulus
    } else {
        let r0 = sqrt_mod_prime(&(&dm % p), p);
        let half = p >> 1;
        let r0 = if r0 > half { p - &r0 } else { r0 };
        // Newton lifting
        let phi = num_traits::pow(p.clone(), k as usize - 1) * (p - 1u32);
        let mut s = r0;
        loop {
            let sq = (&s * &s) % &modulus;
            if sq == dm {
                break;
            }
            let f = (BigInt::from(sq) - BigInt::from(dm.clone())).mod_floor(&BigInt::from(modulus.clone()));
            let inv = ((&two * &s) % &modulus).modpow(&(&phi - 1u32), &modulus);
            let step = (f.to_biguint().unwrap() * inv) % &modulus;
            s = (&s + &modulus - step) % &modulus;
        }
        s
    };
    if selector == 0 {
        root
    } else {
        (&modulus - root) % &modulus
    }
}

/// `x = (A + B sqrt d) / c` with integers `A, B` and `c > 0`.
fn integral_parts(x: &FieldElement) -> (BigInt, BigInt, BigInt) {
    let c = x.denominator();
    let cr = Rational::from_integer(c.clone());
    ((x.a() * &cr).to_integer(), (x.b() * &cr).to_integer(), c)
}

/// Rational primes at which `x` may have nonzero valuation.
pub fn relevant_primes(x: &FieldElement) -> Vec<BigUint> {
    if x.is_zero() {
        return Vec::new();
    }
    let (a, b, c) = integral_parts(x);
    let n = match x.field() {
        Field::Rationals => a.clone(),
        Field::Quadratic(d) => &a * &a - BigInt::from(d) * &b * &b,
    };
    let mut ps = prime_divisors(n.magnitude());
    ps.extend(prime_divisors(c.magnitude()));
    ps.sort();
    ps.dedup();
    ps
}

impl Place {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn kind(&self) -> &PlaceKind {
        &self.kind
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self.kind, PlaceKind::Finite { .. })
    }

    /// All infinite places of `field`.
    pub fn infinite(field: Field) -> Vec<Place> {
        match field {
            Field::Rationals => vec![Place { field, kind: PlaceKind::Real { index: 0 } }],
            Field::Quadratic(d) if d > 0 => vec![
                Place { field, kind: PlaceKind::Real { index: 0 } },
                Place { field, kind: PlaceKind::Real { index: 1 } },
            ],
            Field::Quadratic(_) => vec![Place { field, kind: PlaceKind::Complex { index: 0 } }],
        }
    }

    /// The places of `field` above the rational prime `p`.
    pub fn above(field: Field, p: &BigUint) -> Result<Vec<Place>> {
        if !is_probable_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        let mk = |splitting, selector| Place {
            field,
            kind: PlaceKind::Finite { p: p.clone(), splitting, selector },
        };
        Ok(match field {
            Field::Rationals => vec![mk(None, 0)],
            Field::Quadratic(d) => match splitting_type(d, p) {
                Splitting::Split => vec![mk(Some(Splitting::Split), 0), mk(Some(Splitting::Split), 1)],
                s => vec![mk(Some(s), 0)],
            },
        })
    }

    pub fn finite(field: Field, p: u64, selector: u8) -> Result<Place> {
        Place::above(field, &BigUint::from(p))?
            .into_iter()
            .nth(selector as usize)
            .ok_or_else(|| Error::Domain(format!("no place with selector {selector} above {p}")))
    }

    pub fn prime(&self) -> Option<&BigUint> {
        match &self.kind {
            PlaceKind::Finite { p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn splitting(&self) -> Option<Splitting> {
        match &self.kind {
            PlaceKind::Finite { splitting, .. } => *splitting,
            _ => None,
        }
    }

    /// Residue field size `NP` (`p` or `p^2`).
    pub fn residue_norm(&self) -> Option<BigUint> {
        match &self.kind {
            PlaceKind::Finite { p, splitting: Some(Splitting::Inert), .. } => Some(p * p),
            PlaceKind::Finite { p, .. } => Some(p.clone()),
            _ => None,
        }
    }

    /// `[K_v : R]` at infinite places; `e f` at finite ones.
    pub fn local_degree(&self) -> u32 {
        match &self.kind {
            PlaceKind::Real { .. } => 1,
            PlaceKind::Complex { .. } => 2,
            PlaceKind::Finite { splitting: Some(Splitting::Split), .. } => 1,
            PlaceKind::Finite { splitting: None, .. } => 1,
            PlaceKind::Finite { .. } => 2,
        }
    }

    fn accept(&self, x: &FieldElement) -> Result<FieldElement> {
        x.in_field(self.field)
            .map_err(|_| Error::Domain(format!("element {x} does not lie in {}", self.field)))
    }

    /// `ord_P(x)`; `None` stands for the infinite order of zero.
    pub fn ord(&self, x: &FieldElement) -> Result<Option<i64>> {
        let x = self.accept(x)?;
        let PlaceKind::Finite { p, splitting, selector } = &self.kind else {
            return Err(Error::Domain("order is defined at finite places only".into()));
        };
        if x.is_zero() {
            return Ok(None);
        }
        let v = match splitting {
            None => rational::valuation(x.a(), p),
            Some(Splitting::Inert) => rational::valuation(&x.norm(), p) / 2,
            Some(Splitting::Ramified) => rational::valuation(&x.norm(), p),
            Some(Splitting::Split) => {
                let d = self.field.d().expect("split prime in a quadratic field");
                let (a, b, c) = integral_parts(&x);
                let n = &a * &a - BigInt::from(d) * &b * &b;
                let k = rational::int_valuation(&n, p) as u32 + 1;
                let s = split_root(d, p, k, *selector);
                let modulus = BigInt::from(num_traits::pow(p.clone(), k as usize));
                let t = (a + b * BigInt::from(s)).mod_floor(&modulus);
                debug_assert!(!t.is_zero());
                rational::int_valuation(&t, p) - rational::int_valuation(&c, p)
            }
        };
        Ok(Some(v))
    }

    /// `|x|_v` as an exact power `base^exp` when it has that shape.
    /// Zero and real-quadratic irrationals at real places give `None`.
    pub fn absolute_value_power(&self, x: &FieldElement) -> Result<Option<RationalPower>> {
        let x = self.accept(x)?;
        if x.is_zero() {
            return Ok(None);
        }
        let n = int(self.field.degree() as i64);
        let power = match &self.kind {
            PlaceKind::Finite { .. } => {
                let ord = self.ord(&x)?.expect("nonzero");
                let np = Rational::from_integer(BigInt::from(self.residue_norm().unwrap()));
                RationalPower::new(np, -int(ord) / &n)?
            }
            PlaceKind::Complex { .. } => RationalPower::new(x.norm(), rat(1, 2))?,
            PlaceKind::Real { .. } => {
                if !x.b().is_zero() {
                    return Ok(None);
                }
                RationalPower::new(x.a().abs(), n.recip())?
            }
        };
        Ok(Some(power))
    }

    /// `|x|_v`, exact whenever the value is rational.
    pub fn absolute_value(&self, x: &FieldElement, bits: u32) -> Result<CertifiedInterval> {
        let x = self.accept(x)?;
        if x.is_zero() {
            return Ok(CertifiedInterval::zero());
        }
        if let Some(p) = self.absolute_value_power(&x)? {
            return p.enclose(bits);
        }
        let PlaceKind::Real { index } = self.kind else { unreachable!() };
        let s = x.real_embedding(index == 1, bits + 8)?.abs();
        s.sqrt(bits + 4)
    }

    /// Places of `x.field()` with `|x|_v != 1`, together with all infinite
    /// places.
    pub fn support(x: &FieldElement) -> Result<Vec<Place>> {
        let mut out = Place::infinite(x.field());
        for p in relevant_primes(x) {
            for v in Place::above(x.field(), &p)? {
                if v.ord(x)? != Some(0) {
                    out.push(v);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PlaceKind::Real { index } if self.field == Field::Rationals => {
                let _ = index;
                write!(f, "inf")
            }
            PlaceKind::Real { index: 0 } => write!(f, "real(+sqrt{})", self.field.d().unwrap()),
            PlaceKind::Real { .. } => write!(f, "real(-sqrt{})", self.field.d().unwrap()),
            PlaceKind::Complex { .. } => write!(f, "complex"),
            PlaceKind::Finite { p, splitting: None, .. } => write!(f, "p={p}"),
            PlaceKind::Finite { p, splitting: Some(Splitting::Split), selector } => {
                write!(f, "P{selector}|{p} (split)")
            }
            PlaceKind::Finite { p, splitting: Some(Splitting::Inert), .. } => write!(f, "P|{p} (inert)"),
            PlaceKind::Finite { p, splitting: Some(Splitting::Ramified), .. } => write!(f, "P|{p} (ramified)"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalFactor {
    pub place: Place,
    pub value: CertifiedInterval,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductFormulaReport {
    pub factors: Vec<LocalFactor>,
    pub product: CertifiedInterval,
    pub exact: bool,
    pub holds: bool,
}

/// Enclosure of `prod_v |x|_v` over the support of `x`.
pub fn check_product_formula(x: &FieldElement, bits: u32) -> Result<ProductFormulaReport> {
    if x.is_zero() {
        return Err(Error::Domain("product formula needs a nonzero element".into()));
    }
    let places = Place::support(x)?;
    let inner = bits + 8 + (places.len() as u32).next_power_of_two().trailing_zeros();
    let mut factors = Vec::with_capacity(places.len());
    let mut product = CertifiedInterval::one();
    for place in places {
        let value = place.absolute_value(x, inner)?;
        product = &product * &value;
        if product.exact().is_none() {
            product = product.round_outward(inner + 16);
        }
        factors.push(LocalFactor { place, value });
    }
    let exact = product.exact().is_some();
    let holds = product.contains(&Rational::one());
    Ok(ProductFormulaReport { factors, product, exact, holds })
}

/// `p` as a `u64` for display purposes.
pub fn small_prime(place: &Place) -> Option<u64> {
    place.prime().and_then(|p| p.to_u64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FieldElement {
        FieldElement::rational(rat(n, d))
    }

    #[test]
    fn splitting_rules() {
        let p = |n: u32| BigUint::from(n);
        assert_eq!(splitting_type(-1, &p(2)), Splitting::Ramified);
        assert_eq!(splitting_type(-1, &p(3)), Splitting::Inert);
        assert_eq!(splitting_type(-1, &p(5)), Splitting::Split);
        assert_eq!(splitting_type(-7, &p(2)), Splitting::Split);
        assert_eq!(splitting_type(5, &p(2)), Splitting::Inert);
        assert_eq!(splitting_type(5, &p(5)), Splitting::Ramified);
        assert_eq!(splitting_type(2, &p(7)), Splitting::Split);
    }

    #[test]
    fn split_roots_square_to_d() {
        for (d, p, k) in [(-1i64, 5u32, 6u32), (-7, 2, 9), (2, 7, 4), (-1, 13, 3), (17, 2, 12)] {
            let pb = BigUint::from(p);
            let m = num_traits::pow(pb.clone(), k as usize);
            for sel in 0..2 {
                let s = split_root(d, &pb, k, sel);
                let lhs = BigInt::from(&s * &s).mod_floor(&BigInt::from(m.clone()));
                let rhs = BigInt::from(d).mod_floor(&BigInt::from(m.clone()));
                assert_eq!(lhs, rhs, "d={d} p={p} sel={sel}");
            }
        }
    }

    #[test]
    fn p_adic_example() {
        let v5 = Place::finite(Field::Rationals, 5, 0).unwrap();
        assert_eq!(v5.absolute_value(&q(-6, 5), 30).unwrap(), CertifiedInterval::point(int(5)));
        assert_eq!(v5.absolute_value(&q(0, 1), 30).unwrap(), CertifiedInterval::zero());
    }

    #[test]
    fn ramified_two_in_gaussian_field() {
        let k = Field::quadratic(-1).unwrap();
        let v = Place::finite(k, 2, 0).unwrap();
        assert_eq!(v.splitting(), Some(Splitting::Ramified));
        let x = FieldElement::new(int(1), int(1), k).unwrap();
        assert_eq!(v.ord(&x).unwrap(), Some(1));
        let val = v.absolute_value(&x, 40).unwrap();
        let half_sq = rat(1, 2);
        assert!((&val * &val).contains(&half_sq));
        assert!(val.width_within(38));
    }

    #[test]
    fn split_valuations_distinguish_conjugates() {
        let k = Field::quadratic(-1).unwrap();
        let x = FieldElement::new(int(2), int(1), k).unwrap(); // N = 5
        let places = Place::above(k, &BigUint::from(5u32)).unwrap();
        let ords: Vec<_> = places.iter().map(|v| v.ord(&x).unwrap().unwrap()).collect();
        assert_eq!(ords.iter().sum::<i64>(), 1);
        let ords_conj: Vec<_> = places.iter().map(|v| v.ord(&x.conjugate()).unwrap().unwrap()).collect();
        assert_eq!(ords_conj, vec![ords[1], ords[0]]);
        let five = FieldElement::from_int(25).in_field(k).unwrap();
        assert!(places.iter().all(|v| v.ord(&five).unwrap() == Some(2)));
    }

    #[test]
    fn product_formula_examples() {
        let r = check_product_formula(&q(-6, 5), 40).unwrap();
        assert!(r.exact && r.holds);
        assert_eq!(r.factors.len(), 4);
        assert_eq!(r.product, CertifiedInterval::one());
        let one = check_product_formula(&q(1, 1), 40).unwrap();
        assert_eq!(one.product, CertifiedInterval::one());
        assert_eq!(one.factors.len(), 1);
        let k = Field::quadratic(-1).unwrap();
        let three = FieldElement::from_int(3).in_field(k).unwrap();
        let r = check_product_formula(&three, 40).unwrap();
        assert!(r.exact && r.holds);
        assert_eq!(r.factors[0].value, CertifiedInterval::point(int(3)));
        assert_eq!(r.factors[1].value, CertifiedInterval::point(rat(1, 3)));
        assert!(check_product_formula(&q(0, 1), 40).is_err());
    }

    #[test]
    fn field_mismatch_is_rejected() {
        let v = Place::finite(Field::Rationals, 3, 0).unwrap();
        let x = FieldElement::generator(Field::quadratic(2).unwrap()).unwrap();
        assert!(v.absolute_value(&x, 20).is_err());
        assert!(Place::finite(Field::Rationals, 4, 0).is_err());
    }
}
