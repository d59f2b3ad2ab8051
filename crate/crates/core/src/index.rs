//! Multihomogeneous polynomials in `m` blocks of two variables and their
//! index at a tuple of projective points.
//!
//! In block `h` a monomial is `x_{h1}^i x_{h2}^(r_h - i)`; terms are keyed by
//! the tuple of first exponents `(i_1, ..., i_m)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::rational::{self, Rational};
use crate::heights::{height_vector, log_height_vector, BinaryLinearForm, ProjectivePoint};
use crate::{CertifiedInterval, Error, Field, FieldElement, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultihomogPolynomial {
    r: Vec<u32>,
    field: Field,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl MultihomogPolynomial {
    /// Terms are `(block exponent pairs, coefficient)`; each pair must sum
    /// to `r_h`. Repeated monomials are added; zero coefficients dropped.
    pub fn new(r: Vec<u32>, terms: Vec<(Vec<(u32, u32)>, FieldElement)>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Domain("at least one block is required".into()));
        }
        if r.contains(&0) {
            return Err(Error::Domain("multidegree entries must be positive".into()));
        }
        let mut map: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        let mut field = Field::Rationals;
        for (exps, c) in terms {
            if exps.len() != r.len() {
                return Err(Error::Domain(format!(
                    "monomial has {} blocks, expected {}",
                    exps.len(),
                    r.len()
                )));
            }
            for (h, &(i, j)) in exps.iter().enumerate() {
                if i + j != r[h] {
                    return Err(Error::Domain(format!(
                        "block {} exponents ({i}, {j}) do not sum to r = {}",
                        h + 1,
                        r[h]
                    )));
                }
            }
            field = field.join(c.field())?;
            let key: Vec<u32> = exps.iter().map(|&(i, _)| i).collect();
            let entry = map.entry(key).or_insert_with(|| FieldElement::zero_in(c.field()));
            *entry = entry.try_add(&c)?;
        }
        Self::from_map(r, field, map)
    }

    /// Terms keyed by first-variable exponents.
    pub fn from_map(r: Vec<u32>, field: Field, map: BTreeMap<Vec<u32>, FieldElement>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (k, c) in map {
            if k.len() != r.len() || k.iter().zip(&r).any(|(i, d)| i > d) {
                return Err(Error::Domain("exponent tuple outside the multidegree".into()));
            }
            if !c.is_zero() {
                terms.insert(k, c.in_field(field)?);
            }
        }
        Ok(MultihomogPolynomial { r, field, terms })
    }

    pub fn zero(r: Vec<u32>) -> Self {
        MultihomogPolynomial { r, field: Field::Rationals, terms: BTreeMap::new() }
    }

    pub fn m(&self) -> usize {
        self.r.len()
    }

    pub fn multidegree(&self) -> &[u32] {
        &self.r
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FieldElement)> {
        self.terms.iter()
    }

    pub fn coefficients(&self) -> Vec<FieldElement> {
        self.terms.values().cloned().collect()
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Self> {
        let field = self.field.join(c.field())?;
        let map = self.terms.iter().map(|(k, v)| Ok((k.clone(), v.try_mul(c)?))).collect::<Result<_>>()?;
        Self::from_map(self.r.clone(), field, map)
    }

    /// `P(x_1, ..., x_m)` for concrete block values.
    pub fn evaluate(&self, x: &[ProjectivePoint]) -> Result<FieldElement> {
        self.check_points(x)?;
        let field = x.iter().try_fold(self.field, |f, p| f.join(p.field()))?;
        let mut powers = Vec::with_capacity(self.m());
        for (h, p) in x.iter().enumerate() {
            let a = p.coords()[0].in_field(field)?;
            let b = p.coords()[1].in_field(field)?;
            let d = self.r[h] as i64;
            let pa: Vec<FieldElement> = (0..=d).map(|e| a.pow(e)).collect::<Result<_>>()?;
            let pb: Vec<FieldElement> = (0..=d).map(|e| b.pow(e)).collect::<Result<_>>()?;
            powers.push((pa, pb));
        }
        let mut acc = FieldElement::zero_in(field);
        for (k, c) in &self.terms {
            let mut t = c.in_field(field)?;
            for (h, &i) in k.iter().enumerate() {
                let (pa, pb) = &powers[h];
                t = &(&t * &pa[i as usize]) * &pb[(self.r[h] - i) as usize];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn check_points(&self, x: &[ProjectivePoint]) -> Result<()> {
        if x.len() != self.m() {
            return Err(Error::Domain(format!("expected {} points, got {}", self.m(), x.len())));
        }
        if x.iter().any(|p| p.dim() != 2) {
            return Err(Error::Domain("block points must lie in P^1".into()));
        }
        Ok(())
    }

    /// `H(P)`, the height of the coefficient sequence.
    pub fn height(&self, bits: u32) -> Result<CertifiedInterval> {
        height_vector(&self.nonzero_coefficients()?, bits)
    }

    pub fn log_height(&self, bits: u32) -> Result<CertifiedInterval> {
        log_height_vector(&self.nonzero_coefficients()?, bits)
    }

    fn nonzero_coefficients(&self) -> Result<Vec<FieldElement>> {
        if self.is_zero() {
            return Err(Error::Domain("height of the zero polynomial".into()));
        }
        Ok(self.coefficients())
    }

    /// Rewrites `P` in block variables `(y_{h1}, y_{h2})` where
    /// `x_h = A_h y_h`; `subs[h] = [[a11, a12], [a21, a22]]`.
    pub fn substitute(&self, subs: &[[[FieldElement; 2]; 2]]) -> Result<MultihomogPolynomial> {
        let field = subs.iter().flatten().flatten().try_fold(self.field, |f, c| f.join(c.field()))?;
        // per block and i: coefficients of (a11 y1 + a12 y2)^i (a21 y1 + a22 y2)^(r-i)
        let mut tables: Vec<Vec<Vec<FieldElement>>> = Vec::with_capacity(self.m());
        for (h, s) in subs.iter().enumerate() {
            let d = self.r[h] as usize;
            let row1 = [s[0][0].in_field(field)?, s[0][1].in_field(field)?];
            let row2 = [s[1][0].in_field(field)?, s[1][1].in_field(field)?];
            let p1 = binary_powers(&row1, d, field);
            let p2 = binary_powers(&row2, d, field);
            let mut table = Vec::with_capacity(d + 1);
            for i in 0..=d {
                table.push(mul_binary(&p1[i], &p2[d - i], field));
            }
            tables.push(table);
        }
        let mut current: BTreeMap<Vec<u32>, FieldElement> =
            self.terms.iter().map(|(k, v)| Ok((k.clone(), v.in_field(field)?))).collect::<Result<_>>()?;
        for (h, table) in tables.iter().enumerate() {
            let mut next: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
            for (k, c) in &current {
                for (j, t) in table[k[h] as usize].iter().enumerate() {
                    if t.is_zero() {
                        continue;
                    }
                    // t is the coefficient of y1^(d-j) y2^j
                    let mut key = k.clone();
                    key[h] = self.r[h] - j as u32;
                    let entry = next.entry(key).or_insert_with(|| FieldElement::zero_in(field));
                    *entry = &*entry + &(c * t);
                }
            }
            next.retain(|_, v| !v.is_zero());
            current = next;
        }
        Self::from_map(self.r.clone(), field, current)
    }
}

/// `(u y1 + w y2)^e` for `e = 0..=d`, coefficient lists indexed by the
/// exponent of `y2`.
fn binary_powers(row: &[FieldElement; 2], d: usize, field: Field) -> Vec<Vec<FieldElement>> {
    let mut out = vec![vec![FieldElement::one_in(field)]];
    for e in 1..=d {
        let prev = &out[e - 1];
        let mut next = vec![FieldElement::zero_in(field); e + 1];
        for (j, c) in prev.iter().enumerate() {
            next[j] = &next[j] + &(c * &row[0]);
            next[j + 1] = &next[j + 1] + &(c * &row[1]);
        }
        out.push(next);
    }
    out
}

fn mul_binary(a: &[FieldElement], b: &[FieldElement], field: Field) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::zero_in(field); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

impl fmt::Display for MultihomogPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (h, &i) in k.iter().enumerate() {
                let j = self.r[h] - i;
                for (var, e) in [(1, i), (2, j)] {
                    match e {
                        0 => {}
                        1 => write!(f, "*x{}{}", h + 1, var)?,
                        _ => write!(f, "*x{}{}^{}", h + 1, var, e)?,
                    }
                }
            }
        }
        Ok(())
    }
}

/// The weighted multiplicity `i_{x,r}(P)`, a rational in `[0, m]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexValue {
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", rational::format_rational(&self.value))
    }
}

/// The unique point where `c1 x1 + c2 x2` vanishes, `(c2, -c1)` in
/// canonical form.
pub fn vanishing_point(l: &BinaryLinearForm) -> ProjectivePoint {
    ProjectivePoint::new(vec![l.c2().clone(), -l.c1()]).expect("nonzero form").canonical()
}

/// Coordinate form `x1` or `x2` with the larger `|N(.)|` at `x`; ties go
/// to `x1`.
pub fn default_complement(x: &ProjectivePoint) -> BinaryLinearForm {
    let (p1, p2) = (&x.coords()[0], &x.coords()[1]);
    if p1.magnitude_key() >= p2.magnitude_key() {
        BinaryLinearForm::from_ints(1, 0).unwrap()
    } else {
        BinaryLinearForm::from_ints(0, 1).unwrap()
    }
}

pub fn index(p: &MultihomogPolynomial, x: &[ProjectivePoint]) -> Result<IndexValue> {
    let complements: Vec<BinaryLinearForm> = x.iter().map(default_complement).collect();
    index_with_complements(p, x, &complements)
}

/// Index computed in the basis `(M_h, N_h)` with `M_h = p2 x1 - p1 x2`
/// and a caller-chosen `N_h` that does not vanish at `x_h`.
pub fn index_with_complements(
    p: &MultihomogPolynomial,
    x: &[ProjectivePoint],
    complements: &[BinaryLinearForm],
) -> Result<IndexValue> {
    if p.is_zero() {
        return Err(Error::Domain("index of the zero polynomial".into()));
    }
    p.check_points(x)?;
    if complements.len() != x.len() {
        return Err(Error::Domain("one complementary form per block is required".into()));
    }
    // x = A (M, N)^T with A the inverse of [[p2, -p1], [n1, n2]]
    let mut subs = Vec::with_capacity(x.len());
    for (pt, n) in x.iter().zip(complements) {
        let (p1, p2) = (&pt.coords()[0], &pt.coords()[1]);
        let (n1, n2) = (n.c1(), n.c2());
        let det = n.evaluate(p1, p2)?;
        if det.is_zero() {
            return Err(Error::Domain("complementary form vanishes at the point".into()));
        }
        let inv = det.inverse()?;
        subs.push([
            [n2.try_mul(&inv)?, p1.try_mul(&inv)?],
            [(-n1).try_mul(&inv)?, p2.try_mul(&inv)?],
        ]);
    }
    let q = p.substitute(&subs)?;
    let value = q
        .terms()
        .map(|(k, _)| {
            k.iter()
                .zip(p.multidegree())
                .map(|(&i, &d)| Rational::new(i.into(), d.into()))
                .fold(Rational::zero(), |a, b| a + b)
        })
        .min()
        .expect("nonzero polynomial");
    Ok(IndexValue { value })
}

pub fn index_wrt_forms(p: &MultihomogPolynomial, forms: &[BinaryLinearForm]) -> Result<IndexValue> {
    let x: Vec<ProjectivePoint> = forms.iter().map(vanishing_point).collect();
    index(p, &x)
}
