//! Exact solution scans for `a alpha^m + b beta^m + 1 = 0` and for value
//! multiplicities of binary and ternary linear recurrences.
//!
//! All coefficients and characteristic roots live in `Q` or in a single
//! quadratic field. Terms are computed exactly; only the completeness
//! certificate uses interval arithmetic.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::factor::factorize;
use crate::arith::interval::CertifiedInterval;
use crate::arith::quadratic::{Field, FieldElement};
use crate::arith::rational::{self, int, Rational};
use crate::error::{Error, Result};
use crate::SOLUTION_COUNT_BOUND_EXPONENT;

const ROOT_OF_UNITY_ORDERS: [i64; 5] = [1, 2, 3, 4, 6];
const CERTIFICATE_CEILING_BITS: u32 = 1024;
const SCAN_CHUNK: i64 = 64;

pub const UNIT_EQUATION_BOUND_LINE: &str =
    "bound: a*alpha^m + b*beta^m + 1 = 0 has at most 2^57 integer solutions m";
pub const BINARY_BOUND_LINE: &str =
    "bound: a non-degenerate binary recurrence takes each value c at most 2^57 times";
pub const TERNARY_BOUND_LINE: &str =
    "bound: a non-degenerate ternary recurrence has at most 2^57 zeros";
pub const TERNARY_FORM_NOTE: &str = "recurrence evaluated as v_{m+3} = mu2*v_{m+2} + mu1*v_{m+1} + mu0*v_m, \
matching the characteristic polynomial z^3 - mu2 z^2 - mu1 z - mu0; the printed form without the v_m factor is inconsistent with it";

/// Order of `x` as a root of unity. Degree two elements can only have
/// orders with `phi(n) <= 2`, so the candidates are 1, 2, 3, 4 and 6.
pub fn is_root_of_unity(x: &FieldElement) -> Result<Option<u32>> {
    if x.is_zero() {
        return Err(Error::Domain("root-of-unity test on zero".into()));
    }
    for n in ROOT_OF_UNITY_ORDERS {
        if x.pow(n)?.is_one() {
            return Ok(Some(n as u32));
        }
    }
    Ok(None)
}

fn count_le_bound(count: usize) -> bool {
    BigUint::from(count) <= BigUint::one() << SOLUTION_COUNT_BOUND_EXPONENT
}

fn join_all(xs: &[&FieldElement]) -> Result<Field> {
    xs.iter().try_fold(Field::Rationals, |f, x| f.join(x.field()))
}

fn lift(x: &FieldElement, field: Field) -> Result<FieldElement> {
    x.in_field(field)
}

/// Squarefree kernel of a nonzero rational, as a machine integer.
fn squarefree_part(x: &Rational) -> Result<i64> {
    let n = x.numer() * x.denom();
    let mut d = BigInt::one();
    for (p, e) in factorize(&rational::biguint(&n)) {
        if e % 2 == 1 {
            d *= BigInt::from(p);
        }
    }
    if n.is_negative() {
        d = -d;
    }
    d.to_i64()
        .ok_or_else(|| Error::Unsupported("squarefree part of the discriminant exceeds 64 bits".into()))
}

/// Roots of `z^2 - nu1 z - nu0`, in `Q` or a quadratic field.
pub fn quadratic_roots(nu1: &FieldElement, nu0: &FieldElement) -> Result<[FieldElement; 2]> {
    let field = join_all(&[nu1, nu0])?;
    let (nu1, nu0) = (lift(nu1, field)?, lift(nu0, field)?);
    let disc = &(&nu1 * &nu1) + &nu0.scale(&int(4));
    let half = rational::rat(1, 2);
    if let Some(s) = disc.sqrt_in_field() {
        return Ok([(&nu1 + &s).scale(&half), (&nu1 - &s).scale(&half)]);
    }
    let dr = match disc.as_rational() {
        Some(r) => r.clone(),
        None => {
            return Err(Error::Unsupported(
                "characteristic roots have degree 4 over Q".into(),
            ))
        }
    };
    if field != Field::Rationals {
        return Err(Error::Unsupported(
            "characteristic roots generate a second quadratic field".into(),
        ));
    }
    let d = squarefree_part(&dr)?;
    let ext = Field::quadratic(d)?;
    let k = rational::exact_root(&(&dr / int(d)), 2)
        .ok_or_else(|| Error::Domain("discriminant kernel mismatch".into()))?;
    let s = FieldElement::new(Rational::zero(), k, ext)?;
    let nu1 = lift(&nu1, ext)?;
    Ok([(&nu1 + &s).scale(&half), (&nu1 - &s).scale(&half)])
}

/// Terms `x_lo ..= x_hi` of `x_{n+k} = sum_j c[j] x_{n+j}` from
/// `x_0 .. x_{k-1}`. Backward steps divide by `c[0]`.
fn linear_terms(
    coeffs: &[FieldElement],
    initial: &[FieldElement],
    lo: i64,
    hi: i64,
) -> Result<Vec<FieldElement>> {
    let k = coeffs.len() as i64;
    let start = lo.min(0);
    let end = hi.max(k - 1);
    let mut fwd: Vec<FieldElement> = initial.to_vec();
    while (fwd.len() as i64) <= end {
        let n = fwd.len() - coeffs.len();
        let mut next = FieldElement::zero_in(coeffs[0].field());
        for (j, c) in coeffs.iter().enumerate() {
            next = &next + &(c * &fwd[n + j]);
        }
        fwd.push(next);
    }
    // back[i] holds x_{-1-i}
    let mut back: Vec<FieldElement> = Vec::new();
    let c0 = coeffs[0].inverse()?;
    let at = |n: i64, fwd: &[FieldElement], back: &[FieldElement]| -> FieldElement {
        if n >= 0 {
            fwd[n as usize].clone()
        } else {
            back[(-1 - n) as usize].clone()
        }
    };
    for n in (start..0).rev() {
        let mut acc = at(n + k, &fwd, &back);
        for (j, c) in coeffs.iter().enumerate().skip(1) {
            acc = &acc - &(c * &at(n + j as i64, &fwd, &back));
        }
        back.push(&acc * &c0);
    }
    Ok((lo..=hi).map(|n| at(n, &fwd, &back)).collect())
}

fn zeros_of(values: &[FieldElement], target: &FieldElement, lo: i64) -> Vec<i64> {
    values
        .par_iter()
        .enumerate()
        .filter(|(_, v)| *v == target)
        .map(|(i, _)| lo + i as i64)
        .collect()
}

fn check_range(lo: i64, hi: i64) -> Result<()> {
    if lo > hi {
        return Err(Error::Domain(format!("empty range {lo}:{hi}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// unit equation

#[derive(Debug, Clone, Serialize)]
pub struct UnitEquationProblem {
    a: FieldElement,
    b: FieldElement,
    alpha: FieldElement,
    beta: FieldElement,
}

impl UnitEquationProblem {
    pub fn new(a: FieldElement, b: FieldElement, alpha: FieldElement, beta: FieldElement) -> Result<Self> {
        let field = join_all(&[&a, &b, &alpha, &beta])?;
        if alpha.is_zero() || beta.is_zero() {
            return Err(Error::Domain("alpha and beta must be nonzero".into()));
        }
        let (a, b, alpha, beta) = (lift(&a, field)?, lift(&b, field)?, lift(&alpha, field)?, lift(&beta, field)?);
        if is_root_of_unity(&alpha)?.is_some() && is_root_of_unity(&beta)?.is_some() {
            return Err(Error::Hypothesis(
                "at least one of alpha, beta must not be a root of unity; both are".into(),
            ));
        }
        Ok(UnitEquationProblem { a, b, alpha, beta })
    }

    pub fn field(&self) -> Field {
        self.alpha.field()
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    /// `a alpha^m + b beta^m + 1`.
    pub fn evaluate(&self, m: i64) -> Result<FieldElement> {
        let one = FieldElement::one_in(self.field());
        Ok(&(&(&self.a * &self.alpha.pow(m)?) + &(&self.b * &self.beta.pow(m)?)) + &one)
    }
}

/// Which term dominates at an embedding, for `m` beyond the scan range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// `|a alpha^m| - |b beta^m| > 1`.
    AlphaTerm,
    /// `|b beta^m| - |a alpha^m| > 1`.
    BetaTerm,
    /// `|a alpha^m| + |b beta^m| < 1`.
    Decay,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceWitness {
    pub embedding: String,
    pub dominance: Dominance,
    pub bits: u32,
}

/// No solution with `|m| > M`: one witness for `m > M`, one for `m < -M`.
#[derive(Debug, Clone, Serialize)]
pub struct CompletenessCertificate {
    pub beyond: u64,
    pub positive: DominanceWitness,
    pub negative: DominanceWitness,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitEquationReport {
    pub range: [i64; 2],
    pub solutions: Vec<i64>,
    pub count: usize,
    pub certificate: Option<CompletenessCertificate>,
    pub bound_line: String,
    pub count_within_bound: bool,
}

#[derive(Debug, Clone, Copy)]
enum Embedding {
    Identity,
    Conjugate,
}

fn embeddings(field: Field) -> Vec<(Embedding, &'static str)> {
    match field {
        Field::Quadratic(d) if d > 0 => vec![
            (Embedding::Identity, "real(+sqrtd)"),
            (Embedding::Conjugate, "real(-sqrtd)"),
        ],
        Field::Quadratic(_) => vec![(Embedding::Identity, "complex")],
        Field::Rationals => vec![(Embedding::Identity, "inf")],
    }
}

fn modulus(x: &FieldElement, emb: Embedding, bits: u32) -> Result<CertifiedInterval> {
    match x.abs_squared_exact() {
        Some(sq) => match rational::exact_root(&sq, 2) {
            Some(r) => Ok(CertifiedInterval::point(r)),
            None => CertifiedInterval::point(sq).sqrt(bits),
        },
        None => Ok(x.real_embedding(matches!(emb, Embedding::Conjugate), bits)?.abs()),
    }
}

fn le(x: &CertifiedInterval, y: &CertifiedInterval) -> bool {
    x.hi() <= y.lo()
}

/// Certifies `|a| X^m` against `|b| Y^m` for every `m >= k`.
fn dominance(
    a: &CertifiedInterval,
    x: &CertifiedInterval,
    b: &CertifiedInterval,
    y: &CertifiedInterval,
    k: u64,
    bits: u32,
) -> Option<Dominance> {
    let one = CertifiedInterval::one();
    let xk = || x.powi_rounded(k, bits);
    let yk = || y.powi_rounded(k, bits);
    // X > 1 and Y <= X: X^m (|a| - |b| (Y/X)^m) is non-decreasing once positive
    if one.hi() < x.lo() && le(y, x) && a.lo().is_positive() {
        let diff = &(a * &xk()) - &(b * &yk());
        if diff.lo() > one.hi() {
            return Some(Dominance::AlphaTerm);
        }
    }
    if one.hi() < y.lo() && le(x, y) && b.lo().is_positive() {
        let diff = &(b * &yk()) - &(a * &xk());
        if diff.lo() > one.hi() {
            return Some(Dominance::BetaTerm);
        }
    }
    if le(x, &one) && le(y, &one) {
        let sum = &(a * &xk()) + &(b * &yk());
        if sum.hi() < one.lo() {
            return Some(Dominance::Decay);
        }
    }
    None
}

fn witness(p: &UnitEquationProblem, k: u64, inverse: bool, bits: u32) -> Result<Option<DominanceWitness>> {
    let (alpha, beta) = if inverse {
        (p.alpha.inverse()?, p.beta.inverse()?)
    } else {
        (p.alpha.clone(), p.beta.clone())
    };
    for (emb, label) in embeddings(p.field()) {
        let a = modulus(&p.a, emb, bits)?;
        let b = modulus(&p.b, emb, bits)?;
        let x = modulus(&alpha, emb, bits)?;
        let y = modulus(&beta, emb, bits)?;
        if let Some(d) = dominance(&a, &x, &b, &y, k, bits) {
            return Ok(Some(DominanceWitness { embedding: label.to_string(), dominance: d, bits }));
        }
    }
    Ok(None)
}

fn witness_escalating(p: &UnitEquationProblem, k: u64, inverse: bool, bits: u32) -> Result<Option<DominanceWitness>> {
    let mut b = bits.max(32);
    loop {
        if let Some(w) = witness(p, k, inverse, b)? {
            return Ok(Some(w));
        }
        if b >= CERTIFICATE_CEILING_BITS {
            return Ok(None);
        }
        b = (b * 2).min(CERTIFICATE_CEILING_BITS);
    }
}

/// Exact scan of `[-M, M]` plus a dominance certificate when one exists.
pub fn solve_unit_equation(p: &UnitEquationProblem, m_max: u64, bits: u32) -> Result<UnitEquationReport> {
    if m_max == 0 {
        return Err(Error::Domain("M must be at least 1".into()));
    }
    let m = i64::try_from(m_max).map_err(|_| Error::Domain("M too large".into()))?;
    let chunks: Vec<(i64, i64)> = (0..)
        .map(|i| -m + i * SCAN_CHUNK)
        .take_while(|s| *s <= m)
        .map(|s| (s, (s + SCAN_CHUNK - 1).min(m)))
        .collect();
    let per_chunk: Vec<Result<Vec<i64>>> = chunks
        .par_iter()
        .map(|&(s, e)| {
            let (mut pa, mut pb) = (p.alpha.pow(s)?, p.beta.pow(s)?);
            let one = FieldElement::one_in(p.field());
            let mut out = Vec::new();
            for n in s..=e {
                let v = &(&(&p.a * &pa) + &(&p.b * &pb)) + &one;
                if v.is_zero() {
                    out.push(n);
                }
                pa = &pa * &p.alpha;
                pb = &pb * &p.beta;
            }
            Ok(out)
        })
        .collect();
    let mut solutions = Vec::new();
    for c in per_chunk {
        solutions.extend(c?);
    }
    let k = m_max + 1;
    let certificate = match (
        witness_escalating(p, k, false, bits)?,
        witness_escalating(p, k, true, bits)?,
    ) {
        (Some(positive), Some(negative)) => Some(CompletenessCertificate { beyond: m_max, positive, negative }),
        _ => None,
    };
    let count = solutions.len();
    Ok(UnitEquationReport {
        range: [-m, m],
        solutions,
        count,
        certificate,
        bound_line: UNIT_EQUATION_BOUND_LINE.to_string(),
        count_within_bound: count_le_bound(count),
    })
}

// ---------------------------------------------------------------------------
// binary recurrences

/// `u_{n+2} = nu1 u_{n+1} + nu0 u_n`.
#[derive(Debug, Clone, Serialize)]
pub struct BinaryRecurrence {
    nu1: FieldElement,
    nu0: FieldElement,
    u0: FieldElement,
    u1: FieldElement,
    roots: [FieldElement; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityReport {
    pub value: FieldElement,
    pub range: [i64; 2],
    pub solutions: Vec<i64>,
    pub count: usize,
    pub bound_line: String,
    pub count_within_bound: bool,
    pub notes: Vec<String>,
}

impl BinaryRecurrence {
    pub fn new(nu1: FieldElement, nu0: FieldElement, u0: FieldElement, u1: FieldElement) -> Result<Self> {
        if nu0.is_zero() {
            return Err(Error::Domain("nu0 must be nonzero".into()));
        }
        let field = join_all(&[&nu1, &nu0, &u0, &u1])?;
        let (nu1, nu0, u0, u1) = (lift(&nu1, field)?, lift(&nu0, field)?, lift(&u0, field)?, lift(&u1, field)?);
        let roots = quadratic_roots(&nu1, &nu0)?;
        let [r1, r2] = &roots;
        if r1 == r2 {
            if is_root_of_unity(r1)?.is_some() {
                return Err(Error::Hypothesis("the double characteristic root is a root of unity".into()));
            }
        } else {
            if is_root_of_unity(r1)?.is_some() && is_root_of_unity(r2)?.is_some() {
                return Err(Error::Hypothesis("both characteristic roots are roots of unity".into()));
            }
            if is_root_of_unity(&r1.div(r2)?)?.is_some() {
                return Err(Error::Hypothesis("the ratio of the characteristic roots is a root of unity".into()));
            }
        }
        Ok(BinaryRecurrence { nu1, nu0, u0, u1, roots })
    }

    pub fn from_ints(nu1: i64, nu0: i64, u0: i64, u1: i64) -> Result<Self> {
        Self::new(nu1.into(), nu0.into(), u0.into(), u1.into())
    }

    pub fn field(&self) -> Field {
        self.nu1.field()
    }

    pub fn roots(&self) -> &[FieldElement; 2] {
        &self.roots
    }

    pub fn initial(&self) -> [&FieldElement; 2] {
        [&self.u0, &self.u1]
    }

    /// `u_lo ..= u_hi`.
    pub fn terms(&self, lo: i64, hi: i64) -> Result<Vec<FieldElement>> {
        check_range(lo, hi)?;
        linear_terms(&[self.nu0.clone(), self.nu1.clone()], &[self.u0.clone(), self.u1.clone()], lo, hi)
    }

    pub fn term(&self, n: i64) -> Result<FieldElement> {
        Ok(self.terms(n, n)?.remove(0))
    }

    /// `(a, b)` with `u_n = a alpha1^n + b alpha2^n`, for distinct roots.
    pub fn closed_form(&self) -> Result<Option<[FieldElement; 2]>> {
        let [r1, r2] = &self.roots;
        if r1 == r2 {
            return Ok(None);
        }
        let f = r1.field();
        let (u0, u1) = (lift(&self.u0, f)?, lift(&self.u1, f)?);
        let b = (&u1 - &(&u0 * r1)).div(&(r2 - r1))?;
        let a = &u0 - &b;
        Ok(Some([a, b]))
    }
}

/// Indices `m` in `[lo, hi]` with `u_m = c`.
pub fn multiplicity_count(r: &BinaryRecurrence, c: &FieldElement, lo: i64, hi: i64) -> Result<MultiplicityReport> {
    let values = r.terms(lo, hi)?;
    let solutions = zeros_of(&values, c, lo);
    let count = solutions.len();
    Ok(MultiplicityReport {
        value: c.clone(),
        range: [lo, hi],
        solutions,
        count,
        bound_line: BINARY_BOUND_LINE.to_string(),
        count_within_bound: count_le_bound(count),
        notes: vec!["supremum over c is not computed; count is for the given c".into()],
    })
}

// ---------------------------------------------------------------------------
// ternary recurrences

/// `v_{m+3} = mu2 v_{m+2} + mu1 v_{m+1} + mu0 v_m`.
#[derive(Debug, Clone, Serialize)]
pub struct TernaryRecurrence {
    mu: [FieldElement; 3],
    v: [FieldElement; 3],
    roots: Vec<FieldElement>,
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for (p, e) in factorize(&rational::biguint(n)) {
        let p = BigInt::from(p);
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= &p;
            }
        }
        out = next;
    }
    out
}

/// A rational root of `z^3 - mu2 z^2 - mu1 z - mu0`, if any.
fn rational_cubic_root(mu2: &Rational, mu1: &Rational, mu0: &Rational) -> Option<Rational> {
    let l = rational::lcm_denominators([mu2, mu1, mu0]);
    let lr = Rational::from_integer(l.clone());
    let c0 = (-mu0 * &lr).to_integer();
    let eval = |z: &Rational| z * z * z - mu2 * z * z - mu1 * z - mu0;
    for p in divisors(&c0) {
        for q in divisors(&l) {
            if !p.gcd(&q).is_one() {
                continue;
            }
            for s in [1, -1] {
                let z = Rational::new(&p * s, q.clone());
                if eval(&z).is_zero() {
                    return Some(z);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroCountReport {
    pub range: [i64; 2],
    pub solutions: Vec<i64>,
    pub count: usize,
    pub bound_line: String,
    pub count_within_bound: bool,
    pub notes: Vec<String>,
}

impl TernaryRecurrence {
    pub fn new(mu: [FieldElement; 3], v: [FieldElement; 3]) -> Result<Self> {
        let [mu2, mu1, mu0] = &mu;
        if mu0.is_zero() {
            return Err(Error::Domain("mu0 must be nonzero".into()));
        }
        if v.iter().all(FieldElement::is_zero) {
            return Err(Error::Hypothesis("|v0| + |v1| + |v2| ≠ 0 is required; all initial values are zero".into()));
        }
        let (Some(m2), Some(m1), Some(m0)) = (mu2.as_rational(), mu1.as_rational(), mu0.as_rational()) else {
            return Err(Error::Unsupported("ternary coefficients must be rational".into()));
        };
        let field = join_all(&[&v[0], &v[1], &v[2]])?;
        let r = rational_cubic_root(m2, m1, m0).ok_or_else(|| {
            Error::Unsupported("characteristic cubic is irreducible over Q; roots of degree 3".into())
        })?;
        // z^3 - mu2 z^2 - mu1 z - mu0 = (z - r)(z^2 + p z + q)
        let p = &r - m2;
        let q = &r * &p - m1;
        let quad = quadratic_roots(&FieldElement::rational(-p), &FieldElement::rational(-q))?;
        let rf = quad[0].field();
        let mut roots = vec![FieldElement::rational(r).in_field(rf)?, quad[0].clone(), quad[1].clone()];
        roots.sort();
        let distinct = roots[0] != roots[1] && roots[1] != roots[2] && roots[0] != roots[2];
        if distinct
            && is_root_of_unity(&roots[0].div(&roots[2])?)?.is_some()
            && is_root_of_unity(&roots[1].div(&roots[2])?)?.is_some()
        {
            return Err(Error::Hypothesis("all ratios of characteristic roots are roots of unity".into()));
        }
        let lifted = [lift(&v[0], field)?, lift(&v[1], field)?, lift(&v[2], field)?];
        let mu = [mu2.in_field(field)?, mu1.in_field(field)?, mu0.in_field(field)?];
        Ok(TernaryRecurrence { mu, v: lifted, roots })
    }

    pub fn from_ints(mu: [i64; 3], v: [i64; 3]) -> Result<Self> {
        Self::new(mu.map(FieldElement::from), v.map(FieldElement::from))
    }

    pub fn roots(&self) -> &[FieldElement] {
        &self.roots
    }

    pub fn terms(&self, lo: i64, hi: i64) -> Result<Vec<FieldElement>> {
        check_range(lo, hi)?;
        let [m2, m1, m0] = self.mu.clone();
        linear_terms(&[m0, m1, m2], &self.v, lo, hi)
    }
}

/// Indices `m` in `[lo, hi]` with `v_m = 0`.
pub fn ternary_zero_count(t: &TernaryRecurrence, lo: i64, hi: i64) -> Result<ZeroCountReport> {
    let values = t.terms(lo, hi)?;
    let zero = FieldElement::zero_in(values[0].field());
    let solutions = zeros_of(&values, &zero, lo);
    let count = solutions.len();
    Ok(ZeroCountReport {
        range: [lo, hi],
        solutions,
        count,
        bound_line: TERNARY_BOUND_LINE.to_string(),
        count_within_bound: count_le_bound(count),
        notes: vec![TERNARY_FORM_NOTE.to_string()],
    })
}
