//! Test-only oracles shared by several integration targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dml_core::arith::rational::{int, Rational};
use dml_core::heights::ProjectivePoint;
use dml_core::index::MultihomogPolynomial;
use dml_core::{Field, FieldElement};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Poly = BTreeMap<Vec<u32>, Rational>;

pub fn binom(n: u32, k: u32) -> Rational {
    let mut c = Rational::one();
    for i in 0..k {
        c = c * int((n - i) as i64) / int((i + 1) as i64);
    }
    c
}

/// Coefficient of `t^k` in `(s p1 + t w1)^i (s p2 + t w2)^(r-i)`, with `s = 1`.
pub fn shifted_block(i: u32, r: u32, p: &[Rational; 2], w: &[Rational; 2], k: u32) -> Rational {
    let mut acc = Rational::zero();
    for a in 0..=i.min(k) {
        let b = k - a;
        if b > r - i {
            continue;
        }
        acc += binom(i, a)
            * p[0].pow((i - a) as i32)
            * w[0].pow(a as i32)
            * binom(r - i, b)
            * p[1].pow((r - i - b) as i32)
            * w[1].pow(b as i32);
    }
    acc
}

/// Weighted Taylor oracle: expand `P(s_h p_h + t_h w_h)` and take the least
/// weighted `t`-degree that survives.
pub fn oracle_index(poly: &Poly, r: &[u32], pts: &[[Rational; 2]], ws: &[[Rational; 2]]) -> Rational {
    let mut tuples: Vec<Vec<u32>> = vec![vec![]];
    for &d in r {
        tuples = tuples
            .into_iter()
            .flat_map(|t| (0..=d).map(move |k| {
                let mut t = t.clone();
                t.push(k);
                t
            }))
            .collect();
    }
    let mut best: Option<Rational> = None;
    for ks in tuples {
        let mut c = Rational::zero();
        for (is, coef) in poly {
            let mut term = coef.clone();
            for h in 0..r.len() {
                term *= shifted_block(is[h], r[h], &pts[h], &ws[h], ks[h]);
            }
            c += term;
        }
        if !c.is_zero() {
            let w: Rational = ks.iter().zip(r).map(|(&k, &d)| Rational::new(k.into(), d.into())).sum();
            if best.as_ref().is_none_or(|b| &w < b) {
                best = Some(w);
            }
        }
    }
    best.expect("nonzero polynomial")
}


/// `H^2` over `Q` straight from the definition: Euclidean norm squared times
/// `max_i |a_i|_p^2` at every prime, without normalizing the vector first.
pub fn height_sq_oracle(xs: &[Rational]) -> Rational {
    let mut h2: Rational = xs.iter().map(|x| x * x).sum();
    let mut primes: Vec<u64> = Vec::new();
    for x in xs.iter().filter(|x| !x.is_zero()) {
        for n in [x.numer().abs(), x.denom().clone()] {
            let mut n: u64 = n.try_into().unwrap();
            let mut p = 2;
            while n > 1 {
                if n.is_multiple_of(p) {
                    primes.push(p);
                    while n.is_multiple_of(p) {
                        n /= p;
                    }
                }
                p += 1;
            }
        }
    }
    primes.sort();
    primes.dedup();
    for p in primes {
        let v = |x: &Rational| -> i64 {
            let val = |mut n: num_bigint::BigInt| {
                let mut k = 0;
                while (&n % p).is_zero() {
                    n /= p;
                    k += 1;
                }
                k
            };
            val(x.numer().abs()) - val(x.denom().clone())
        };
        let min = xs.iter().filter(|x| !x.is_zero()).map(v).min().unwrap();
        // max |a|_p = p^{-min v}, squared
        h2 *= Rational::from_integer(p.into()).pow(-2 * min as i32);
    }
    h2
}

/// Multiplies by `p2 x_h1 - p1 x_h2`.
pub fn times_vanishing_form(poly: &Poly, r: &mut [u32], h: usize, p: [i64; 2]) -> Poly {
    let mut out = Poly::new();
    for (k, c) in poly {
        let mut up = k.clone();
        up[h] += 1;
        *out.entry(up).or_insert_with(Rational::zero) += c * int(p[1]);
        *out.entry(k.clone()).or_insert_with(Rational::zero) += c * int(-p[0]);
    }
    r[h] += 1;
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn random_poly(rng: &mut ChaCha8Rng, r: &[u32]) -> Poly {
    let mut poly = Poly::new();
    let mut keys: Vec<Vec<u32>> = vec![vec![]];
    for &d in r {
        keys = keys
            .into_iter()
            .flat_map(|t| (0..=d).map(move |k| {
                let mut t = t.clone();
                t.push(k);
                t
            }))
            .collect();
    }
    for k in keys {
        let c = rng.gen_range(-2..=2);
        if c != 0 {
            poly.insert(k, int(c));
        }
    }
    poly
}

pub fn random_point(rng: &mut ChaCha8Rng) -> [i64; 2] {
    loop {
        let p = [rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
        if p != [0, 0] {
            return p;
        }
    }
}

pub fn random_complement(rng: &mut ChaCha8Rng, p: [i64; 2]) -> [i64; 2] {
    loop {
        let w = random_point(rng);
        if p[0] * w[1] - p[1] * w[0] != 0 {
            return w;
        }
    }
}

pub fn to_library(poly: &Poly, r: &[u32]) -> MultihomogPolynomial {
    let map = poly.iter().map(|(k, c)| (k.clone(), FieldElement::rational(c.clone()))).collect();
    MultihomogPolynomial::from_map(r.to_vec(), Field::Rationals, map).unwrap()
}

pub struct Case {
    pub poly: Poly,
    pub r: Vec<u32>,
    pub pts: Vec<[i64; 2]>,
}

pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    loop {
        let m = rng.gen_range(1..=3);
        let pts: Vec<[i64; 2]> = (0..m).map(|_| random_point(rng)).collect();
        let forced: Vec<u32> = (0..m).map(|_| if rng.gen_bool(0.6) { rng.gen_range(0..=2) } else { 0 }).collect();
        let mut r: Vec<u32> = forced.iter().map(|&f| rng.gen_range(1..=(3 - f).max(1))).collect();
        if r.iter().zip(&forced).any(|(a, b)| a + b > 3) {
            continue;
        }
        let mut poly = random_poly(rng, &r);
        if poly.is_empty() {
            continue;
        }
        for h in 0..m {
            for _ in 0..forced[h] {
                poly = times_vanishing_form(&poly, &mut r, h, pts[h]);
            }
        }
        return Case { poly, r, pts };
    }
}

pub fn points(pts: &[[i64; 2]]) -> Vec<ProjectivePoint> {
    pts.iter().map(|p| ProjectivePoint::from_ints(p).unwrap()).collect()
}

