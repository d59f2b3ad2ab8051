//! Integer factorization for the moderate sizes that appear in norms and
//! contents: trial division, Miller-Rabin, then Brent's variant of Pollard
//! rho.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

const TRIAL_LIMIT: u32 = 10_000;
const WITNESSES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Prime factorization `n = prod p^e`, primes ascending. `factorize(1)` is
/// empty. Panics on zero.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factorize(0)");
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut m = n.clone();
    let push = |p: BigUint, out: &mut Vec<(BigUint, u32)>| {
        if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    let mut d = 2u32;
    while d <= TRIAL_LIMIT {
        let db = BigUint::from(d);
        if &db * &db > m {
            break;
        }
        while (&m % &db).is_zero() {
            m /= &db;
            push(db.clone(), &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            if x.is_one() {
                continue;
            }
            if is_probable_prime(&x) {
                push(x, &mut out);
                continue;
            }
            let f = pollard_brent(&x);
            let g = &x / &f;
            stack.push(f);
            stack.push(g);
        }
    }
    out.sort();
    out
}

pub fn prime_divisors(n: &BigUint) -> Vec<BigUint> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &w in WITNESSES.iter() {
        let wb = BigUint::from(w);
        if *n == wb {
            return true;
        }
        if (n % &wb).is_zero() {
            return false;
        }
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &w in WITNESSES.iter() {
        let mut x = BigUint::from(w).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    if let Some(r) = perfect_square_root(n) {
        return r;
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let m = 128u64;
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn perfect_square_root(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}
