#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Divides out even powers of `p`; returns the p-adic unit-or-p representative.
fn strip_square(mut a: i64, p: i64) -> i64 {
    while a % (p * p) == 0 {
        a /= p * p;
    }
    a
}

fn vp(mut a: i64, p: i64) -> u32 {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}

/// `(a, b)_p` by searching a primitive zero of `a x² + b y² − z²` modulo
/// `p^K`, with `K = 2·max v_p(2c) + 1` so any such zero lifts by Hensel.
pub fn hilbert_oracle(a: i64, b: i64, p: i64) -> i8 {
    assert!(a != 0 && b != 0);
    let (a, b) = (strip_square(a, p), strip_square(b, p));
    let e = [a, b, -1].iter().map(|c| vp(2 * c, p)).max().unwrap();
    let k = 2 * e + 1;
    let m = p.pow(k);
    let squares: HashSet<i64> = (0..m).map(|z| z * z % m).collect();
    let unit_squares: HashSet<i64> = (0..m).filter(|z| z % p != 0).map(|z| z * z % m).collect();
    let r = |v: i64| v.rem_euclid(m);
    // x a unit, scaled to 1
    for y in 0..m {
        if squares.contains(&r(a + b * y * y)) {
            return 1;
        }
    }
    // p | x, y a unit scaled to 1
    for x in (0..m).step_by(p as usize) {
        if squares.contains(&r(a * x * x + b)) {
            return 1;
        }
    }
    // p | x, p | y, z a unit
    for x in (0..m).step_by(p as usize) {
        for y in (0..m).step_by(p as usize) {
            if unit_squares.contains(&r(a * x * x + b * y * y)) {
                return 1;
            }
        }
    }
    -1
}

/// `(a, b)_∞`.
pub fn hilbert_real(a: i64, b: i64) -> i8 {
    if a < 0 && b < 0 {
        -1
    } else {
        1
    }
}

pub fn prime_factors(mut n: i64) -> Vec<i64> {
    n = n.abs();
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Hasse invariant `∏_{i<j} (a_i, a_j)_p` of an integer diagonal form, from the oracle.
pub fn hasse_lt_oracle(diag: &[i64], p: Option<i64>) -> i8 {
    let mut s = 1;
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            s *= match p {
                Some(p) => hilbert_oracle(diag[i], diag[j], p),
                None => hilbert_real(diag[i], diag[j]),
            };
        }
    }
    s
}

/// Real roots of a monic integer cubic by rational bisection, each to width `2^-bits`.
pub fn cubic_roots(c: [i64; 3], bits: u32) -> Vec<(Q, Q)> {
    let f = |x: &Q| x * x * x + q(c[0]) * x * x + q(c[1]) * x + q(c[2]);
    let bound = q(1 + c.iter().map(|v| v.abs()).max().unwrap());
    let eps = Q::new(BigInt::one(), BigInt::one() << bits);
    // grid fine enough to separate the roots of the cubics used in tests
    let steps = 4096;
    let h = (&bound * q(2)) / q(steps);
    let mut out = vec![];
    let mut lo = -bound.clone();
    for _ in 0..steps {
        let hi = &lo + &h;
        let (fl, fh) = (f(&lo), f(&hi));
        if fl.is_zero() {
            out.push((lo.clone(), lo.clone()));
        } else if fl.signum() != fh.signum() && !fh.is_zero() {
            let (mut a, mut b) = (lo.clone(), hi.clone());
            while &b - &a > eps {
                let m = (&a + &b) / q(2);
                if f(&m).signum() == f(&a).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push((a, b));
        }
        lo = hi;
    }
    out.sort_by(|x, y| y.0.cmp(&x.0));
    out
}
