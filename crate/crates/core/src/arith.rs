//! Exact integer and rational helpers shared by every module: primality,
//! trial-division factorization, squarefree parts, dense rational matrices
//! and the `"p/q"` string encoding used in every serialized artifact.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let t = s.trim();
    Q::from_str(t).map_err(|_| format!("not a rational number: {s:?}"))
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapter writing rationals as strings.
pub mod qstr {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Vec<Q>>` as nested string arrays.
pub mod qmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        rows.iter()
            .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `[Q; 3]`.
pub mod qtriple {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Q; 3], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(fmt_q).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Q; 3], D::Error> {
        let strs: Vec<String> = Vec::deserialize(d)?;
        if strs.len() != 3 {
            return Err(serde::de::Error::custom("expected three rational strings"));
        }
        let v: Vec<Q> = strs
            .iter()
            .map(|s| parse_q(s))
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok([v[0].clone(), v[1].clone(), v[2].clone()])
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization of |n| by trial division. `n` must be nonzero.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero(), "factor(0)");
    let mut m = n.abs();
    let mut out = Vec::new();
    if let Some(small) = m.to_u64() {
        let mut m = small;
        let mut d = 2u64;
        while d * d <= m {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            if e > 0 {
                out.push((BigInt::from(d), e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            out.push((BigInt::from(m), 1));
        }
        return out;
    }
    let mut d = BigInt::from(2u32);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
        d += 1u32;
    }
    if m > BigInt::one() {
        out.push((m, 1));
    }
    out
}

/// Squarefree integer in the square class of a nonzero rational, sign kept.
pub fn squarefree_class(x: &Q) -> BigInt {
    assert!(!x.is_zero(), "square class of zero");
    let prod = x.numer() * x.denom();
    let mut sf = BigInt::one();
    for (p, e) in factor(&prod) {
        if e % 2 == 1 {
            sf *= p;
        }
    }
    if prod.sign() == Sign::Minus {
        -sf
    } else {
        sf
    }
}

/// Writes a nonzero rational as `s * r^2` with `s` squarefree; returns `(s, r)`.
pub fn split_square(x: &Q) -> (BigInt, Q) {
    let s = squarefree_class(x);
    // x / s is a rational square
    let ratio = x / Q::from_integer(s.clone());
    let r = Q::new(isqrt_exact(ratio.numer()), isqrt_exact(ratio.denom()));
    (s, r)
}

fn isqrt_exact(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    debug_assert_eq!(&r * &r, *n, "not a perfect square");
    r
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    while (&m % &p).is_zero() {
        m /= &p;
        v += 1;
    }
    v
}

/// Legendre symbol (a / p) for odd prime p; 0 when p divides a.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let r = a.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    let e = (p - 1) / 2;
    if pow_mod(r, e, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mm = m as u128;
    let mut r = 1u128 % mm;
    let mut bb = (b as u128) % mm;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % mm;
        }
        bb = bb * bb % mm;
        e >>= 1;
    }
    r as u64
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Reduces a rational modulo a prime; `None` when p divides the denominator.
pub fn q_mod_p(x: &Q, p: u64) -> Option<u64> {
    let bp = BigInt::from(p);
    let d = x.denom().mod_floor(&bp).to_u64().unwrap();
    let n = x.numer().mod_floor(&bp).to_u64().unwrap();
    let di = inv_mod(d, p)?;
    Some(((n as u128 * di as u128) % p as u128) as u64)
}

/// Dense square rational matrix helpers. Row-major `Vec<Vec<Q>>`.
pub type QMatrix = Vec<Vec<Q>>;

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn zeros(r: usize, c: usize) -> QMatrix {
    vec![vec![Q::zero(); c]; r]
}

pub fn from_ints<const N: usize>(rows: [[i64; N]; N]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

pub fn mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &QMatrix) -> QMatrix {
    let r = a.len();
    let c = a.first().map_or(0, |x| x.len());
    (0..c).map(|j| (0..r).map(|i| a[i][j].clone()).collect()).collect()
}

pub fn is_symmetric(a: &QMatrix) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

pub fn block_diag(blocks: &[&QMatrix]) -> QMatrix {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut out = zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                out[off + i][off + j] = v.clone();
            }
        }
        off += b.len();
    }
    out
}

pub fn scale(a: &QMatrix, s: &Q) -> QMatrix {
    a.iter().map(|r| r.iter().map(|v| v * s).collect()).collect()
}

pub fn mat_add(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det(a: &QMatrix) -> Q {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        let p = m[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan; `None` if singular.
pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(piv, col);
        inv.swap(piv, col);
        let p = m[col][col].clone();
        for c in 0..n {
            m[col][c] = &m[col][c] / &p;
            inv[col][c] = &inv[col][c] / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
                let t = &f * &inv[col][c];
                inv[r][c] -= t;
            }
        }
    }
    Some(inv)
}

/// Rank over Q.
pub fn rank(a: &QMatrix) -> usize {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(piv, r);
        for i in r + 1..rows {
            if m[i][col].is_zero() {
                continue;
            }
            let f = &m[i][col] / &m[r][col];
            for c in col..cols {
                let t = &f * &m[r][c];
                m[i][c] -= t;
            }
        }
        r += 1;
    }
    r
}

/// Displays a matrix with rational entries, one row per line.
pub struct MatDisplay<'a>(pub &'a QMatrix);

impl fmt::Display for MatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.0 {
            let cells: Vec<String> = row.iter().map(fmt_q).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
