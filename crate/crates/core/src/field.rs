//! Totally real cubic fields generated by an eigenvalue of a symmetric integer
//! 3x3 matrix `A`.
//!
//! Elements are stored over the power basis `(I, A, A²)`. The field also carries
//! a basis `(b1, b2, b3)` with `b3 = I` in which the regular representation of
//! the generator is `A` itself, so every regular representation is symmetric.
//! Real embeddings are certified root intervals of the characteristic polynomial.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, fmt_q, q, QMatrix, Q};
use crate::interval::Interval;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("characteristic polynomial has the rational root {0}")]
    Reducible(i64),
    #[error("characteristic polynomial is not totally real (discriminant {0})")]
    NotTotallyReal(String),
    #[error("no basis with b3 = 1 reproduces the matrix as a regular representation")]
    NoBBasis,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("no element with the requested sign pattern at height {height}")]
    NotFoundAtHeight { height: i64 },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
}

/// Dense univariate polynomial over Q, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly(Vec<Q>);

impl Poly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect()).trim()
    }

    fn rem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        while let Some(rd) = Poly(r.clone()).degree() {
            if rd < dd {
                break;
            }
            let f = &r[rd] / &d.0[dd];
            for i in 0..=dd {
                let t = &f * &d.0[i];
                r[rd - dd + i] -= t;
            }
            r.truncate(rd);
        }
        Poly(r).trim()
    }
}

fn sign(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn sturm_chain(f: &Poly) -> Vec<Poly> {
    let mut chain = vec![f.clone(), f.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].degree().is_none_or(|d| d == 0) {
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.degree().is_none() {
            break;
        }
        chain.push(Poly(r.0.iter().map(|c| -c).collect()));
    }
    chain
}

fn variations(chain: &[Poly], x: &Q) -> usize {
    let signs: Vec<i8> = chain.iter().map(|p| sign(&p.eval(x))).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of `f` in `(lo, hi]`.
fn count_roots(chain: &[Poly], lo: &Q, hi: &Q) -> usize {
    variations(chain, lo) - variations(chain, hi)
}

struct FieldData {
    a: [[i64; 3]; 3],
    a_mat: QMatrix,
    a2_mat: QMatrix,
    /// Monic characteristic polynomial, lowest degree first, leading 1 included.
    charpoly: [BigInt; 4],
    roots: [Interval; 3],
    b_basis: [[Q; 3]; 3],
}

/// Handle to a totally real cubic field; clones share the same data.
#[derive(Clone)]
pub struct SymCubicField(Arc<FieldData>);

impl fmt::Debug for SymCubicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymCubicField").field("a", &self.0.a).finish()
    }
}

impl PartialEq for SymCubicField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.a == other.0.a
    }
}

impl Eq for SymCubicField {}

/// The matrix used throughout the reproduced computation.
pub const REFERENCE_MATRIX: [[i64; 3]; 3] = [[1, 1, 1], [1, 1, 0], [1, 0, 0]];

pub fn make_field(a: [[i64; 3]; 3]) -> Result<SymCubicField, FieldError> {
    for i in 0..3 {
        for j in 0..3 {
            if a[i][j] != a[j][i] {
                return Err(FieldError::NotSymmetric);
            }
        }
    }
    let am = arith::from_ints(a);
    let a2 = arith::mat_mul(&am, &am);
    // x^3 - tr x^2 + m x - det with m the sum of principal 2x2 minors
    let tr = a[0][0] + a[1][1] + a[2][2];
    let m = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = arith::det(&am).to_integer().to_i64().expect("small determinant");
    let c = [-det, m, -tr, 1i64];
    // rational roots of a monic integer cubic divide the constant term
    let c0 = c[0].abs();
    let divisors: Vec<i64> = if c0 == 0 { vec![0] } else { (1..=c0).filter(|d| c0 % d == 0).collect() };
    for &d in &divisors {
        for r in [d, -d] {
            if c[0] + c[1] * r + c[2] * r * r + r * r * r == 0 {
                return Err(FieldError::Reducible(r));
            }
        }
    }
    let (b, cc, d) = (BigInt::from(c[2]), BigInt::from(c[1]), BigInt::from(c[0]));
    let disc: BigInt = BigInt::from(18) * &b * &cc * &d - BigInt::from(4) * b.pow(3) * &d + b.pow(2) * cc.pow(2)
        - BigInt::from(4) * cc.pow(3)
        - BigInt::from(27) * d.pow(2);
    if !disc.is_positive() {
        return Err(FieldError::NotTotallyReal(disc.to_string()));
    }
    let poly = Poly(c.iter().map(|&v| q(v)).collect());
    let roots = isolate_roots(&poly).map(|iv| refine_root(&poly, &iv, CACHED_BITS));
    let b_basis = solve_b_basis(&am, &c).ok_or(FieldError::NoBBasis)?;
    Ok(SymCubicField(Arc::new(FieldData {
        a,
        a_mat: am,
        a2_mat: a2,
        charpoly: c.map(BigInt::from),
        roots,
        b_basis,
    })))
}

const CACHED_BITS: u32 = 200;

/// Disjoint isolating intervals of the three real roots, largest root first.
fn isolate_roots(f: &Poly) -> [Interval; 3] {
    let chain = sturm_chain(f);
    let bound = f.0.iter().map(|c| c.abs()).fold(Q::zero(), |a, b| if a > b { a } else { b }) + Q::one();
    let mut found = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        match count_roots(&chain, &lo, &hi) {
            0 => {}
            1 => found.push(Interval::new(lo, hi)),
            _ => {
                let mid = (&lo + &hi) / q(2);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    found.sort_by(|x, y| y.lo.cmp(&x.lo));
    assert_eq!(found.len(), 3, "totally real cubic must have three roots");
    let mut it = found.into_iter();
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

/// Bisects an isolating interval of a simple root until its width is below 2^-bits.
fn refine_root(f: &Poly, iv: &Interval, bits: u32) -> Interval {
    let target = Q::new(BigInt::one(), BigInt::one() << bits);
    let (mut lo, mut hi) = (iv.lo.clone(), iv.hi.clone());
    let mut slo = sign(&f.eval(&lo));
    if slo == 0 {
        return Interval::point(lo);
    }
    while &hi - &lo > target {
        let mid = (&lo + &hi) / q(2);
        let s = sign(&f.eval(&mid));
        if s == 0 {
            return Interval::point(mid);
        }
        if s == slo {
            lo = mid;
            slo = s;
        } else {
            hi = mid;
        }
    }
    Interval::new(lo, hi)
}

/// Coordinates (I, A, A²) of `alpha * x`.
fn mul_alpha(x: &[Q; 3], c: &[i64; 4]) -> [Q; 3] {
    // alpha^3 = -c0 - c1 alpha - c2 alpha^2
    let top = x[2].clone();
    [
        -&top * q(c[0]),
        &x[0] - &top * q(c[1]),
        &x[1] - &top * q(c[2]),
    ]
}

/// Solves `alpha * b_i = sum_j A[j][i] b_j` for `b1, b2` with `b3 = 1`.
fn solve_b_basis(a: &QMatrix, c: &[i64; 4]) -> Option<[[Q; 3]; 3]> {
    // unknown vector u = (b1 coords, b2 coords); b3 = (1, 0, 0)
    let unit = |k: usize| -> [Q; 3] {
        let mut v = [Q::zero(), Q::zero(), Q::zero()];
        v[k] = Q::one();
        v
    };
    let b3 = unit(0);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for i in 0..3 {
        // equation: alpha b_i - sum_j A[j][i] b_j = 0, three coordinate rows
        let mut coeff = vec![vec![Q::zero(); 7]; 3];
        for (j, slot) in [(0usize, Some(0usize)), (1, Some(1)), (2, None)] {
            let aji = &a[j][i];
            match slot {
                Some(s) => {
                    for k in 0..3 {
                        // contribution of unknown coordinate k of b_j
                        let e = unit(k);
                        let mut v = [Q::zero(), Q::zero(), Q::zero()];
                        if i == j {
                            v = mul_alpha(&e, c);
                        }
                        for r in 0..3 {
                            coeff[r][3 * s + k] += &v[r] - aji * &e[r];
                        }
                    }
                }
                None => {
                    let mut v = [Q::zero(), Q::zero(), Q::zero()];
                    if i == j {
                        v = mul_alpha(&b3, c);
                    }
                    for r in 0..3 {
                        // constant term moves to the right-hand side
                        coeff[r][6] -= &v[r] - aji * &b3[r];
                    }
                }
            }
        }
        rows.extend(coeff);
    }
    let sol = solve_linear(rows, 6)?;
    let b1 = [sol[0].clone(), sol[1].clone(), sol[2].clone()];
    let b2 = [sol[3].clone(), sol[4].clone(), sol[5].clone()];
    let m = vec![b1.to_vec(), b2.to_vec(), b3.to_vec()];
    if arith::det(&m).is_zero() {
        return None;
    }
    Some([b1, b2, b3])
}

/// Solves an augmented system; free variables are set to zero. `None` if inconsistent.
fn solve_linear(mut rows: Vec<Vec<Q>>, nvars: usize) -> Option<Vec<Q>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..nvars {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let pv = rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = &*v / &pv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for k in 0..=nvars {
                    let t = &f * &rows[r][k];
                    rows[i][k] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[nvars].is_zero()) {
        return None;
    }
    let mut sol = vec![Q::zero(); nvars];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rows[i][nvars].clone();
    }
    Some(sol)
}

impl SymCubicField {
    pub fn matrix(&self) -> [[i64; 3]; 3] {
        self.0.a
    }

    /// Coefficients `[c0, c1, c2, 1]` of the monic characteristic polynomial.
    pub fn charpoly(&self) -> &[BigInt; 4] {
        &self.0.charpoly
    }

    pub fn charpoly_string(&self) -> String {
        let c = &self.0.charpoly;
        let mut s = String::from("x^3");
        for (deg, coef) in [(2, &c[2]), (1, &c[1]), (0, &c[0])] {
            if coef.is_zero() {
                continue;
            }
            let sign = if coef.is_negative() { '-' } else { '+' };
            let mag = coef.abs();
            let body = match (deg, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "x".into(),
                (1, false) => format!("{mag}x"),
                (_, true) => format!("x^{deg}"),
                (_, false) => format!("{mag}x^{deg}"),
            };
            s.push_str(&format!(" {sign} {body}"));
        }
        s
    }

    fn c_i64(&self) -> [i64; 4] {
        self.0.charpoly.clone().map(|b| b.to_i64().unwrap())
    }

    fn poly(&self) -> Poly {
        Poly(self.c_i64().iter().map(|&v| q(v)).collect())
    }

    /// Isolating interval of root `k` (largest first), refined below 2^-bits.
    pub fn root(&self, k: usize, bits: u32) -> Interval {
        if bits <= CACHED_BITS {
            return self.0.roots[k].clone();
        }
        refine_root(&self.poly(), &self.0.roots[k], bits)
    }

    pub fn root_intervals(&self) -> &[Interval; 3] {
        &self.0.roots
    }

    /// Number of sign changes of the characteristic polynomial across an interval.
    pub fn sign_changes_in(&self, iv: &Interval) -> usize {
        count_roots(&sturm_chain(&self.poly()), &iv.lo, &iv.hi)
    }

    pub fn elt(&self, coords: [Q; 3]) -> FieldElt {
        FieldElt {
            field: self.clone(),
            coords,
        }
    }

    pub fn elt_ints(&self, c: [i64; 3]) -> FieldElt {
        self.elt(c.map(q))
    }

    pub fn from_rational(&self, r: Q) -> FieldElt {
        self.elt([r, Q::zero(), Q::zero()])
    }

    pub fn one(&self) -> FieldElt {
        self.elt_ints([1, 0, 0])
    }

    pub fn zero(&self) -> FieldElt {
        self.elt_ints([0, 0, 0])
    }

    /// The generator, an eigenvalue of `A`.
    pub fn alpha(&self) -> FieldElt {
        self.elt_ints([0, 1, 0])
    }

    /// `b1, b2, b3` with `b3 = 1`.
    pub fn b_basis(&self) -> [FieldElt; 3] {
        self.0.b_basis.clone().map(|c| self.elt(c))
    }

    pub fn a_matrix(&self) -> &QMatrix {
        &self.0.a_mat
    }
}

/// Element of a cubic field in power-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElt {
    field: SymCubicField,
    coords: [Q; 3],
}

/// Serialized element: coordinates over `(I, A, A²)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EltCoords(#[serde(with = "arith::qtriple")] pub [Q; 3]);

impl FieldElt {
    pub fn field(&self) -> &SymCubicField {
        &self.field
    }

    pub fn coords(&self) -> &[Q; 3] {
        &self.coords
    }

    pub fn to_coords(&self) -> EltCoords {
        EltCoords(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coords[1].is_zero() && self.coords[2].is_zero()
    }

    fn check(&self, o: &FieldElt) -> Result<(), FieldError> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn try_add(&self, o: &FieldElt) -> Result<FieldElt, FieldError> {
        self.check(o)?;
        Ok(self.field.elt([
            &self.coords[0] + &o.coords[0],
            &self.coords[1] + &o.coords[1],
            &self.coords[2] + &o.coords[2],
        ]))
    }

    pub fn try_mul(&self, o: &FieldElt) -> Result<FieldElt, FieldError> {
        self.check(o)?;
        let c = self.field.c_i64();
        // Horner in alpha over the coordinates of self
        let mut acc = [Q::zero(), Q::zero(), Q::zero()];
        for k in (0..3).rev() {
            acc = mul_alpha(&acc, &c);
            for r in 0..3 {
                acc[r] += &self.coords[k] * &o.coords[r];
            }
        }
        Ok(self.field.elt(acc))
    }

    pub fn scale(&self, s: &Q) -> FieldElt {
        self.field.elt(self.coords.clone().map(|c| c * s))
    }

    pub fn square(&self) -> FieldElt {
        self * self
    }

    /// Matrix of multiplication by `self` on power-basis coordinates.
    fn mult_matrix(&self) -> QMatrix {
        let c = self.field.c_i64();
        let mut cols = Vec::new();
        let mut basis = [Q::one(), Q::zero(), Q::zero()];
        for _ in 0..3 {
            let prod = self.field.elt(basis.clone()).try_mul(self).unwrap();
            cols.push(prod.coords.to_vec());
            basis = mul_alpha(&basis, &c);
        }
        arith::transpose(&cols)
    }

    pub fn inverse(&self) -> Result<FieldElt, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let inv = arith::inverse(&self.mult_matrix()).ok_or(FieldError::ZeroInverse)?;
        Ok(self.field.elt([inv[0][0].clone(), inv[1][0].clone(), inv[2][0].clone()]))
    }

    /// `x0 I + x1 A + x2 A²`: symmetric, and equal to the matrix of
    /// multiplication by `self` in the basis `(b1, b2, b3)` acting on row vectors.
    pub fn regular_rep(&self) -> QMatrix {
        let f = &self.field.0;
        let id = arith::identity(3);
        let t0 = arith::scale(&id, &self.coords[0]);
        let t1 = arith::scale(&f.a_mat, &self.coords[1]);
        let t2 = arith::scale(&f.a2_mat, &self.coords[2]);
        arith::mat_add(&arith::mat_add(&t0, &t1), &t2)
    }

    /// Value at an interval enclosing a root of the characteristic polynomial.
    pub fn eval_at(&self, root: &Interval) -> Interval {
        let c = &self.coords;
        let inner = &Interval::point(c[1].clone()) + &(root * &Interval::point(c[2].clone()));
        &Interval::point(c[0].clone()) + &(root * &inner)
    }

    /// The three real conjugates (largest root first), each narrower than 2^-bits.
    pub fn conjugates(&self, bits: u32) -> [Interval; 3] {
        let target = Q::new(BigInt::one(), BigInt::one() << bits);
        [0, 1, 2].map(|k| {
            let mut rb = bits + 8;
            loop {
                let v = self.eval_at(&self.field.root(k, rb)).round(rb + 8);
                if v.width() < target {
                    return v;
                }
                rb += 32;
            }
        })
    }

    /// Conjugate at embedding `k`, refined until its sign is certain.
    pub fn certified_conjugate(&self, k: usize) -> Interval {
        let mut bits = 32;
        loop {
            let v = self.eval_at(&self.field.root(k, bits));
            if self.is_zero() || !v.contains_zero() {
                return v;
            }
            bits *= 2;
        }
    }

    pub fn sign_pattern(&self) -> SignPattern {
        if self.is_zero() {
            return SignPattern {
                positives: 0,
                negatives: 0,
                signs: [0, 0, 0],
            };
        }
        let signs = [0, 1, 2].map(|k| if self.certified_conjugate(k).is_positive() { 1i8 } else { -1i8 });
        SignPattern {
            positives: signs.iter().filter(|&&s| s > 0).count(),
            negatives: signs.iter().filter(|&&s| s < 0).count(),
            signs,
        }
    }

    /// Approximate conjugates for filtering; never used for certified claims.
    pub fn approx_conjugates(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| {
            let r = self.field.root(k, 60).mid().to_f64().unwrap();
            let c: Vec<f64> = self.coords.iter().map(|x| x.to_f64().unwrap()).collect();
            c[0] + r * (c[1] + r * c[2])
        })
    }
}

impl fmt::Display for FieldElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["I", "A", "A^2"];
        let mut parts = Vec::new();
        for (c, n) in self.coords.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            parts.push(if c.is_one() {
                n.to_string()
            } else if *c == -Q::one() {
                format!("-{n}")
            } else {
                format!("{}{}", fmt_q(c), n)
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
        }
    }
}

impl Add for &FieldElt {
    type Output = FieldElt;
    fn add(self, o: &FieldElt) -> FieldElt {
        self.try_add(o).expect("field mismatch")
    }
}

impl Sub for &FieldElt {
    type Output = FieldElt;
    fn sub(self, o: &FieldElt) -> FieldElt {
        self.try_add(&-o).expect("field mismatch")
    }
}

impl Neg for &FieldElt {
    type Output = FieldElt;
    fn neg(self) -> FieldElt {
        self.scale(&-Q::one())
    }
}

impl Mul for &FieldElt {
    type Output = FieldElt;
    fn mul(self, o: &FieldElt) -> FieldElt {
        self.try_mul(o).expect("field mismatch")
    }
}

/// Signs of the three real conjugates, largest root first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    pub positives: usize,
    pub negatives: usize,
    pub signs: [i8; 3],
}

impl SignPattern {
    pub fn pair(&self) -> (usize, usize) {
        (self.positives, self.negatives)
    }
}

/// `f1, f2` with one positive conjugate each (at the same embedding), `f3` totally negative.
#[derive(Clone, Debug)]
pub struct Prop33Triple {
    pub f1: FieldElt,
    pub f2: FieldElt,
    pub f3: FieldElt,
    /// Index of the common positive embedding of `f1` and `f2`.
    pub embedding: usize,
}

/// Bounded search parameters for [`search_prop33`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    #[serde(with = "arith::qstr")]
    pub epsilon: Q,
    pub height: i64,
    pub max_den: i64,
}

fn enumerate(height: i64, max_den: i64) -> Vec<[Q; 3]> {
    let mut out = Vec::new();
    for den in 1..=max_den {
        for h in 0..=height {
            for a in -h..=h {
                for b in -h..=h {
                    for c in -h..=h {
                        if a.abs().max(b.abs()).max(c.abs()) != h {
                            continue;
                        }
                        if den > 1 && [a, b, c, den].iter().fold(0i64, |g, &x| num_integer::gcd(g, x)) != 1 {
                            continue;
                        }
                        out.push([arith::qf(a, den), arith::qf(b, den), arith::qf(c, den)]);
                    }
                }
            }
        }
    }
    out
}

/// Certified check of the one-positive-conjugate condition at embedding `k`.
fn certify_peaked(x: &FieldElt, k: usize, eps: &Q) -> Option<Interval> {
    let conj: Vec<Interval> = (0..3).map(|i| x.certified_conjugate(i)).collect();
    if !(conj[k].lo > Q::one()) {
        return None;
    }
    for (i, c) in conj.iter().enumerate() {
        if i != k && !(c.is_negative() && c.lo >= -eps.clone()) {
            return None;
        }
    }
    Some(conj[k].clone())
}

/// Bounded-height search for the sign-pattern triple.
pub fn search_prop33(field: &SymCubicField, bounds: &SearchBounds) -> Result<Prop33Triple, FieldError> {
    let eps = &bounds.epsilon;
    if !eps.is_positive() {
        return Err(FieldError::NonPositiveEpsilon);
    }
    let epsf = eps.to_f64().unwrap();
    let elems: Vec<FieldElt> = enumerate(bounds.height, bounds.max_den).into_iter().map(|c| field.elt(c)).collect();
    let approx: Vec<[f64; 3]> = elems.iter().map(|e| e.approx_conjugates()).collect();
    let f3 = elems
        .iter()
        .zip(&approx)
        .find(|(e, a)| a.iter().all(|&v| v < -1e-9) && e.sign_pattern().positives == 0)
        .map(|(e, _)| e.clone());
    let Some(f3) = f3 else {
        return Err(FieldError::NotFoundAtHeight { height: bounds.height });
    };
    for k in 0..3 {
        let mut peaked: Vec<(usize, Interval)> = Vec::new();
        for (i, a) in approx.iter().enumerate() {
            let loose = a[k] > 1.0 - 1e-9 && (0..3).all(|j| j == k || (a[j] < 1e-9 && a[j] >= -epsf - 1e-9));
            if !loose {
                continue;
            }
            if let Some(iv) = certify_peaked(&elems[i], k, eps) {
                peaked.push((i, iv));
            }
        }
        for x in 0..peaked.len() {
            for y in x + 1..peaked.len() {
                let (ia, va) = &peaked[x];
                let (ib, vb) = &peaked[y];
                let diff = va - vb;
                if diff.mag() <= *eps {
                    return Ok(Prop33Triple {
                        f1: elems[*ia].clone(),
                        f2: elems[*ib].clone(),
                        f3,
                        embedding: k,
                    });
                }
            }
        }
    }
    Err(FieldError::NotFoundAtHeight { height: bounds.height })
}

/// True unless `x² ∈ Q` while `x ∉ Q`.
pub fn rational_square_check(x: &FieldElt) -> bool {
    x.is_rational() || !x.square().is_rational()
}

/// Exhaustive [`rational_square_check`] over integer coordinates of height ≤ `h`.
pub fn rational_square_sweep(field: &SymCubicField, h: i64) -> (usize, bool) {
    let mut n = 0;
    let mut ok = true;
    for a in -h..=h {
        for b in -h..=h {
            for c in -h..=h {
                n += 1;
                ok &= rational_square_check(&field.elt_ints([a, b, c]));
            }
        }
    }
    (n, ok)
}
