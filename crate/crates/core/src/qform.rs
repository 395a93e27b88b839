//! Quadratic forms over the rationals.
//!
//! A form is stored by its symmetric Gram matrix. Local invariants are computed
//! from a diagonalization whose entries are reduced to squarefree integers; the
//! Hasse invariant is a product of Hilbert symbols over index pairs, under
//! either the `i <= j` or the `i < j` pairing (the two differ by `(disc, -1)`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{self, factor, is_prime, legendre, split_square, squarefree_class, valuation, QMatrix, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QFormError {
    #[error("Gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("degenerate form: radical has dimension {radical_dim}")]
    Degenerate { radical_dim: usize },
    #[error("codimension {codim} is smaller than 4")]
    CodimTooSmall { codim: usize },
    #[error("real obstruction: signature {small:?} does not fit inside {big:?}")]
    RealObstruction { small: (usize, usize), big: (usize, usize) },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("zero argument to a Hilbert symbol")]
    ZeroSymbolArgument,
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}

/// A place of Q: the real place or a finite prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Prime(u64),
}

impl Place {
    pub fn prime(p: u64) -> Result<Place, QFormError> {
        if is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(QFormError::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "real" {
            return Ok(Place::Real);
        }
        let p: u64 = s.parse().map_err(|_| format!("bad place {s:?}"))?;
        Place::prime(p).map_err(|e| e.to_string())
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Index-pair convention for the Hasse invariant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HasseConvention {
    /// Pairs `i <= j`, as written in the construction being reproduced.
    #[default]
    LessEq,
    /// Pairs `i < j`, the usual textbook invariant.
    Less,
}

impl fmt::Display for HasseConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HasseConvention::LessEq => write!(f, "i <= j"),
            HasseConvention::Less => write!(f, "i < j"),
        }
    }
}

/// Symmetric rational bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QForm {
    gram: QMatrix,
}

#[derive(Serialize, Deserialize)]
struct QFormRepr {
    dim: usize,
    #[serde(with = "arith::qmat")]
    gram: QMatrix,
}

impl Serialize for QForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QFormRepr {
            dim: self.dim(),
            gram: self.gram.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = QFormRepr::deserialize(d)?;
        if r.gram.len() != r.dim {
            return Err(serde::de::Error::custom("dim does not match gram size"));
        }
        QForm::new(r.gram).map_err(serde::de::Error::custom)
    }
}

impl QForm {
    pub fn new(gram: QMatrix) -> Result<Self, QFormError> {
        if !arith::is_symmetric(&gram) {
            return Err(QFormError::NotSymmetric);
        }
        Ok(QForm { gram })
    }

    pub fn empty() -> Self {
        QForm { gram: Vec::new() }
    }

    pub fn diagonal(entries: &[Q]) -> Self {
        let n = entries.len();
        let mut gram = arith::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            gram[i][i] = e.clone();
        }
        QForm { gram }
    }

    pub fn diagonal_ints(entries: &[i64]) -> Self {
        let v: Vec<Q> = entries.iter().map(|&e| arith::q(e)).collect();
        QForm::diagonal(&v)
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn det(&self) -> Q {
        arith::det(&self.gram)
    }

    pub fn is_degenerate(&self) -> bool {
        self.det().is_zero()
    }

    /// `Bᵀ G B` for a change-of-basis matrix `B` whose columns are new basis vectors.
    pub fn transform(&self, basis: &QMatrix) -> QForm {
        let g = arith::mat_mul(&arith::mat_mul(&arith::transpose(basis), &self.gram), basis);
        QForm { gram: g }
    }

    pub fn scaled(&self, s: &Q) -> QForm {
        QForm {
            gram: arith::scale(&self.gram, s),
        }
    }
}

/// Output of [`diagonalize`].
#[derive(Clone, Debug)]
pub struct Diagonalization {
    /// Squarefree integers, one per basis vector.
    pub entries: Vec<Q>,
    /// Columns are the new basis vectors in the original coordinates.
    pub basis: QMatrix,
}

/// Congruence diagonalization over Q.
pub fn diagonalize(q: &QForm) -> Result<Diagonalization, QFormError> {
    let n = q.dim();
    let mut m = q.gram.clone();
    let mut p = arith::identity(n);
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
                for row in p.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                // v_k += v_j makes the pivot 2*m[k][j]
                for c in 0..n {
                    let t = m[j][c].clone();
                    m[k][c] += t;
                }
                for r in 0..n {
                    let t = m[r][j].clone();
                    m[r][k] += t;
                }
                for row in p.iter_mut() {
                    let t = row[j].clone();
                    row[k] += t;
                }
            } else {
                return Err(QFormError::Degenerate { radical_dim: n - k });
            }
        }
        let pivot = m[k][k].clone();
        for r in k + 1..n {
            if m[r][k].is_zero() {
                continue;
            }
            let f = &m[r][k] / &pivot;
            for c in 0..n {
                let t = &f * &m[k][c];
                m[r][c] -= t;
            }
            for rr in 0..n {
                let t = &f * &m[rr][k];
                m[rr][r] -= t;
            }
            for row in p.iter_mut() {
                let t = &f * &row[k];
                row[r] -= t;
            }
        }
    }
    let mut entries = Vec::with_capacity(n);
    for k in 0..n {
        let (s, r) = split_square(&m[k][k]);
        for row in p.iter_mut() {
            row[k] = &row[k] / &r;
        }
        entries.push(Q::from_integer(s));
    }
    Ok(Diagonalization { entries, basis: p })
}

fn hilbert_int(a: &BigInt, b: &BigInt, v: Place) -> i8 {
    match v {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let alpha = valuation(a, 2);
            let beta = valuation(b, 2);
            let u = (a >> alpha as usize).mod_floor(&BigInt::from(8)).to_u64().unwrap();
            let w = (b >> beta as usize).mod_floor(&BigInt::from(8)).to_u64().unwrap();
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u) * eps(w) + alpha as u64 * omega(w) + beta as u64 * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let alpha = valuation(a, p);
            let beta = valuation(b, p);
            let pp = BigInt::from(p);
            let u = a / pp.pow(alpha);
            let w = b / pp.pow(beta);
            let mut s: i8 = 1;
            if (alpha * beta) % 2 == 1 && ((p - 1) / 2) % 2 == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre(&u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre(&w, p);
            }
            s
        }
    }
}

fn to_int_class(x: &Q) -> BigInt {
    // x * den^2 is an integer in the same square class
    x.numer() * x.denom()
}

/// Hilbert symbol `(a, b)_v` for nonzero rationals.
pub fn hilbert_symbol(a: &Q, b: &Q, v: Place) -> Result<i8, QFormError> {
    if a.is_zero() || b.is_zero() {
        return Err(QFormError::ZeroSymbolArgument);
    }
    Ok(hilbert_int(&to_int_class(a), &to_int_class(b), v))
}

fn hilbert(a: &BigInt, b: &BigInt, v: Place) -> i8 {
    hilbert_int(a, b, v)
}

/// Places where a symbol among the given integers can be nontrivial.
pub fn relevant_places<'a, I: IntoIterator<Item = &'a BigInt>>(values: I) -> BTreeSet<Place> {
    let mut out = BTreeSet::from([Place::Real, Place::Prime(2)]);
    for v in values {
        if v.is_zero() {
            continue;
        }
        for (p, _) in factor(v) {
            out.insert(Place::Prime(p.to_u64().expect("prime factor fits in u64")));
        }
    }
    out
}

fn hasse_of_entries(entries: &[BigInt], v: Place, conv: HasseConvention) -> i8 {
    let mut h = 1;
    for i in 0..entries.len() {
        let start = match conv {
            HasseConvention::LessEq => i,
            HasseConvention::Less => i + 1,
        };
        for j in start..entries.len() {
            h *= hilbert(&entries[i], &entries[j], v);
        }
    }
    h
}

/// Complete set of rational invariants of a nondegenerate form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormInvariants {
    pub dim: usize,
    pub signature: (usize, usize),
    /// Squarefree representative of the determinant modulo squares.
    #[serde(with = "bigint_str")]
    pub disc: BigInt,
    /// Convention used by [`FormInvariants::hasse`].
    pub convention: HasseConvention,
    /// Hasse invariants at the relevant places, pairs `i <= j`.
    pub hasse_leq: BTreeMap<Place, i8>,
    /// Hasse invariants at the relevant places, pairs `i < j`.
    pub hasse_lt: BTreeMap<Place, i8>,
    /// Squarefree diagonal entries the invariants were computed from.
    #[serde(with = "bigint_vec_str")]
    pub diagonal: Vec<BigInt>,
}

mod bigint_str {
    use super::*;
    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod bigint_vec_str {
    use super::*;
    pub fn serialize<S: Serializer>(x: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = x.iter().map(|b| b.to_string()).collect();
        v.serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl FormInvariants {
    /// Hasse invariant at any place under the record's convention.
    pub fn hasse(&self, v: Place) -> i8 {
        self.hasse_with(v, self.convention)
    }

    pub fn hasse_with(&self, v: Place, conv: HasseConvention) -> i8 {
        hasse_of_entries(&self.diagonal, v, conv)
    }

    pub fn places(&self) -> BTreeSet<Place> {
        self.hasse_lt.keys().copied().collect()
    }
}

pub fn form_invariants(q: &QForm) -> Result<FormInvariants, QFormError> {
    form_invariants_with(q, HasseConvention::default())
}

pub fn form_invariants_with(q: &QForm, conv: HasseConvention) -> Result<FormInvariants, QFormError> {
    let d = diagonalize(q)?;
    let entries: Vec<BigInt> = d.entries.iter().map(|e| e.numer().clone()).collect();
    let pos = entries.iter().filter(|e| e.is_positive()).count();
    let neg = entries.len() - pos;
    let prod: BigInt = entries.iter().product();
    let disc = squarefree_class(&Q::from_integer(prod));
    let places = relevant_places(entries.iter());
    let hasse_leq = places
        .iter()
        .map(|&v| (v, hasse_of_entries(&entries, v, HasseConvention::LessEq)))
        .collect();
    let hasse_lt = places
        .iter()
        .map(|&v| (v, hasse_of_entries(&entries, v, HasseConvention::Less)))
        .collect();
    Ok(FormInvariants {
        dim: q.dim(),
        signature: (pos, neg),
        disc,
        convention: conv,
        hasse_leq,
        hasse_lt,
        diagonal: entries,
    })
}

/// Signature `(positives, negatives)` of a nondegenerate form.
pub fn signature(q: &QForm) -> Result<(usize, usize), QFormError> {
    Ok(form_invariants(q)?.signature)
}

/// Orthogonal direct sum.
pub fn direct_sum(q1: &QForm, q2: &QForm) -> QForm {
    QForm {
        gram: arith::block_diag(&[&q1.gram, &q2.gram]),
    }
}

/// Rational isometry test via dimension, signature, discriminant and Hasse invariants.
pub fn equivalent_over_q(q1: &QForm, q2: &QForm) -> Result<bool, QFormError> {
    let a = form_invariants(q1)?;
    let b = form_invariants(q2)?;
    Ok(invariants_agree(&a, &b))
}

fn invariants_agree(a: &FormInvariants, b: &FormInvariants) -> bool {
    if a.dim != b.dim || a.signature != b.signature || a.disc != b.disc {
        return false;
    }
    let places: BTreeSet<Place> = a.places().union(&b.places()).copied().collect();
    places
        .iter()
        .all(|&v| a.hasse_with(v, HasseConvention::Less) == b.hasse_with(v, HasseConvention::Less))
}

/// Whether `x / y` is a square in the completion at `v`.
pub fn same_local_square_class(x: &Q, y: &Q, v: Place) -> bool {
    let r = to_int_class(&(x / y));
    match v {
        Place::Real => r.is_positive(),
        Place::Prime(p) => {
            let e = valuation(&r, p);
            if e % 2 == 1 {
                return false;
            }
            let u = &r / BigInt::from(p).pow(e);
            if p == 2 {
                u.mod_floor(&BigInt::from(8)) == BigInt::one()
            } else {
                legendre(&u, p) == 1
            }
        }
    }
}

/// Least quadratic nonresidue modulo an odd prime, searched from 2 upward.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&a| legendre(&BigInt::from(a), p) == -1).expect("odd prime has a nonresidue")
}

const DYADIC_ENTRIES: [i64; 16] = [1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10, 14, -14];

/// A 4-dimensional diagonal form with prescribed local discriminant class and
/// Hasse invariant at the prime `p`.
pub fn build_local_form(p: u64, want_disc: &Q, want_hasse: i8, conv: HasseConvention) -> Result<QForm, QFormError> {
    if !is_prime(p) {
        return Err(QFormError::NotPrime(p));
    }
    let place = Place::Prime(p);
    let matches = |entries: &[i64]| -> bool {
        let ints: Vec<BigInt> = entries.iter().map(|&e| BigInt::from(e)).collect();
        let det: BigInt = ints.iter().product();
        same_local_square_class(&Q::from_integer(det), want_disc, place)
            && hasse_of_entries(&ints, place, conv) == want_hasse
    };
    let candidates: Vec<[i64; 4]> = if p == 2 {
        let mut v = Vec::new();
        for &b in &DYADIC_ENTRIES {
            for &c in &DYADIC_ENTRIES {
                for &d in &DYADIC_ENTRIES {
                    for &a in &DYADIC_ENTRIES {
                        v.push([a, b, c, d]);
                    }
                }
            }
        }
        v
    } else {
        let a = least_nonresidue(p) as i64;
        let pi = p as i64;
        let mut v = vec![
            [1, -1, 1, -1],
            [1, -a, pi, -a * pi],
            [1, -1, 1, pi],
            [1, -1, a, pi],
        ];
        let units = [1, -1, a, -a, pi, -pi, a * pi, -a * pi];
        for &x in &units {
            for &y in &units {
                for &z in &units {
                    v.push([1, x, y, z]);
                }
            }
        }
        v
    };
    candidates
        .into_iter()
        .find(|c| matches(c))
        .map(|c| QForm::diagonal_ints(&c))
        .ok_or_else(|| QFormError::SearchExhausted(format!("no local form at {p} for disc {want_disc}, hasse {want_hasse}")))
}

/// Local data recorded per place in an embedding certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlaceRecord {
    pub place: Place,
    /// Hasse invariant (i < j) the complement had to realize.
    pub target_hasse: i8,
    pub complement_hasse: i8,
    pub sum_hasse: i8,
    pub ambient_hasse: i8,
    pub matched: bool,
    /// Diagonal local model of the 4-dimensional core at this prime.
    pub local_model: Option<QForm>,
}

/// Invariant-level certificate that `q1 ⊕ complement ≅ q2` over Q.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplementCertificate {
    pub complement: QForm,
    pub verified: bool,
    pub codim: usize,
    pub complement_signature: (usize, usize),
    #[serde(with = "bigint_str")]
    pub complement_disc: BigInt,
    pub places: Vec<PlaceRecord>,
}

fn signed_squarefree_candidates(limit: i64) -> Vec<BigInt> {
    let mut out = Vec::new();
    for n in 1..=limit {
        let b = BigInt::from(n);
        if squarefree_class(&Q::from_integer(b.clone())) == b {
            out.push(b.clone());
            out.push(-b);
        }
    }
    out
}

/// Searches a diagonal quaternary form with given signature, disc and Hasse
/// invariants (i < j) at `targets`; every other place must carry +1.
fn search_quaternary(
    sig: (usize, usize),
    disc: &BigInt,
    targets: &BTreeMap<Place, i8>,
) -> Result<Vec<BigInt>, QFormError> {
    let cands = signed_squarefree_candidates(400);
    let ok = |e: &[BigInt]| -> bool {
        let pos = e.iter().filter(|x| x.is_positive()).count();
        if pos != sig.0 {
            return false;
        }
        let places = relevant_places(e.iter());
        for v in places.iter().chain(targets.keys()) {
            let want = targets.get(v).copied().unwrap_or(1);
            if hasse_of_entries(e, *v, HasseConvention::Less) != want {
                return false;
            }
        }
        true
    };
    // triples ordered by their largest candidate index
    for level in 0..cands.len() {
        for i in 0..=level {
            for j in 0..=level {
                for k in 0..=level {
                    if i.max(j).max(k) != level {
                        continue;
                    }
                    let (x, y, z) = (&cands[i], &cands[j], &cands[k]);
                    let w = squarefree_class(&Q::from_integer(disc * x * y * z));
                    let e = [x.clone(), y.clone(), z.clone(), w];
                    if ok(&e) {
                        return Ok(e.to_vec());
                    }
                }
            }
        }
    }
    Err(QFormError::SearchExhausted(format!(
        "no quaternary form with signature {sig:?} and disc {disc}"
    )))
}

/// Builds a complement `c` with `q1 ⊕ c ≅ q2` over Q when `q1` fits in `q2`
/// over R with codimension at least 4.
pub fn complement_for_embedding(q1: &QForm, q2: &QForm) -> Result<ComplementCertificate, QFormError> {
    let i1 = form_invariants(q1)?;
    let i2 = form_invariants(q2)?;
    if q2.dim() < q1.dim() + 4 {
        return Err(QFormError::CodimTooSmall {
            codim: q2.dim().saturating_sub(q1.dim()),
        });
    }
    if i1.signature.0 > i2.signature.0 || i1.signature.1 > i2.signature.1 {
        return Err(QFormError::RealObstruction {
            small: i1.signature,
            big: i2.signature,
        });
    }
    let codim = q2.dim() - q1.dim();
    let (r, s) = (i2.signature.0 - i1.signature.0, i2.signature.1 - i1.signature.1);
    let dc = squarefree_class(&Q::from_integer(&i1.disc * &i2.disc));

    let mut places: BTreeSet<Place> = i1.places().union(&i2.places()).copied().collect();
    places.extend(relevant_places([&dc]));
    let target: BTreeMap<Place, i8> = places
        .iter()
        .map(|&v| {
            let h = i2.hasse_with(v, HasseConvention::Less)
                * i1.hasse_with(v, HasseConvention::Less)
                * hilbert(&i1.disc, &dc, v);
            (v, h)
        })
        .collect();

    // core signature as close to (2, 2) as the budget allows
    let rc = (0..=4usize)
        .filter(|&rc| rc <= r && 4 - rc <= s)
        .min_by_key(|&rc| (rc as i64 - 2).abs())
        .expect("r + s >= 4");
    let sc = 4 - rc;
    let mut padding: Vec<BigInt> = Vec::new();
    padding.extend(std::iter::repeat(BigInt::one()).take(r - rc));
    padding.extend(std::iter::repeat(-BigInt::one()).take(s - sc));
    let dp: BigInt = padding.iter().product();
    let dcore = squarefree_class(&Q::from_integer(&dc * &dp));
    let core_target: BTreeMap<Place, i8> = target
        .iter()
        .map(|(&v, &h)| {
            let hp = hasse_of_entries(&padding, v, HasseConvention::Less);
            (v, h * hp * hilbert(&dp, &dcore, v))
        })
        .collect();
    let core = search_quaternary((rc, sc), &dcore, &core_target)?;

    let mut entries = padding.clone();
    entries.extend(core.iter().cloned());
    let complement = QForm::diagonal(&entries.iter().map(|e| Q::from_integer(e.clone())).collect::<Vec<_>>());
    let sum = direct_sum(q1, &complement);
    let ic = form_invariants(&complement)?;
    let is = form_invariants(&sum)?;
    let verified = invariants_agree(&is, &i2);

    let mut all: BTreeSet<Place> = places.clone();
    all.extend(ic.places());
    let mut records = Vec::new();
    for v in all {
        let local_model = match v {
            Place::Prime(p) => {
                let want = Q::from_integer(dcore.clone());
                let h = hasse_of_entries(&core, v, HasseConvention::Less);
                build_local_form(p, &want, h, HasseConvention::Less).ok()
            }
            Place::Real => None,
        };
        let sum_h = is.hasse_with(v, HasseConvention::Less);
        let amb_h = i2.hasse_with(v, HasseConvention::Less);
        records.push(PlaceRecord {
            place: v,
            target_hasse: target.get(&v).copied().unwrap_or(1),
            complement_hasse: ic.hasse_with(v, HasseConvention::Less),
            sum_hasse: sum_h,
            ambient_hasse: amb_h,
            matched: sum_h == amb_h,
            local_model,
        });
    }
    Ok(ComplementCertificate {
        complement,
        verified,
        codim,
        complement_signature: ic.signature,
        complement_disc: ic.disc,
        places: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{from_ints, mat_mul, q, qf, transpose};

    fn is_diag_with(q0: &QForm, d: &Diagonalization) -> bool {
        let t = mat_mul(&mat_mul(&transpose(&d.basis), q0.gram()), &d.basis);
        (0..q0.dim()).all(|i| (0..q0.dim()).all(|j| if i == j { t[i][j] == d.entries[i] } else { t[i][j].is_zero() }))
    }

    #[test]
    fn diagonal_form_is_fixed() {
        let f = QForm::diagonal_ints(&[1, -1]);
        let d = diagonalize(&f).unwrap();
        assert_eq!(d.entries, vec![q(1), q(-1)]);
        assert_eq!(d.basis, arith::identity(2));
    }

    #[test]
    fn hyperbolic_plane() {
        let u = QForm::new(from_ints([[0, 1], [1, 0]])).unwrap();
        let d = diagonalize(&u).unwrap();
        assert_eq!(d.entries, vec![q(2), q(-2)]);
        assert!(is_diag_with(&u, &d));
        // e + f and e - f (up to scaling)
        assert_eq!(d.basis[0][0], d.basis[1][0]);
        assert_eq!(d.basis[0][1], -d.basis[1][1].clone());
    }

    #[test]
    fn degenerate_reports_radical() {
        let f = QForm::new(from_ints([[1, 1, 0], [1, 1, 0], [0, 0, 0]])).unwrap();
        assert_eq!(diagonalize(&f).unwrap_err(), QFormError::Degenerate { radical_dim: 2 });
    }

    #[test]
    fn non_symmetric_rejected() {
        assert_eq!(QForm::new(from_ints([[1, 2], [0, 1]])).unwrap_err(), QFormError::NotSymmetric);
    }

    #[test]
    fn basic_symbols() {
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Real).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Prime(3)).unwrap(), 1);
        for v in [Place::Real, Place::Prime(2), Place::Prime(5)] {
            assert_eq!(hilbert_symbol(&q(1), &qf(-7, 3), v).unwrap(), 1);
        }
        // 2 is not a norm from Q_3(sqrt 3): (2,3)_3 = (2/3) = -1
        assert_eq!(hilbert_symbol(&q(2), &q(3), Place::Prime(3)).unwrap(), -1);
        assert!(hilbert_symbol(&q(0), &q(3), Place::Real).is_err());
    }

    #[test]
    fn invariants_of_split_form() {
        let f = QForm::diagonal_ints(&[1, -1, 1, -1]);
        let inv = form_invariants(&f).unwrap();
        assert_eq!(inv.signature, (2, 2));
        assert_eq!(inv.disc, BigInt::one());
        let g = QForm::diagonal_ints(&[1, 1, 1, 1]);
        assert_eq!(form_invariants(&g).unwrap().hasse(Place::Prime(3)), 1);
    }

    #[test]
    fn conventions_differ_by_disc_symbol() {
        let f = QForm::diagonal_ints(&[3, -5, 7]);
        let inv = form_invariants(&f).unwrap();
        for (&v, &h) in &inv.hasse_leq {
            let alt = inv.hasse_lt[&v] * hilbert(&inv.disc, &BigInt::from(-1), v);
            assert_eq!(h, alt, "at {v}");
        }
    }

    #[test]
    fn equivalence_examples() {
        let a = QForm::diagonal_ints(&[1, 1, 1, 1, 1, 1, 1]);
        let b = QForm::diagonal_ints(&[4, 1, 1, 1, 1, 1, 1]);
        assert!(equivalent_over_q(&a, &b).unwrap());
        assert!(!equivalent_over_q(&QForm::diagonal_ints(&[1, 1]), &QForm::diagonal_ints(&[1, -1])).unwrap());
        // <1,1> and <2,2> are isometric, <1,1> and <3,3> are not
        assert!(equivalent_over_q(&QForm::diagonal_ints(&[1, 1]), &QForm::diagonal_ints(&[2, 2])).unwrap());
        assert!(!equivalent_over_q(&QForm::diagonal_ints(&[1, 1]), &QForm::diagonal_ints(&[3, 3])).unwrap());
    }

    #[test]
    fn direct_sum_identity() {
        let f = QForm::diagonal_ints(&[2, 3]);
        assert_eq!(direct_sum(&f, &QForm::empty()), f);
        assert_eq!(
            direct_sum(&QForm::diagonal_ints(&[1]), &QForm::diagonal_ints(&[-1])),
            QForm::diagonal_ints(&[1, -1])
        );
    }

    #[test]
    fn local_forms_at_five() {
        let f = build_local_form(5, &q(1), 1, HasseConvention::LessEq).unwrap();
        assert_eq!(f, QForm::diagonal_ints(&[1, -1, 1, -1]));
        let g = build_local_form(5, &q(1), -1, HasseConvention::LessEq).unwrap();
        assert_eq!(g, QForm::diagonal_ints(&[1, -2, 5, -10]));
    }

    #[test]
    fn local_forms_realize_every_pair() {
        for p in [2u64, 3, 5, 7] {
            let classes: Vec<i64> = if p == 2 { vec![1, 3, 5, 7, 2, 6, 10, 14] } else {
                let a = least_nonresidue(p) as i64;
                vec![1, a, p as i64, a * p as i64]
            };
            for d in classes {
                for h in [1i8, -1] {
                    for conv in [HasseConvention::LessEq, HasseConvention::Less] {
                        let f = build_local_form(p, &q(d), h, conv).unwrap();
                        let inv = form_invariants_with(&f, conv).unwrap();
                        assert_eq!(inv.hasse(Place::Prime(p)), h);
                        assert!(same_local_square_class(&Q::from_integer(inv.disc.clone()), &q(d), Place::Prime(p)));
                    }
                }
            }
        }
    }

    #[test]
    fn definite_complement() {
        let cert = complement_for_embedding(&QForm::diagonal_ints(&[1]), &QForm::diagonal_ints(&[1, 1, 1, 1, 1])).unwrap();
        assert!(cert.verified);
        assert!(equivalent_over_q(&cert.complement, &QForm::diagonal_ints(&[1, 1, 1, 1])).unwrap());
    }

    #[test]
    fn complement_errors() {
        let small = QForm::diagonal_ints(&[1, 1]);
        let big = QForm::diagonal_ints(&[1, 1, 1, 1, 1]);
        assert_eq!(complement_for_embedding(&small, &big).unwrap_err(), QFormError::CodimTooSmall { codim: 3 });
        let five = QForm::diagonal_ints(&[1, 1, 1, 1, 1]);
        let mut ent = vec![1i64; 3];
        ent.extend(vec![-1i64; 19]);
        let l0like = QForm::diagonal_ints(&ent);
        assert!(matches!(
            complement_for_embedding(&five, &l0like).unwrap_err(),
            QFormError::RealObstruction { .. }
        ));
    }

    #[test]
    fn place_strings() {
        assert_eq!("real".parse::<Place>().unwrap(), Place::Real);
        assert_eq!("13".parse::<Place>().unwrap(), Place::Prime(13));
        assert!("12".parse::<Place>().is_err());
        let json = serde_json::to_string(&QForm::diagonal(&[qf(1, 2), q(-3)])).unwrap();
        assert_eq!(json, r#"{"dim":2,"gram":[["1/2","0"],["0","-3"]]}"#);
        let back: QForm = serde_json::from_str(&json).unwrap();
        assert_eq!(back, QForm::diagonal(&[qf(1, 2), q(-3)]));
    }
}
