//! Clifford algebras of arbitrary symmetric bilinear forms over Q or F_p.
//!
//! Monomials are bitmasks with generators in increasing index order. Products
//! are computed by rewriting with `e_i e_j + e_j e_i = 2 B_ij`, so the Gram
//! matrix need not be diagonal.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, fmt_q, QMatrix, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliffordError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("coefficient {0} has a denominator divisible by {1}")]
    DenominatorDivisible(String, u64),
    #[error("Gram matrix must be square and symmetric")]
    BadGram,
    #[error("monomial {mask:#b} uses a generator beyond n = {n}")]
    AlgebraMismatch { mask: u32, n: usize },
    #[error("at most {max} generators are supported, got {n}")]
    TooManyGenerators { n: usize, max: usize },
    #[error("empty generator list")]
    NoGenerators,
    #[error("closure is computed over a prime field; use closure_basis")]
    ClosureNeedsModulus,
}

/// Coefficient ring of a Clifford algebra.
pub trait Ring: Clone + fmt::Debug {
    type E: Clone + PartialEq + fmt::Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn from_q(&self, x: &Q) -> Result<Self::E, CliffordError>;
    fn render(&self, a: &Self::E) -> String;
    /// `Some(-1)` / `Some(1)` for ±1, used when printing.
    fn unit_sign(&self, a: &Self::E) -> Option<i8>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Ring for Rationals {
    type E = Q;
    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::one()
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a * b
    }
    fn neg(&self, a: &Q) -> Q {
        -a
    }
    fn from_q(&self, x: &Q) -> Result<Q, CliffordError> {
        Ok(x.clone())
    }
    fn render(&self, a: &Q) -> String {
        fmt_q(a)
    }
    fn unit_sign(&self, a: &Q) -> Option<i8> {
        if a.is_one() {
            Some(1)
        } else if *a == -Q::one() {
            Some(-1)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, CliffordError> {
        if arith::is_prime(p) && p < (1 << 31) {
            Ok(PrimeField { p })
        } else {
            Err(CliffordError::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn inv(&self, a: u64) -> u64 {
        arith::inv_mod(a, self.p).expect("nonzero residue")
    }
}

impl Ring for PrimeField {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn from_q(&self, x: &Q) -> Result<u64, CliffordError> {
        arith::q_mod_p(x, self.p).ok_or_else(|| CliffordError::DenominatorDivisible(fmt_q(x), self.p))
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
    fn unit_sign(&self, a: &u64) -> Option<i8> {
        if *a == 1 {
            Some(1)
        } else if *a == self.p - 1 {
            Some(-1)
        } else {
            None
        }
    }
}

/// Sparse element: monomial mask to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordElt<E> {
    pub terms: BTreeMap<u32, E>,
}

impl<E> CliffordElt<E> {
    pub fn zero() -> Self {
        CliffordElt { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 1)
    }

    pub fn coeff(&self, mask: u32) -> Option<&E> {
        self.terms.get(&mask)
    }
}

/// Mask of a monomial from 1-based generator indices.
pub fn mask_of(indices: &[usize]) -> u32 {
    indices.iter().fold(0, |m, &i| m | (1 << (i - 1)))
}

/// 1-based generator indices of a mask.
pub fn indices_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask >> j & 1 == 1).map(|j| j + 1).collect()
}

pub fn monomial_name(mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    indices_of(mask).iter().map(|i| format!("e{i}")).collect()
}

/// Rewriting rule for `M · e_j`.
type Rule<E> = Vec<(u32, E)>;

const MAX_GENERATORS: usize = 16;
const TABLE_LIMIT: usize = 12;

#[derive(Clone, Debug)]
pub struct CliffordAlgebra<R: Ring> {
    ring: R,
    n: usize,
    gram_q: QMatrix,
    gram: Vec<Vec<R::E>>,
    /// `table[mask * n + j]` holds `mask · e_j`, when `n` is small.
    table: Vec<Rule<R::E>>,
    /// Trace of right multiplication by each monomial, filled on first use.
    traces: OnceLock<Vec<R::E>>,
}

impl CliffordAlgebra<Rationals> {
    pub fn rational(gram: &QMatrix) -> Result<Self, CliffordError> {
        CliffordAlgebra::new(Rationals, gram)
    }
}

impl CliffordAlgebra<PrimeField> {
    pub fn mod_p(gram: &QMatrix, p: u64) -> Result<Self, CliffordError> {
        CliffordAlgebra::new(PrimeField::new(p)?, gram)
    }
}

impl<R: Ring> CliffordAlgebra<R> {
    pub fn new(ring: R, gram_q: &QMatrix) -> Result<Self, CliffordError> {
        let n = gram_q.len();
        if !arith::is_symmetric(gram_q) {
            return Err(CliffordError::BadGram);
        }
        if n > MAX_GENERATORS {
            return Err(CliffordError::TooManyGenerators { n, max: MAX_GENERATORS });
        }
        let gram = gram_q
            .iter()
            .map(|r| r.iter().map(|x| ring.from_q(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let mut alg = CliffordAlgebra {
            ring,
            n,
            gram_q: gram_q.clone(),
            gram,
            table: Vec::new(),
            traces: OnceLock::new(),
        };
        if n <= TABLE_LIMIT {
            let mut table = Vec::with_capacity((1 << n) * n);
            for mask in 0..(1u32 << n) {
                for j in 0..n {
                    table.push(alg.rewrite(mask, j));
                }
            }
            alg.table = table;
        }
        Ok(alg)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram_q
    }

    /// `M · e_j` with `e_top e_j = −e_j e_top + 2 B[top][j]` for `top > j`.
    fn rewrite(&self, mask: u32, j: usize) -> Rule<R::E> {
        let r = &self.ring;
        if mask == 0 || (31 - mask.leading_zeros()) < j as u32 {
            return vec![(mask | 1 << j, r.one())];
        }
        let top = (31 - mask.leading_zeros()) as usize;
        let rest = mask & !(1 << top);
        if top == j {
            return if r.is_zero(&self.gram[j][j]) { vec![] } else { vec![(rest, self.gram[j][j].clone())] };
        }
        let mut out: Rule<R::E> = self.rewrite(rest, j).into_iter().map(|(m, c)| (m | 1 << top, r.neg(&c))).collect();
        let two_b = r.add(&self.gram[top][j], &self.gram[top][j]);
        if !r.is_zero(&two_b) {
            out.push((rest, two_b));
        }
        out
    }

    fn rule(&self, mask: u32, j: usize) -> std::borrow::Cow<'_, Rule<R::E>> {
        if self.table.is_empty() {
            std::borrow::Cow::Owned(self.rewrite(mask, j))
        } else {
            std::borrow::Cow::Borrowed(&self.table[mask as usize * self.n + j])
        }
    }

    pub fn one(&self) -> CliffordElt<R::E> {
        self.scalar(self.ring.one())
    }

    pub fn scalar(&self, c: R::E) -> CliffordElt<R::E> {
        self.monomial(0, c)
    }

    pub fn monomial(&self, mask: u32, c: R::E) -> CliffordElt<R::E> {
        let mut terms = BTreeMap::new();
        if !self.ring.is_zero(&c) {
            terms.insert(mask, c);
        }
        CliffordElt { terms }
    }

    /// Generator `e_i`, 1-based.
    pub fn gen(&self, i: usize) -> CliffordElt<R::E> {
        assert!(i >= 1 && i <= self.n, "generator index out of range");
        self.monomial(1 << (i - 1), self.ring.one())
    }

    /// Linear combination of monomials given by 1-based index lists.
    pub fn from_terms(&self, terms: &[(Q, &[usize])]) -> Result<CliffordElt<R::E>, CliffordError> {
        let mut out = CliffordElt::zero();
        for (c, idx) in terms {
            let mono = idx.iter().fold(self.one(), |acc, &i| self.mul(&acc, &self.gen(i)));
            out = self.add(&out, &self.scale(&mono, &self.ring.from_q(c)?));
        }
        Ok(out)
    }

    /// Reduces a rational element into this algebra's ring.
    pub fn convert(&self, x: &CliffordElt<Q>) -> Result<CliffordElt<R::E>, CliffordError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &x.terms {
            self.check_mask(*m)?;
            let v = self.ring.from_q(c)?;
            if !self.ring.is_zero(&v) {
                terms.insert(*m, v);
            }
        }
        Ok(CliffordElt { terms })
    }

    fn check_mask(&self, m: u32) -> Result<(), CliffordError> {
        if (m as u64) >> self.n != 0 {
            Err(CliffordError::AlgebraMismatch { mask: m, n: self.n })
        } else {
            Ok(())
        }
    }

    fn accumulate(&self, into: &mut BTreeMap<u32, R::E>, m: u32, c: R::E) {
        use std::collections::btree_map::Entry;
        match into.entry(m) {
            Entry::Vacant(v) => {
                if !self.ring.is_zero(&c) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = self.ring.add(o.get(), &c);
                if self.ring.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, x: &CliffordElt<R::E>, y: &CliffordElt<R::E>) -> CliffordElt<R::E> {
        let mut terms = x.terms.clone();
        for (m, c) in &y.terms {
            self.accumulate(&mut terms, *m, c.clone());
        }
        CliffordElt { terms }
    }

    pub fn sub(&self, x: &CliffordElt<R::E>, y: &CliffordElt<R::E>) -> CliffordElt<R::E> {
        self.add(x, &self.neg(y))
    }

    pub fn neg(&self, x: &CliffordElt<R::E>) -> CliffordElt<R::E> {
        CliffordElt {
            terms: x.terms.iter().map(|(m, c)| (*m, self.ring.neg(c))).collect(),
        }
    }

    pub fn scale(&self, x: &CliffordElt<R::E>, s: &R::E) -> CliffordElt<R::E> {
        if self.ring.is_zero(s) {
            return CliffordElt::zero();
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &x.terms {
            self.accumulate(&mut terms, *m, self.ring.mul(c, s));
        }
        CliffordElt { terms }
    }

    /// `x · e_j`, 0-based `j`.
    pub fn mul_gen(&self, x: &CliffordElt<R::E>, j: usize) -> CliffordElt<R::E> {
        let mut out = BTreeMap::new();
        for (m, c) in &x.terms {
            for (k, d) in self.rule(*m, j).iter() {
                self.accumulate(&mut out, *k, self.ring.mul(c, d));
            }
        }
        CliffordElt { terms: out }
    }

    pub fn mul(&self, x: &CliffordElt<R::E>, y: &CliffordElt<R::E>) -> CliffordElt<R::E> {
        let mut out = BTreeMap::new();
        for (my, cy) in &y.terms {
            let mut cur = x.clone();
            for j in 0..self.n {
                if my >> j & 1 == 1 {
                    cur = self.mul_gen(&cur, j);
                }
            }
            for (m, c) in cur.terms {
                self.accumulate(&mut out, m, self.ring.mul(&c, cy));
            }
        }
        CliffordElt { terms: out }
    }

    pub fn checked_mul(&self, x: &CliffordElt<R::E>, y: &CliffordElt<R::E>) -> Result<CliffordElt<R::E>, CliffordError> {
        for m in x.terms.keys().chain(y.terms.keys()) {
            self.check_mask(*m)?;
        }
        Ok(self.mul(x, y))
    }

    /// The anti-involution reversing generator order in every monomial.
    pub fn reverse(&self, x: &CliffordElt<R::E>) -> CliffordElt<R::E> {
        let mut out = BTreeMap::new();
        for (m, c) in &x.terms {
            let mut cur = self.scalar(c.clone());
            for j in (0..self.n).rev() {
                if m >> j & 1 == 1 {
                    cur = self.mul_gen(&cur, j);
                }
            }
            for (k, d) in cur.terms {
                self.accumulate(&mut out, k, d);
            }
        }
        CliffordElt { terms: out }
    }

    fn monomial_traces(&self) -> &[R::E] {
        self.traces.get_or_init(|| {
            let mut t = vec![self.ring.zero(); self.dim()];
            for mask in 0..(1u32 << self.n) {
                for y in 0..(1u32 << self.n) {
                    let prod = self.mul(&self.monomial(y, self.ring.one()), &self.monomial(mask, self.ring.one()));
                    if let Some(c) = prod.terms.get(&y) {
                        t[mask as usize] = self.ring.add(&t[mask as usize], c);
                    }
                }
            }
            t
        })
    }

    /// Trace of `y ↦ y · x` on the whole algebra, by linearity over monomials.
    pub fn trace_right_mult(&self, x: &CliffordElt<R::E>) -> R::E {
        let t = self.monomial_traces();
        x.terms.iter().fold(self.ring.zero(), |acc, (m, c)| self.ring.add(&acc, &self.ring.mul(c, &t[*m as usize])))
    }

    /// Dense coefficient vector in mask order.
    pub fn coords(&self, x: &CliffordElt<R::E>) -> Vec<R::E> {
        let mut v = vec![self.ring.zero(); self.dim()];
        for (m, c) in &x.terms {
            v[*m as usize] = c.clone();
        }
        v
    }

    pub fn from_coords(&self, v: &[R::E]) -> CliffordElt<R::E> {
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(|(m, c)| (m as u32, c.clone()))
            .collect();
        CliffordElt { terms }
    }

    /// Matrix of `y ↦ x · y`; column `N` is `x · e_N`.
    pub fn left_rep(&self, x: &CliffordElt<R::E>) -> SparseMatrix<R::E> {
        let cols = (0..(1u32 << self.n)).map(|m| self.mul(x, &self.monomial(m, self.ring.one())).terms).collect();
        SparseMatrix { cols }
    }

    pub fn render(&self, x: &CliffordElt<R::E>) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        // lexicographic by generator indices
        let mut keys: Vec<u32> = x.terms.keys().copied().collect();
        keys.sort_by_key(|m| indices_of(*m));
        for (i, m) in keys.iter().enumerate() {
            let c = &x.terms[m];
            let name = monomial_name(*m);
            let (neg, body) = match self.ring.unit_sign(c) {
                Some(1) if *m != 0 => (false, name),
                Some(-1) if *m != 0 => (true, name),
                _ => {
                    let r = self.ring.render(c);
                    let (neg, mag) = match r.strip_prefix('-') {
                        Some(rest) => (true, rest.to_string()),
                        None => (false, r),
                    };
                    (neg, if *m == 0 { mag } else { format!("{mag}{name}") })
                }
            };
            match (i, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&body);
        }
        s
    }
}

/// Serialized element: 1-based generator indices with a coefficient string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: Vec<usize>,
    pub coeff: String,
}

pub fn to_json_terms(x: &CliffordElt<Q>) -> Vec<TermJson> {
    x.terms
        .iter()
        .map(|(m, c)| TermJson {
            monomial: indices_of(*m),
            coeff: fmt_q(c),
        })
        .collect()
}

pub fn from_json_terms(terms: &[TermJson]) -> Result<CliffordElt<Q>, String> {
    let mut out = BTreeMap::new();
    for t in terms {
        let c = arith::parse_q(&t.coeff)?;
        if !c.is_zero() {
            out.insert(mask_of(&t.monomial), c);
        }
    }
    Ok(CliffordElt { terms: out })
}

/// Column-sparse square matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix<E> {
    pub cols: Vec<BTreeMap<u32, E>>,
}

impl<E> SparseMatrix<E> {
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn max_col_nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).max().unwrap_or(0)
    }
}

/// Incremental row echelon form over F_p on sparse vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    /// Pivot mask to normalized row with leading coefficient 1 at the pivot.
    rows: BTreeMap<u32, BTreeMap<u32, u64>>,
}

impl Echelon {
    pub fn new(field: PrimeField) -> Self {
        Echelon {
            field,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v`; returns true and stores it if it was independent.
    pub fn insert(&mut self, v: &CliffordElt<u64>) -> bool {
        let f = self.field;
        let mut v = v.terms.clone();
        // eliminate from the largest mask downward
        while let Some((&k, &c)) = v.iter().next_back() {
            match self.rows.get(&k) {
                Some(row) => {
                    for (kk, vv) in row {
                        let e = v.entry(*kk).or_insert(0);
                        *e = f.add(e, &f.neg(&f.mul(&c, vv)));
                        if *e == 0 {
                            v.remove(kk);
                        }
                    }
                }
                None => {
                    let inv = f.inv(c);
                    let row = v.into_iter().map(|(kk, vv)| (kk, f.mul(&vv, &inv))).collect();
                    self.rows.insert(k, row);
                    return true;
                }
            }
        }
        false
    }
}

/// Rank over F_p of the span of `elements`.
pub fn span_rank(elements: &[CliffordElt<Q>], p: u64) -> Result<usize, CliffordError> {
    let f = PrimeField::new(p)?;
    let mut ech = Echelon::new(f);
    for x in elements {
        let mut terms = BTreeMap::new();
        for (m, c) in &x.terms {
            let v = f.from_q(c)?;
            if v != 0 {
                terms.insert(*m, v);
            }
        }
        ech.insert(&CliffordElt { terms });
    }
    Ok(ech.rank())
}

pub fn span_rank_mod(elements: &[CliffordElt<u64>], field: PrimeField) -> usize {
    let mut ech = Echelon::new(field);
    for x in elements {
        ech.insert(x);
    }
    ech.rank()
}

/// Which products of generators to form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WordPolicy {
    /// Ordered products of `min_len..=max_len` generators; the last factor is
    /// restricted to `last_factors` (0-based) when given.
    Products {
        min_len: usize,
        max_len: usize,
        last_factors: Option<Vec<usize>>,
    },
    /// Multiply the span by generators until its rank stops growing.
    Closure,
}

impl WordPolicy {
    /// Products of exactly four generators whose last factor is among the first four.
    pub fn restricted_four_fold() -> Self {
        WordPolicy::Products {
            min_len: 4,
            max_len: 4,
            last_factors: Some(vec![0, 1, 2, 3]),
        }
    }

    pub fn three_fold() -> Self {
        WordPolicy::Products {
            min_len: 3,
            max_len: 3,
            last_factors: None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            WordPolicy::Closure => "closure".into(),
            WordPolicy::Products {
                min_len,
                max_len,
                last_factors,
            } => {
                let len = if min_len == max_len { format!("{min_len}") } else { format!("{min_len}..{max_len}") };
                match last_factors {
                    Some(l) => format!("products of length {len}, last factor in {:?}", l.iter().map(|i| i + 1).collect::<Vec<_>>()),
                    None => format!("products of length {len}"),
                }
            }
        }
    }
}

/// Words under a product policy, in lexicographic order of factor indices.
pub fn generate_words<R: Ring>(
    alg: &CliffordAlgebra<R>,
    gens: &[CliffordElt<R::E>],
    policy: &WordPolicy,
) -> Result<Vec<CliffordElt<R::E>>, CliffordError> {
    if gens.is_empty() {
        return Err(CliffordError::NoGenerators);
    }
    match policy {
        WordPolicy::Products {
            min_len,
            max_len,
            last_factors,
        } => {
            let all: Vec<usize> = (0..gens.len()).collect();
            let last = last_factors.clone().unwrap_or_else(|| all.clone());
            let mut out = Vec::new();
            let mut prefixes = vec![alg.one()];
            for len in 1..=*max_len {
                if len >= *min_len {
                    for p in &prefixes {
                        for &l in &last {
                            out.push(alg.mul(p, &gens[l]));
                        }
                    }
                }
                if len < *max_len {
                    prefixes = prefixes.iter().flat_map(|p| all.iter().map(move |&g| (p, g))).map(|(p, g)| alg.mul(p, &gens[g])).collect();
                }
            }
            Ok(out)
        }
        WordPolicy::Closure => Err(CliffordError::ClosureNeedsModulus),
    }
}

/// Basis over F_p of the algebra generated (without unit) by `gens`.
pub fn closure_basis(
    alg: &CliffordAlgebra<PrimeField>,
    gens: &[CliffordElt<u64>],
) -> Result<Vec<CliffordElt<u64>>, CliffordError> {
    if gens.is_empty() {
        return Err(CliffordError::NoGenerators);
    }
    let mut ech = Echelon::new(*alg.ring());
    let mut basis = Vec::new();
    let mut frontier = Vec::new();
    for g in gens {
        if ech.insert(g) {
            basis.push(g.clone());
            frontier.push(g.clone());
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for b in &frontier {
            for g in gens {
                let w = alg.mul(b, g);
                if ech.insert(&w) {
                    basis.push(w.clone());
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    Ok(basis)
}

/// Rank of one word policy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub generators: Vec<String>,
    pub policy: WordPolicy,
    pub policy_label: String,
    pub modulus: u64,
    pub words: usize,
    pub rank: usize,
    /// A rank mod p is a lower bound for the rank over Q.
    pub bound_direction: String,
}

/// Rank of the words (or closure) generated by rational generators mod `p`.
pub fn rank_report(
    gram: &QMatrix,
    gens: &[CliffordElt<Q>],
    policy: &WordPolicy,
    p: u64,
) -> Result<RankReport, CliffordError> {
    let alg = CliffordAlgebra::mod_p(gram, p)?;
    let gp = gens.iter().map(|g| alg.convert(g)).collect::<Result<Vec<_>, _>>()?;
    let (words, rank) = match policy {
        WordPolicy::Closure => {
            let b = closure_basis(&alg, &gp)?;
            (b.len(), b.len())
        }
        _ => {
            let w = generate_words(&alg, &gp, policy)?;
            (w.len(), span_rank_mod(&w, *alg.ring()))
        }
    };
    let ralg = CliffordAlgebra::rational(gram)?;
    Ok(RankReport {
        generators: gens.iter().map(|g| ralg.render(g)).collect(),
        policy: policy.clone(),
        policy_label: policy.label(),
        modulus: p,
        words,
        rank,
        bound_direction: "rank mod p <= rank over Q".into(),
    })
}

pub fn is_scalar<E>(x: &CliffordElt<E>) -> bool {
    x.terms.keys().all(|m| *m == 0)
}

/// Rational scalar part, if `x` is a scalar.
pub fn scalar_value(x: &CliffordElt<Q>) -> Option<Q> {
    if is_scalar(x) {
        Some(x.terms.get(&0).cloned().unwrap_or_else(Q::zero))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn diag(entries: &[i64]) -> QMatrix {
        let n = entries.len();
        let mut m = arith::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[i][i] = q(*e);
        }
        m
    }

    #[test]
    fn quaternion_relation() {
        let alg = CliffordAlgebra::rational(&diag(&[-1, -1])).unwrap();
        let e12 = alg.mul(&alg.gen(1), &alg.gen(2));
        assert_eq!(alg.mul(&e12, &e12), alg.scalar(q(-1)));
        assert_eq!(alg.mul(&alg.gen(1), &alg.gen(1)), alg.scalar(q(-1)));
    }

    #[test]
    fn defining_relations_non_diagonal() {
        let g = arith::from_ints([[1, 1, 1], [1, 1, 0], [1, 0, 0]]);
        let alg = CliffordAlgebra::rational(&g).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                let a = alg.mul(&alg.gen(i), &alg.gen(j));
                let b = alg.mul(&alg.gen(j), &alg.gen(i));
                assert_eq!(alg.add(&a, &b), alg.scalar(q(2) * &g[i - 1][j - 1]));
            }
        }
    }

    #[test]
    fn reverse_examples() {
        let alg = CliffordAlgebra::rational(&diag(&[1, -1, 2])).unwrap();
        assert_eq!(alg.reverse(&alg.one()), alg.one());
        assert_eq!(alg.reverse(&alg.gen(2)), alg.gen(2));
        let e12 = alg.mul(&alg.gen(1), &alg.gen(2));
        assert_eq!(alg.reverse(&e12), alg.neg(&e12));
    }

    #[test]
    fn traces() {
        let alg = CliffordAlgebra::rational(&diag(&[1, -1, 3])).unwrap();
        assert_eq!(alg.trace_right_mult(&alg.one()), q(8));
        for i in 1..=3 {
            assert_eq!(alg.trace_right_mult(&alg.gen(i)), q(0));
        }
    }

    #[test]
    fn left_rep_and_coords() {
        let alg = CliffordAlgebra::rational(&diag(&[1, 1, -1])).unwrap();
        let id = alg.left_rep(&alg.one());
        for (m, col) in id.cols.iter().enumerate() {
            assert_eq!(col.len(), 1);
            assert_eq!(col.get(&(m as u32)), Some(&q(1)));
        }
        let x = alg.add(&alg.gen(1), &alg.scalar(q(3)));
        assert_eq!(alg.from_coords(&alg.coords(&x)), x);
        let lr = alg.left_rep(&x);
        assert_eq!(alg.from_coords(&(0..8).map(|m| lr.cols[0].get(&m).cloned().unwrap_or_default()).collect::<Vec<_>>()), x);
    }

    #[test]
    fn ranks() {
        let alg = CliffordAlgebra::rational(&diag(&[1, 1, 1, 1])).unwrap();
        assert_eq!(span_rank(&[alg.one()], 101).unwrap(), 1);
        let evens: Vec<_> = (0..16u32).filter(|m| m.count_ones() % 2 == 0).map(|m| alg.monomial(m, q(1))).collect();
        assert_eq!(span_rank(&evens, 101).unwrap(), 8);
        assert_eq!(span_rank(&[alg.scalar(crate::arith::qf(1, 101))], 101).unwrap_err(), CliffordError::DenominatorDivisible("1/101".into(), 101));
        assert_eq!(span_rank(&[], 4).unwrap_err(), CliffordError::NotPrime(4));
    }

    #[test]
    fn word_counts() {
        let alg = CliffordAlgebra::mod_p(&diag(&[1, 1, 1]), 101).unwrap();
        let gens: Vec<_> = (1..=3).map(|i| alg.gen(i)).collect();
        let one = WordPolicy::Products { min_len: 1, max_len: 1, last_factors: None };
        assert_eq!(generate_words(&alg, &gens, &one).unwrap(), gens);
        let w = generate_words(&alg, &gens, &WordPolicy::Products { min_len: 3, max_len: 3, last_factors: Some(vec![0]) }).unwrap();
        assert_eq!(w.len(), 9);
    }

    #[test]
    fn render_format() {
        let alg = CliffordAlgebra::rational(&diag(&[1, 1, 1, 1])).unwrap();
        let x = alg.from_terms(&[(q(1), &[1, 4]), (q(-1), &[2, 3]), (q(2), &[])]).unwrap();
        assert_eq!(alg.render(&x), "2 + e1e4 - e2e3");
    }
}
