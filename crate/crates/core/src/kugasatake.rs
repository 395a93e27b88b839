//! Kuga-Satake layer: the nine generators coming from `f1 f2`, their rank
//! mod p, and the complex structure, polarization and embedding of `V` on
//! small rational instances.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, q, QMatrix, Q};
use crate::clifford::{
    indices_of, monomial_name, rank_report, scalar_value, CliffordAlgebra, CliffordElt, CliffordError, Rationals,
    RankReport, WordPolicy,
};
use crate::field::{make_field, EltCoords, FieldElt, FieldError, SymCubicField, REFERENCE_MATRIX};
use crate::k3lattice::{build_transcendental, K3Error, TranscendentalSpace};
use crate::qform::{self, QFormError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KsError {
    #[error("Gram matrix is not block diagonal with 3x3 blocks: entry ({0}, {1}) couples blocks")]
    NotBlockDiagonal(usize, usize),
    #[error("generator {0} differs from the golden value: got {1}")]
    GoldenMismatch(usize, String),
    #[error("{0} is not of grade one")]
    NotGradeOne(String),
    #[error("f1 and f2 do not anticommute")]
    NotOrthogonal,
    #[error("f1^2 and f2^2 must be equal positive scalars: {0}")]
    BadSquares(String),
    #[error("Gram matrix is not diagonal")]
    NotDiagonal,
    #[error("need two generators for {0:?}, found {1}")]
    TooFewGenerators(PairChoice, usize),
    #[error("no sign makes E(x, Jy) positive definite: {0}")]
    NoValidSign(String),
    #[error("e is not invertible")]
    NotInvertible,
    #[error("e must be odd so that x -> v x e preserves the even part")]
    ParityViolation,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    K3(#[from] K3Error),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    QForm(#[from] QFormError),
}

/// Clifford element with cubic-field coefficients.
pub type FieldClifford = BTreeMap<u32, FieldElt>;

fn fc_add(field: &SymCubicField, into: &mut FieldClifford, m: u32, c: FieldElt) {
    let s = &into.get(&m).cloned().unwrap_or_else(|| field.zero()) + &c;
    if s.is_zero() {
        into.remove(&m);
    } else {
        into.insert(m, s);
    }
}

fn fc_mul(alg: &CliffordAlgebra<Rationals>, field: &SymCubicField, x: &FieldClifford, y: &FieldClifford) -> FieldClifford {
    let mut out = BTreeMap::new();
    for (m1, c1) in x {
        for (m2, c2) in y {
            let prod = alg.mul(&alg.monomial(*m1, Q::one()), &alg.monomial(*m2, Q::one()));
            let cc = c1 * c2;
            for (m, r) in prod.terms {
                fc_add(field, &mut out, m, cc.scale(&r));
            }
        }
    }
    out
}

pub fn render_fc(x: &FieldClifford) -> String {
    if x.is_empty() {
        return "0".into();
    }
    let mut keys: Vec<u32> = x.keys().copied().collect();
    keys.sort_by_key(|m| indices_of(*m));
    keys.iter().map(|m| format!("({}){}", x[m], monomial_name(*m))).collect::<Vec<_>>().join(" + ")
}

/// `f1 f2` for `f1 = u0 + x1r u1 + x2r u2`, `f2 = x1i u1 + x2i u2`, grouped by
/// x-monomial.
#[derive(Clone, Debug)]
pub struct SymbolicPeriodProduct {
    pub field: SymCubicField,
    /// `u_k = b1 e_{3k+1} + b2 e_{3k+2} + b3 e_{3k+3}`.
    pub u: [FieldClifford; 3],
    /// Coefficients of `x1i`, `x2i`, `x1r x1i`, `x1r x2i`, `x2r x1i`, `x2r x2i`.
    pub terms: Vec<(String, FieldClifford)>,
    /// `u0 u1`, `u1 u2`, `u0 u2`.
    pub products: [FieldClifford; 3],
    /// `u1² `, `u2²` as field elements.
    pub squares: [FieldElt; 2],
    /// `u1 u2 + u2 u1 = 0`.
    pub anticommute: bool,
}

pub fn expand_f1f2(space: &TranscendentalSpace) -> Result<SymbolicPeriodProduct, KsError> {
    let gram = space.d.gram();
    for i in 0..9 {
        for j in 0..9 {
            if i / 3 != j / 3 && !gram[i][j].is_zero() {
                return Err(KsError::NotBlockDiagonal(i + 1, j + 1));
            }
        }
    }
    let field = &space.field;
    let alg = CliffordAlgebra::rational(gram)?;
    let b = field.b_basis();
    let u: [FieldClifford; 3] = [0, 1, 2].map(|k| (0..3).map(|i| (1u32 << (3 * k + i), b[i].clone())).collect());
    let m = |x: &FieldClifford, y: &FieldClifford| fc_mul(&alg, field, x, y);
    let u01 = m(&u[0], &u[1]);
    let u02 = m(&u[0], &u[2]);
    let u12 = m(&u[1], &u[2]);
    let u21 = m(&u[2], &u[1]);
    let u11 = m(&u[1], &u[1]);
    let u22 = m(&u[2], &u[2]);
    let mut sum = u12.clone();
    for (k, c) in &u21 {
        fc_add(field, &mut sum, *k, c.clone());
    }
    let scalar = |x: &FieldClifford| -> FieldElt {
        assert!(x.keys().all(|k| *k == 0), "square of a vector is a scalar");
        x.get(&0).cloned().unwrap_or_else(|| field.zero())
    };
    let squares = [scalar(&u11), scalar(&u22)];
    let terms = vec![
        ("x1i".to_string(), u01.clone()),
        ("x2i".to_string(), u02.clone()),
        ("x1r*x1i".to_string(), u11),
        ("x1r*x2i".to_string(), u12.clone()),
        ("x2r*x1i".to_string(), u21),
        ("x2r*x2i".to_string(), u22),
    ];
    Ok(SymbolicPeriodProduct {
        field: field.clone(),
        u,
        terms,
        products: [u01, u12, u02],
        squares,
        anticommute: sum.is_empty(),
    })
}

/// Golden values of the generators from `u0 u1`, in the order (A², A, I).
pub const GOLDEN_GENERATORS: [&str; 3] = [
    "e1e4+e2e6+e3e5+e1e5+e2e4",
    "e2e5+e1e6+e3e4-e2e6-e3e5",
    "-e1e5-e2e4+e2e5-e2e6-e3e5+e3e6",
];

/// Parses sums like `e1e4-e2e6` with unit coefficients.
pub fn parse_bivector_sum(s: &str) -> CliffordElt<Q> {
    let mut out = CliffordElt::zero();
    let s = s.replace(' ', "");
    let mut sign = Q::one();
    let mut cur = String::new();
    let flush = |cur: &mut String, sign: &Q, out: &mut CliffordElt<Q>| {
        if cur.is_empty() {
            return;
        }
        let idx: Vec<usize> = cur.split('e').filter(|t| !t.is_empty()).map(|t| t.parse().unwrap()).collect();
        let mask = crate::clifford::mask_of(&idx);
        let v = out.terms.get(&mask).cloned().unwrap_or_else(Q::zero) + sign;
        if v.is_zero() {
            out.terms.remove(&mask);
        } else {
            out.terms.insert(mask, v);
        }
        cur.clear();
    };
    for ch in s.chars() {
        match ch {
            '+' | '-' => {
                flush(&mut cur, &sign, &mut out);
                sign = if ch == '-' { -Q::one() } else { Q::one() };
            }
            _ => cur.push(ch),
        }
    }
    flush(&mut cur, &sign, &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    /// `G1..G9`: (A², A, I) components of `u0u1`, `u1u2`, `u0u2`.
    pub gens: Vec<CliffordElt<Q>>,
    pub golden_match: [bool; 3],
}

pub fn build_generators(product: &SymbolicPeriodProduct) -> Result<GeneratorSet, KsError> {
    let mut gens = Vec::with_capacity(9);
    for p in &product.products {
        // coordinate index in (I, A, A²) for the components A², A, I
        for coord in [2usize, 1, 0] {
            let mut g = CliffordElt::zero();
            for (m, c) in p {
                let v = c.coords()[coord].clone();
                if !v.is_zero() {
                    g.terms.insert(*m, v);
                }
            }
            gens.push(g);
        }
    }
    let golden_match = [0, 1, 2].map(|i| gens[i] == parse_bivector_sum(GOLDEN_GENERATORS[i]));
    Ok(GeneratorSet { gens, golden_match })
}

/// Checks the first three generators against the golden values.
pub fn check_golden(set: &GeneratorSet) -> Result<(), KsError> {
    let alg = CliffordAlgebra::rational(&arith::identity(9))?;
    for (i, ok) in set.golden_match.iter().enumerate() {
        if !ok {
            return Err(KsError::GoldenMismatch(i + 1, alg.render(&set.gens[i])));
        }
    }
    Ok(())
}

/// Relations used for the Clifford algebra of `D` in the rank computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramModel {
    /// `e_i e_j + e_j e_i = 2 D_ij` with the block-diagonal `D` itself.
    Exact,
    /// Orthogonal relations `e_i² = d_i` with `d` the diagonalization of `D`,
    /// keeping the generator labels.
    #[default]
    Diagonalized,
}

pub fn model_gram(space: &TranscendentalSpace, model: GramModel) -> Result<QMatrix, KsError> {
    Ok(match model {
        GramModel::Exact => space.d.gram().clone(),
        GramModel::Diagonalized => {
            let dg = qform::diagonalize(&space.d)?;
            let n = dg.entries.len();
            let mut m = arith::zeros(n, n);
            for (i, e) in dg.entries.iter().enumerate() {
                m[i][i] = e.clone();
            }
            m
        }
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prop51Config {
    pub matrix: [[i64; 3]; 3],
    pub phi: [EltCoords; 3],
    pub modulus: u64,
    pub policies: Vec<WordPolicy>,
    pub gram_model: GramModel,
}

impl Default for Prop51Config {
    fn default() -> Self {
        Prop51Config {
            matrix: REFERENCE_MATRIX,
            phi: reference_phi_coords(),
            modulus: 101,
            policies: vec![WordPolicy::three_fold(), WordPolicy::restricted_four_fold(), WordPolicy::Closure],
            gram_model: GramModel::Diagonalized,
        }
    }
}

/// `(A, A² − A − I, I)` over the power basis.
pub fn reference_phi_coords() -> [EltCoords; 3] {
    [[0, 1, 0], [-1, -1, 1], [1, 0, 0]].map(|c| EltCoords(c.map(q)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prop51Report {
    pub gram_model: GramModel,
    #[serde(with = "crate::arith::qmat")]
    pub relation_gram: QMatrix,
    pub generators: Vec<String>,
    pub golden_match: [bool; 3],
    pub ranks: Vec<RankReport>,
}

pub fn run_prop51(config: &Prop51Config) -> Result<Prop51Report, KsError> {
    let field = make_field(config.matrix)?;
    let phi = config.phi.clone().map(|c| field.elt(c.0));
    let space = build_transcendental(&field, phi)?;
    run_prop51_on(&space, config.modulus, &config.policies, config.gram_model)
}

pub fn run_prop51_on(
    space: &TranscendentalSpace,
    modulus: u64,
    policies: &[WordPolicy],
    model: GramModel,
) -> Result<Prop51Report, KsError> {
    let product = expand_f1f2(space)?;
    let set = build_generators(&product)?;
    let gram = model_gram(space, model)?;
    let ranks = policies
        .iter()
        .map(|p| rank_report(&gram, &set.gens, p, modulus))
        .collect::<Result<Vec<_>, _>>()?;
    let alg = CliffordAlgebra::rational(&gram)?;
    Ok(Prop51Report {
        gram_model: model,
        relation_gram: gram,
        generators: set.gens.iter().map(|g| alg.render(g)).collect(),
        golden_match: set.golden_match,
        ranks,
    })
}

/// Even monomials in increasing mask order.
pub fn even_basis(n: usize) -> Vec<u32> {
    (0..(1u32 << n)).filter(|m| m.count_ones() % 2 == 0).collect()
}

/// Matrix of a linear map of the even part; column `c` is the image of basis `c`.
pub fn even_operator<F>(alg: &CliffordAlgebra<Rationals>, f: F) -> QMatrix
where
    F: Fn(&CliffordElt<Q>) -> CliffordElt<Q>,
{
    let basis = even_basis(alg.n());
    let pos: BTreeMap<u32, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut out = arith::zeros(basis.len(), basis.len());
    for (c, m) in basis.iter().enumerate() {
        let img = f(&alg.monomial(*m, Q::one()));
        for (k, v) in img.terms {
            let r = *pos.get(&k).expect("image stays in the even part");
            out[r][c] = v;
        }
    }
    out
}

fn is_grade_one(x: &CliffordElt<Q>) -> bool {
    !x.is_zero() && x.terms.keys().all(|m| m.count_ones() == 1)
}

/// Left multiplication by `f1 f2 / f1²` on the even part.
#[derive(Clone, Debug)]
pub struct ComplexStructure {
    pub f1f2: CliffordElt<Q>,
    pub norm: Q,
    pub j: QMatrix,
}

impl ComplexStructure {
    pub fn squares_to_minus_one(&self) -> bool {
        let n = self.j.len();
        arith::mat_mul(&self.j, &self.j) == arith::scale(&arith::identity(n), &q(-1))
    }

    /// `f1 f2 / f1²` as a Clifford element.
    pub fn element(&self) -> CliffordElt<Q> {
        let inv = Q::one() / &self.norm;
        CliffordElt {
            terms: self.f1f2.terms.iter().map(|(m, c)| (*m, c * &inv)).collect(),
        }
    }
}

pub fn complex_structure(
    alg: &CliffordAlgebra<Rationals>,
    f1: &CliffordElt<Q>,
    f2: &CliffordElt<Q>,
) -> Result<ComplexStructure, KsError> {
    for f in [f1, f2] {
        if !is_grade_one(f) {
            return Err(KsError::NotGradeOne(alg.render(f)));
        }
    }
    let f1f2 = alg.mul(f1, f2);
    if !alg.add(&f1f2, &alg.mul(f2, f1)).is_zero() {
        return Err(KsError::NotOrthogonal);
    }
    let s1 = scalar_value(&alg.mul(f1, f1));
    let s2 = scalar_value(&alg.mul(f2, f2));
    let norm = match (s1, s2) {
        (Some(a), Some(b)) if a == b && a.is_positive() => a,
        (a, b) => return Err(KsError::BadSquares(format!("{a:?} vs {b:?}"))),
    };
    let el = CliffordElt {
        terms: f1f2.terms.iter().map(|(m, c)| (*m, c / &norm)).collect(),
    };
    let j = even_operator(alg, |x| alg.mul(&el, x));
    Ok(ComplexStructure { f1f2, norm, j })
}

/// `E(v, w) = Tr(s · e_a e_b · rev(v) · w)` on the even part.
#[derive(Clone, Debug)]
pub struct Polarization {
    pub sign: i8,
    /// 1-based indices of `e_a`, `e_b`.
    pub pair: (usize, usize),
    pub e: QMatrix,
    /// Matrix of `(x, y) ↦ E(x, J y)`.
    pub ej: QMatrix,
    pub ej_symmetric: bool,
    pub positive_definite: bool,
}

/// Positive definiteness via the leading principal minors, read off as the
/// pivots of elimination without row exchanges.
pub fn positive_definite_by_minors(m: &QMatrix) -> bool {
    let n = m.len();
    let mut a = m.clone();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

fn polarization_with(alg: &CliffordAlgebra<Rationals>, cs: &ComplexStructure, pair: (usize, usize), sign: i8) -> Polarization {
    let basis = even_basis(alg.n());
    let eab = alg.scale(&alg.mul(&alg.gen(pair.0), &alg.gen(pair.1)), &q(sign as i64));
    let revs: Vec<CliffordElt<Q>> = basis.iter().map(|m| alg.mul(&eab, &alg.reverse(&alg.monomial(*m, Q::one())))).collect();
    let nb = basis.len();
    let mut e = arith::zeros(nb, nb);
    for r in 0..nb {
        for c in 0..nb {
            e[r][c] = alg.trace_right_mult(&alg.mul(&revs[r], &alg.monomial(basis[c], Q::one())));
        }
    }
    let ej = arith::mat_mul(&e, &cs.j);
    let ej_symmetric = arith::is_symmetric(&ej);
    let positive_definite = ej_symmetric && positive_definite_by_minors(&ej);
    Polarization {
        sign,
        pair,
        e,
        ej,
        ej_symmetric,
        positive_definite,
    }
}

/// Which two generators enter `e_a e_b` in the polarization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairChoice {
    /// First two generators with `e_i² < 0`.
    NegativeSquares,
    /// First two generators with `e_i² > 0`, the sign of `f1²` and `f2²`.
    PositiveSquares,
}

pub fn ks_polarization(
    alg: &CliffordAlgebra<Rationals>,
    cs: &ComplexStructure,
    choice: PairChoice,
) -> Result<Polarization, KsError> {
    let g = alg.gram();
    let n = alg.n();
    for i in 0..n {
        for j in 0..n {
            if i != j && !g[i][j].is_zero() {
                return Err(KsError::NotDiagonal);
            }
        }
    }
    let picked: Vec<usize> = (0..n)
        .filter(|&i| match choice {
            PairChoice::NegativeSquares => g[i][i].is_negative(),
            PairChoice::PositiveSquares => g[i][i].is_positive(),
        })
        .map(|i| i + 1)
        .collect();
    if picked.len() < 2 {
        return Err(KsError::TooFewGenerators(choice, picked.len()));
    }
    let pair = (picked[0], picked[1]);
    let mut diag = Vec::new();
    for sign in [1i8, -1] {
        let p = polarization_with(alg, cs, pair, sign);
        if p.positive_definite {
            return Ok(p);
        }
        let sig = qform::QForm::new(arith::mat_add(&p.ej, &arith::transpose(&p.ej)))
            .ok()
            .and_then(|f| qform::signature(&f).ok());
        diag.push(format!("sign {sign}: symmetric part signature {sig:?}"));
    }
    Err(KsError::NoValidSign(diag.join("; ")))
}

/// `Φ_v(x) = v x e` on the even part, for `v` running over the generators.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub e: CliffordElt<Q>,
    pub maps: Vec<QMatrix>,
}

impl Embedding {
    /// `Φ_v` for `v = Σ c_i e_i`.
    pub fn phi(&self, v: &[Q]) -> QMatrix {
        let nb = self.maps[0].len();
        v.iter().zip(&self.maps).fold(arith::zeros(nb, nb), |acc, (c, m)| arith::mat_add(&acc, &arith::scale(m, c)))
    }
}

pub fn embed_v(alg: &CliffordAlgebra<Rationals>, e: &CliffordElt<Q>) -> Result<Embedding, KsError> {
    if e.is_zero() || !e.is_odd() {
        return Err(KsError::ParityViolation);
    }
    let invertible = match scalar_value(&alg.mul(e, &alg.reverse(e))) {
        Some(s) => !s.is_zero(),
        None => alg.dim() <= 64 && {
            let lr = alg.left_rep(e);
            let dense: QMatrix = (0..alg.dim())
                .map(|r| lr.cols.iter().map(|c| c.get(&(r as u32)).cloned().unwrap_or_else(Q::zero)).collect())
                .collect();
            arith::rank(&dense) == alg.dim()
        },
    };
    if !invertible {
        return Err(KsError::NotInvertible);
    }
    let maps = (1..=alg.n())
        .map(|i| {
            let v = alg.gen(i);
            even_operator(alg, |x| alg.mul(&alg.mul(&v, x), e))
        })
        .collect();
    Ok(Embedding { e: e.clone(), maps })
}

/// How `Φ_v` interacts with `J`, per generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivarianceReport {
    /// `Φ_{e_i} J = J Φ_{e_i}`.
    pub commutes: Vec<bool>,
    /// `J Φ_v − Φ_v J = Φ_{[c, v]}` with `c = f1 f2 / f1²`, for every generator.
    pub commutator_identity: bool,
}

pub fn equivariance(alg: &CliffordAlgebra<Rationals>, cs: &ComplexStructure, emb: &Embedding) -> EquivarianceReport {
    let c = cs.element();
    let mut commutes = Vec::new();
    let mut identity = true;
    for (i, m) in emb.maps.iter().enumerate() {
        let jp = arith::mat_mul(&cs.j, m);
        let pj = arith::mat_mul(m, &cs.j);
        commutes.push(jp == pj);
        let v = alg.gen(i + 1);
        let br = alg.sub(&alg.mul(&c, &v), &alg.mul(&v, &c));
        let coeffs: Vec<Q> = (0..alg.n()).map(|k| br.terms.get(&(1 << k)).cloned().unwrap_or_else(Q::zero)).collect();
        let grade_one = br.terms.keys().all(|m| m.count_ones() == 1);
        let diff = arith::mat_add(&jp, &arith::scale(&pj, &q(-1)));
        identity &= grade_one && diff == emb.phi(&coeffs);
    }
    EquivarianceReport {
        commutes,
        commutator_identity: identity,
    }
}

/// Induced pairing `P(v, w) = Tr(Φ_v Φ_w*)` with `Φ* = G⁻¹ Φᵀ G` the `E`-adjoint.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PullbackReport {
    #[serde(with = "crate::arith::qmat")]
    pub pairing: QMatrix,
    #[serde(with = "crate::arith::qstr")]
    pub lambda: Q,
    pub proportional: bool,
    pub lambda_positive: bool,
    /// `μ` with `P = μ · (−gram)`; `−gram` is the Hodge-Riemann polarization
    /// of a weight-two structure whose period plane is positive for `gram`.
    #[serde(with = "crate::arith::qstr")]
    pub weight_two_multiple: Q,
}

pub fn pullback_check(alg: &CliffordAlgebra<Rationals>, pol: &Polarization, emb: &Embedding) -> Result<PullbackReport, KsError> {
    let g = &pol.e;
    let ginv = arith::inverse(g).ok_or(KsError::NotInvertible)?;
    let n = alg.n();
    let adj: Vec<QMatrix> = emb.maps.iter().map(|m| arith::mat_mul(&arith::mat_mul(&ginv, &arith::transpose(m)), g)).collect();
    let mut pairing = arith::zeros(n, n);
    for v in 0..n {
        for w in 0..n {
            let prod = arith::mat_mul(&emb.maps[v], &adj[w]);
            pairing[v][w] = (0..prod.len()).map(|i| prod[i][i].clone()).sum();
        }
    }
    let gram = alg.gram();
    let (mut i0, mut j0) = (0, 0);
    'find: for i in 0..n {
        for j in 0..n {
            if !gram[i][j].is_zero() {
                (i0, j0) = (i, j);
                break 'find;
            }
        }
    }
    let lambda = &pairing[i0][j0] / &gram[i0][j0];
    let proportional = pairing == arith::scale(gram, &lambda);
    Ok(PullbackReport {
        lambda_positive: lambda.is_positive(),
        weight_two_multiple: -lambda.clone(),
        pairing,
        lambda,
        proportional,
    })
}

/// Pullback recomputed with `e` replaced by `e · g`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RightInvariance {
    pub base: PullbackReport,
    pub moved: PullbackReport,
    /// `λ(e g) / λ(e)`.
    #[serde(with = "crate::arith::qstr")]
    pub ratio: Q,
    pub preserved: bool,
}

pub fn right_invariance(
    alg: &CliffordAlgebra<Rationals>,
    pol: &Polarization,
    e: &CliffordElt<Q>,
    g: &CliffordElt<Q>,
) -> Result<RightInvariance, KsError> {
    if !g.is_even() {
        return Err(KsError::ParityViolation);
    }
    let base = pullback_check(alg, pol, &embed_v(alg, e)?)?;
    let moved = pullback_check(alg, pol, &embed_v(alg, &alg.mul(e, g))?)?;
    let ratio = if base.lambda.is_zero() { Q::zero() } else { &moved.lambda / &base.lambda };
    let preserved = base.proportional && moved.proportional && ratio.is_positive();
    Ok(RightInvariance {
        base,
        moved,
        ratio,
        preserved,
    })
}

/// Everything checked on one small rational instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmallInstanceReport {
    pub n: usize,
    pub j_squared_minus_one: bool,
    /// Outcome with the two negative-square generators, when it fails.
    pub negative_pair: Option<String>,
    pub polarization_pair: (usize, usize),
    pub polarization_sign: i8,
    pub polarization_positive: bool,
    pub equivariance: EquivarianceReport,
    pub pullback: PullbackReport,
    pub right_invariance: RightInvariance,
}

/// `diag(1, 1, −1, −1)`, `f1 = e1`, `f2 = e2`, `e = e1`, `g = 2 + e1e2`.
pub fn small_instance() -> Result<SmallInstanceReport, KsError> {
    let gram = QMatrix::from(vec![
        vec![q(1), q(0), q(0), q(0)],
        vec![q(0), q(1), q(0), q(0)],
        vec![q(0), q(0), q(-1), q(0)],
        vec![q(0), q(0), q(0), q(-1)],
    ]);
    let alg = CliffordAlgebra::rational(&gram)?;
    let cs = complex_structure(&alg, &alg.gen(1), &alg.gen(2))?;
    let negative_pair = ks_polarization(&alg, &cs, PairChoice::NegativeSquares).err().map(|e| e.to_string());
    let pol = ks_polarization(&alg, &cs, PairChoice::PositiveSquares)?;
    let e = alg.gen(1);
    let emb = embed_v(&alg, &e)?;
    let equivariance = equivariance(&alg, &cs, &emb);
    let pullback = pullback_check(&alg, &pol, &emb)?;
    let g = alg.add(&alg.scalar(q(2)), &alg.mul(&alg.gen(1), &alg.gen(2)));
    let right_invariance = right_invariance(&alg, &pol, &e, &g)?;
    Ok(SmallInstanceReport {
        n: 4,
        j_squared_minus_one: cs.squares_to_minus_one(),
        negative_pair,
        polarization_pair: pol.pair,
        polarization_sign: pol.sign,
        polarization_positive: pol.positive_definite,
        equivariance,
        pullback,
        right_invariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn reference_space() -> TranscendentalSpace {
        let f = make_field(REFERENCE_MATRIX).unwrap();
        let phi = reference_phi_coords().map(|c| f.elt(c.0));
        build_transcendental(&f, phi).unwrap()
    }

    #[test]
    fn golden_generators() {
        let s = reference_space();
        let p = expand_f1f2(&s).unwrap();
        assert!(p.anticommute);
        let set = build_generators(&p).unwrap();
        assert_eq!(set.golden_match, [true, true, true]);
        assert!(set.gens.iter().all(|g| g.is_even()));
        check_golden(&set).unwrap();
    }

    #[test]
    fn scalar_terms() {
        let s = reference_space();
        let p = expand_f1f2(&s).unwrap();
        assert!(p.terms[2].1.keys().all(|k| *k == 0));
        let mut sum = p.terms[3].1.clone();
        for (k, c) in &p.terms[4].1 {
            fc_add(&s.field, &mut sum, *k, c.clone());
        }
        assert!(sum.is_empty());
    }

    #[test]
    fn n3_structure() {
        let gram = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)], vec![q(0), q(0), q(-1)]];
        let alg = CliffordAlgebra::rational(&gram).unwrap();
        let cs = complex_structure(&alg, &alg.gen(1), &alg.gen(2)).unwrap();
        assert!(cs.squares_to_minus_one());
        let scaled = complex_structure(&alg, &alg.scale(&alg.gen(1), &q(3)), &alg.scale(&alg.gen(2), &q(3))).unwrap();
        assert_eq!(scaled.j, cs.j);
        assert_eq!(
            ks_polarization(&alg, &cs, PairChoice::NegativeSquares).unwrap_err(),
            KsError::TooFewGenerators(PairChoice::NegativeSquares, 1)
        );
        let emb = embed_v(&alg, &alg.gen(1)).unwrap();
        // Φ_{e1}(1) = e1 e1 = 1: column 0, row 0
        assert_eq!(emb.maps[0][0][0], q(1));
        assert!(emb.phi(&[q(0), q(0), q(0)]).iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn small_instance_checks() {
        let r = small_instance().unwrap();
        assert!(r.j_squared_minus_one);
        assert!(r.polarization_positive);
        assert!(r.pullback.proportional);
        assert_eq!(r.pullback.lambda, q(-8));
        assert_eq!(r.pullback.weight_two_multiple, q(8));
        assert!(r.right_invariance.preserved);
        assert_eq!(r.right_invariance.ratio, q(5));
        assert!(r.negative_pair.is_some());
        assert!(r.equivariance.commutator_identity);
        assert_eq!(r.equivariance.commutes, vec![false, false, true, true]);
    }
}
