//! K3 lattices and the rank-9 transcendental space with complex multiplication
//! by a totally real cubic field.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, fmt_q, q, QMatrix, Q};
use crate::field::{rational_square_sweep, FieldElt, FieldError, SignPattern, SymCubicField};
use crate::interval::{decimal, ComplexInterval, Interval};
use crate::qform::{self, ComplementCertificate, QForm, QFormError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum K3Error {
    #[error("d must be positive, got {0}")]
    NonPositiveD(i64),
    #[error("phi_{0} is zero")]
    ZeroPhi(usize),
    #[error("CM element is zero")]
    ZeroElement,
    #[error("no embedding where phi_1 and phi_2 are both positive")]
    NoDistinguishedEmbedding,
    #[error("phi sign patterns do not allow a period: {0}")]
    InvalidPattern(String),
    #[error("t = {t} outside (0, sqrt(q1/q2))")]
    TOutOfRange { t: String },
    #[error("signature {found:?}, expected {expected:?}")]
    BadSignature { found: (usize, usize), expected: (usize, usize) },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    QForm(#[from] QFormError),
}

pub fn gram_u() -> QMatrix {
    arith::from_ints([[0, 1], [1, 0]])
}

/// Cartan matrix of E8: chain 1-3-4-5-6-7-8 with 2 attached to 4.
pub fn gram_e8() -> QMatrix {
    let edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];
    let mut m = [[0i64; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        m[a - 1][b - 1] = -1;
        m[b - 1][a - 1] = -1;
    }
    arith::from_ints(m)
}

fn neg_e8() -> QMatrix {
    arith::scale(&gram_e8(), &q(-1))
}

/// `3U ⊕ 2(−E8)`.
pub fn gram_l0() -> QForm {
    let (u, e) = (gram_u(), neg_e8());
    QForm::new(arith::block_diag(&[&u, &u, &u, &e, &e])).expect("symmetric")
}

/// `⟨2d⟩ ⊕ 2U ⊕ 2(−E8)`, the first `U` cut down to the span of `e1 + d f1`.
pub fn gram_l2d(d: i64) -> Result<QForm, K3Error> {
    if d <= 0 {
        return Err(K3Error::NonPositiveD(d));
    }
    let (u, e) = (gram_u(), neg_e8());
    // (e1 + d f1)^2 = 2d in U
    let v = [q(1), q(d)];
    let self_int = (0..2).map(|i| (0..2).map(|j| &v[i] * &u[i][j] * &v[j]).sum::<Q>()).sum::<Q>();
    let head = vec![vec![self_int]];
    Ok(QForm::new(arith::block_diag(&[&head, &u, &u, &e, &e])).expect("symmetric"))
}

pub fn is_even(g: &QMatrix) -> bool {
    g.iter().enumerate().all(|(i, r)| r[i].is_integer() && (r[i].to_integer() % num_bigint::BigInt::from(2)).is_zero())
}

/// `D = diag(F11, F22, F33)` with `Fkk` the regular representation of `phi_k`.
#[derive(Clone, Debug)]
pub struct TranscendentalSpace {
    pub field: SymCubicField,
    pub phi: [FieldElt; 3],
    pub d: QForm,
    pub signature: (usize, usize),
    pub patterns: [SignPattern; 3],
    /// First root at which both `phi_1` and `phi_2` are positive.
    pub chosen_embedding: Option<usize>,
}

impl TranscendentalSpace {
    /// Componentwise sum of the sign patterns of the `phi_k`.
    pub fn pattern_sum(&self) -> (usize, usize) {
        self.patterns.iter().fold((0, 0), |(p, n), s| (p + s.positives, n + s.negatives))
    }
}

pub fn build_transcendental(field: &SymCubicField, phi: [FieldElt; 3]) -> Result<TranscendentalSpace, K3Error> {
    for (k, f) in phi.iter().enumerate() {
        if f.is_zero() {
            return Err(K3Error::ZeroPhi(k + 1));
        }
    }
    let blocks: Vec<QMatrix> = phi.iter().map(|f| f.regular_rep()).collect();
    let d = QForm::new(arith::block_diag(&[&blocks[0], &blocks[1], &blocks[2]]))?;
    let signature = qform::signature(&d)?;
    let patterns = [0, 1, 2].map(|k| phi[k].sign_pattern());
    let chosen_embedding = (0..3).find(|&k| patterns[0].signs[k] > 0 && patterns[1].signs[k] > 0);
    Ok(TranscendentalSpace {
        field: field.clone(),
        phi,
        d,
        signature,
        patterns,
        chosen_embedding,
    })
}

/// Complex multiplication by `a`: three diagonal copies of `regular_rep(a)`.
#[derive(Clone, Debug)]
pub struct CMAction {
    pub a: FieldElt,
    pub m: QMatrix,
}

pub fn cm_action(a: &FieldElt) -> Result<CMAction, K3Error> {
    if a.is_zero() {
        return Err(K3Error::ZeroElement);
    }
    let r = a.regular_rep();
    Ok(CMAction {
        a: a.clone(),
        m: arith::block_diag(&[&r, &r, &r]),
    })
}

impl CMAction {
    /// `Mᵀ D M = D M_{a²}`, exact.
    pub fn scales_form(&self, space: &TranscendentalSpace) -> bool {
        let d = space.d.gram();
        let lhs = arith::mat_mul(&arith::mat_mul(&arith::transpose(&self.m), d), &self.m);
        let sq = cm_action(&self.a.square()).expect("nonzero square");
        lhs == arith::mat_mul(d, &sq.m)
    }

    /// `M D = D Mᵀ`: `M` is self-adjoint for `D`, so it maps the `D`-orthogonal
    /// complement of an eigenvector into itself.
    pub fn self_adjoint(&self, space: &TranscendentalSpace) -> bool {
        let d = space.d.gram();
        arith::mat_mul(&self.m, d) == arith::mat_mul(d, &arith::transpose(&self.m))
    }

    pub fn is_isometry(&self, space: &TranscendentalSpace) -> bool {
        let d = space.d.gram();
        arith::mat_mul(&arith::mat_mul(&arith::transpose(&self.m), d), &self.m) == *d
    }
}

/// True iff `a² ∈ Q`.
pub fn is_cup_preserving(a: &FieldElt) -> bool {
    a.square().is_rational()
}

/// Period vector `v = (b1, b2, b3, b1 x2, b2 x2, b3 x2, b1 x3, b2 x3, b3 x3)` with
/// `x2 = i t` and `x3` real.
#[derive(Clone, Debug)]
pub struct PeriodVector {
    pub symbolic: Vec<String>,
    pub t: Q,
    pub embedding: usize,
    pub x3_sq: Interval,
    pub x3: Interval,
    pub entries: Vec<ComplexInterval>,
    /// `q_k = σ(phi_k) Σ σ(b_i)²`.
    pub q: [Interval; 3],
    /// `vᵀ D v`.
    pub residual: ComplexInterval,
    /// `v̄ᵀ D v`.
    pub hermitian: ComplexInterval,
    pub bits: u32,
}

impl PeriodVector {
    /// Exact rational enclosure of `2 t² q2`, the value `v̄ᵀ D v` must take.
    pub fn expected_hermitian(&self) -> Interval {
        self.q[1].scale(&(q(2) * &self.t * &self.t))
    }

    /// Enclosure of `2 q1`.
    pub fn two_q1(&self) -> Interval {
        self.q[0].scale(&q(2))
    }

    pub fn residual_mag(&self) -> Q {
        self.residual.mag()
    }

    pub fn x3_nonzero(&self) -> bool {
        self.x3_sq.is_positive()
    }
}

fn quad(d: &QMatrix, v: &[ComplexInterval], w: &[ComplexInterval], bits: u32) -> ComplexInterval {
    let zero = ComplexInterval::real(Interval::point(Q::zero()));
    let mut acc = zero.clone();
    for i in 0..v.len() {
        for j in 0..w.len() {
            if d[i][j].is_zero() {
                continue;
            }
            let c = ComplexInterval::real(Interval::point(d[i][j].clone()));
            acc = &acc + &(&(&v[i] * &c) * &w[j]);
        }
        acc = acc.round(bits + 32);
    }
    acc
}

pub fn solve_period(space: &TranscendentalSpace, t: &Q, bits: u32) -> Result<PeriodVector, K3Error> {
    let k = space.chosen_embedding.ok_or(K3Error::NoDistinguishedEmbedding)?;
    if space.patterns[2].signs[k] >= 0 {
        return Err(K3Error::InvalidPattern(format!(
            "phi_3 must be negative at embedding {k}, patterns {:?}",
            space.patterns.map(|p| p.pair())
        )));
    }
    let wb = bits + 32;
    let root = space.field.root(k, wb);
    let sb: Vec<Interval> = space.field.b_basis().iter().map(|b| b.eval_at(&root).round(wb)).collect();
    let norm_b = sb.iter().fold(Interval::point(Q::zero()), |acc, x| &acc + &x.sqr());
    let qs = [0, 1, 2].map(|j| (&space.phi[j].eval_at(&root) * &norm_b).round(wb));
    if !t.is_positive() {
        return Err(K3Error::TOutOfRange { t: fmt_q(t) });
    }
    // x3² = (q2 t² − q1) / q3; q3 < 0 so x3² > 0 iff t² < q1/q2
    let num = &qs[1].scale(&(t * t)) - &qs[0];
    if !num.is_negative() {
        return Err(K3Error::TOutOfRange { t: fmt_q(t) });
    }
    let inv_q3 = Interval::new(Q::one() / &qs[2].hi, Q::one() / &qs[2].lo);
    let x3_sq = (&num * &inv_q3).round(wb);
    let x3 = x3_sq.sqrt(wb);
    let mut entries = Vec::with_capacity(9);
    let mut symbolic = Vec::with_capacity(9);
    for (j, xname) in ["1", "x2", "x3"].iter().enumerate() {
        for (i, b) in sb.iter().enumerate() {
            symbolic.push(if j == 0 { format!("b{}", i + 1) } else { format!("b{}*{xname}", i + 1) });
            entries.push(match j {
                0 => ComplexInterval::real(b.clone()),
                1 => ComplexInterval {
                    re: Interval::point(Q::zero()),
                    im: b.scale(t),
                },
                _ => ComplexInterval::real((b * &x3).round(wb)),
            });
        }
    }
    let d = space.d.gram();
    let conj: Vec<ComplexInterval> = entries.iter().map(|e| e.conj()).collect();
    let residual = quad(d, &entries, &entries, bits);
    let hermitian = quad(d, &conj, &entries, bits);
    Ok(PeriodVector {
        symbolic,
        t: t.clone(),
        embedding: k,
        x3_sq,
        x3,
        entries,
        q: qs,
        residual,
        hermitian,
        bits,
    })
}

/// Largest deviation `|v M_a − σ(a) v|` over the nine coordinates.
pub fn cm_numeric_defect(space: &TranscendentalSpace, period: &PeriodVector, a: &FieldElt) -> Result<Q, K3Error> {
    let cm = cm_action(a)?;
    let root = space.field.root(period.embedding, period.bits + 32);
    let sa = ComplexInterval::real(a.eval_at(&root));
    let mut worst = Q::zero();
    for j in 0..9 {
        let mut acc = ComplexInterval::real(Interval::point(Q::zero()));
        for i in 0..9 {
            if !cm.m[i][j].is_zero() {
                let c = ComplexInterval::real(Interval::point(cm.m[i][j].clone()));
                acc = &acc + &(&period.entries[i] * &c);
            }
        }
        let diff = &acc - &(&sa * &period.entries[j]);
        let m = diff.mag();
        if m > worst {
            worst = m;
        }
    }
    Ok(worst)
}

pub fn embeds_in_k3(space: &TranscendentalSpace, d: i64) -> Result<ComplementCertificate, K3Error> {
    // a signature that does not fit is reported as a real obstruction
    Ok(qform::complement_for_embedding(&space.d, &gram_l2d(d)?)?)
}

/// Evidence that CM by an irrational element is a Hodge endomorphism that does
/// not rescale the cup product.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HodgeReport {
    pub witness: String,
    pub witness_rational: bool,
    /// `Mᵀ D M = D M_{a²}`.
    pub scales_form: bool,
    pub self_adjoint: bool,
    /// Period eigenvector check; `None` without a period.
    pub preserves_period: Option<bool>,
    pub period_defect: Option<String>,
    pub witness_cup_preserving: bool,
    pub sweep_height: i64,
    pub sweep_size: usize,
    pub sweep_all_rational: bool,
    pub established: bool,
}

pub fn hodge_vs_isometry(
    space: &TranscendentalSpace,
    period: Option<&PeriodVector>,
    witness: &FieldElt,
    sweep_height: i64,
) -> Result<HodgeReport, K3Error> {
    let cm = cm_action(witness)?;
    let scales_form = cm.scales_form(space);
    let self_adjoint = cm.self_adjoint(space);
    let (preserves_period, period_defect) = match period {
        Some(p) => {
            let defect = cm_numeric_defect(space, p, witness)?;
            let tol = Q::new(1.into(), num_bigint::BigInt::one() << (p.bits / 2));
            (Some(defect < tol), Some(decimal(&defect, 40)))
        }
        None => (None, None),
    };
    let witness_rational = witness.is_rational();
    let witness_cup_preserving = is_cup_preserving(witness);
    let (sweep_size, sweep_all_rational) = rational_square_sweep(&space.field, sweep_height);
    let established = !witness_rational
        && scales_form
        && self_adjoint
        && preserves_period.unwrap_or(false)
        && !witness_cup_preserving
        && sweep_all_rational;
    Ok(HodgeReport {
        witness: witness.to_string(),
        witness_rational,
        scales_form,
        self_adjoint,
        preserves_period,
        period_defect,
        witness_cup_preserving,
        sweep_height,
        sweep_size,
        sweep_all_rational,
        established,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, REFERENCE_MATRIX};

    #[test]
    fn l0_invariants() {
        let l0 = gram_l0();
        assert_eq!(l0.dim(), 22);
        assert_eq!(qform::signature(&l0).unwrap(), (3, 19));
        assert_eq!(l0.det(), q(-1));
        assert!(is_even(l0.gram()));
    }

    #[test]
    fn e8_is_unimodular_positive() {
        let e8 = QForm::new(gram_e8()).unwrap();
        assert_eq!(e8.det(), q(1));
        assert_eq!(qform::signature(&e8).unwrap(), (8, 0));
    }

    #[test]
    fn l2d_head() {
        for d in 1..4 {
            let l = gram_l2d(d).unwrap();
            assert_eq!(l.gram()[0][0], q(2 * d));
            assert_eq!(qform::signature(&l).unwrap(), (3, 18));
        }
        assert_eq!(gram_l2d(0).unwrap_err(), K3Error::NonPositiveD(0));
    }

    #[test]
    fn identity_phi() {
        let f = make_field(REFERENCE_MATRIX).unwrap();
        let s = build_transcendental(&f, [f.one(), f.one(), f.one()]).unwrap();
        assert_eq!(s.signature, (9, 0));
        assert_eq!(cm_action(&f.one()).unwrap().m, arith::identity(9));
    }

    #[test]
    fn default_phi_signature_matches_patterns() {
        let f = make_field(REFERENCE_MATRIX).unwrap();
        let phi = [f.alpha(), f.elt_ints([-1, -1, 1]), f.one()];
        let s = build_transcendental(&f, phi).unwrap();
        assert_eq!(s.signature, s.pattern_sum());
        let cm = cm_action(&f.alpha()).unwrap();
        assert!(cm.scales_form(&s));
        assert!(cm.self_adjoint(&s));
        assert!(!cm.is_isometry(&s));
        assert!(matches!(solve_period(&s, &q(1), 64), Err(K3Error::InvalidPattern(_))));
    }

    #[test]
    fn cup_preservation() {
        let f = make_field(REFERENCE_MATRIX).unwrap();
        assert!(is_cup_preserving(&f.from_rational(q(5))));
        assert!(!is_cup_preserving(&f.alpha()));
        assert!(!is_cup_preserving(&(&f.alpha() - &f.from_rational(q(2)))));
    }
}
