//! End-to-end run: field, transcendental space, embedding certificate, period,
//! CM findings, generators and ranks, plus the small Kuga-Satake instance.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith::{self, fmt_q, parse_q, q, qf, Q};
use crate::clifford::{to_json_terms, CliffordElt, WordPolicy};
use crate::field::{make_field, search_prop33, EltCoords, FieldElt, SearchBounds, SignPattern, SymCubicField, REFERENCE_MATRIX};
use crate::interval::{decimal, interval_strings, Interval};
use crate::k3lattice::{build_transcendental, embeds_in_k3, hodge_vs_isometry, solve_period, HodgeReport};
use crate::kugasatake::{self, reference_phi_coords, GramModel, SmallInstanceReport};
use crate::qform::{form_invariants_with, HasseConvention};

pub const PRECISION_ENV: &str = "KSLAB_PRECISION";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("t = {0} must be a positive rational")]
    InvalidT(String),
    #[error("invalid value: {0}")]
    Invalid(String),
}

/// How the three elements `phi_k` are chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiSelection {
    /// `(A, A² − A − I, I)`.
    PaperComputational,
    /// `(10I − A − A², 2I − 7A + 2A², −A − I)`.
    PaperListed,
    Searched(SearchBounds),
    Explicit { coords: [EltCoords; 3] },
}

pub fn paper_listed_coords() -> [EltCoords; 3] {
    [[10, -1, -1], [2, -7, 2], [-1, -1, 0]].map(|c| EltCoords(c.map(q)))
}

pub fn default_search() -> SearchBounds {
    SearchBounds {
        epsilon: qf(1, 2),
        height: 6,
        max_den: 4,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub matrix: [[i64; 3]; 3],
    pub phi: PhiSelection,
    #[serde(with = "arith::qstr")]
    pub t: Q,
    pub modulus: u64,
    pub policies: Vec<WordPolicy>,
    pub gram_models: Vec<GramModel>,
    pub embedding_d: i64,
    pub precision: u32,
    pub hasse_convention: HasseConvention,
    pub sweep_height: i64,
    pub small_instance: bool,
    pub output: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            matrix: REFERENCE_MATRIX,
            phi: PhiSelection::PaperComputational,
            t: qf(1, 2),
            modulus: 101,
            policies: vec![WordPolicy::restricted_four_fold(), WordPolicy::Closure],
            gram_models: vec![GramModel::Diagonalized, GramModel::Exact],
            embedding_d: 1,
            precision: 128,
            hasse_convention: HasseConvention::LessEq,
            sweep_height: 5,
            small_instance: true,
            output: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !arith::is_prime(self.modulus) {
            return Err(ConfigError::InvalidPrime(self.modulus));
        }
        if self.t <= Q::from_integer(0.into()) {
            return Err(ConfigError::InvalidT(fmt_q(&self.t)));
        }
        if self.embedding_d < 1 {
            return Err(ConfigError::Invalid(format!("embedding_d = {}", self.embedding_d)));
        }
        if self.precision < 32 {
            return Err(ConfigError::Invalid(format!("precision = {} bits", self.precision)));
        }
        for p in &self.policies {
            if let WordPolicy::Products { min_len, max_len, .. } = p {
                if *min_len < 1 || min_len > max_len {
                    return Err(ConfigError::Invalid(format!("word lengths {min_len}..{max_len}")));
                }
            }
        }
        Ok(())
    }
}

/// Parses a JSON config; missing fields take the defaults. The precision
/// default can be overridden by the environment.
pub fn parse_config(text: Option<&str>) -> Result<PipelineConfig, ConfigError> {
    let mut cfg: PipelineConfig = match text {
        Some(t) => serde_json::from_str(t).map_err(|e| ConfigError::Parse(e.to_string()))?,
        None => PipelineConfig::default(),
    };
    let explicit_precision = text
        .and_then(|t| serde_json::from_str::<serde_json::Value>(t).ok())
        .is_some_and(|v| v.get("precision").is_some());
    if !explicit_precision {
        if let Ok(v) = std::env::var(PRECISION_ENV) {
            cfg.precision = v.parse().map_err(|_| ConfigError::Invalid(format!("{PRECISION_ENV}={v}")))?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_t(s: &str) -> Result<Q, ConfigError> {
    parse_q(s).map_err(|_| ConfigError::InvalidT(s.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Interval,
    ModP,
}

/// One verified statement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub method: Method,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSummary {
    pub method: Method,
    pub matrix: [[i64; 3]; 3],
    pub charpoly: String,
    pub roots: Vec<[String; 2]>,
    pub b_basis: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhiSummary {
    pub element: String,
    pub coords: EltCoords,
    pub pattern: SignPattern,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingSummary {
    pub method: Method,
    pub d: i64,
    pub verified: bool,
    pub codim: usize,
    pub complement_signature: (usize, usize),
    pub complement_disc: String,
    pub complement_diagonal: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub method: Method,
    pub embedding: usize,
    pub t: String,
    pub symbolic: Vec<String>,
    pub x3_squared: [String; 2],
    pub residual_magnitude: String,
    pub hermitian: [String; 2],
    /// `2 t² q2`, which `v̄ᵀ D v` equals.
    pub two_t2_q2: [String; 2],
    /// `2 q1`, for comparison.
    pub two_q1: [String; 2],
    pub hermitian_contains_2q1: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankSummary {
    pub method: Method,
    pub gram_model: GramModel,
    pub ranks: Vec<crate::clifford::RankReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub hasse_convention: String,
    pub enumeration_note: String,
    pub field: Option<FieldSummary>,
    pub phi: Vec<PhiSummary>,
    pub paper_listed_patterns: Vec<PhiSummary>,
    pub d_signature: Option<(usize, usize)>,
    pub d_invariants: Option<crate::qform::FormInvariants>,
    pub embedding: Option<EmbeddingSummary>,
    pub period: Option<PeriodSummary>,
    pub hodge: Option<HodgeReport>,
    pub generators: Vec<String>,
    pub generator_sha256: Vec<String>,
    pub ranks: Vec<RankSummary>,
    pub small_instance: Option<SmallInstanceReport>,
    pub claims: Vec<Claim>,
    pub stages: Vec<Stage>,
    pub failed_stage: Option<String>,
    pub version: String,
    /// Wall-clock seconds per stage; excluded from reproducibility comparisons.
    pub timings: BTreeMap<String, f64>,
}

impl PipelineReport {
    pub fn all_verified(&self) -> bool {
        self.failed_stage.is_none() && self.claims.iter().all(|c| c.holds)
    }

    /// The report with timings cleared, for byte comparisons.
    pub fn without_timings(&self) -> PipelineReport {
        let mut r = self.clone();
        r.timings.clear();
        r
    }
}

fn summarize_elt(x: &FieldElt) -> PhiSummary {
    PhiSummary {
        element: x.to_string(),
        coords: x.to_coords(),
        pattern: x.sign_pattern(),
    }
}

fn resolve_phi(field: &SymCubicField, sel: &PhiSelection) -> Result<[FieldElt; 3], String> {
    let from = |c: [EltCoords; 3]| c.map(|e| field.elt(e.0));
    match sel {
        PhiSelection::PaperComputational => Ok(from(reference_phi_coords())),
        PhiSelection::PaperListed => Ok(from(paper_listed_coords())),
        PhiSelection::Explicit { coords } => Ok(from(coords.clone())),
        PhiSelection::Searched(b) => search_prop33(field, b).map(|t| [t.f1, t.f2, t.f3]).map_err(|e| e.to_string()),
    }
}

pub fn generator_checksum(g: &CliffordElt<Q>) -> String {
    let json = serde_json::to_string(&to_json_terms(g)).expect("serializable");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

struct Run {
    report: PipelineReport,
}

impl Run {
    fn stage(&mut self, name: &str, status: StageStatus, detail: impl Into<String>) {
        let detail = detail.into();
        if status == StageStatus::Failed && self.report.failed_stage.is_none() {
            self.report.failed_stage = Some(name.to_string());
        }
        self.report.stages.push(Stage {
            name: name.into(),
            status,
            detail,
        });
    }

    fn claim(&mut self, name: &str, method: Method, holds: bool, detail: impl Into<String>) {
        self.report.claims.push(Claim {
            name: name.into(),
            method,
            holds,
            detail: detail.into(),
        });
    }

    fn time(&mut self, name: &str, start: Instant) {
        self.report.timings.insert(name.into(), start.elapsed().as_secs_f64());
    }
}

/// Runs every stage; a failing stage is named and ends the run with partial results.
pub fn run_pipeline(config: &PipelineConfig) -> PipelineReport {
    let mut run = Run {
        report: PipelineReport {
            config: config.clone(),
            hasse_convention: format!("Hasse invariant pairs {} (the other convention is also recorded)", config.hasse_convention),
            enumeration_note: "generators are the (A^2, A, I) components of u0u1, u1u2, u0u2 (three-block substitution reading)".into(),
            field: None,
            phi: vec![],
            paper_listed_patterns: vec![],
            d_signature: None,
            d_invariants: None,
            embedding: None,
            period: None,
            hodge: None,
            generators: vec![],
            generator_sha256: vec![],
            ranks: vec![],
            small_instance: None,
            claims: vec![],
            stages: vec![],
            failed_stage: None,
            version: env!("CARGO_PKG_VERSION").into(),
            timings: BTreeMap::new(),
        },
    };
    let _ = stages(config, &mut run);
    run.report
}

fn stages(config: &PipelineConfig, run: &mut Run) -> Result<(), ()> {
    let t0 = Instant::now();
    let field = match make_field(config.matrix) {
        Ok(f) => f,
        Err(e) => {
            run.stage("field", StageStatus::Failed, e.to_string());
            return Err(());
        }
    };
    run.report.field = Some(FieldSummary {
        method: Method::Interval,
        matrix: config.matrix,
        charpoly: field.charpoly_string(),
        roots: (0..3).map(|k| interval_strings(&field.root(k, config.precision), 30)).collect(),
        b_basis: field.b_basis().iter().map(|b| b.to_string()).collect(),
    });
    run.report.paper_listed_patterns = paper_listed_coords().map(|c| summarize_elt(&field.elt(c.0))).to_vec();
    run.stage("field", StageStatus::Ok, field.charpoly_string());
    run.time("field", t0);

    let t0 = Instant::now();
    let phi = match resolve_phi(&field, &config.phi) {
        Ok(p) => p,
        Err(e) => {
            run.stage("phi", StageStatus::Failed, e);
            return Err(());
        }
    };
    run.report.phi = phi.iter().map(summarize_elt).collect();
    run.stage("phi", StageStatus::Ok, format!("{:?}", phi.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
    let space = match build_transcendental(&field, phi) {
        Ok(s) => s,
        Err(e) => {
            run.stage("transcendental", StageStatus::Failed, e.to_string());
            return Err(());
        }
    };
    run.report.d_signature = Some(space.signature);
    run.report.d_invariants = form_invariants_with(&space.d, config.hasse_convention).ok();
    run.claim(
        "signature(D) = sum of phi sign patterns",
        Method::Interval,
        space.signature == space.pattern_sum(),
        format!("{:?} vs {:?}", space.signature, space.pattern_sum()),
    );
    let cm = crate::k3lattice::cm_action(&field.alpha()).expect("alpha is nonzero");
    run.claim("M_a^T D M_a = D M_{a^2} for a = alpha", Method::Exact, cm.scales_form(&space), "");
    run.stage("transcendental", StageStatus::Ok, format!("signature {:?}", space.signature));
    run.time("transcendental", t0);

    let t0 = Instant::now();
    if space.signature != (2, 7) {
        run.stage(
            "geometric",
            StageStatus::Skipped,
            format!(
                "D has signature {:?}; the period and embedding stages need (2, 7). phi patterns: {:?}",
                space.signature,
                space.patterns.map(|p| p.pair())
            ),
        );
    } else {
        match embeds_in_k3(&space, config.embedding_d) {
            Ok(c) => {
                run.claim("D embeds in L_2d over Q", Method::Exact, c.verified, format!("d = {}", config.embedding_d));
                run.report.embedding = Some(EmbeddingSummary {
                    method: Method::Exact,
                    d: config.embedding_d,
                    verified: c.verified,
                    codim: c.codim,
                    complement_signature: c.complement_signature,
                    complement_disc: c.complement_disc.to_string(),
                    complement_diagonal: c.complement.gram().iter().enumerate().map(|(i, r)| fmt_q(&r[i])).collect(),
                });
            }
            Err(e) => {
                run.stage("embedding", StageStatus::Failed, e.to_string());
                return Err(());
            }
        }
        let period = match solve_period(&space, &config.t, config.precision) {
            Ok(p) => p,
            Err(e) => {
                run.stage("period", StageStatus::Failed, e.to_string());
                return Err(());
            }
        };
        let tol = Q::new(1.into(), num_bigint::BigInt::from(10).pow(25));
        let expected = period.expected_hermitian();
        let herm = period.hermitian.re.clone();
        let overlap = |a: &Interval, b: &Interval| a.lo <= b.hi && b.lo <= a.hi;
        run.claim("|v^T D v| < 1e-25", Method::Interval, period.residual_mag() < tol, decimal(&period.residual_mag(), 40));
        run.claim(
            "conj(v)^T D v = 2 t^2 q2 > 0",
            Method::Interval,
            overlap(&herm, &expected) && period.hermitian.im.contains_zero() && herm.is_positive(),
            format!("{} vs {}", herm, expected),
        );
        run.claim("x3 != 0", Method::Interval, period.x3_nonzero(), "");
        run.report.period = Some(PeriodSummary {
            method: Method::Interval,
            embedding: period.embedding,
            t: fmt_q(&period.t),
            symbolic: period.symbolic.clone(),
            x3_squared: interval_strings(&period.x3_sq, 30),
            residual_magnitude: decimal(&period.residual_mag(), 40),
            hermitian: interval_strings(&herm, 30),
            two_t2_q2: interval_strings(&expected, 30),
            two_q1: interval_strings(&period.two_q1(), 30),
            hermitian_contains_2q1: overlap(&herm, &period.two_q1()),
        });
        match hodge_vs_isometry(&space, Some(&period), &field.alpha(), config.sweep_height) {
            Ok(h) => {
                run.claim("CM by alpha preserves the period line", Method::Interval, h.preserves_period == Some(true), "");
                run.claim("CM by alpha is D-self-adjoint", Method::Exact, h.self_adjoint, "");
                run.claim("alpha does not preserve the cup product", Method::Exact, !h.witness_cup_preserving, "");
                run.claim(
                    "cup-preserving CM elements are rational",
                    Method::Exact,
                    h.sweep_all_rational,
                    format!("{} elements of height <= {}", h.sweep_size, h.sweep_height),
                );
                run.report.hodge = Some(h);
            }
            Err(e) => {
                run.stage("hodge", StageStatus::Failed, e.to_string());
                return Err(());
            }
        }
        run.stage("geometric", StageStatus::Ok, format!("embedding d = {}, t = {}", config.embedding_d, fmt_q(&config.t)));
    }
    run.time("geometric", t0);

    let t0 = Instant::now();
    let product = match kugasatake::expand_f1f2(&space) {
        Ok(p) => p,
        Err(e) => {
            run.stage("generators", StageStatus::Failed, e.to_string());
            return Err(());
        }
    };
    let set = kugasatake::build_generators(&product).expect("generators");
    let alg = crate::clifford::CliffordAlgebra::rational(&arith::identity(9)).expect("n = 9");
    run.report.generators = set.gens.iter().map(|g| alg.render(g)).collect();
    run.report.generator_sha256 = set.gens.iter().map(generator_checksum).collect();
    if config.matrix == REFERENCE_MATRIX {
        run.claim("G1..G3 equal the golden generators", Method::Exact, set.golden_match == [true; 3], "");
    }
    run.stage("generators", StageStatus::Ok, "9 generators");
    run.time("generators", t0);

    let t0 = Instant::now();
    for model in &config.gram_models {
        match kugasatake::run_prop51_on(&space, config.modulus, &config.policies, *model) {
            Ok(r) => run.report.ranks.push(RankSummary {
                method: Method::ModP,
                gram_model: *model,
                ranks: r.ranks,
            }),
            Err(e) => {
                run.stage("ranks", StageStatus::Failed, e.to_string());
                return Err(());
            }
        }
    }
    run.stage("ranks", StageStatus::Ok, format!("mod {}", config.modulus));
    run.time("ranks", t0);

    if config.small_instance {
        let t0 = Instant::now();
        match kugasatake::small_instance() {
            Ok(s) => {
                run.claim("J^2 = -1 (n = 4)", Method::Exact, s.j_squared_minus_one, "");
                run.claim("E(x, Jy) positive definite (n = 4)", Method::Exact, s.polarization_positive, format!("sign {}", s.polarization_sign));
                run.claim(
                    "J Phi_v - Phi_v J = Phi_[c, v] (n = 4)",
                    Method::Exact,
                    s.equivariance.commutator_identity,
                    format!("Phi_v J = J Phi_v per generator: {:?}", s.equivariance.commutes),
                );
                run.claim(
                    "pullback proportional to the Gram matrix (n = 4)",
                    Method::Exact,
                    s.pullback.proportional,
                    format!("lambda = {}, multiple of -gram = {}", fmt_q(&s.pullback.lambda), fmt_q(&s.pullback.weight_two_multiple)),
                );
                run.claim(
                    "right multiplication keeps a positive proportionality class (n = 4)",
                    Method::Exact,
                    s.right_invariance.preserved,
                    format!("ratio {}", fmt_q(&s.right_invariance.ratio)),
                );
                run.report.small_instance = Some(s);
                run.stage("small_instance", StageStatus::Ok, "n = 4");
            }
            Err(e) => {
                run.stage("small_instance", StageStatus::Failed, e.to_string());
                return Err(());
            }
        }
        run.time("small_instance", t0);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn emit_report(report: &PipelineReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable"),
        Format::Text => render_text(report),
    }
}

fn render_text(r: &PipelineReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "== {}", r.hasse_convention);
    if let Some(f) = &r.field {
        let _ = writeln!(s, "field: {}  b = {:?}", f.charpoly, f.b_basis);
        for (k, root) in f.roots.iter().enumerate() {
            let _ = writeln!(s, "  root {k}: [{}, {}]", root[0], root[1]);
        }
    }
    for (k, p) in r.phi.iter().enumerate() {
        let _ = writeln!(s, "phi{}: {}  pattern {:?}", k + 1, p.element, p.pattern.pair());
    }
    for (k, p) in r.paper_listed_patterns.iter().enumerate() {
        let _ = writeln!(s, "listed phi{}: {}  pattern {:?}", k + 1, p.element, p.pattern.pair());
    }
    if let Some(sig) = r.d_signature {
        let _ = writeln!(s, "signature(D) = {sig:?}");
    }
    if let Some(e) = &r.embedding {
        let _ = writeln!(s, "embedding into L_{}: verified {} codim {}", 2 * e.d, e.verified, e.codim);
    }
    if let Some(p) = &r.period {
        let _ = writeln!(s, "period: t = {}, |v^T D v| = {}, conj(v)^T D v in [{}, {}]", p.t, p.residual_magnitude, p.hermitian[0], p.hermitian[1]);
    }
    for rs in &r.ranks {
        for rank in &rs.ranks {
            let _ = writeln!(s, "rank [{:?}] {}: {} ({} words, mod {})", rs.gram_model, rank.policy_label, rank.rank, rank.words, rank.modulus);
        }
    }
    for c in &r.claims {
        let _ = writeln!(s, "[{}] {:?} {} {}", if c.holds { "ok" } else { "FAIL" }, c.method, c.name, c.detail);
    }
    for st in &r.stages {
        let _ = writeln!(s, "stage {}: {:?} {}", st.name, st.status, st.detail);
    }
    if let Some(f) = &r.failed_stage {
        let _ = writeln!(s, "failed stage: {f}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_errors() {
        let c = parse_config(Some("{}")).unwrap();
        assert_eq!(c.modulus, 101);
        assert_eq!(c.phi, PhiSelection::PaperComputational);
        assert!(matches!(parse_config(Some(r#"{"modulus": 4}"#)), Err(ConfigError::InvalidPrime(4))));
        assert!(matches!(parse_config(Some("{")), Err(ConfigError::Parse(_))));
        assert!(matches!(parse_config(Some(r#"{"t": "-1"}"#)), Err(ConfigError::InvalidT(_))));
    }

    #[test]
    fn explicit_phi_round_trips() {
        let text = r#"{"phi": {"kind": "explicit", "coords": [["1","0","0"],["0","1","0"],["2","0","1/3"]]}}"#;
        let c = parse_config(Some(text)).unwrap();
        let back = serde_json::to_string(&c).unwrap();
        assert!(back.contains(r#""1/3""#));
    }
}
