use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kslab::arith::parse_q;
use kslab::clifford::WordPolicy;
use kslab::field::{make_field, search_prop33, SearchBounds, REFERENCE_MATRIX};
use kslab::k3lattice::{gram_l0, gram_l2d, is_even};
use kslab::kugasatake::{reference_phi_coords, run_prop51, small_instance, GramModel, Prop51Config};
use kslab::pipeline::{emit_report, parse_config, run_pipeline, Format, PhiSelection, PipelineConfig};
use kslab::qform::{complement_for_embedding, form_invariants_with, HasseConvention, QForm};

const CONFIG: u8 = 2;
const PRECONDITION: u8 = 3;
const VERIFICATION: u8 = 4;
const INTERNAL: u8 = 5;

#[derive(Parser)]
#[command(name = "kslab", version, about = "Exact quadratic forms, cubic fields, K3 lattices and Clifford ranks")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Fmt,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Paper,
    Closure,
    Both,
    ThreeFold,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhiArg {
    PaperComputational,
    PaperListed,
    Searched,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Diagonalized,
    Exact,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants of a diagonal form; with --into, a complement certificate.
    Qform {
        /// Comma separated diagonal entries, e.g. "1,-1,2/3".
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
        #[arg(long, allow_hyphen_values = true)]
        into: Option<String>,
        /// Hasse product over i <= j ("leq") or i < j ("less").
        #[arg(long, default_value = "leq")]
        hasse: String,
    },
    /// Cubic field data; --search looks for a sign-pattern triple.
    Field {
        /// Symmetric integer matrix as JSON, defaults to the reference matrix.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        search: bool,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long, default_value_t = 6)]
        height: i64,
        #[arg(long, default_value_t = 4)]
        max_den: i64,
    },
    /// K3 lattice invariants and the transcendental/period stage.
    K3 {
        #[arg(long, value_enum, default_value = "searched")]
        phi: PhiArg,
        #[arg(long, default_value = "1/2")]
        t: String,
        #[arg(long, default_value_t = 1)]
        d: i64,
    },
    /// Clifford ranks of the nine generators.
    Clifford {
        #[arg(long, value_enum, default_value = "both")]
        policy: PolicyArg,
        #[arg(long, default_value_t = 101)]
        prime: u64,
        #[arg(long, value_enum, default_value = "diagonalized")]
        gram_model: ModelArg,
    },
    /// Kuga-Satake checks on the n = 4 instance.
    Ks,
    /// Full run from a JSON config.
    Pipeline {
        #[arg(long)]
        config: Option<String>,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        out: Option<String>,
    },
}

struct Fail(u8, String);

fn cfg<E: ToString>(e: E) -> Fail {
    Fail(CONFIG, e.to_string())
}

fn pre<E: ToString>(e: E) -> Fail {
    Fail(PRECONDITION, e.to_string())
}

fn policies(p: PolicyArg) -> Vec<WordPolicy> {
    match p {
        PolicyArg::Paper => vec![WordPolicy::restricted_four_fold()],
        PolicyArg::Closure => vec![WordPolicy::Closure],
        PolicyArg::Both => vec![WordPolicy::restricted_four_fold(), WordPolicy::Closure],
        PolicyArg::ThreeFold => vec![WordPolicy::three_fold()],
    }
}

fn parse_list(s: &str) -> Result<Vec<kslab::arith::Q>, Fail> {
    s.split(',').map(|x| parse_q(x).map_err(cfg)).collect()
}

fn print(v: &serde_json::Value, format: Fmt) {
    match format {
        Fmt::Json => println!("{}", serde_json::to_string_pretty(v).expect("json")),
        Fmt::Text => {
            if let Some(obj) = v.as_object() {
                for (k, val) in obj {
                    println!("{k}: {val}");
                }
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    let format = cli.format;
    match cli.cmd {
        Cmd::Qform { diag, into, hasse } => {
            let conv = match hasse.as_str() {
                "leq" => HasseConvention::LessEq,
                "less" => HasseConvention::Less,
                other => return Err(cfg(format!("unknown Hasse convention {other:?}"))),
            };
            let q1 = QForm::diagonal(&parse_list(&diag)?);
            let inv = form_invariants_with(&q1, conv).map_err(pre)?;
            let mut out = json!({ "convention": conv.to_string(), "invariants": inv });
            if let Some(into) = into {
                let q2 = QForm::diagonal(&parse_list(&into)?);
                let cert = complement_for_embedding(&q1, &q2).map_err(pre)?;
                let ok = cert.verified;
                out["certificate"] = serde_json::to_value(&cert).expect("json");
                print(&out, format);
                if !ok {
                    return Err(Fail(VERIFICATION, "certificate did not verify".into()));
                }
                return Ok(());
            }
            print(&out, format);
        }
        Cmd::Field {
            matrix,
            search,
            epsilon,
            height,
            max_den,
        } => {
            let a: [[i64; 3]; 3] = match matrix {
                Some(m) => serde_json::from_str(&m).map_err(cfg)?,
                None => REFERENCE_MATRIX,
            };
            let field = make_field(a).map_err(pre)?;
            let roots: Vec<_> = (0..3).map(|k| kslab::interval::interval_strings(&field.root(k, 128), 30)).collect();
            let mut out = json!({
                "charpoly": field.charpoly_string(),
                "roots": roots,
                "b_basis": field.b_basis().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            });
            if search {
                let bounds = SearchBounds {
                    epsilon: parse_q(&epsilon).map_err(cfg)?,
                    height,
                    max_den,
                };
                let t = search_prop33(&field, &bounds).map_err(pre)?;
                out["triple"] = json!({
                    "f1": t.f1.to_string(), "f1_pattern": t.f1.sign_pattern().pair(),
                    "f2": t.f2.to_string(), "f2_pattern": t.f2.sign_pattern().pair(),
                    "f3": t.f3.to_string(), "f3_pattern": t.f3.sign_pattern().pair(),
                    "embedding": t.embedding,
                });
            }
            print(&out, format);
        }
        Cmd::K3 { phi, t, d } => {
            let l0 = gram_l0();
            let l0_inv = form_invariants_with(&l0, HasseConvention::LessEq).map_err(pre)?;
            let l2d = gram_l2d(d).map_err(pre)?;
            let config = PipelineConfig {
                phi: match phi {
                    PhiArg::PaperComputational => PhiSelection::PaperComputational,
                    PhiArg::PaperListed => PhiSelection::PaperListed,
                    PhiArg::Searched => PhiSelection::Searched(kslab::pipeline::default_search()),
                },
                t: kslab::pipeline::parse_t(&t).map_err(cfg)?,
                embedding_d: d,
                gram_models: vec![],
                small_instance: false,
                ..parse_config(None).map_err(cfg)?
            };
            config.validate().map_err(cfg)?;
            let report = run_pipeline(&config);
            let out = json!({
                "l0": { "signature": l0_inv.signature, "det": kslab::arith::det(l0.gram()).to_string(), "even": is_even(l0.gram()) },
                "l2d": { "d": d, "dim": l2d.dim(), "det": kslab::arith::det(l2d.gram()).to_string() },
                "d_signature": report.d_signature,
                "phi": report.phi,
                "embedding": report.embedding,
                "period": report.period,
                "hodge": report.hodge,
                "claims": report.claims,
                "stages": report.stages,
            });
            print(&out, format);
            finish(&report)?;
        }
        Cmd::Clifford {
            policy,
            prime,
            gram_model,
        } => {
            if !kslab::arith::is_prime(prime) {
                return Err(cfg(format!("{prime} is not a prime")));
            }
            let report = run_prop51(&Prop51Config {
                matrix: REFERENCE_MATRIX,
                phi: reference_phi_coords(),
                modulus: prime,
                policies: policies(policy),
                gram_model: match gram_model {
                    ModelArg::Diagonalized => GramModel::Diagonalized,
                    ModelArg::Exact => GramModel::Exact,
                },
            })
            .map_err(pre)?;
            print(&serde_json::to_value(&report).expect("json"), format);
        }
        Cmd::Ks => {
            let report = small_instance().map_err(pre)?;
            let ok = report.j_squared_minus_one && report.polarization_positive && report.equivariance.commutator_identity;
            print(&serde_json::to_value(&report).expect("json"), format);
            if !ok {
                return Err(Fail(VERIFICATION, "small instance checks failed".into()));
            }
        }
        Cmd::Pipeline {
            config,
            policy,
            prime,
            out,
        } => {
            let text = match &config {
                Some(path) => Some(std::fs::read_to_string(path).map_err(|e| cfg(format!("{path}: {e}")))?),
                None => None,
            };
            let mut c = parse_config(text.as_deref()).map_err(cfg)?;
            if let Some(p) = policy {
                c.policies = policies(p);
            }
            if let Some(p) = prime {
                c.modulus = p;
            }
            if let Some(o) = out {
                c.output = Some(o);
            }
            c.validate().map_err(cfg)?;
            let report = run_pipeline(&c);
            let fmt = match format {
                Fmt::Json => Format::Json,
                Fmt::Text => Format::Text,
            };
            if let Some(path) = &c.output {
                std::fs::write(path, emit_report(&report, Format::Json)).map_err(|e| Fail(INTERNAL, format!("{path}: {e}")))?;
            }
            println!("{}", emit_report(&report, fmt));
            finish(&report)?;
        }
    }
    Ok(())
}

fn finish(report: &kslab::pipeline::PipelineReport) -> Result<(), Fail> {
    if let Some(stage) = &report.failed_stage {
        return Err(pre(format!("stage {stage} failed")));
    }
    if !report.all_verified() {
        return Err(Fail(VERIFICATION, "a verification claim failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Fail(code, msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
        Err(_) => ExitCode::from(INTERNAL),
    }
}
