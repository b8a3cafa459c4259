//! `ahs` — exact-arithmetic command line for connection–curvature–torsion
//! triples: membership checks, stabilizer filtrations, Spencer cohomology
//! tables, the tridiagonal family, skew-algebra assembly, contact
//! verification, SU(n) structure checks and a corpus runner.
//!
//! Exit codes: 0 — primary verdict holds; 1 — verdict negative;
//! 2 — malformed input (with a JSON-pointer path where applicable).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ahs_core::families::{
    meusers_predictions, meusers_spencer_dim, meusers_triple, MeusersParams,
};
use ahs_core::filtration::{
    joint_stabilizer_filtration, membership_variant, stabilizer_filtration, Filtration, Variant,
};
use ahs_core::io::{Document, LiePairDoc, SuDoc, TripleDoc, FORMAT};
use ahs_core::kstructures::{membership_k, verify_su_structure, KAlgebra, KKind};
use ahs_core::skew::{assemble_g, triple_from_lie_pair};
use ahs_core::spencer::{
    b_squared_holds, build_comodule, spencer_cohomology, verify_contact, verify_contact_defn,
};
use ahs_core::{Matrix, Rat, Subspace, Triple};

const FORMULA_BIANCHI_FIRST: &str = "d^{(A,T)} T = R ∧ id";
const FORMULA_BIANCHI_SECOND: &str = "d^{(A,T)} R = 0";
const FORMULA_CONGRUENCE: &str = "Q(A,T) ≡ R  mod Λ²V* ⊗ 𝔥_∞";

#[derive(Parser)]
#[command(
    name = "ahs",
    about = "Exact algebraic invariants of affine homogeneous structures"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the structure equations and moduli membership of a triple
    Check {
        input: PathBuf,
        /// Ambient algebra: "gl", "so", or a path to a generator file
        #[arg(long, default_value = "gl")]
        ambient: String,
        /// Symmetric metric for --ambient so (defaults to the identity)
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Specialised membership: "tf" (torsion-free) or "red" (reductive)
        #[arg(long)]
        variant: Option<String>,
        /// Highest covariant-derivative order for the variant equations
        #[arg(long)]
        r_max: Option<usize>,
    },
    /// Compute the stabilizer filtration and Singer invariant
    Filtration {
        input: PathBuf,
        #[arg(long, default_value = "gl")]
        ambient: String,
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Use joint stabilizers of ∇^r R, ∇^r T instead of the recursion
        #[arg(long)]
        joint: bool,
        /// Step cap for --joint (default: ambient dimension + 1)
        #[arg(long)]
        r_max: Option<usize>,
    },
    /// Spencer cohomology table of the graded comodule of a member triple
    Spencer {
        input: PathBuf,
        #[arg(long, default_value = "gl")]
        ambient: String,
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Largest form degree k in the table
        #[arg(long, default_value_t = 3)]
        k_max: usize,
    },
    /// Build a tridiagonal-family triple and optionally verify its
    /// closed-form invariants
    Meusers {
        #[arg(long)]
        m: usize,
        /// Comma-separated parameters f1,...,fm (default 1,0,1,...,1)
        #[arg(long)]
        params: Option<String>,
        /// Write the triple as JSON to this path
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Verify filtration, Singer invariant, Ricci form and Spencer
        /// dimensions against their closed forms
        #[arg(long)]
        predictions: bool,
    },
    /// Realize the triple attached to an abstract Lie pair
    FromLie {
        input: PathBuf,
        /// Write the realized triple as JSON to this path
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Verify contact of a given order between two triples along a map
    Contact {
        t1: PathBuf,
        t2: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: usize,
    },
    /// Verify the defining equations of a candidate SU(n) structure
    SuVerify { input: PathBuf },
    /// Assemble the skew algebra 𝔥_∞ ⊕ {A_x ⊕ x} of a member triple
    Assemble {
        input: PathBuf,
        #[arg(long, default_value = "gl")]
        ambient: String,
        #[arg(long)]
        metric: Option<PathBuf>,
    },
    /// Run checks over every JSON document in a directory
    Corpus { dir: PathBuf },
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match run(&cli.cmd) {
        Ok((verdict, mut report)) => {
            report["timings"] = json!({ "total_ms": started.elapsed().as_millis() as u64 });
            emit_report(&report, cli.out.as_deref());
            summarize(&report);
            if verdict {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let report = error_report(&e);
            emit_report(&report, cli.out.as_deref());
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn error_report(e: &anyhow::Error) -> Value {
    let mut doc = json!({ "format": FORMAT, "error": format!("{e:#}") });
    if let Some(ahs_core::Error::Schema { pointer, message }) =
        e.downcast_ref::<ahs_core::Error>()
    {
        doc["pointer"] = json!(pointer);
        doc["error"] = json!(message);
    }
    doc
}

fn emit_report(report: &Value, out: Option<&Path>) {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: cannot write report to {}: {e}", path.display());
            }
        }
        None => println!("{text}"),
    }
}

fn summarize(report: &Value) {
    if let Some(checks) = report.get("checks").and_then(Value::as_array) {
        for c in checks {
            let name = c.get("name").and_then(Value::as_str).unwrap_or("?");
            let ok = c.get("verdict").and_then(Value::as_bool).unwrap_or(false);
            eprintln!("{} {name}", if ok { "PASS" } else { "FAIL" });
        }
    }
    if let Some(v) = report.get("verdict").and_then(Value::as_bool) {
        eprintln!("verdict: {}", if v { "PASS" } else { "FAIL" });
    }
}

fn digest(path: &Path) -> anyhow::Result<(String, String)> {
    let bytes =
        std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let hex = Sha256::digest(&bytes)
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
    Ok((
        path.display().to_string(),
        format!("sha256:{hex}"),
    ))
}

fn inputs_value(paths: &[&Path]) -> anyhow::Result<Value> {
    let mut map = serde_json::Map::new();
    for p in paths {
        let (name, dig) = digest(p)?;
        map.insert(name, json!(dig));
    }
    Ok(Value::Object(map))
}

fn load_json(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Load a triple document, accepting either a direct triple or a Lie pair
/// (realized through its attached connection).
fn load_triple(path: &Path) -> anyhow::Result<Triple> {
    let text = load_json(path)?;
    match ahs_core::io::parse_document(&text)? {
        Document::Triple(doc) => Ok(doc.to_triple()?),
        Document::LiePair(doc) => Ok(triple_from_lie_pair(&doc.to_lie_pair()?)?),
        Document::Su(_) => Err(anyhow!(
            "{} holds an SU structure, not a triple",
            path.display()
        )),
    }
}

#[derive(Deserialize)]
struct MetricDoc {
    format: String,
    g: Vec<Vec<Rat>>,
}

#[derive(Deserialize)]
struct AmbientDoc {
    format: String,
    dim: usize,
    generators: Vec<Vec<Vec<Rat>>>,
}

#[derive(Deserialize)]
struct MapDoc {
    format: String,
    #[serde(rename = "F")]
    f: Vec<Vec<Rat>>,
}

fn resolve_ambient(
    spec: &str,
    metric: Option<&Path>,
    n: usize,
) -> anyhow::Result<KAlgebra> {
    match spec {
        "gl" => Ok(KAlgebra::gl(n)),
        "so" => {
            let g = match metric {
                Some(path) => {
                    let doc: MetricDoc = serde_json::from_str(&load_json(path)?)
                        .with_context(|| format!("bad metric file {}", path.display()))?;
                    ahs_core::io::check_format(&doc.format)?;
                    Matrix::from_rows(doc.g)
                }
                None => Matrix::identity(n),
            };
            Ok(KAlgebra::so(&g)?)
        }
        path => {
            let path = Path::new(path);
            let doc: AmbientDoc = serde_json::from_str(&load_json(path)?)
                .with_context(|| format!("bad ambient file {}", path.display()))?;
            ahs_core::io::check_format(&doc.format)?;
            if doc.dim != n {
                return Err(anyhow!(
                    "ambient file is for dimension {}, triple has dimension {n}",
                    doc.dim
                ));
            }
            let rows: Vec<Vec<Rat>> = doc
                .generators
                .iter()
                .map(|g| Matrix::from_rows(g.clone()).flatten())
                .collect();
            let sub = Subspace::from_rows(n * n, rows);
            Ok(KAlgebra::custom(n, sub)?)
        }
    }
}

fn check_entry(name: &str, verdict: bool, residual: usize, formula: &str) -> Value {
    json!({
        "name": name,
        "verdict": verdict,
        "residual_summary": { "nonzero_entries": residual },
        "formula": formula,
    })
}

fn filtration_value(f: &Filtration) -> Value {
    json!({
        "dims": f.dims(),
        "singer": f.singer,
        "complete": f.complete,
        "steps": f
            .steps
            .iter()
            .map(|s| s.basis().row_vecs())
            .collect::<Vec<_>>(),
    })
}

fn nonzero_count(t: &ahs_core::Tensor) -> usize {
    ahs_core::multi_indices(t.dim(), t.arity())
        .map(|idx| t.value_slice(&idx).iter().filter(|x| !x.is_zero()).count())
        .sum()
}

fn run(cmd: &Cmd) -> anyhow::Result<(bool, Value)> {
    match cmd {
        Cmd::Check {
            input,
            ambient,
            metric,
            variant,
            r_max,
        } => cmd_check(input, ambient, metric.as_deref(), variant.as_deref(), *r_max),
        Cmd::Filtration {
            input,
            ambient,
            metric,
            joint,
            r_max,
        } => cmd_filtration(input, ambient, metric.as_deref(), *joint, *r_max),
        Cmd::Spencer {
            input,
            ambient,
            metric,
            k_max,
        } => cmd_spencer(input, ambient, metric.as_deref(), *k_max),
        Cmd::Meusers {
            m,
            params,
            emit,
            predictions,
        } => cmd_meusers(*m, params.as_deref(), emit.as_deref(), *predictions),
        Cmd::FromLie { input, emit } => cmd_from_lie(input, emit.as_deref()),
        Cmd::Contact {
            t1,
            t2,
            map,
            order,
        } => cmd_contact(t1, t2, map, *order),
        Cmd::SuVerify { input } => cmd_su_verify(input),
        Cmd::Assemble {
            input,
            ambient,
            metric,
        } => cmd_assemble(input, ambient, metric.as_deref()),
        Cmd::Corpus { dir } => cmd_corpus(dir),
    }
}

fn cmd_check(
    input: &Path,
    ambient: &str,
    metric: Option<&Path>,
    variant: Option<&str>,
    r_max: Option<usize>,
) -> anyhow::Result<(bool, Value)> {
    let t = load_triple(input)?;
    let n = t.dim();
    let k = resolve_ambient(ambient, metric, n)?;

    if let Some(v) = variant {
        let v = match v {
            "tf" => Variant::TorsionFree,
            "red" => Variant::Reductive,
            other => return Err(anyhow!("unknown variant {other:?} (expected tf or red)")),
        };
        let filt = stabilizer_filtration(&t, &k.subspace);
        let bound = r_max.unwrap_or((filt.singer.max(0) as usize) + 1);
        let rep = membership_variant(&t, v, bound)?;
        let checks: Vec<Value> = rep
            .checks
            .iter()
            .map(|(name, ok)| check_entry(name, *ok, usize::from(!ok), name))
            .collect();
        let report = json!({
            "format": FORMAT,
            "command": "check",
            "inputs": inputs_value(&[input])?,
            "ambient": ambient,
            "variant": v_name(v),
            "r_max": bound,
            "checks": checks,
            "filtration": filtration_value(&filt),
            "verdict": rep.verdict,
        });
        return Ok((rep.verdict, report));
    }

    let rep = membership_k(&t, &k);
    let (b1, b2) = t.bianchi_residuals();
    let mut checks = vec![
        check_entry(
            "first_structure_equation",
            rep.inner.bianchi_first,
            nonzero_count(&b1),
            FORMULA_BIANCHI_FIRST,
        ),
        check_entry(
            "second_structure_equation",
            rep.inner.bianchi_second,
            nonzero_count(&b2),
            FORMULA_BIANCHI_SECOND,
        ),
        check_entry(
            "curvature_congruence",
            rep.inner.q_congruence,
            usize::from(!rep.inner.q_congruence),
            FORMULA_CONGRUENCE,
        ),
    ];
    if !matches!(k.kind, KKind::Gl) {
        checks.push(check_entry(
            "connection_ambient_valued",
            rep.connection_k_valued,
            usize::from(!rep.connection_k_valued),
            "A ∈ V* ⊗ 𝔨",
        ));
        checks.push(check_entry(
            "curvature_ambient_valued",
            rep.curvature_k_valued,
            usize::from(!rep.curvature_k_valued),
            "R ∈ Λ²V* ⊗ 𝔨",
        ));
    }
    let report = json!({
        "format": FORMAT,
        "command": "check",
        "inputs": inputs_value(&[input])?,
        "ambient": ambient,
        "checks": checks,
        "filtration": filtration_value(&rep.inner.filtration),
        "verdict": rep.verdict,
    });
    Ok((rep.verdict, report))
}

fn v_name(v: Variant) -> &'static str {
    match v {
        Variant::TorsionFree => "tf",
        Variant::Reductive => "red",
    }
}

fn cmd_filtration(
    input: &Path,
    ambient: &str,
    metric: Option<&Path>,
    joint: bool,
    r_max: Option<usize>,
) -> anyhow::Result<(bool, Value)> {
    let t = load_triple(input)?;
    let n = t.dim();
    let k = resolve_ambient(ambient, metric, n)?;
    let filt = if joint {
        let cap = r_max.unwrap_or(k.subspace.dim() + 1);
        joint_stabilizer_filtration(&t, &k.subspace, cap)
    } else {
        stabilizer_filtration(&t, &k.subspace)
    };
    let verdict = filt.complete;
    let report = json!({
        "format": FORMAT,
        "command": "filtration",
        "inputs": inputs_value(&[input])?,
        "ambient": ambient,
        "joint": joint,
        "filtration": filtration_value(&filt),
        "verdict": verdict,
    });
    Ok((verdict, report))
}

fn cmd_spencer(
    input: &Path,
    ambient: &str,
    metric: Option<&Path>,
    k_max: usize,
) -> anyhow::Result<(bool, Value)> {
    let t = load_triple(input)?;
    let n = t.dim();
    let alg = resolve_ambient(ambient, metric, n)?;
    let filt = stabilizer_filtration(&t, &alg.subspace);
    let (verdict, checks, table) = match build_comodule(&t, &filt) {
        Ok(com) => {
            let bb = b_squared_holds(&com);
            let table = spencer_cohomology(&com, k_max);
            let rows: Vec<Value> = table
                .dims
                .iter()
                .map(|(&(r, k), &d)| json!({ "r": r, "k": k, "dim": d }))
                .collect();
            let checks = vec![
                check_entry(
                    "directional_derivatives_commute",
                    true,
                    0,
                    "D_a D_b = D_b D_a on every graded piece",
                ),
                check_entry("coboundary_squares_to_zero", bb, usize::from(!bb), "B ∘ B = 0"),
            ];
            (bb, checks, Value::Array(rows))
        }
        Err(ahs_core::Error::Precondition(msg)) => (
            false,
            vec![check_entry(
                "directional_derivatives_commute",
                false,
                1,
                &msg,
            )],
            Value::Array(vec![]),
        ),
        Err(e) => return Err(e.into()),
    };
    let report = json!({
        "format": FORMAT,
        "command": "spencer",
        "inputs": inputs_value(&[input])?,
        "ambient": ambient,
        "k_max": k_max,
        "checks": checks,
        "filtration": filtration_value(&filt),
        "spencer": table,
        "verdict": verdict,
    });
    Ok((verdict, report))
}

fn cmd_meusers(
    m: usize,
    params: Option<&str>,
    emit: Option<&Path>,
    predictions: bool,
) -> anyhow::Result<(bool, Value)> {
    let p = match params {
        Some(text) => {
            let f: Vec<Rat> = text
                .split(',')
                .map(|s| Rat::from_str(s.trim()).map_err(|e| anyhow!("bad parameter {s:?}: {e}")))
                .collect::<anyhow::Result<_>>()?;
            MeusersParams::new(m, f)?
        }
        None => MeusersParams::generic(m)?,
    };
    let (t, pair) = meusers_triple(&p)?;
    if let Some(path) = emit {
        let doc = TripleDoc::from_triple(&t);
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let mut report = json!({
        "format": FORMAT,
        "command": "meusers",
        "m": m,
        "params": p.f,
        "dim_g": pair.dim_g,
        "verdict": true,
    });
    let mut verdict = true;
    if predictions {
        let pred = meusers_predictions(&p)?;
        let so = KAlgebra::so(&Matrix::identity(m))?;
        let filt = stabilizer_filtration(&t, &so.subspace);
        let filtration_ok =
            filt.singer == pred.singer && filt.steps == pred.steps;
        let ric = t.ricci();
        let ricci_ok = ric == pred.ricci;
        let eig = ric.distinct_eigenvalue_count()?;
        let eig_ok = eig == pred.ricci_distinct_eigenvalues;
        let com = build_comodule(&t, &filt)?;
        let table = spencer_cohomology(&com, 1);
        let spencer_ok = (1..=m - 4).all(|r| table.dim(r, 1) == meusers_spencer_dim(m, 1));
        verdict = filtration_ok && ricci_ok && eig_ok && spencer_ok;
        report["checks"] = json!([
            check_entry(
                "stabilizer_chain_matches_closed_form",
                filtration_ok,
                usize::from(!filtration_ok),
                "𝔥_r = 𝔰𝔬{e_{r+4}, …, e_m}, singer = m − 4",
            ),
            check_entry(
                "ricci_matches_closed_form",
                ricci_ok,
                usize::from(!ricci_ok),
                "Ric = −(tr F₊² ⊕ ([F₊,F₋] + tr(F₊) F₊))",
            ),
            check_entry(
                "ricci_has_four_distinct_eigenvalues",
                eig_ok,
                usize::from(!eig_ok),
                "deg p − deg gcd(p, p′) = 4",
            ),
            check_entry(
                "formal_tangents_one_dimensional",
                spencer_ok,
                usize::from(!spencer_ok),
                "dim H^{r,1} = 1 for r = 1..m−4",
            ),
        ]);
        report["predictions"] = json!({
            "singer": pred.singer,
            "step_dims": pred.step_dims,
            "spencer_k1_dims": pred.spencer_k1_dims,
            "ricci": pred.ricci.row_vecs(),
            "ricci_distinct_eigenvalues": pred.ricci_distinct_eigenvalues,
        });
        report["computed"] = json!({
            "singer": filt.singer,
            "step_dims": filt.dims(),
            "spencer_k1_dims": (1..=m - 4).map(|r| table.dim(r, 1)).collect::<Vec<_>>(),
            "ricci": ric.row_vecs(),
            "ricci_distinct_eigenvalues": eig,
        });
        report["verdict"] = json!(verdict);
    }
    Ok((verdict, report))
}

fn cmd_from_lie(input: &Path, emit: Option<&Path>) -> anyhow::Result<(bool, Value)> {
    let text = load_json(input)?;
    let doc: LiePairDoc = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: not a Lie-pair document: {e}", input.display()))?;
    let pair = doc.to_lie_pair()?;
    let t = triple_from_lie_pair(&pair)?;
    let triple_doc = TripleDoc::from_triple(&t);
    if let Some(path) = emit {
        std::fs::write(path, serde_json::to_string_pretty(&triple_doc)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let report = json!({
        "format": FORMAT,
        "command": "from-lie",
        "inputs": inputs_value(&[input])?,
        "triple": serde_json::to_value(&triple_doc)?,
        "verdict": true,
    });
    Ok((true, report))
}

fn cmd_contact(t1: &Path, t2: &Path, map: &Path, order: usize) -> anyhow::Result<(bool, Value)> {
    let a = load_triple(t1)?;
    let b = load_triple(t2)?;
    let doc: MapDoc = serde_json::from_str(&load_json(map)?)
        .map_err(|e| anyhow!("{}: not a map document: {e}", map.display()))?;
    ahs_core::io::check_format(&doc.format)?;
    let f = Matrix::from_rows(doc.f);
    let rep = verify_contact(&a, &b, &f, order)?;
    let mut checks = vec![
        check_entry(
            "curvature_torsion_match",
            rep.curvature_torsion_match,
            usize::from(!rep.curvature_torsion_match),
            "F*R̃ = R and F*T̃ = T",
        ),
        check_entry(
            "contact_at_requested_order",
            rep.holds_at_requested,
            usize::from(!rep.holds_at_requested),
            "F*Ã − A valued in 𝔥_{d−1}",
        ),
    ];
    // cross-check against the definition when the order is small enough to
    // materialize the covariant derivatives
    if order <= 4 {
        let defn = verify_contact_defn(&a, &b, &f, order)?;
        checks.push(check_entry(
            "definition_agrees",
            defn == rep.holds_at_requested,
            usize::from(defn != rep.holds_at_requested),
            "F*(∇^r R̃, ∇^r T̃) = (∇^r R, ∇^r T) for r ≤ d",
        ));
    }
    let verdict = rep.holds_at_requested;
    let report = json!({
        "format": FORMAT,
        "command": "contact",
        "inputs": inputs_value(&[t1, t2, map])?,
        "order": order,
        "max_finite_order": rep.max_finite_order,
        "all_orders": rep.all_orders,
        "singer": rep.singer,
        "checks": checks,
        "verdict": verdict,
    });
    Ok((verdict, report))
}

fn cmd_su_verify(input: &Path) -> anyhow::Result<(bool, Value)> {
    let text = load_json(input)?;
    let doc: SuDoc = serde_json::from_str(&text)
        .map_err(|e| anyhow!("{}: not an SU-structure document: {e}", input.display()))?;
    let s = doc.to_structure()?;
    let rep = verify_su_structure(&s, doc.n)?;
    let checks = vec![
        check_entry(
            "complex_operator_squares_to_minus_id",
            rep.complex_square,
            usize::from(!rep.complex_square),
            "I² = −id",
        ),
        check_entry(
            "metric_is_hermitian",
            rep.metric_compatible,
            usize::from(!rep.metric_compatible),
            "g(I·, I·) = g",
        ),
        check_entry(
            "volume_form_alternating",
            rep.psi_alternating,
            usize::from(!rep.psi_alternating),
            "ψ ∈ Λⁿ V*",
        ),
        check_entry(
            "derivation_eigenvalue",
            rep.derivation_eigenvalue,
            usize::from(!rep.derivation_eigenvalue),
            "Der_I² ψ = −n² ψ",
        ),
        check_entry(
            "volume_norm",
            rep.norm_ok,
            usize::from(!rep.norm_ok),
            "g⁻¹(ψ, ψ) = 2^{n−1}",
        ),
    ];
    let report = json!({
        "format": FORMAT,
        "command": "su-verify",
        "inputs": inputs_value(&[input])?,
        "n": doc.n,
        "norm": rep.norm,
        "checks": checks,
        "verdict": rep.verdict,
    });
    Ok((rep.verdict, report))
}

fn cmd_assemble(
    input: &Path,
    ambient: &str,
    metric: Option<&Path>,
) -> anyhow::Result<(bool, Value)> {
    let t = load_triple(input)?;
    let n = t.dim();
    let k = resolve_ambient(ambient, metric, n)?;
    let filt = stabilizer_filtration(&t, &k.subspace);
    let pair = assemble_g(filt.h_infinity(), &t)?;
    let back = triple_from_lie_pair(&pair)?;
    let round_trip = back.connection() == t.connection()
        && back.curvature() == t.curvature()
        && back.torsion() == t.torsion();
    let checks = vec![
        check_entry(
            "bracket_satisfies_jacobi",
            true,
            0,
            "Jac ≡ 0 on 𝔥_∞ ⊕ {A_x ⊕ x}",
        ),
        check_entry(
            "triple_round_trip",
            round_trip,
            usize::from(!round_trip),
            "realized triple of the assembled pair equals the input",
        ),
    ];
    let report = json!({
        "format": FORMAT,
        "command": "assemble",
        "inputs": inputs_value(&[input])?,
        "ambient": ambient,
        "dim_g": pair.dim_g,
        "lie_pair": serde_json::to_value(LiePairDoc::from_lie_pair(&pair))?,
        "checks": checks,
        "verdict": round_trip,
    });
    Ok((round_trip, report))
}

fn cmd_corpus(dir: &Path) -> anyhow::Result<(bool, Value)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut entries = Vec::new();
    let (mut passed, mut failed, mut errors) = (0usize, 0usize, 0usize);
    for path in &files {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let outcome = corpus_one(path);
        match outcome {
            Ok((kind, verdict)) => {
                if verdict {
                    passed += 1;
                } else {
                    failed += 1;
                }
                entries.push(json!({ "file": name, "kind": kind, "verdict": verdict }));
            }
            Err(e) => {
                errors += 1;
                entries.push(json!({ "file": name, "error": format!("{e:#}") }));
            }
        }
    }
    let verdict = failed == 0 && errors == 0;
    let report = json!({
        "format": FORMAT,
        "command": "corpus",
        "directory": dir.display().to_string(),
        "files": entries,
        "aggregate": { "total": files.len(), "passed": passed, "failed": failed, "errors": errors },
        "verdict": verdict,
    });
    Ok((verdict, report))
}

fn corpus_one(path: &Path) -> anyhow::Result<(&'static str, bool)> {
    let text = load_json(path)?;
    match ahs_core::io::parse_document(&text)? {
        Document::Triple(doc) => {
            let t = doc.to_triple()?;
            let k = KAlgebra::gl(t.dim());
            Ok(("triple", membership_k(&t, &k).verdict))
        }
        Document::LiePair(doc) => {
            let pair = doc.to_lie_pair()?;
            let t = triple_from_lie_pair(&pair)?;
            let k = KAlgebra::gl(t.dim());
            Ok(("lie_pair", membership_k(&t, &k).verdict))
        }
        Document::Su(doc) => {
            let s = doc.to_structure()?;
            Ok(("su", verify_su_structure(&s, doc.n)?.verdict))
        }
    }
}
