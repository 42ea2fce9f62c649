//! `bread` — the command-line surface of the stage pipeline.
//!
//! Commands: `check-seq`, `stage`, `verify <claim>`, `opnorm <expr>`,
//! `spectrum`, `mirkil`, `report`.  Every command prints one deterministic
//! JSON document (reports may also render CSV); identical configuration
//! reproduces identical bytes.
//!
//! Exit codes: `0` success, `1` a checked verdict failed, `2` usage or
//! configuration problem, `3` a computation hit a resource wall or an
//! interval could not decide — resource limits are reported, never guessed
//! through.

mod config;
mod expr;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use bread_core::functional::StageFunctional;
use bread_core::numeric::{pow2, rint, Rational};
use bread_core::opnorm::{cai_defects, global_norm, op_norm, StageOperator, TruncatedVerdict};
use bread_core::report::{
    build_report, condition_json, enclosure_json, global_norm_json, norm_json, rational_json,
    Report, ReportConfig,
};
use bread_core::seminorm::{
    decomposition_verdicts, product_bound, StageSeminorm, StageVerdict, ENUM_BUDGET,
};
use bread_core::sequence::conditions::{check_growth_conditions, Verdict};
use bread_core::spectral::{mirkil_verify, TruncatedModel};
use bread_core::stage::max_buildable_stage;
use bread_core::Error as CoreError;

use config::{Format, Overrides, RunConfig};

// === exit codes ===

const EXIT_OK: u8 = 0;
const EXIT_VERDICT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNDECIDABLE: u8 = 3;

// === argument surface ===

#[derive(Parser)]
#[command(
    name = "bread",
    version,
    about = "Exact finite-stage models of a singly generated sequence algebra",
    max_term_width = 100
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide every growth condition on the configured sequence.
    CheckSeq,
    /// Materialize one stage and print its geometry.
    Stage {
        /// Stage number (1-based).
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Also run the enumeration cross-check up to the configured degree.
        #[arg(long)]
        enumerate: bool,
    },
    /// Verify a named quantitative claim.
    ///
    /// Claims: nm21 (generators are contractions), nm22 (norm comparison),
    /// le (lower bound), 6.4 (low-degree sum), 7.2 (high-degree tail),
    /// 8.1 (coordinate sum), fin (full decomposition chain), cai
    /// (approximate-identity defects), lemma2 (spectral idempotents).
    Verify {
        /// One of: nm21, nm22, le, 6.4, 7.2, 8.1, fin, cai, lemma2.
        claim: String,
        /// Stage number for stagewise claims.
        #[arg(long)]
        n: Option<u64>,
        /// Approximate-identity level for `cai`.
        #[arg(long)]
        k: Option<u64>,
        /// Truncation size for `lemma2`.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Certified operator-norm table for an element expression.
    Opnorm {
        /// Element expression, e.g. "g", "g^2 - 3*e(2)", "(1-g)*gn(2)".
        expr: String,
    },
    /// Spectral idempotents of the truncated diagonal model, both routes.
    Spectrum {
        /// Truncation size.
        #[arg(long, default_value_t = 10)]
        m: usize,
        /// Eigenvalue index (the idempotent recovered is the j-th).
        #[arg(long, default_value_t = 3)]
        j: usize,
        /// Contour radius denominator: radius = 2^(-j)/den.
        #[arg(long, default_value_t = 3)]
        radius_den: u64,
        /// Trapezoid quadrature nodes.
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Exact structure checks on the weighted comparison algebra.
    Mirkil {
        /// Truncation size.
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Consolidated stage/condition report (JSON or CSV).
    Report,
}

// === outcome plumbing ===

/// What a command produced: a document plus the exit class.
struct CmdOutput {
    value: Value,
    exit: u8,
}

fn ok(value: Value) -> Result<CmdOutput, Failure> {
    Ok(CmdOutput { value, exit: EXIT_OK })
}

fn with_exit(value: Value, exit: u8) -> Result<CmdOutput, Failure> {
    Ok(CmdOutput { value, exit })
}

/// A command that could not produce a document at all.
struct Failure {
    message: String,
    exit: u8,
}

fn usage_failure(message: impl Into<String>) -> Failure {
    Failure { message: message.into(), exit: EXIT_USAGE }
}

/// Map a core error to the exit contract: malformed input is usage,
/// everything resource-shaped is `undecidable`, never a panic.
fn core_failure(e: CoreError) -> Failure {
    let exit = match &e {
        CoreError::InvalidSequence(_) | CoreError::GammaIndexOutOfRange { .. } => EXIT_USAGE,
        CoreError::ContourOnSpectrum(_) | CoreError::ProbeAtEigenvalue(_) => EXIT_USAGE,
        _ => EXIT_UNDECIDABLE,
    };
    Failure { message: e.to_string(), exit }
}

fn verdict_exit(all_hold: bool, any_undecidable: bool) -> u8 {
    if any_undecidable {
        EXIT_UNDECIDABLE
    } else if all_hold {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

fn stage_verdicts_json(verdicts: &[StageVerdict]) -> (Value, u8) {
    let all_hold = verdicts.iter().all(|v| v.verdict == Verdict::Holds);
    let any_und = verdicts.iter().any(|v| v.verdict == Verdict::Undecidable);
    let value = verdicts
        .iter()
        .map(|v| json!({ "id": v.id, "verdict": v.verdict.as_str(), "detail": v.detail }))
        .collect::<Vec<_>>()
        .into();
    (value, verdict_exit(all_hold, any_und))
}

// === commands ===

fn build_norm(cfg: &RunConfig, n: u64) -> Result<StageSeminorm, Failure> {
    let sf = StageFunctional::new(&cfg.sequence, n, cfg.dimension_cap).map_err(core_failure)?;
    StageSeminorm::new(sf).map_err(core_failure)
}

fn cmd_check_seq(cfg: &RunConfig) -> Result<CmdOutput, Failure> {
    let records = check_growth_conditions(&cfg.sequence, cfg.n_max);
    let any_fails = records.iter().any(|r| r.verdict == Verdict::Fails);
    let value = json!({
        "sequence": cfg.sequence.name(),
        "n_max": cfg.n_max,
        "conditions": records.iter().map(condition_json).collect::<Vec<_>>(),
    });
    with_exit(value, if any_fails { EXIT_VERDICT } else { EXIT_OK })
}

fn cmd_stage(cfg: &RunConfig, n: u64, enumerate: bool) -> Result<CmdOutput, Failure> {
    let norm = build_norm(cfg, n)?;
    let sf = norm.functional();
    let stage = sf.stage();
    let generators: Vec<Value> = stage
        .generators()
        .into_iter()
        .map(|g| {
            json!({
                "generator": g.describe(),
                "radius": rational_json(&stage.generator_radius(g)),
            })
        })
        .collect();
    let mut value = json!({
        "n": n,
        "window": [stage.window_start(), stage.window_end()],
        "dimension": stage.dimension(),
        "xi": sf.xi(),
        "lambda_size": sf.lambda_set().len(),
        "lambda": sf.lambda().iter().map(rational_json).collect::<Vec<_>>(),
        "functional_basis": sf.f().iter().map(rational_json).collect::<Vec<_>>(),
        "generators": generators,
    });
    if enumerate {
        let gamma0 = stage.gamma(0);
        let closed = norm.seminorm_sq(&gamma0);
        let partials = norm
            .enumeration_partials(&gamma0, cfg.enum_degree)
            .map_err(core_failure)?;
        value["enumeration"] = json!({
            "element": "gamma0",
            "degree": cfg.enum_degree,
            "partials": partials.iter().map(rational_json).collect::<Vec<_>>(),
            "closed_form": rational_json(&closed),
        });
    }
    ok(value)
}

/// nm21: every stage generator is a seminorm contraction (exact PSD
/// certificate) with certified operator norm at most one.
fn cmd_verify_nm21(cfg: &RunConfig, n: u64) -> Result<CmdOutput, Failure> {
    let norm = build_norm(cfg, n)?;
    let stage = norm.functional().stage();
    let tolerance = rint(1) + pow2(-(cfg.precision_bits as i64));
    let mut rows = Vec::new();
    let mut all_hold = true;
    for gen in stage.generators() {
        let certificate = norm.contraction_certificate(gen).is_psd();
        let op = StageOperator::from_diagonal(stage.n(), stage.generator_coords(gen));
        let enclosure = op_norm(&norm, &op, cfg.precision_bits).map_err(core_failure)?;
        let bounded = enclosure.hi <= tolerance;
        all_hold &= certificate && bounded;
        rows.push(json!({
            "generator": gen.describe(),
            "contraction_certificate": if certificate { "holds" } else { "fails" },
            "norm": norm_json(&enclosure),
            "norm_at_most_one": if bounded { "holds" } else { "fails" },
        }));
    }
    let value = json!({
        "claim": "nm21",
        "n": n,
        "precision_bits": cfg.precision_bits,
        "generators": rows,
    });
    with_exit(value, if all_hold { EXIT_OK } else { EXIT_VERDICT })
}

/// Single-verdict stage claims: nm22 / 6.4 / 7.2 / 8.1 pick one row of the
/// decomposition verdict table; fin reports the whole chain.
fn cmd_verify_decomposition(
    cfg: &RunConfig,
    claim: &str,
    n: u64,
) -> Result<CmdOutput, Failure> {
    let norm = build_norm(cfg, n)?;
    let dec = norm.gamma_decomposition(ENUM_BUDGET);
    let verdicts = decomposition_verdicts(&norm, &dec);
    let wanted: &[&str] = match claim {
        "nm22" => &["norm-comparison"],
        "6.4" => &["low-degree-sum"],
        "7.2" => &["high-degree-tail"],
        "8.1" => &["coordinate-sum"],
        "fin" => &[
            "partition-identity",
            "low-degree-sum",
            "high-degree-tail",
            "coordinate-sum",
            "norm-comparison",
        ],
        _ => unreachable!("callers dispatch only the claims above"),
    };
    let selected: Vec<StageVerdict> =
        verdicts.into_iter().filter(|v| wanted.contains(&v.id)).collect();
    let (verdict_json, exit) = stage_verdicts_json(&selected);
    let value = json!({
        "claim": claim,
        "n": n,
        "seminorms": {
            "gamma0_sq": enclosure_json(dec.g0_sq.lo(), dec.g0_sq.hi()),
            "gamma1_sq": enclosure_json(dec.g1_sq.lo(), dec.g1_sq.hi()),
        },
        "sums": {
            "i1": enclosure_json(dec.i1.lo(), dec.i1.hi()),
            "i2": enclosure_json(dec.i2.lo(), dec.i2.hi()),
            "i3": enclosure_json(dec.i3.lo(), dec.i3.hi()),
            "identity_holds": dec.identity_holds,
        },
        "verdicts": verdict_json,
    });
    with_exit(value, exit)
}

/// le: the seminorm lower bound `‖γ₁‖² ≥ ½·Π(j+1)²/(2j+1)`, with the
/// registry conditions attached so a failing sequence names its failures.
fn cmd_verify_le(cfg: &RunConfig, n: u64) -> Result<CmdOutput, Failure> {
    let norm = build_norm(cfg, n)?;
    let dec = norm.gamma_decomposition(ENUM_BUDGET);
    let bound = product_bound(n) / rint(2);
    let verdict = if dec.g1_sq.lo() >= &bound {
        Verdict::Holds
    } else if dec.g1_sq.hi() < &bound {
        Verdict::Fails
    } else {
        Verdict::Undecidable
    };
    let conditions = check_growth_conditions(&cfg.sequence, n);
    let failing: Vec<&str> = conditions
        .iter()
        .filter(|r| r.verdict == Verdict::Fails)
        .map(|r| r.id)
        .collect();
    let value = json!({
        "claim": "le",
        "n": n,
        "gamma1_sq": enclosure_json(dec.g1_sq.lo(), dec.g1_sq.hi()),
        "bound": rational_json(&bound),
        "verdict": verdict.as_str(),
        "conditions_failing": failing,
    });
    with_exit(value, verdict_exit(verdict == Verdict::Holds, verdict == Verdict::Undecidable))
}

fn truncated_rows(label: &str, g: &bread_core::opnorm::GlobalNorm, threshold: &Rational, v: TruncatedVerdict) -> Value {
    json!({
        "quantity": label,
        "norm": global_norm_json(g),
        "threshold": rational_json(threshold),
        "verdict": v.describe(),
    })
}

/// Stages requested, clamped to what the materialized prefix can build.
fn stage_budget(cfg: &RunConfig) -> u64 {
    max_buildable_stage(&cfg.sequence, cfg.dimension_cap).min(cfg.n_max)
}

/// cai: the three approximate-identity defect bounds at level `k`.
fn cmd_verify_cai(cfg: &RunConfig, k: u64) -> Result<CmdOutput, Failure> {
    let d = cai_defects(&cfg.sequence, k, stage_budget(cfg), cfg.precision_bits)
        .map_err(core_failure)?;
    let rows = vec![
        truncated_rows("norm_yk", &d.norm_yk, &d.thresholds[0], d.verdicts[0]),
        truncated_rows("defect_g", &d.defect, &d.thresholds[1], d.verdicts[1]),
        truncated_rows("tail", &d.tail, &d.thresholds[2], d.verdicts[2]),
    ];
    let any_fails = d.verdicts.iter().any(|v| matches!(v, TruncatedVerdict::Fails));
    let any_und = d.verdicts.iter().any(|v| matches!(v, TruncatedVerdict::Undecided));
    let value = json!({
        "claim": "cai",
        "k": k,
        "a_k": d.a_k,
        "sup_norm_xk": rational_json(&d.sup_norm_xk),
        "checks": rows,
    });
    with_exit(value, if any_fails { EXIT_VERDICT } else if any_und { EXIT_UNDECIDABLE } else { EXIT_OK })
}

/// lemma2: exact spectral-idempotent recovery on the truncated model.
fn cmd_verify_lemma2(m: usize) -> Result<CmdOutput, Failure> {
    if m == 0 {
        return Err(usage_failure("truncation size must be positive"));
    }
    let model = TruncatedModel::new(m);
    let mut rows = Vec::new();
    let mut all_exact = true;
    let mut sum = vec![Rational::from_integer(0.into()); m];
    for j in 1..=m {
        let p = model.spectral_idempotent(j, 3).map_err(core_failure)?;
        let is_unit = p
            .iter()
            .enumerate()
            .all(|(i, v)| *v == if i + 1 == j { rint(1) } else { rint(0) });
        all_exact &= is_unit;
        for (s, v) in sum.iter_mut().zip(&p) {
            *s = &*s + v;
        }
        let (quad, err) = model.contour_idempotent(j, 3, 64).map_err(core_failure)?;
        let _ = quad;
        rows.push(json!({
            "j": j,
            "partial_fractions_is_unit_vector": is_unit,
            "contour_error_estimate": format!("{err:.3e}"),
        }));
    }
    let sum_is_identity = sum.iter().all(|v| *v == rint(1));
    let value = json!({
        "claim": "lemma2",
        "m": m,
        "idempotents": rows,
        "sum_is_identity": sum_is_identity,
    });
    with_exit(value, if all_exact && sum_is_identity { EXIT_OK } else { EXIT_VERDICT })
}

fn cmd_verify(cfg: &RunConfig, claim: &str, n: Option<u64>, k: Option<u64>, m: Option<usize>) -> Result<CmdOutput, Failure> {
    let n = n.unwrap_or(1);
    match claim {
        "nm21" => cmd_verify_nm21(cfg, n),
        "nm22" | "6.4" | "7.2" | "8.1" | "fin" => cmd_verify_decomposition(cfg, claim, n),
        "le" => cmd_verify_le(cfg, n),
        "cai" => cmd_verify_cai(cfg, k.unwrap_or(1)),
        "lemma2" => cmd_verify_lemma2(m.unwrap_or(10)),
        other => Err(usage_failure(format!(
            "unknown claim `{other}` (expected nm21, nm22, le, 6.4, 7.2, 8.1, fin, cai, lemma2)"
        ))),
    }
}

fn cmd_opnorm(cfg: &RunConfig, expr_src: &str) -> Result<CmdOutput, Failure> {
    let element = expr::parse_element(expr_src).map_err(|e| usage_failure(e.0))?;
    let g = global_norm(&cfg.sequence, &element, stage_budget(cfg), cfg.precision_bits)
        .map_err(core_failure)?;
    let value = json!({
        "expression": expr_src,
        "precision_bits": cfg.precision_bits,
        "norm": global_norm_json(&g),
    });
    ok(value)
}

fn cmd_spectrum(m: usize, j: usize, radius_den: u64, nodes: usize) -> Result<CmdOutput, Failure> {
    if m == 0 || j == 0 || j > m {
        return Err(usage_failure("need 1 ≤ j ≤ m"));
    }
    if radius_den == 0 {
        return Err(usage_failure("radius denominator must be positive"));
    }
    if nodes < 4 {
        return Err(usage_failure("need at least 4 quadrature nodes"));
    }
    let model = TruncatedModel::new(m);
    let exact = model.spectral_idempotent(j, radius_den).map_err(core_failure)?;
    let (quad, err) = model.contour_idempotent(j, radius_den, nodes).map_err(core_failure)?;
    let value = json!({
        "m": m,
        "j": j,
        "radius_den": radius_den,
        "nodes": nodes,
        "spectrum": model.spectrum().iter().map(rational_json).collect::<Vec<_>>(),
        "idempotent_exact": exact.iter().map(rational_json).collect::<Vec<_>>(),
        "idempotent_quadrature": quad
            .iter()
            .map(|z| json!([format!("{:.17e}", z.re), format!("{:.17e}", z.im)]))
            .collect::<Vec<_>>(),
        "quadrature_error_estimate": format!("{err:.3e}"),
        "generating_polynomial": model
            .generating_polynomial(j)
            .iter()
            .map(rational_json)
            .collect::<Vec<_>>(),
    });
    ok(value)
}

fn cmd_mirkil(n: usize) -> Result<CmdOutput, Failure> {
    if n == 0 {
        return Err(usage_failure("truncation size must be positive"));
    }
    let report = mirkil_verify(n);
    let value = json!({
        "n": report.n,
        "product_laws_hold": report.product_laws_hold,
        "idempotents_hold": report.idempotents_hold,
        "characters_hold": report.characters_hold,
        "power_norms": report
            .power_norms
            .iter()
            .map(|(k, v)| json!([k, rational_json(v)]))
            .collect::<Vec<_>>(),
        "tail_residuals": report
            .tail_residuals
            .iter()
            .map(|(k, v)| json!([k, rational_json(v)]))
            .collect::<Vec<_>>(),
    });
    with_exit(value, if report.all_hold() { EXIT_OK } else { EXIT_VERDICT })
}

fn cmd_report(cfg: &RunConfig) -> Result<(String, u8), Failure> {
    let rc = ReportConfig {
        sequence: cfg.sequence.clone(),
        n_max: cfg.n_max,
        dimension_cap: cfg.dimension_cap,
        precision_bits: cfg.precision_bits,
    };
    let report: Report = build_report(&rc).map_err(core_failure)?;
    let rendered = match cfg.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv().to_string(),
    };
    Ok((rendered, EXIT_OK))
}

// === output sink ===

fn emit(cfg: &RunConfig, rendered: &str) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => std::fs::write(path, rendered).map_err(|e| Failure {
            message: format!("cannot write {}: {e}", path.display()),
            exit: EXIT_USAGE,
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable by construction");
    s.push('\n');
    s
}

fn run() -> Result<u8, Failure> {
    let cli = Cli::parse();
    let cfg = config::resolve(&cli.overrides).map_err(|e| usage_failure(e.0))?;

    let (rendered, exit) = match &cli.command {
        Command::CheckSeq => {
            let out = cmd_check_seq(&cfg)?;
            (render(&out.value), out.exit)
        }
        Command::Stage { n, enumerate } => {
            let out = cmd_stage(&cfg, *n, *enumerate)?;
            (render(&out.value), out.exit)
        }
        Command::Verify { claim, n, k, m } => {
            let out = cmd_verify(&cfg, claim, *n, *k, *m)?;
            (render(&out.value), out.exit)
        }
        Command::Opnorm { expr } => {
            let out = cmd_opnorm(&cfg, expr)?;
            (render(&out.value), out.exit)
        }
        Command::Spectrum { m, j, radius_den, nodes } => {
            let out = cmd_spectrum(*m, *j, *radius_den, *nodes)?;
            (render(&out.value), out.exit)
        }
        Command::Mirkil { n } => {
            let out = cmd_mirkil(*n)?;
            (render(&out.value), out.exit)
        }
        Command::Report => cmd_report(&cfg)?,
    };
    emit(&cfg, &rendered)?;
    Ok(exit)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.exit)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bread_core::GrowthSequence;

    #[test]
    fn verify_dispatch_rejects_unknown_claims() {
        let cfg = RunConfig {
            sequence: GrowthSequence::from_integers("t", &[2, 9, 10, 11, 12, 13, 14, 15, 16])
                .unwrap(),
            n_max: 1,
            dimension_cap: 512,
            enum_degree: 4,
            precision_bits: 16,
            output: None,
            format: Format::Json,
        };
        let r = cmd_verify(&cfg, "nope", None, None, None);
        assert!(r.is_err());
        assert_eq!(r.err().unwrap().exit, EXIT_USAGE);
    }

    #[test]
    fn core_errors_map_to_the_exit_contract() {
        assert_eq!(
            core_failure(CoreError::InvalidSequence("x".into())).exit,
            EXIT_USAGE
        );
        assert_eq!(
            core_failure(CoreError::ResourceExceeded("x".into())).exit,
            EXIT_UNDECIDABLE
        );
        assert_eq!(
            core_failure(CoreError::DegenerateStage { n: 1, d: 1 }).exit,
            EXIT_UNDECIDABLE
        );
    }
}
