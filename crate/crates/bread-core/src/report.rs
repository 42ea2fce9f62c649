//! Deterministic machine-readable reports.
//!
//! One schema, two renderings:
//!
//! * **JSON** — `{meta: {sequence, caps, version}, stages: […],
//!   conditions: […]}`.  Every rational is a `[numerator, denominator]`
//!   pair of decimal *strings* (never JSON numbers, which would overflow or
//!   round); every enclosure is `{lo: [n,d], hi: [n,d]}`.  Structural
//!   integers (stage numbers, window bounds, dimensions) are plain JSON
//!   numbers, all far below 2^53.
//! * **CSV** — one row per (stage, metric) with `lo`/`hi` columns rendered
//!   as `num/den`.
//!
//! Determinism is a contract: identical configuration must reproduce
//! *byte-identical* output.  Everything here is exact or certified-interval
//! arithmetic on fixed deterministic schedules, object keys serialize in
//! sorted order, and no timestamp, duration, or host detail is ever
//! recorded.

use serde_json::{json, Value};

use crate::algebra::Element;
use crate::error::Result;
use crate::functional::StageFunctional;
use crate::numeric::Rational;
use crate::opnorm::{op_norm_element, GlobalNorm, NormEnclosure};
use crate::seminorm::{decomposition_verdicts, StageSeminorm, ENUM_BUDGET};
use crate::sequence::conditions::{check_growth_conditions, ConditionRecord};
use crate::sequence::{GrowthSequence, SeqEntry};
use crate::stage::max_buildable_stage;

/// The metrics every stage contributes to the CSV table, in column order.
pub const CSV_METRICS: [&str; 7] =
    ["gamma0_sq", "gamma1_sq", "no_e_total", "i1", "i2", "i3", "opnorm_g"];

/// Everything a report run needs to know.  The same values reproduce the
/// same bytes.
#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub sequence: GrowthSequence,
    /// Highest stage to attempt (clamped to what is actually buildable).
    pub n_max: u64,
    pub dimension_cap: u64,
    pub precision_bits: u32,
}

impl ReportConfig {
    pub fn new(sequence: GrowthSequence, n_max: u64, precision_bits: u32) -> Self {
        ReportConfig { sequence, n_max, dimension_cap: 512, precision_bits }
    }
}

/// A rational as a `[num, den]` pair of decimal strings.
pub fn rational_json(x: &Rational) -> Value {
    json!([x.numer().to_string(), x.denom().to_string()])
}

/// An enclosure as `{lo: [n,d], hi: [n,d]}`.
pub fn enclosure_json(lo: &Rational, hi: &Rational) -> Value {
    json!({ "lo": rational_json(lo), "hi": rational_json(hi) })
}

/// A norm enclosure with its method string.
pub fn norm_json(e: &NormEnclosure) -> Value {
    json!({
        "lo": rational_json(&e.lo),
        "hi": rational_json(&e.hi),
        "lo_sq": rational_json(&e.lo_sq),
        "hi_sq": rational_json(&e.hi_sq),
        "method": e.method,
    })
}

/// A stagewise global-norm table: per-stage rows, the certified lower bound,
/// the truncated upper bound, and the ambient cap when one exists.
pub fn global_norm_json(g: &GlobalNorm) -> Value {
    json!({
        "n_max": g.n_max,
        "rows": g.rows.iter().map(|r| json!({
            "n": r.n,
            "lo": rational_json(&r.enclosure.lo),
            "hi": rational_json(&r.enclosure.hi),
            "method": r.enclosure.method,
            "note": r.note,
        })).collect::<Vec<_>>(),
        "lo": rational_json(&g.lo),
        "truncated_hi": rational_json(&g.truncated_hi),
        "ambient_cap": g.ambient_cap.as_ref().map(rational_json),
    })
}

/// One growth-condition record.
pub fn condition_json(r: &ConditionRecord) -> Value {
    json!({
        "id": r.id,
        "index": r.index,
        "verdict": r.verdict.as_str(),
        "witness": r.witness,
        "detail": r.detail,
        "derived": r.derived,
    })
}

fn sequence_json(seq: &GrowthSequence) -> Value {
    let entries: Vec<Value> = (1..=seq.len() as u64)
        .map(|r| match seq.entry(r).expect("index in range") {
            SeqEntry::Exact(n) => json!(n.to_string()),
            SeqEntry::Magnitude(m) => json!({
                "log2_lo": rational_json(m.lo()),
                "log2_hi": rational_json(m.hi()),
            }),
        })
        .collect();
    json!({ "name": seq.name(), "entries": entries })
}

/// One stage's worth of report data, with the values kept as rationals for
/// the CSV rendering.
struct StageData {
    n: u64,
    json: Value,
    csv_rows: Vec<(String, Rational, Rational)>,
}

fn build_stage(cfg: &ReportConfig, n: u64) -> Result<StageData> {
    let sf = StageFunctional::new(&cfg.sequence, n, cfg.dimension_cap)?;
    let norm = StageSeminorm::new(sf)?;
    let stage = norm.functional().stage();
    let (window_start, window_end) = (stage.window_start(), stage.window_end());
    let dimension = stage.dimension();
    let xi = norm.functional().xi();
    let lambda_size = norm.functional().lambda_set().len();

    let dec = norm.gamma_decomposition(ENUM_BUDGET);
    let verdicts = decomposition_verdicts(&norm, &dec);
    let opnorm_g = op_norm_element(&norm, &Element::g(), cfg.precision_bits)?;

    let json = json!({
        "n": n,
        "window": [window_start, window_end],
        "dimension": dimension,
        "xi": xi,
        "lambda_size": lambda_size,
        "seminorms": {
            "gamma0_sq": enclosure_json(dec.g0_sq.lo(), dec.g0_sq.hi()),
            "gamma1_sq": enclosure_json(dec.g1_sq.lo(), dec.g1_sq.hi()),
        },
        "sums": {
            "no_e_total": enclosure_json(dec.no_e_total.lo(), dec.no_e_total.hi()),
            "i1": enclosure_json(dec.i1.lo(), dec.i1.hi()),
            "i2": enclosure_json(dec.i2.lo(), dec.i2.hi()),
            "i3": enclosure_json(dec.i3.lo(), dec.i3.hi()),
            "low_degree_threshold": dec.threshold,
            "i1_enumerated": dec.i1_exact,
            "exact_mode": dec.exact,
            "identity_holds": dec.identity_holds,
        },
        "opnorms": {
            "diagonal_generator": norm_json(&opnorm_g),
        },
        "verdicts": verdicts
            .iter()
            .map(|v| json!({
                "id": v.id,
                "verdict": v.verdict.as_str(),
                "detail": v.detail,
            }))
            .collect::<Vec<_>>(),
    });

    let csv_rows = vec![
        ("gamma0_sq".into(), dec.g0_sq.lo().clone(), dec.g0_sq.hi().clone()),
        ("gamma1_sq".into(), dec.g1_sq.lo().clone(), dec.g1_sq.hi().clone()),
        ("no_e_total".into(), dec.no_e_total.lo().clone(), dec.no_e_total.hi().clone()),
        ("i1".into(), dec.i1.lo().clone(), dec.i1.hi().clone()),
        ("i2".into(), dec.i2.lo().clone(), dec.i2.hi().clone()),
        ("i3".into(), dec.i3.lo().clone(), dec.i3.hi().clone()),
        ("opnorm_g".into(), opnorm_g.lo.clone(), opnorm_g.hi.clone()),
    ];

    Ok(StageData { n, json, csv_rows })
}

/// The assembled report.
#[derive(Debug, Clone)]
pub struct Report {
    value: Value,
    csv: String,
    /// True when every stage verdict and every sequence condition came back
    /// `holds`; `fails` anywhere clears it.  Undecidable results are
    /// reported separately via [`Report::any_undecidable`].
    all_hold: bool,
    any_undecidable: bool,
}

impl Report {
    pub fn json_value(&self) -> &Value {
        &self.value
    }

    /// Pretty JSON with sorted keys and a trailing newline — the byte-stable
    /// rendering the determinism contract is stated over.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("serializable by construction");
        s.push('\n');
        s
    }

    /// `stage,metric,lo,hi` rows, stages ascending, metrics in
    /// [`CSV_METRICS`] order.
    pub fn to_csv(&self) -> &str {
        &self.csv
    }

    pub fn all_hold(&self) -> bool {
        self.all_hold
    }

    pub fn any_undecidable(&self) -> bool {
        self.any_undecidable
    }
}

/// Build the consolidated report: per-stage seminorm/decomposition/norm data
/// for every buildable stage up to `n_max`, followed by the full
/// growth-condition table.
pub fn build_report(cfg: &ReportConfig) -> Result<Report> {
    let buildable = max_buildable_stage(&cfg.sequence, cfg.dimension_cap).min(cfg.n_max);
    let mut stages = Vec::new();
    for n in 1..=buildable {
        stages.push(build_stage(cfg, n)?);
    }
    let conditions = check_growth_conditions(&cfg.sequence, cfg.n_max);

    let mut all_hold = true;
    let mut any_undecidable = false;
    for s in &stages {
        for v in s.json["verdicts"].as_array().expect("built above") {
            match v["verdict"].as_str().expect("built above") {
                "holds" => {}
                "undecidable" => any_undecidable = true,
                _ => all_hold = false,
            }
        }
    }
    for c in &conditions {
        match c.verdict {
            crate::sequence::conditions::Verdict::Holds => {}
            crate::sequence::conditions::Verdict::Fails => all_hold = false,
            crate::sequence::conditions::Verdict::Undecidable => any_undecidable = true,
        }
    }

    let value = json!({
        "meta": {
            "sequence": sequence_json(&cfg.sequence),
            "caps": {
                "n_max": cfg.n_max,
                "dimension_cap": cfg.dimension_cap,
                "precision_bits": cfg.precision_bits,
                "enum_budget": ENUM_BUDGET,
            },
            "version": env!("CARGO_PKG_VERSION"),
        },
        "stages": stages.iter().map(|s| s.json.clone()).collect::<Vec<_>>(),
        "conditions": conditions.iter().map(condition_json).collect::<Vec<_>>(),
    });

    let mut csv = String::from("stage,metric,lo,hi\n");
    for s in &stages {
        for (metric, lo, hi) in &s.csv_rows {
            csv.push_str(&format!("{},{},{},{}\n", s.n, metric, lo, hi));
        }
    }

    Ok(Report { value, csv, all_hold, any_undecidable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{desk_small, paper_13, property_sequence};

    #[test]
    fn desk_report_is_deterministic_and_schema_shaped() {
        let cfg = ReportConfig::new(desk_small(), 2, 24);
        let a = build_report(&cfg).unwrap();
        let b = build_report(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "byte-identical reruns");
        assert_eq!(a.to_csv(), b.to_csv());

        let v = a.json_value();
        assert!(v["meta"]["sequence"]["name"].is_string());
        assert!(v["meta"]["caps"]["n_max"].is_u64());
        assert!(v["meta"]["version"].is_string());
        // exactly one buildable stage on the small desk sequence
        let stages = v["stages"].as_array().unwrap();
        assert_eq!(stages.len(), 1);
        assert_eq!(stages[0]["n"], 1);
        assert_eq!(stages[0]["window"], json!([2, 9]));
        assert_eq!(stages[0]["dimension"], 7);
        assert_eq!(stages[0]["xi"], 4);
        assert_eq!(stages[0]["lambda_size"], 3);
        assert!(!v["conditions"].as_array().unwrap().is_empty());

        // rationals are string pairs, never JSON numbers
        let g0 = &stages[0]["seminorms"]["gamma0_sq"];
        assert!(g0["lo"][0].is_string() && g0["lo"][1].is_string());
        assert_eq!(g0["lo"], g0["hi"], "exact mode collapses the enclosure");

        // CSV: header + stages × metrics
        let lines: Vec<&str> = a.to_csv().trim_end().lines().collect();
        assert_eq!(lines[0], "stage,metric,lo,hi");
        assert_eq!(lines.len(), 1 + CSV_METRICS.len());
        for (row, metric) in lines[1..].iter().zip(CSV_METRICS) {
            assert!(row.starts_with(&format!("1,{metric},")), "{row}");
        }
    }

    #[test]
    fn stage_verdicts_follow_the_decomposition() {
        let cfg = ReportConfig::new(property_sequence(), 1, 16);
        let report = build_report(&cfg).unwrap();
        let stages = report.json_value()["stages"].as_array().unwrap().clone();
        assert_eq!(stages.len(), 1);
        let verdicts = stages[0]["verdicts"].as_array().unwrap();
        let ids: Vec<&str> = verdicts.iter().map(|v| v["id"].as_str().unwrap()).collect();
        assert_eq!(
            ids,
            [
                "partition-identity",
                "low-degree-sum",
                "high-degree-tail",
                "coordinate-sum",
                "norm-comparison"
            ]
        );
        // the partition identity is exact on a desk stage
        assert_eq!(verdicts[0]["verdict"], "holds");
    }

    #[test]
    fn unbuildable_stages_are_skipped_not_faked() {
        // the steep sequence's second entry is an 86-bit integer: stage 1
        // would need the window (13, a₂] materialized — impossible, so the
        // report carries conditions only
        let cfg = ReportConfig::new(paper_13(), 3, 16);
        let report = build_report(&cfg).unwrap();
        let v = report.json_value();
        assert_eq!(v["stages"].as_array().unwrap().len(), 0);
        assert!(!v["conditions"].as_array().unwrap().is_empty());
        assert_eq!(report.to_csv(), "stage,metric,lo,hi\n");
    }
}
