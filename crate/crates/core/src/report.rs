//! Canonical JSON reports and CSV side tables.
//!
//! Objects are emitted with sorted keys, numbers as canonical strings
//! (`p/q` reduced, `q > 0`), and words as symbols joined with `.`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::maxplus::{
    finite_horizon_bound, max_cycle_mean, minimal_subaction, CertificateReport, SubAction,
    WeightedBlockGraph,
};
use crate::num::Scalar;
use crate::pipeline::{Analysis, Check, Comparison, PipelineError};
use crate::shift::{Symbol, Word};

pub fn word_key(word: &[Symbol]) -> String {
    word.iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(".")
}

pub fn parse_word(key: &str) -> Option<Word> {
    key.split('.').map(|s| s.parse().ok()).collect()
}

pub fn to_canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn vertex_map<S: Scalar>(g: &WeightedBlockGraph<S>, u: &SubAction<S>) -> Value {
    let map: BTreeMap<String, String> = g
        .graph()
        .vertices()
        .iter()
        .zip(&u.values)
        .map(|(w, v)| (word_key(w), v.canonical()))
        .collect();
    json!(map)
}

fn edge_list<S: Scalar>(g: &WeightedBlockGraph<S>, edges: &[usize]) -> Value {
    json!(edges
        .iter()
        .map(|&e| word_key(&g.graph().edges()[e].word))
        .collect::<Vec<_>>())
}

fn checks_json(checks: &[Check]) -> Value {
    json!(checks
        .iter()
        .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
        .collect::<Vec<_>>())
}

pub fn render<S: Scalar>(a: &Analysis<S>) -> Value {
    let g = a.graph();
    let t = &a.truncation;
    let m = &a.model;
    let k0 = a.cert.k0;
    let spread = S::from_count(k0) * (a.constants.sup.clone() - a.beta().clone());
    let osc_bound = a.constants.oscillation_bound(k0);
    let u_a_bound = if spread > osc_bound { spread } else { osc_bound.clone() };

    let classes: Vec<Value> = a
        .classes
        .iter()
        .map(|c| {
            let measure: BTreeMap<String, String> = c
                .measure
                .edge_freq
                .iter()
                .map(|(w, f)| (word_key(w), f.canonical()))
                .collect();
            json!({
                "vertices": c.vertices.iter().map(|&v| word_key(&g.graph().vertices()[v])).collect::<Vec<_>>(),
                "edges": edge_list(g, &c.edges),
                "cycle": c.cycle.edges().iter().map(|w| word_key(w)).collect::<Vec<_>>(),
                "measure": measure,
                "integral": c.integral.canonical(),
            })
        })
        .collect();

    let support = match &a.support {
        None => Value::Null,
        Some(Ok(level)) => json!({"eta": a.eta.canonical(), "threshold": level}),
        Some(Err(e)) => json!({"eta": a.eta.canonical(), "error": e.code(), "message": e.to_string()}),
    };

    let cert = &a.certificate;
    json!({
        "schema": crate::config::SCHEMA_VERSION,
        "config_sha256": a.config_hash,
        "mode": S::MODE.as_str(),
        "model": {
            "kind": if m.is_finite() { "finite" } else { "countable" },
            "i_max": m.i_max(),
            "range": m.potential().range(),
            "declared": {
                "sup": m.declared_sup().canonical(),
                "var_total": m.declared_var_total().canonical(),
            },
            "explicit": {
                "sup": a.validation.explicit_sup.canonical(),
                "var_total": a.validation.explicit_var_total.canonical(),
            },
        },
        "primitivity": {
            "connecting_set": a.cert.connecting.as_slice(),
            "k0": k0,
            "k0_cap": a.k0_cap,
            "i_f": t.i_f,
        },
        "variation": {
            "var_k": a.summary.var_k.iter().map(|v| v.canonical()).collect::<Vec<_>>(),
            "var_total": a.summary.var_total.canonical(),
            "var_0": a.summary.var_0.canonical(),
            "sup": a.summary.sup.canonical(),
            "inf_on_f": a.summary.inf_on_f.canonical(),
        },
        "truncation": {
            "i_hat": t.i_hat.level,
            "source": a.source.as_str(),
            "threshold": t.i_hat.threshold.canonical(),
            "margin": t.i_hat.margin.as_ref().map(|m| m.canonical()),
            "window": t.window,
            "beta_by_level": t.beta_by_level.iter()
                .map(|(l, b)| json!({"level": l, "beta": b.canonical()}))
                .collect::<Vec<_>>(),
            "monotone": t.monotone,
            "plateau": t.plateau_ok,
            "localized": t.localized,
            "lower_bound": t.lower_bound_ok,
        },
        "level": t.i_hat.level,
        "beta": a.beta().canonical(),
        "calibrated_subaction": {
            "beta": a.calibrated.beta.canonical(),
            "u": vertex_map(g, &a.calibrated),
            "osc": cert.osc.canonical(),
            "osc_bound": osc_bound.canonical(),
        },
        "minimal_subaction": {
            "beta": a.minimal.beta.canonical(),
            "u": vertex_map(g, &a.minimal),
            "bound": u_a_bound.canonical(),
        },
        "certificate": {
            "verdict": cert.verdict.as_str(),
            "max_defect": cert.max_defect.canonical(),
            "worst_edge": cert.worst_edge.map(|e| word_key(&g.graph().edges()[e].word)),
            "defects_nonpositive": cert.defects_nonpositive,
            "tight_cycle": cert.tight_cycle,
        },
        "omega": {
            "tight_edges": edge_list(g, &a.tight_edges),
            "critical_edges": edge_list(g, &a.critical_edges),
            "classes": classes,
        },
        "finite_horizon": a.horizon.iter()
            .map(|(k, v)| json!({"k": k, "value": v.canonical()}))
            .collect::<Vec<_>>(),
        "support_bound": support,
        "checks": checks_json(&a.checks),
        "verdict": if a.passed() { "PASS" } else { "FALSIFIED" },
    })
}

pub fn beta_csv<S: Scalar>(a: &Analysis<S>) -> String {
    let mut s = String::from("level,beta\n");
    for (level, b) in &a.truncation.beta_by_level {
        s.push_str(&format!("{level},{}\n", b.canonical()));
    }
    s
}

pub fn horizon_csv<S: Scalar>(a: &Analysis<S>) -> String {
    let mut s = String::from("k,sup_sk_over_k,beta\n");
    for (k, v) in &a.horizon {
        s.push_str(&format!("{k},{},{}\n", v.canonical(), a.beta().canonical()));
    }
    s
}

/// Recomputes the numbers a report states about `g` and compares them with
/// the serialized values.
pub fn audit<S: Scalar>(
    rep: &Value,
    g: &WeightedBlockGraph<S>,
    u: &SubAction<S>,
) -> Result<Vec<Check>, PipelineError> {
    let text = |v: &Value| v.as_str().map(str::to_string);
    let beta = max_cycle_mean(g)?;
    let mut checks = vec![
        Check {
            name: "audit.beta",
            pass: text(&rep["beta"]) == Some(beta.canonical()),
            detail: format!("recomputed beta {}", beta.canonical()),
        },
        Check {
            name: "audit.calibrated_beta",
            pass: u.beta.approx_eq(&beta),
            detail: format!("sub-action beta {}", u.beta.canonical()),
        },
        Check {
            name: "audit.osc",
            pass: text(&rep["calibrated_subaction"]["osc"]) == Some(u.osc().canonical()),
            detail: format!("osc(u) = {}", u.osc().canonical()),
        },
    ];
    let minimal = minimal_subaction(g, &beta)?;
    checks.push(Check {
        name: "audit.minimal_subaction",
        pass: rep["minimal_subaction"]["u"] == vertex_map(g, &minimal),
        detail: "u_A recomputed from the graph".into(),
    });
    let horizon = rep["finite_horizon"].as_array().cloned().unwrap_or_default();
    let mut same = !horizon.is_empty();
    for entry in &horizon {
        let k = entry["k"].as_u64().unwrap_or(0) as usize;
        same &= k >= 1 && text(&entry["value"]) == Some(finite_horizon_bound(g, k)?.canonical());
    }
    checks.push(Check {
        name: "audit.finite_horizon",
        pass: same,
        detail: format!("{} horizon values recomputed", horizon.len()),
    });
    Ok(checks)
}

pub fn render_verify<S: Scalar>(
    g: &WeightedBlockGraph<S>,
    u: &SubAction<S>,
    cert: &CertificateReport<S>,
    level: Symbol,
    audit: &[Check],
) -> Value {
    let valid = cert.verdict == crate::maxplus::Verdict::Valid && audit.iter().all(|c| c.pass);
    json!({
        "level": level,
        "beta": u.beta.canonical(),
        "max_defect": cert.max_defect.canonical(),
        "worst_edge": cert.worst_edge.map(|e| word_key(&g.graph().edges()[e].word)),
        "defects_nonpositive": cert.defects_nonpositive,
        "tight_cycle": cert.tight_cycle,
        "osc": cert.osc.canonical(),
        "audit": checks_json(audit),
        "verdict": if valid { "VALID" } else { "INVALID" },
    })
}

pub fn comparison_table(rows: &[Comparison]) -> String {
    let headers = ["instance", "quantity", "fast", "brute", "equal"];
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.instance.clone(),
                r.quantity.clone(),
                r.fast.clone(),
                r.brute.clone(),
                if r.equal { "yes" } else { "NO" }.to_string(),
            ]
        })
        .collect();
    let mut width = headers.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cols: &[String]| {
        cols.iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(&headers.map(String::from));
    out.push('\n');
    for row in &cells {
        out.push_str(&line(row));
        out.push('\n');
    }
    let bad = rows.iter().filter(|r| !r.equal).count();
    out.push_str(&format!("{} comparisons, {} mismatches\n", rows.len(), bad));
    out
}
