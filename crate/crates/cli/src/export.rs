//! Renderers for the tool's artifacts. Everything is deterministic: big
//! integers as decimal strings, exact values as reduced `num/den`
//! fractions, maps in sorted order, one trailing newline.

use num_bigint::BigUint;
use psiperm_core::cf::{Convergent, ErrorValue};
use psiperm_core::dynamics::{Crossing, KIndexEstimate, PermutationTrace};
use psiperm_core::forge::VerifyReport;
use psiperm_core::lemmas::{CondRel, CorpusScanSummary, LemmaFinding};
use psiperm_core::psi::PsiFunction;
use serde_json::{json, Value};

use crate::CliError;

fn bounds_strings(xi: &ErrorValue) -> (String, String) {
    let (lo, hi) = xi.bounds();
    (lo.to_fraction_string(), hi.to_fraction_string())
}

pub fn convergents_csv(convs: &[Convergent]) -> String {
    let mut out = String::from("nu,p,q\n");
    for c in convs {
        out.push_str(&format!("{},{},{}\n", c.index, c.p, c.q));
    }
    out
}

pub fn convergents_json(convs: &[Convergent]) -> Value {
    json!({
        "convergents": convs
            .iter()
            .map(|c| json!({"nu": c.index, "p": c.p.to_string(), "q": c.q.to_string()}))
            .collect::<Vec<_>>()
    })
}

/// Step-function rows: `t_start,t_end,nu,q_nu,xi_lo,xi_hi`.
pub fn psi_csv(f: &mut PsiFunction, t_min: &BigUint, t_max: &BigUint) -> Result<String, CliError> {
    let mut out = String::from("t_start,t_end,nu,q_nu,xi_lo,xi_hi\n");
    for seg in f.step_segments(t_min, t_max)? {
        let (lo, hi) = bounds_strings(&seg.xi);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            seg.t_start, seg.t_end, seg.nu, seg.q, lo, hi
        ));
    }
    Ok(out)
}

pub fn psi_json(f: &mut PsiFunction, t_min: &BigUint, t_max: &BigUint) -> Result<Value, CliError> {
    let segments = f
        .step_segments(t_min, t_max)?
        .into_iter()
        .map(|seg| {
            let (lo, hi) = bounds_strings(&seg.xi);
            json!({
                "t_start": seg.t_start.to_string(),
                "t_end": seg.t_end.to_string(),
                "nu": seg.nu,
                "q_nu": seg.q.to_string(),
                "xi_lo": lo,
                "xi_hi": hi,
            })
        })
        .collect::<Vec<_>>();
    Ok(json!({"label": f.label(), "segments": segments}))
}

pub fn trace_json(trace: &PermutationTrace) -> Value {
    json!({
        "events": trace
            .events
            .iter()
            .map(|ev| {
                json!({
                    "t_from": ev.t_from.to_string(),
                    "t_to": ev.t_to.as_ref().map(|t| t.to_string()),
                    "sigma": ev.sigma,
                })
            })
            .collect::<Vec<_>>(),
    })
}

/// Step-plot rows, one series per label: `label,t_start,t_end,xi_lo,xi_hi`.
pub fn trace_csv(
    members: &mut [(String, PsiFunction)],
    t_min: &BigUint,
    t_max: &BigUint,
) -> Result<String, CliError> {
    let mut out = String::from("label,t_start,t_end,xi_lo,xi_hi\n");
    for (label, f) in members.iter_mut() {
        for seg in f.step_segments(t_min, t_max)? {
            let (lo, hi) = bounds_strings(&seg.xi);
            out.push_str(&format!(
                "{label},{},{},{lo},{hi}\n",
                seg.t_start, seg.t_end
            ));
        }
    }
    Ok(out)
}

pub fn kindex_json(est: &KIndexEstimate) -> Value {
    json!({
        "burn_in_t": est.burn_in_t.to_string(),
        "distinct": est.distinct(),
        "orderings": est
            .counts
            .iter()
            .map(|(sigma, count)| json!({"sigma": sigma, "count": count}))
            .collect::<Vec<_>>(),
    })
}

fn rel_str(rel: CondRel) -> &'static str {
    match rel {
        CondRel::StrictlyLess => "lt",
        CondRel::Equal => "eq",
    }
}

pub fn finding_json(f: &LemmaFinding) -> Value {
    json!({
        "a": f.a_label,
        "b": f.b_label,
        "nu": f.nu,
        "mu": f.mu,
        "d": f.d,
        "rel1": rel_str(f.rel1),
        "rel2": rel_str(f.rel2),
        "rel3": rel_str(f.rel3),
        "conclusion_holds": f.conclusion_holds,
        "violation": f.violation,
        "q_nu1": f.q_nu1.to_string(),
        "q_nu2": f.q_nu2.to_string(),
        "r_mu1": f.r_mu1.to_string(),
        "r_mud": f.r_mud.to_string(),
        "x_slack": f.x_slack.to_string(),
    })
}

/// One finding per line.
pub fn findings_jsonl(findings: &[LemmaFinding]) -> String {
    let mut out = String::new();
    for f in findings {
        out.push_str(&finding_json(f).to_string());
        out.push('\n');
    }
    out
}

pub fn corpus_summary_json(s: &CorpusScanSummary) -> Value {
    json!({
        "entries": s.entries,
        "ordered_pairs": s.ordered_pairs,
        "findings": s.findings,
        "concluded": s.concluded,
        "violations": s.violations,
        "undecided_cells": s.undecided,
    })
}

pub fn crossings_json(crossings: &[Crossing]) -> Value {
    json!({
        "alternations": crossings.len().saturating_sub(1),
        "intervals": crossings
            .iter()
            .map(|c| {
                json!({
                    "t_from": c.t_from.to_string(),
                    "t_to": c.t_to.as_ref().map(|t| t.to_string()),
                    "upper": c.upper,
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn verify_json(report: &VerifyReport) -> Value {
    json!({
        "k": report.k,
        "rounds": report.rounds,
        "burn_in_rounds": report.burn_in_rounds,
        "t_min": report.t_min.to_string(),
        "t_max": report.t_max.to_string(),
        "events": report.events,
        "distinct_orderings": report.distinct_orderings(),
        "phase_counts": report
            .phase_counts
            .iter()
            .map(|(l, c)| json!({"phase": l, "count": c}))
            .collect::<Vec<_>>(),
        "checkpoints": report
            .checkpoints
            .iter()
            .map(|cp| {
                json!({
                    "round": cp.nu,
                    "t": cp.t.to_string(),
                    "singleton_over_pair": cp.singleton_over_pair,
                    "pair_descent": cp.pair_descent,
                    "pair_over_next_singleton": cp.pair_over_next_singleton,
                })
            })
            .collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}
