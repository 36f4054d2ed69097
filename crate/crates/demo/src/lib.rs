//! Wasm bindings for the browser demo. Three operations, each returning a
//! JSON string the page renders on a canvas: one embedding run, a
//! success-rate curve over p, and a pattern partition preview.

use serde_json::json;
use span2_core::embedder::{embed, EmbedOutcome};
use span2_core::goodness::{implied_c, induced_p, GoodnessParams};
use span2_core::graph::{gen_gnp, gen_random_degree2, Graph};
use span2_core::harness::{run_trial, ExperimentConfig, ProbParam, Timing};
use span2_core::pattern::{deficient_vertices, maximalize, partition_pattern};
use wasm_bindgen::prelude::*;

#[wasm_bindgen(start)]
pub fn start() {
    console_error_panic_hook::set_once();
}

const EDGE_DUMP_CAP: usize = 40_000;

fn edges_json(g: &Graph) -> serde_json::Value {
    if g.m() > EDGE_DUMP_CAP {
        serde_json::Value::Null
    } else {
        json!(g.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>())
    }
}

/// One embedding run on a fresh host G(n,p) and a fresh random pattern.
#[wasm_bindgen]
pub fn embed_instance(n: u32, p: f64, eps: f64, seed: u32) -> String {
    let n = n as usize;
    let seed = u64::from(seed);
    let params = GoodnessParams { c: implied_c(n, p), eps, delta: 0.01 };
    let h = gen_random_degree2(n, seed);
    let g = match gen_gnp(n, p, seed) {
        Ok(g) => g,
        Err(e) => return json!({ "error": e.to_string() }).to_string(),
    };
    let pattern_classes: Option<Vec<u8>> = maximalize(&h)
        .ok()
        .and_then(|hm| partition_pattern(&hm, eps).ok())
        .map(|pp| pp.classes().to_vec());
    let (site_labels, outcome) = match embed(&g, &h, &params, seed) {
        Ok(outcome) => {
            // Site labels are recomputed deterministically for display.
            let labels = span2_core::goodness::partition_sites(n, &params, seed)
                .map(|sp| sp.labels().to_vec())
                .unwrap_or_default();
            (labels, outcome)
        }
        Err(e) => return json!({ "error": e.to_string() }).to_string(),
    };
    let outcome_json = match &outcome {
        EmbedOutcome::Success(e) => json!({ "success": true, "map": e.map }),
        EmbedOutcome::Failure { stage, reason, detail, .. } => json!({
            "success": false,
            "stage": stage,
            "reason": reason.to_string(),
            "witness_size": outcome.witness_size(),
            "detail": detail,
        }),
    };
    json!({
        "n": n,
        "p": p,
        "c": params.c,
        "eps": eps,
        "seed": seed,
        "host_m": g.m(),
        "host_edges": edges_json(&g),
        "pattern_edges": h.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        "pattern_classes": pattern_classes,
        "site_labels": site_labels,
        "outcome": outcome_json,
    })
    .to_string()
}

/// Success rates over an even grid of `steps` probabilities in
/// [p_lo, p_hi], `trials` embedding attempts each.
#[wasm_bindgen]
pub fn success_curve(
    n: u32,
    p_lo: f64,
    p_hi: f64,
    steps: u32,
    trials: u32,
    eps: f64,
    seed: u32,
) -> String {
    let n = n as usize;
    let steps = steps.max(2) as usize;
    let trials = trials.max(1) as usize;
    if !(0.0..=1.0).contains(&p_lo) || !(0.0..=1.0).contains(&p_hi) || p_hi < p_lo {
        return json!({ "error": "need 0 <= p_lo <= p_hi <= 1" }).to_string();
    }
    let mut points = Vec::with_capacity(steps);
    for s in 0..steps {
        let p = p_lo + (p_hi - p_lo) * s as f64 / (steps - 1) as f64;
        let mut cfg =
            ExperimentConfig::new(n, ProbParam::Direct(p), u64::from(seed) + s as u64, trials);
        cfg.eps = eps;
        let successes = (0..trials)
            .filter(|&t| run_trial(&cfg, t, Timing::Off).success)
            .count();
        points.push(json!({
            "p": p,
            "successes": successes,
            "trials": trials,
            "rate": successes as f64 / trials as f64,
        }));
    }
    json!({
        "n": n,
        "eps": eps,
        "reference_p": induced_p(n, 1.0),
        "points": points,
    })
    .to_string()
}

/// A random maximal pattern with its seven-class partition.
#[wasm_bindgen]
pub fn partition_preview(n: u32, eps: f64, seed: u32) -> String {
    let n = n as usize;
    let h = match maximalize(&gen_random_degree2(n, u64::from(seed))) {
        Ok(h) => h,
        Err(e) => return json!({ "error": e.to_string() }).to_string(),
    };
    let pp = match partition_pattern(&h, eps) {
        Ok(pp) => pp,
        Err(e) => return json!({ "error": e.to_string() }).to_string(),
    };
    json!({
        "n": n,
        "eps": eps,
        "seed": seed,
        "edges": h.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        "classes": pp.classes(),
        "class_sizes": pp.class_sizes(),
        "w6_pairs": pp.w6_pairs().iter().map(|&(w, a, b)| [w, a, b]).collect::<Vec<_>>(),
        "deficient": deficient_vertices(&h),
    })
    .to_string()
}
