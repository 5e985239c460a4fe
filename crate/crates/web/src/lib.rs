//! Browser bindings for the static demo page in `www/`.
//!
//! Each export takes plain numbers or strings and returns a JSON string, so
//! the page needs no generated TypeScript glue beyond `JSON.parse`. The
//! real work happens in the `*_json` functions, which also run natively
//! under `cargo test`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use testinj::citest::{chi_square_sf, g_squared, pearson_chi_square, ContingencyStratum};
use testinj::discovery::{self, Algorithm, DiscoveryConfig};
use testinj::experiment::{self, SCENARIO_DEMOGRAPHICS};
use testinj::graph::emit_dot;
use testinj::labeling::COARSE_COLUMN;
use testinj::lexicon::{count_matches, find_matches, tokenize, Lexicon, TermCategory};

/// Upper bound on scenario size; larger samples freeze the tab for seconds.
pub const MAX_SCENARIO_ROWS: usize = 200_000;

/// UTF-16 offset of byte position `i`, which is what JavaScript slices by.
fn utf16_offset(text: &str, i: usize) -> usize {
    text[..i].encode_utf16().count()
}

/// Matched unjust terms in `note`, with spans in UTF-16 code units.
pub fn highlight_json(note: &str) -> Value {
    let lex = Lexicon::base();
    let counts = count_matches(note, &lex);
    let matches: Vec<Value> = find_matches(note, &lex)
        .into_iter()
        .map(|m| {
            json!({
                "category": m.category.name(),
                "start": utf16_offset(note, m.start),
                "end": utf16_offset(note, m.end),
                "text": &note[m.start..m.end],
            })
        })
        .collect();
    let counts: serde_json::Map<String, Value> =
        TermCategory::ALL.iter().map(|&c| (c.name().to_string(), json!(counts[c]))).collect();
    json!({ "tokens": tokenize(note).len(), "counts": counts, "matches": matches })
}

/// G² and Pearson χ² for a single 2×2 table `[[a, b], [c, d]]`.
pub fn two_by_two_json(a: u32, b: u32, c: u32, d: u32, alpha: f64) -> Result<Value, String> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    let stratum = ContingencyStratum { assignment: vec![], counts: [[a as u64, b as u64], [c as u64, d as u64]] };
    let strata = [stratum];
    let (g2, dof) = g_squared(&strata);
    let (x2, _) = pearson_chi_square(&strata);
    let p = |s: f64| if dof == 0 { 1.0 } else { chi_square_sf(s, dof) };
    Ok(json!({
        "dof": dof,
        "g2": g2,
        "g2_p": p(g2),
        "chi2": x2,
        "chi2_p": p(x2),
        "independent": p(g2) > alpha,
        "informative": strata[0].is_informative(),
    }))
}

/// Samples the synthetic scenario and runs discovery on it.
pub fn scenario_json(seed: u64, n: usize, alpha: f64, algorithm: &str, coarse: bool) -> Result<Value, String> {
    if !(10..=MAX_SCENARIO_ROWS).contains(&n) {
        return Err(format!("sample size must be between 10 and {MAX_SCENARIO_ROWS}"));
    }
    let algorithm: Algorithm = algorithm.parse().map_err(|e: testinj::Error| e.to_string())?;
    let cfg = DiscoveryConfig::new(algorithm, alpha).map_err(|e| e.to_string())?;
    let scm = experiment::paper_scenario_generator(seed);
    let mut data = experiment::sample(&scm, n, seed).map_err(|e| e.to_string())?;
    if coarse {
        data = experiment::coarsen(&data, &SCENARIO_DEMOGRAPHICS).map_err(|e| e.to_string())?;
    }
    let bk = experiment::scenario_knowledge(&data);
    let found = discovery::run(&data, &cfg, &bk).map_err(|e| e.to_string())?;
    let g = &found.graph;
    let demographics: serde_json::Map<String, Value> = SCENARIO_DEMOGRAPHICS
        .iter()
        .copied()
        .chain([COARSE_COLUMN])
        .filter_map(|d| g.index(d).ok().map(|i| (d.to_string(), json!(g.degree(i) > 0))))
        .collect();
    Ok(json!({
        "graph": g.to_json(),
        "dot": emit_dot(g),
        "tests": found.report.tests_performed,
        "connected": demographics,
    }))
}

fn respond(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn highlight(note: &str) -> String {
    highlight_json(note).to_string()
}

#[wasm_bindgen]
pub fn two_by_two(a: u32, b: u32, c: u32, d: u32, alpha: f64) -> Result<String, JsValue> {
    respond(two_by_two_json(a, b, c, d, alpha))
}

#[wasm_bindgen]
pub fn scenario(seed: u32, n: u32, alpha: f64, algorithm: &str, coarse: bool) -> Result<String, JsValue> {
    respond(scenario_json(seed as u64, n as usize, alpha, algorithm, coarse))
}
