//! Browser bindings. Every export takes plain strings and numbers and
//! returns a JSON string; errors come back as `{"error": "..."}`.

use koopman_core::alpha::{support, support_measure};
use koopman_core::gauss::{density_rate, DEFAULT_EXPANSION_CAP};
use koopman_core::spectral::{check_constraint, IndexFunction, DEFAULT_CAP};
use koopman_core::{AdmissibleWord, BinarySeq, Error, Exact, Result, Scalar};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

// the page runs on the main thread, so keep every request small
const MAX_WORD_DEGREE: u32 = 6;
const MAX_REFINE: u32 = 4;
const MAX_RATE_DEGREE: u32 = 5;
const MAX_DEPTH: u32 = 5;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn too_big(what: &str, got: u32, max: u32) -> Error {
    Error::Invalid(format!("{what} {got} is above the demo limit {max}"))
}

/// Support cells of a word such as `"{0 0 ~1}"`, one row of coordinates per
/// cell, with the exact measure as a fraction.
#[wasm_bindgen]
pub fn word_support(word: &str) -> String {
    respond(word_support_json(word))
}

fn word_support_json(word: &str) -> Result<Value> {
    let w: AdmissibleWord = word.parse()?;
    if w.degree() > MAX_WORD_DEGREE {
        return Err(too_big("degree", w.degree(), MAX_WORD_DEGREE));
    }
    let st = w.stats();
    let cells: Vec<Vec<String>> =
        support(&w).into_iter().map(|c| c.coords.iter().map(|s| s.to_string()).collect()).collect();
    Ok(json!({
        "word": w.to_string(),
        "level": w.level(),
        "p": st.p,
        "q": st.q,
        "measure": support_measure(&w).to_string(),
        "cells": cells,
    }))
}

/// `‖r_l − mean‖²` for `l = 1..=l_max`, next to the closed form.
#[wasm_bindgen]
pub fn density_rates(base: &str, k: u32, m: u32, l_max: u32) -> String {
    respond(density_rates_json(base, k, m, l_max))
}

fn density_rates_json(base: &str, k: u32, m: u32, l_max: u32) -> Result<Value> {
    let s: BinarySeq = base.parse()?;
    if k + m == 0 {
        return Err(Error::Invalid("k + m must be positive".into()));
    }
    if k + m > MAX_RATE_DEGREE {
        return Err(too_big("k + m =", k + m, MAX_RATE_DEGREE));
    }
    if l_max == 0 {
        return Err(Error::Invalid("l_max must be at least 1".into()));
    }
    if l_max > MAX_REFINE {
        return Err(too_big("l_max", l_max, MAX_REFINE));
    }
    let mut rows = Vec::new();
    for l in 1..=l_max {
        let r = density_rate::<Exact>(s, k, m, l, DEFAULT_EXPANSION_CAP)?;
        rows.push(json!({
            "l": l,
            "mean": r.centering.to_complex().re,
            "residual": r.residual_norm_sqr.to_complex().re,
            "closed_form": r.closed_form.to_string(),
            "agrees": r.matches_closed_form(1e-12),
        }));
    }
    Ok(json!({ "base": s.to_string(), "k": k, "m": m, "rows": rows }))
}

/// Parses `"1:2 -1:1"` into the index function `1 ↦ 2, −1 ↦ 1`.
fn parse_index(text: &str) -> Result<IndexFunction> {
    let pairs = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (k, v) = t.split_once(':').ok_or_else(|| Error::Parse(format!("expected key:value, got {t:?}")))?;
            let k = k.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{k:?}: {e}")))?;
            let v = v.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{v:?}: {e}")))?;
            Ok((k, v))
        })
        .collect::<Result<Vec<_>>>()?;
    IndexFunction::new(pairs)
}

/// Whether `m₁μ_{x₁} ⊗ ⋯ ⊗ m_nμ_{x_n}` is absolutely continuous with respect
/// to the measure of `m₁x₁ ⊕ ⋯ ⊕ m_nx_n`. `coefficients` is `"2, 1"` and
/// `indices` separates the factors with `|`, as in `"1:1 | 1:1 -1:1"`.
#[wasm_bindgen]
pub fn scaling_constraint(coefficients: &str, indices: &str, depth: u32) -> String {
    respond(scaling_constraint_json(coefficients, indices, depth))
}

fn scaling_constraint_json(coefficients: &str, indices: &str, depth: u32) -> Result<Value> {
    if depth > MAX_DEPTH {
        return Err(too_big("depth", depth, MAX_DEPTH));
    }
    let ms = coefficients
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let xs = indices.split('|').map(parse_index).collect::<Result<Vec<_>>>()?;
    let report = check_constraint(&ms, &xs, 1..=depth.max(1), DEFAULT_CAP)?;
    let mut out = report.to_json();
    out["unit_supported"] = json!(xs.iter().map(IndexFunction::is_unit_supported).collect::<Vec<_>>());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn support_of_a_mixed_word() {
        let v = parse(word_support("{0 ~1}"));
        assert_eq!(v["p"], 1);
        assert_eq!(v["q"], 1);
        assert_eq!(v["cells"], json!([["0", "1"]]));
        assert_eq!(v["measure"], "1/4");
    }

    #[test]
    fn support_counts_variants() {
        let v = parse(word_support("{0 1}"));
        assert_eq!(v["cells"].as_array().unwrap().len(), 2);
        assert_eq!(v["measure"], "1/2");
    }

    #[test]
    fn rates_match_closed_form() {
        let v = parse(density_rates("", 2, 1, 3));
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r["agrees"] == true));
        assert_eq!(rows[0]["closed_form"], "3/2");
    }

    #[test]
    fn constraint_follows_the_scaling_rule() {
        assert_eq!(parse(scaling_constraint("1", "1:1", 3))["abs_cont"], true);
        assert_eq!(parse(scaling_constraint("2", "1:1", 3))["abs_cont"], false);
        // a factor that lives off ±1 makes the left side zero
        assert_eq!(parse(scaling_constraint("2, 1", "1:1 | 2:1", 3))["abs_cont"], true);
    }

    #[test]
    fn errors_are_reported_as_json() {
        assert!(parse(word_support("{0 ~0}"))["error"].is_string());
        assert!(parse(word_support("{0 0 0 0 0 0 0}"))["error"].is_string());
        assert!(parse(density_rates("01", 0, 0, 2))["error"].is_string());
        assert!(parse(density_rates("01", 1, 1, 0))["error"].is_string());
        assert!(parse(scaling_constraint("0", "1:1", 2))["error"].is_string());
        assert!(parse(scaling_constraint("1", "1-1", 2))["error"].is_string());
        assert!(parse(scaling_constraint("1", "1:1", 9))["error"].is_string());
    }
}
