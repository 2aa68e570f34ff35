//! Browser bindings: three read-only operations returning JSON strings.

use orbitcount::cohomology::prediction_table;
use orbitcount::families::{build, FamilyParams, FamilySpec};
use orbitcount::proj_map::{degree_sequence as degrees, homogenize, DEFAULT_DEGREE_BUDGET};
use orbitcount::solver::{census, SolverOptions};
use wasm_bindgen::prelude::*;

/// Census periods above this take too long for an interactive page.
const MAX_PERIOD: u32 = 3;

fn js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn spec(family: &str, params: &str) -> Result<FamilySpec, JsValue> {
    build(family.parse().map_err(js)?, FamilyParams::parse(params).map_err(js)?).map_err(js)
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, JsValue> {
    serde_json::to_string(v).map_err(js)
}

/// Predicted counts for periods `lo..=hi`.
#[wasm_bindgen]
pub fn predict_table(family: &str, params: &str, lo: u32, hi: u32) -> Result<String, JsValue> {
    to_json(&prediction_table(&spec(family, params)?, lo, hi).map_err(js)?)
}

/// Algebraic degrees of the first `count` iterates.
#[wasm_bindgen]
pub fn degree_sequence(family: &str, params: &str, count: u32) -> Result<String, JsValue> {
    let f = homogenize(&spec(family, params)?.planar).map_err(js)?;
    to_json(&degrees(&f, count, DEFAULT_DEGREE_BUDGET).map_err(js)?)
}

/// Numerical census of period-`n` points with its verdict.
#[wasm_bindgen]
pub fn periodic_points(family: &str, params: &str, n: u32) -> Result<String, JsValue> {
    if n == 0 || n > MAX_PERIOD {
        return Err(js(format!("period must lie in 1..={MAX_PERIOD}")));
    }
    to_json(&census(&spec(family, params)?, n, &SolverOptions::default()).map_err(js)?)
}
