//! Browser bindings for a few `todd-lab` operations. Each export returns a
//! JSON string; the plain `*_json` functions hold the logic so they can be
//! tested natively.

use serde_json::json;
use wasm_bindgen::prelude::*;

use todd_lab::dynamics::{fixed_point, iterate_orbit, NormalizedTwoParam, Params, State3, StepMap};
use todd_lab::lab::{classify_orbit, t2_residual, ClassifyConfig, ScanGrid};
use todd_lab::numerics::{Mode, PrecisionConfig};

/// Upper bound on steps so one request cannot hang the page.
pub const MAX_STEPS: usize = 20_000;
/// Exact orbits grow quickly in size; keep them small in the browser.
pub const EXACT_BIT_LIMIT: u64 = 200_000;

fn config(exact: bool) -> PrecisionConfig {
    if exact {
        PrecisionConfig::new(Mode::Exact, EXACT_BIT_LIMIT, 1e-9).expect("valid config")
    } else {
        PrecisionConfig::float()
    }
}

fn general_map(
    cfg: &PrecisionConfig,
    alpha: &str,
    beta: &str,
    lambda: &str,
) -> Result<StepMap, String> {
    Params::parse(cfg, alpha, beta, lambda)
        .map(StepMap::General)
        .map_err(|e| e.to_string())
}

fn steps_in_range(steps: usize) -> Result<usize, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must be between 1 and {MAX_STEPS}"));
    }
    Ok(steps)
}

/// Orbit values as floats, plus Todd's invariant per window when the map is
/// conjugate to Todd's equation.
pub fn orbit_json(
    alpha: &str,
    beta: &str,
    lambda: &str,
    state: &str,
    steps: usize,
    exact: bool,
) -> Result<String, String> {
    let cfg = config(exact);
    let map = general_map(&cfg, alpha, beta, lambda)?;
    let s0 = State3::parse(&cfg, state).map_err(|e| e.to_string())?;
    let r = iterate_orbit(&cfg, &map, &s0, steps_in_range(steps)?, true);
    let values: Vec<f64> = r.values.iter().map(|v| v.to_f64()).collect();
    let invariant: Option<Vec<f64>> = r
        .invariant_trace
        .as_ref()
        .map(|t| t.iter().map(|v| v.to_f64()).collect());
    let exact_invariant = r
        .invariant_trace
        .as_ref()
        .filter(|_| exact)
        .and_then(|t| t.first())
        .map(|v| v.to_string());
    Ok(json!({
        "values": values,
        "invariant": invariant,
        "invariant_exact": exact_invariant,
        "steps": r.steps,
        "max_value": r.max_value.to_string(),
        "min_value": r.min_value.to_string(),
        "failure": r.failure.map(|e| e.to_string()),
    })
    .to_string())
}

pub fn classify_json(
    alpha: &str,
    beta: &str,
    lambda: &str,
    state: &str,
    max_steps: usize,
    exact: bool,
) -> Result<String, String> {
    let cfg = config(exact);
    let map = general_map(&cfg, alpha, beta, lambda)?;
    let s0 = State3::parse(&cfg, state).map_err(|e| e.to_string())?;
    let ccfg = ClassifyConfig {
        max_steps: steps_in_range(max_steps)?,
        ..Default::default()
    };
    let rep = classify_orbit(&cfg, &map, &s0, &ccfg).map_err(|e| e.to_string())?;
    Ok(json!({
        "verdict": rep.verdict.label(),
        "period": rep.verdict.period(),
        "max_value": rep.max_value.to_string(),
        "min_value": rep.min_value.to_string(),
        "steps_run": rep.steps_run,
        "escape_step": rep.escape_step,
        "growth_rate": rep.growth_rate,
        "evidence": rep.evidence,
    })
    .to_string())
}

/// `log10` of the `T^2` residual of the two-parameter map on the plane
/// `newest = fixed point`, over a geometric grid for `(oldest, middle)`.
/// Rows follow `middle`, columns follow `oldest`.
pub fn t2_slice_json(
    c: f64,
    a: f64,
    low: f64,
    high: f64,
    resolution: usize,
) -> Result<String, String> {
    let cfg = PrecisionConfig::float();
    let q = NormalizedTwoParam::new(
        cfg.from_f64(c).map_err(|e| e.to_string())?,
        cfg.from_f64(a).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let grid = ScanGrid::new(low, high, resolution).map_err(|e| e.to_string())?;
    if resolution > 400 {
        return Err("resolution must be at most 400".into());
    }
    let u = fixed_point(&cfg, &q).map_err(|e| e.to_string())?.to_f64();
    let axis = grid.axis();
    let mut cells = Vec::with_capacity(resolution * resolution);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &y in &axis {
        for &x in &axis {
            let r = t2_residual(c, a, [x, y, u]);
            if r < best.0 {
                best = (r, x, y);
            }
            cells.push(r.max(1e-300).log10());
        }
    }
    Ok(json!({
        "fixed_point": u,
        "axis": axis,
        "log10_residual": cells,
        "best": { "oldest": best.1, "middle": best.2, "residual": best.0 },
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn orbit(
    alpha: &str,
    beta: &str,
    lambda: &str,
    state: &str,
    steps: usize,
    exact: bool,
) -> Result<String, JsError> {
    js(orbit_json(alpha, beta, lambda, state, steps, exact))
}

#[wasm_bindgen]
pub fn classify(
    alpha: &str,
    beta: &str,
    lambda: &str,
    state: &str,
    max_steps: usize,
    exact: bool,
) -> Result<String, JsError> {
    js(classify_json(alpha, beta, lambda, state, max_steps, exact))
}

#[wasm_bindgen]
pub fn t2_slice(c: f64, a: f64, low: f64, high: f64, resolution: usize) -> Result<String, JsError> {
    js(t2_slice_json(c, a, low, high, resolution))
}
