//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes and returns JSON text so the page needs no generated
//! type glue. The plain functions in [`api`] carry the logic and are tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

pub mod api {
    use std::collections::BTreeMap;

    use fdes::format::load_problem;
    use fdes::model::{eff_prefix, marked_degree};
    use fdes::reach::{dump_tree, TreeMode};
    use fdes::report::decision_json;
    use fdes::supervisor::{closed_loop_trace, synthesize};
    use fdes::verify::{theorem1_decision, RowMode};
    use fdes::{corpus, ControlProblem, Degree, EventAttr};
    use serde_json::{json, Value};

    fn err(e: impl std::fmt::Display) -> String {
        e.to_string()
    }

    /// Bundled example models as `[{name, plant, spec}]`.
    pub fn examples() -> String {
        let list: Vec<Value> = corpus::ALL
            .iter()
            .map(|(name, plant, spec)| json!({ "name": name, "plant": plant, "spec": spec }))
            .collect();
        Value::Array(list).to_string()
    }

    /// Parses `{"obs": {event: degree}, "unctrl": {event: degree}}`; an
    /// empty string means no overrides.
    fn apply_overrides(problem: &mut ControlProblem, overrides: &str) -> Result<(), String> {
        if overrides.trim().is_empty() {
            return Ok(());
        }
        let parsed: BTreeMap<String, BTreeMap<String, String>> = serde_json::from_str(overrides).map_err(err)?;
        for (field, values) in parsed {
            for (name, text) in values {
                let e = problem.attrs.id_of(&name).ok_or(format!("unknown event `{name}`"))?;
                let d: Degree = text.parse().map_err(|e| format!("{name}: {e}"))?;
                let a = *problem.attrs.attr(e);
                let attr = match field.as_str() {
                    "obs" => EventAttr::new(d, a.unctrl),
                    "unctrl" => EventAttr::new(a.obs, d),
                    other => return Err(format!("unknown override `{other}`")),
                };
                problem.attrs.set(e, attr);
            }
        }
        Ok(())
    }

    fn problem(plant: &str, spec: &str, overrides: &str) -> Result<ControlProblem, String> {
        let mut p = load_problem(plant, spec).map_err(err)?;
        apply_overrides(&mut p, overrides)?;
        Ok(p)
    }

    /// Existence decision with all condition rows.
    pub fn check(plant: &str, spec: &str, overrides: &str) -> Result<String, String> {
        let p = problem(plant, spec, overrides)?;
        let d = theorem1_decision(&p, RowMode::All);
        let mut v = decision_json(&d, p.names());
        v["events"] = json!(p
            .names()
            .iter()
            .enumerate()
            .map(|(e, n)| {
                let a = p.attrs.attr(e);
                json!({ "name": n, "obs": a.obs, "unctrl": a.unctrl })
            })
            .collect::<Vec<_>>());
        Ok(v.to_string())
    }

    /// Reachable state pairs, `mode` is `"paper"` or `"graph"`.
    pub fn tree(plant: &str, spec: &str, mode: &str) -> Result<String, String> {
        let p = load_problem(plant, spec).map_err(err)?;
        let mode = match mode {
            "paper" => TreeMode::Paper,
            "graph" => TreeMode::Graph,
            other => return Err(format!("unknown tree mode `{other}`")),
        };
        Ok(dump_tree(&p, mode))
    }

    /// Synthesizes the supervisor and runs a comma-separated string through
    /// the closed loop, next to the specification's own degrees.
    pub fn simulate(plant: &str, spec: &str, overrides: &str, string: &str) -> Result<String, String> {
        let p = problem(plant, spec, overrides)?;
        let s = p.attrs.parse_string(string).map_err(err)?;
        let sup = synthesize(&p);
        let trace = closed_loop_trace(&p.plant, &sup, &s).map_err(err)?;
        let mut steps = Vec::new();
        for (i, prefix) in trace.prefixes.iter().enumerate() {
            steps.push(json!({
                "prefix": p.attrs.render(prefix),
                "running": trace.running[i],
                "marked": trace.marked[i],
                "spec_prefix": eff_prefix(&p.spec, &p.attrs, prefix).map_err(err)?,
                "spec_marked": marked_degree(&p.spec, prefix).map_err(err)?,
            }));
        }
        Ok(json!({
            "conditions_met": sup.conditions_met,
            "observer_nodes": sup.len(),
            "steps": steps,
        })
        .to_string())
    }
}

#[wasm_bindgen]
pub fn examples() -> String {
    api::examples()
}

#[wasm_bindgen]
pub fn check(plant: &str, spec: &str, overrides: &str) -> Result<String, JsError> {
    api::check(plant, spec, overrides).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn tree(plant: &str, spec: &str, mode: &str) -> Result<String, JsError> {
    api::tree(plant, spec, mode).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(plant: &str, spec: &str, overrides: &str, string: &str) -> Result<String, JsError> {
    api::simulate(plant, spec, overrides, string).map_err(|e| JsError::new(&e))
}
