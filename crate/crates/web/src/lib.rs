//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws the
//! path as chords on a circle of `p` vertices.

use std::time::Duration;

use bhr_core::inductive::{
    default_start_fp, evolve_chain, EvolutionState, EvolveConfig, Scenario, ScenarioSchedule,
    SmallestAdmissible,
};
use bhr_core::{
    divisor_condition, find_path, fp_of_multiset, generate_fps, representative_multiset, FrequencyPartition,
    HopMultiset, ProblemInstance, SearchLimits, SearchResult,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps a single call from freezing the tab.
const BROWSER_TIME_LIMIT: Duration = Duration::from_secs(5);
const MAX_P: usize = 200;

fn limits() -> SearchLimits {
    SearchLimits { max_backtracks: None, time_limit: Some(BROWSER_TIME_LIMIT) }
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn instance(p: usize) -> Result<ProblemInstance, JsError> {
    if p > MAX_P {
        return Err(err(format!("p is capped at {MAX_P} in the demo")));
    }
    ProblemInstance::new(p).map_err(err)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo payloads serialize")
}

#[derive(Serialize)]
struct Solution {
    p: usize,
    target: HopMultiset,
    fp: FrequencyPartition,
    divisor_condition: bool,
    success: bool,
    terminated_by: &'static str,
    backtracks: u64,
    elapsed_ms: f64,
    path: Option<Vec<usize>>,
    hops: Option<Vec<usize>>,
}

impl Solution {
    fn new(inst: &ProblemInstance, target: HopMultiset, r: SearchResult) -> Self {
        Self {
            p: inst.p(),
            divisor_condition: divisor_condition(&target, inst).unwrap_or(false),
            fp: fp_of_multiset(&target),
            target,
            success: r.success,
            terminated_by: r.terminated_by.as_str(),
            backtracks: r.backtracks,
            elapsed_ms: r.elapsed.as_secs_f64() * 1e3,
            path: r.path.map(|p| p.into_vertices()),
            hops: r.hop_permutation,
        }
    }
}

/// Parses `"1:6, 2:6, 3"` (a bare length means multiplicity 1).
fn parse_multiset(inst: &ProblemInstance, text: &str) -> Result<HopMultiset, String> {
    let mut pairs = Vec::new();
    for token in text.split([',', ' ', ';']).filter(|t| !t.is_empty()) {
        let (len, mult) = match token.split_once(':') {
            Some((l, m)) => (l.trim().parse::<usize>(), m.trim().parse::<usize>()),
            None => (token.trim().parse::<usize>(), Ok(1)),
        };
        let (Ok(len), Ok(mult)) = (len, mult) else {
            return Err(format!("cannot read {token:?}; use length:count"));
        };
        pairs.push((len, mult));
    }
    HopMultiset::from_counts(inst, pairs).map_err(|e| e.to_string())
}

/// Realizes a multiset such as `"1:4, 2:3, 5:1"` at modulus `p`.
#[wasm_bindgen]
pub fn solve_multiset(p: usize, multiset: &str) -> Result<String, JsError> {
    let inst = instance(p)?;
    let target = parse_multiset(&inst, multiset).map_err(err)?;
    let r = find_path(&target, &inst, None, &limits()).map_err(err)?;
    Ok(to_json(&Solution::new(&inst, target, r)))
}

/// Realizes the representative multiset of a frequency partition `"5,4,4"`.
#[wasm_bindgen]
pub fn solve_fp(p: usize, parts: &str) -> Result<String, JsError> {
    let inst = instance(p)?;
    let mut values = Vec::new();
    for t in parts.split([',', ' ']).filter(|t| !t.is_empty()) {
        values.push(t.trim().parse::<usize>().map_err(|_| err(format!("bad part {t:?}")))?);
    }
    let fp = FrequencyPartition::new(values).map_err(err)?;
    let target = representative_multiset(&fp, &inst).map_err(err)?;
    let r = find_path(&target, &inst, None, &limits()).map_err(err)?;
    Ok(to_json(&Solution::new(&inst, target, r)))
}

#[derive(Serialize)]
struct FpListing {
    p: usize,
    total: usize,
    fps: Vec<FrequencyPartition>,
}

/// Counts the frequency partitions for `p` and lists the first `limit`.
#[wasm_bindgen]
pub fn list_fps(p: usize, limit: usize) -> Result<String, JsError> {
    let inst = instance(p)?;
    let mut fps = Vec::with_capacity(limit.min(1000));
    let mut total = 0;
    for fp in generate_fps(&inst) {
        if fps.len() < limit {
            fps.push(fp);
        }
        total += 1;
    }
    Ok(to_json(&FpListing { p, total, fps }))
}

#[derive(Serialize)]
struct EvolveView {
    start: Solution,
    steps: Vec<StepView>,
}

#[derive(Serialize)]
struct StepView {
    iteration: usize,
    scenario: Scenario,
    method: String,
    solution: Solution,
}

fn run_evolve(start_p: usize, iterations: usize, scenario: &str) -> Result<EvolveView, String> {
    if start_p + iterations > MAX_P {
        return Err(format!("p is capped at {MAX_P} in the demo"));
    }
    let inst = ProblemInstance::new(start_p).map_err(|e| e.to_string())?;
    let schedule = match scenario {
        "auto" => ScenarioSchedule::Auto,
        "I" => ScenarioSchedule::Fixed(Scenario::I),
        "II" => ScenarioSchedule::Fixed(Scenario::II),
        "alternate" => ScenarioSchedule::Alternate,
        other => return Err(format!("unknown scenario {other:?}")),
    };
    let target = representative_multiset(&default_start_fp(&inst), &inst).map_err(|e| e.to_string())?;
    let first = find_path(&target, &inst, None, &limits()).map_err(|e| e.to_string())?;
    let Some(path) = first.path.clone() else {
        return Err(format!("start at p={start_p} not solved ({})", first.terminated_by.as_str()));
    };
    let state = EvolutionState::new(inst.clone(), target.clone(), path).map_err(|e| e.to_string())?;
    let config = EvolveConfig { limits: limits(), ..EvolveConfig::default() };
    let (_, steps) =
        evolve_chain(&state, iterations, schedule, &SmallestAdmissible, &config).map_err(|e| e.to_string())?;

    let steps = steps
        .into_iter()
        .map(|s| {
            let inst = ProblemInstance::new(s.p_new).expect("p_new >= 3");
            StepView {
                iteration: s.iteration,
                scenario: s.scenario,
                method: s.method_used.to_string(),
                solution: Solution::new(&inst, s.target_new, s.result),
            }
        })
        .collect();
    Ok(EvolveView { start: Solution::new(&inst, target, first), steps })
}

/// Solves the default starting profile at `start_p` and grows it.
/// `scenario` is one of `auto`, `I`, `II`, `alternate`.
#[wasm_bindgen]
pub fn evolve(start_p: usize, iterations: usize, scenario: &str) -> Result<String, JsError> {
    run_evolve(start_p, iterations, scenario).map(|v| to_json(&v)).map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn json(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn solve_multiset_round_trip() {
        let v = json(&solve_multiset(5, "1:2, 2:2").unwrap());
        assert_eq!(v["success"], true);
        assert_eq!(v["target"]["1"], 2);
        assert_eq!(v["fp"], serde_json::json!([2, 2]));
        assert_eq!(v["path"].as_array().unwrap().len(), 5);

        let v = json(&solve_multiset(6, "3:5").unwrap());
        assert_eq!(v["success"], false);
        assert_eq!(v["divisor_condition"], false);
        assert_eq!(v["terminated_by"], "exhausted");
    }

    #[test]
    fn parser_accepts_bare_lengths() {
        let inst = ProblemInstance::new(5).unwrap();
        let ms = parse_multiset(&inst, "1 1 2:2").unwrap();
        assert_eq!(ms.to_lengths(), vec![1, 1, 2, 2]);
        assert!(parse_multiset(&inst, "1:x").is_err());
        assert!(parse_multiset(&inst, "3:4").is_err());
    }

    #[test]
    fn fp_listing_and_solve() {
        let v = json(&list_fps(31, 3).unwrap());
        assert_eq!(v["total"], 5096);
        assert_eq!(v["fps"], serde_json::json!([[30], [29, 1], [28, 2]]));
        let v = json(&solve_fp(31, "30").unwrap());
        assert_eq!(v["backtracks"], 0);
    }

    #[test]
    fn evolve_reaches_target_p() {
        let v = run_evolve(20, 4, "auto").unwrap();
        assert_eq!(v.steps.len(), 4);
        assert_eq!(v.steps[3].solution.p, 24);
        assert!(v.steps.iter().all(|s| s.solution.success));
        assert!(run_evolve(20, 1, "sideways").is_err());
        assert!(run_evolve(199, 5, "auto").is_err());
    }
}
