//! Growing a solved instance at `p` into a solved instance at `p + 1`.
//!
//! Scenario I raises the multiplicity of one present length; Scenario II
//! adds one absent length with multiplicity 1. Each step first tries to
//! insert the new vertex `p` into the old path, then (optionally) ranks
//! insertion positions by multiset deviation, and finally falls back to
//! the solver seeded with the old hop permutation as a hint.
//!
//! Lengths are always re-evaluated under the new modulus, so an old edge
//! whose label difference exceeds `floor((p + 1) / 2)` changes length.

use std::fmt;
use std::time::Duration;

use chrono::{DateTime, Local};

use crate::error::{invalid, Error, Result};
use crate::instance::{raw_cyclic_length, ProblemInstance};
use crate::multiset::{divisor_condition_dense, fp_of_multiset, FrequencyPartition, HopMultiset};
use crate::path::{validate_realization, HamiltonianPath};
use crate::solver::{find_path, Hint, SearchLimits, SearchResult, Termination};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolutionState {
    inst: ProblemInstance,
    target: HopMultiset,
    path: HamiltonianPath,
    fp: FrequencyPartition,
}

impl EvolutionState {
    pub fn new(inst: ProblemInstance, target: HopMultiset, path: HamiltonianPath) -> Result<Self> {
        if !validate_realization(&path, &target, &inst) {
            return Err(invalid("path does not realize the target multiset"));
        }
        let fp = fp_of_multiset(&target);
        Ok(Self { inst, target, path, fp })
    }

    /// Solves `target` from scratch and wraps the result as a state.
    /// Returns `Ok(None)` if the solver does not succeed within `limits`.
    pub fn solve(inst: ProblemInstance, target: HopMultiset, limits: &SearchLimits) -> Result<Option<Self>> {
        let result = find_path(&target, &inst, None, limits)?;
        match result.path {
            Some(path) => Self::new(inst, target, path).map(Some),
            None => Ok(None),
        }
    }

    pub fn inst(&self) -> &ProblemInstance {
        &self.inst
    }

    pub fn target(&self) -> &HopMultiset {
        &self.target
    }

    pub fn path(&self) -> &HamiltonianPath {
        &self.path
    }

    pub fn fp(&self) -> &FrequencyPartition {
        &self.fp
    }

    fn hop_sequence(&self) -> Vec<usize> {
        self.path.hop_sequence(&self.inst).expect("state path matches its instance")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Scenario {
    /// Increment the multiplicity of a present length.
    I,
    /// Add a new length with multiplicity 1.
    II,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::I => "I",
            Scenario::II => "II",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ReuseInsertion,
    Heuristic,
    Backtrack,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ReuseInsertion => "Reuse-Insertion",
            Method::Heuristic => "Heuristic",
            Method::Backtrack => "Backtrack",
        })
    }
}

/// Chooses one evolved target among the admissible candidates.
pub trait SelectionPolicy {
    /// `candidates` are listed in ascending order of the length that was
    /// incremented (Scenario I) or added (Scenario II).
    fn select(&self, candidates: &[HopMultiset]) -> Option<usize>;
}

/// Picks the candidate built from the smallest length.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmallestAdmissible;

impl SelectionPolicy for SmallestAdmissible {
    fn select(&self, candidates: &[HopMultiset]) -> Option<usize> {
        (!candidates.is_empty()).then_some(0)
    }
}

/// All admissible evolved targets under `p + 1`, ascending by the
/// modified length.
pub fn evolution_candidates(state: &EvolutionState, scenario: Scenario) -> Vec<HopMultiset> {
    let next = state.inst.next();
    let mut base = state.target.dense_counts().to_vec();
    base.resize(next.max_length() + 1, 0);

    let lengths: Vec<usize> = match scenario {
        Scenario::I => state.target.support(),
        Scenario::II => (1..=next.max_length()).filter(|&l| base[l] == 0).collect(),
    };
    lengths
        .into_iter()
        .filter_map(|len| {
            let mut counts = base.clone();
            counts[len] += 1;
            divisor_condition_dense(&counts, &next)
                .then(|| HopMultiset::from_dense(next.p(), counts).expect("size grows by one"))
        })
        .collect()
}

pub fn evolve_target(
    state: &EvolutionState,
    scenario: Scenario,
    policy: &dyn SelectionPolicy,
) -> Result<HopMultiset> {
    let candidates = evolution_candidates(state, scenario);
    let pick = policy
        .select(&candidates)
        .ok_or(Error::NoAdmissibleTarget { p: state.inst.p() + 1 })?;
    candidates
        .into_iter()
        .nth(pick)
        .ok_or_else(|| invalid(format!("selection policy returned out-of-range index {pick}")))
}

fn check_next(state: &EvolutionState, target_new: &HopMultiset) -> Result<ProblemInstance> {
    let next = state.inst.next();
    if target_new.p() != next.p() {
        return Err(Error::ModulusMismatch { expected: next.p(), found: target_new.p() });
    }
    Ok(next)
}

/// Hop multiset (dense, under `p + 1`) of the old path with the new vertex
/// inserted at each position `0..=p`, computed incrementally.
fn insertion_profiles(state: &EvolutionState) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
    let p_new = state.inst.p() + 1;
    let new_v = state.inst.p();
    let vs = state.path.vertices();
    let mut base = vec![0usize; p_new / 2 + 1];
    for w in vs.windows(2) {
        base[raw_cyclic_length(w[0], w[1], p_new)] += 1;
    }
    (0..=vs.len()).map(move |pos| {
        let mut counts = base.clone();
        if pos > 0 {
            counts[raw_cyclic_length(vs[pos - 1], new_v, p_new)] += 1;
        }
        if pos < vs.len() {
            counts[raw_cyclic_length(new_v, vs[pos], p_new)] += 1;
        }
        if pos > 0 && pos < vs.len() {
            counts[raw_cyclic_length(vs[pos - 1], vs[pos], p_new)] -= 1;
        }
        (pos, counts)
    })
}

fn inserted(path: &HamiltonianPath, pos: usize) -> HamiltonianPath {
    let mut vs = path.vertices().to_vec();
    vs.insert(pos, path.p());
    HamiltonianPath::new_unchecked(vs)
}

fn solved_by_insertion(state: &EvolutionState, pos: usize, rejected: u64, elapsed: Duration) -> SearchResult {
    let next = state.inst.next();
    let path = inserted(&state.path, pos);
    let hops = path.hop_sequence(&next).expect("inserted path has p + 1 vertices");
    SearchResult::solved(path.into_vertices(), hops, rejected, elapsed)
}

/// Tries the new vertex at every position of the old path and accepts the
/// first position whose full hop multiset under `p + 1` equals `target_new`.
/// `backtracks` counts rejected positions. Failure only means no single
/// insertion works.
pub fn reuse_insertion(state: &EvolutionState, target_new: &HopMultiset) -> Result<SearchResult> {
    check_next(state, target_new)?;
    let start = web_time::Instant::now();
    let mut rejected = 0;
    for (pos, counts) in insertion_profiles(state) {
        if counts == target_new.dense_counts() {
            return Ok(solved_by_insertion(state, pos, rejected, start.elapsed()));
        }
        rejected += 1;
    }
    Ok(SearchResult::failed(Termination::Exhausted, rejected, start.elapsed()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct InsertionCandidate {
    pub position: usize,
    /// L1 distance between the candidate's hop multiset and the target.
    pub deviation: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicOutcome {
    pub result: SearchResult,
    /// Best-scoring positions, at most `beam` of them, best first.
    pub ranked: Vec<InsertionCandidate>,
}

pub fn heuristic_insertion(
    state: &EvolutionState,
    target_new: &HopMultiset,
    beam: usize,
) -> Result<HeuristicOutcome> {
    check_next(state, target_new)?;
    if beam == 0 {
        return Err(invalid("beam must be at least 1"));
    }
    let start = web_time::Instant::now();
    let target = target_new.dense_counts();
    let mut scored: Vec<InsertionCandidate> = insertion_profiles(state)
        .map(|(position, counts)| InsertionCandidate {
            position,
            deviation: counts.iter().zip(target).map(|(a, b)| a.abs_diff(*b)).sum(),
        })
        .collect();
    scored.sort_by_key(|c| (c.deviation, c.position));
    let rejected = scored.iter().filter(|c| c.deviation > 0).count() as u64;
    scored.truncate(beam);

    let result = match scored.first() {
        Some(best) if best.deviation == 0 => {
            solved_by_insertion(state, best.position, rejected, start.elapsed())
        }
        _ => SearchResult::failed(Termination::Exhausted, rejected, start.elapsed()),
    };
    Ok(HeuristicOutcome { result, ranked: scored })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolveConfig {
    pub limits: SearchLimits,
    pub heuristic_in_scenario_i: bool,
    pub heuristic_in_scenario_ii: bool,
    pub beam: usize,
    /// Seed the solver fallback with the previous hop permutation.
    pub use_hint: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            limits: SearchLimits::UNLIMITED,
            heuristic_in_scenario_i: false,
            heuristic_in_scenario_ii: true,
            beam: 5,
            use_hint: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodAttempt {
    pub method: Method,
    pub success: bool,
    pub backtracks: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolutionStep {
    pub iteration: usize,
    pub scenario: Scenario,
    /// The last method attempted; on success, the one that succeeded.
    pub method_used: Method,
    pub p_new: usize,
    pub fp_new: FrequencyPartition,
    pub target_new: HopMultiset,
    pub result: SearchResult,
    pub attempts: Vec<MethodAttempt>,
    /// Top-ranked insertion positions, when the heuristic ran.
    pub ranked: Vec<InsertionCandidate>,
    pub timestamp: DateTime<Local>,
}

pub fn evolve_step(
    state: &EvolutionState,
    iteration: usize,
    scenario: Scenario,
    policy: &dyn SelectionPolicy,
    config: &EvolveConfig,
) -> Result<(EvolutionState, EvolutionStep)> {
    let target_new = evolve_target(state, scenario, policy)?;
    let next = state.inst.next();
    let mut attempts = Vec::new();
    let mut ranked = Vec::new();
    let record = |attempts: &mut Vec<MethodAttempt>, method, r: &SearchResult| {
        attempts.push(MethodAttempt { method, success: r.success, backtracks: r.backtracks, elapsed: r.elapsed });
    };

    let mut method = Method::ReuseInsertion;
    let mut result = reuse_insertion(state, &target_new)?;
    record(&mut attempts, method, &result);

    let heuristic = match scenario {
        Scenario::I => config.heuristic_in_scenario_i,
        Scenario::II => config.heuristic_in_scenario_ii,
    };
    if !result.success && heuristic {
        method = Method::Heuristic;
        let outcome = heuristic_insertion(state, &target_new, config.beam)?;
        result = outcome.result;
        ranked = outcome.ranked;
        record(&mut attempts, method, &result);
    }
    if !result.success {
        method = Method::Backtrack;
        let hint = config.use_hint.then(|| Hint::new(state.hop_sequence()));
        result = find_path(&target_new, &next, hint.as_ref(), &config.limits)?;
        record(&mut attempts, method, &result);
    }

    let step = EvolutionStep {
        iteration,
        scenario,
        method_used: method,
        p_new: next.p(),
        fp_new: fp_of_multiset(&target_new),
        target_new: target_new.clone(),
        result: result.clone(),
        attempts,
        ranked,
        timestamp: Local::now(),
    };
    let new_state = match result.path {
        Some(path) => EvolutionState::new(next, target_new, path)?,
        None => state.clone(),
    };
    Ok((new_state, step))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScenarioSchedule {
    /// Scenario II while a new length is admissible, otherwise Scenario I.
    #[default]
    Auto,
    Fixed(Scenario),
    /// II on odd iterations, I on even ones.
    Alternate,
}

impl ScenarioSchedule {
    pub fn scenario_for(&self, state: &EvolutionState, iteration: usize) -> Scenario {
        match *self {
            ScenarioSchedule::Fixed(s) => s,
            ScenarioSchedule::Alternate if iteration % 2 == 1 => Scenario::II,
            ScenarioSchedule::Alternate => Scenario::I,
            ScenarioSchedule::Auto => {
                if evolution_candidates(state, Scenario::II).is_empty() {
                    Scenario::I
                } else {
                    Scenario::II
                }
            }
        }
    }
}

/// Runs up to `iterations` steps, stopping after the first failed step.
/// Returns the last successful state and every step record.
pub fn evolve_chain(
    initial: &EvolutionState,
    iterations: usize,
    schedule: ScenarioSchedule,
    policy: &dyn SelectionPolicy,
    config: &EvolveConfig,
) -> Result<(EvolutionState, Vec<EvolutionStep>)> {
    let mut state = initial.clone();
    let mut steps = Vec::with_capacity(iterations);
    for iteration in 1..=iterations {
        let scenario = schedule.scenario_for(&state, iteration);
        let (next, step) = evolve_step(&state, iteration, scenario, policy, config)?;
        let ok = step.result.success;
        steps.push(step);
        if !ok {
            break;
        }
        state = next;
    }
    Ok((state, steps))
}

/// Starting profile for a chain at `p`: lengths `1..=K` with
/// `K = max(1, floor(p / 4))`, multiplicities spread as evenly as possible
/// over `p - 1` with the larger ones on the smaller lengths.
pub fn default_start_fp(inst: &ProblemInstance) -> FrequencyPartition {
    let n = inst.p() - 1;
    let k = (inst.p() / 4).clamp(1, inst.max_length());
    let (q, r) = (n / k, n % k);
    FrequencyPartition::new_unchecked((0..k).map(|i| q + usize::from(i < r)).collect())
}
