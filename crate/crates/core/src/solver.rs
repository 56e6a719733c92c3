//! Depth-first realization of a hop multiset as a Hamiltonian path.
//!
//! The search walks from vertex 0, placing one hop per level. A hop of
//! length `h` from `u` goes to `u + h` or `u - h` (mod p). A move is pruned
//! when the destination is already visited or the length is used up.
//! Recursion is an explicit per-depth cursor stack, so large `p` cannot
//! overflow the call stack.

use std::time::Duration;

use web_time::Instant;

use crate::error::{invalid, Error, Result};
use crate::instance::ProblemInstance;
use crate::multiset::HopMultiset;
use crate::path::{validate_realization, HamiltonianPath};

/// Node expansions between wall-clock checks.
const TIME_CHECK_INTERVAL: u64 = 1 << 14;

/// Largest `p` the brute-force oracle accepts by default.
pub const ORACLE_DEFAULT_BOUND: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_backtracks: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl SearchLimits {
    pub const UNLIMITED: Self = Self { max_backtracks: None, time_limit: None };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub limits: SearchLimits,
    /// Restrict the first move to the `+` direction. Reflection
    /// `x -> -x mod p` maps any path from 0 onto one whose first move is `+`.
    pub symmetry_reduction: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { limits: SearchLimits::UNLIMITED, symmetry_reduction: true }
    }
}

impl From<SearchLimits> for SearchOptions {
    fn from(limits: SearchLimits) -> Self {
        Self { limits, ..Self::default() }
    }
}

/// A previously successful hop permutation, used to order moves: at depth
/// `i` the hint's `i`-th length is tried first.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Hint {
    pub hop_sequence: Vec<usize>,
}

impl Hint {
    pub fn new(hop_sequence: Vec<usize>) -> Self {
        Self { hop_sequence }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Solved,
    /// The whole search space was explored; no realization exists.
    Exhausted,
    BacktrackLimit,
    TimeLimit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Solved => "solved",
            Termination::Exhausted => "exhausted",
            Termination::BacktrackLimit => "backtrack-limit",
            Termination::TimeLimit => "time-limit",
        }
    }

    pub fn is_limit(self) -> bool {
        matches!(self, Termination::BacktrackLimit | Termination::TimeLimit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub success: bool,
    pub path: Option<HamiltonianPath>,
    pub hop_permutation: Option<Vec<usize>>,
    pub backtracks: u64,
    pub elapsed: Duration,
    pub terminated_by: Termination,
}

impl SearchResult {
    pub(crate) fn solved(path: Vec<usize>, hops: Vec<usize>, backtracks: u64, elapsed: Duration) -> Self {
        Self {
            success: true,
            path: Some(HamiltonianPath::new_unchecked(path)),
            hop_permutation: Some(hops),
            backtracks,
            elapsed,
            terminated_by: Termination::Solved,
        }
    }

    pub(crate) fn failed(terminated_by: Termination, backtracks: u64, elapsed: Duration) -> Self {
        Self { success: false, path: None, hop_permutation: None, backtracks, elapsed, terminated_by }
    }
}

fn check_target(target: &HopMultiset, inst: &ProblemInstance) -> Result<()> {
    if target.p() != inst.p() {
        return Err(Error::ModulusMismatch { expected: inst.p(), found: target.p() });
    }
    Ok(())
}

/// Searches for a path from vertex 0 realizing `target`.
pub fn find_path(
    target: &HopMultiset,
    inst: &ProblemInstance,
    hint: Option<&Hint>,
    limits: &SearchLimits,
) -> Result<SearchResult> {
    find_path_with(target, inst, hint, &SearchOptions::from(*limits))
}

pub fn find_path_with(
    target: &HopMultiset,
    inst: &ProblemInstance,
    hint: Option<&Hint>,
    options: &SearchOptions,
) -> Result<SearchResult> {
    check_target(target, inst)?;
    if let Some(h) = hint {
        if let Some(&bad) = h.hop_sequence.iter().find(|&&l| l == 0 || l > inst.max_length()) {
            return Err(invalid(format!("hint length {bad} outside 1..={}", inst.max_length())));
        }
    }
    let result = Search::new(target, inst, hint, options).run();
    debug_assert!(
        !result.success || validate_realization(result.path.as_ref().unwrap(), target, inst),
        "solver returned an invalid realization"
    );
    Ok(result)
}

struct Search<'a> {
    p: usize,
    m: usize,
    remaining: Vec<u32>,
    visited: Vec<bool>,
    path: Vec<usize>,
    hops: Vec<usize>,
    // next choice index to try at each depth; a choice encodes (order slot, direction)
    cursor: Vec<usize>,
    hint: Option<&'a [usize]>,
    options: &'a SearchOptions,
}

impl<'a> Search<'a> {
    fn new(
        target: &HopMultiset,
        inst: &ProblemInstance,
        hint: Option<&'a Hint>,
        options: &'a SearchOptions,
    ) -> Self {
        let p = inst.p();
        let mut visited = vec![false; p];
        visited[0] = true;
        let mut path = Vec::with_capacity(p);
        path.push(0);
        Self {
            p,
            m: inst.max_length(),
            remaining: target.dense_counts().iter().map(|&c| c as u32).collect(),
            visited,
            path,
            hops: Vec::with_capacity(p - 1),
            cursor: vec![0; p],
            hint: hint.map(|h| h.hop_sequence.as_slice()),
            options,
        }
    }

    /// Length in order slot `slot` at `depth`: the hinted length first, then
    /// the rest ascending.
    #[inline]
    fn length_at(&self, depth: usize, slot: usize) -> usize {
        match self.hint.and_then(|h| h.get(depth)) {
            Some(&h) => match slot {
                0 => h,
                s if s < h => s,
                s => s + 1,
            },
            None => slot + 1,
        }
    }

    fn run(mut self) -> SearchResult {
        let start = Instant::now();
        let limits = self.options.limits;
        let choices = 2 * self.m;
        let mut backtracks = 0u64;
        let mut expansions = 0u64;

        loop {
            let depth = self.hops.len();
            if depth == self.p - 1 {
                return SearchResult::solved(self.path, self.hops, backtracks, start.elapsed());
            }
            let u = self.path[depth];
            let mut c = self.cursor[depth];
            let mut step = None;
            while c < choices {
                let slot = c >> 1;
                let len = self.length_at(depth, slot);
                if self.remaining[len] == 0 {
                    c = (slot + 1) << 1;
                    continue;
                }
                let minus = c & 1 == 1;
                c += 1;
                if minus && (2 * len == self.p || (depth == 0 && self.options.symmetry_reduction)) {
                    continue;
                }
                let v = if minus { (u + self.p - len) % self.p } else { (u + len) % self.p };
                // Extension point: stronger feasibility pruning would go here.
                if !self.visited[v] {
                    step = Some((len, v));
                    break;
                }
            }
            self.cursor[depth] = c;

            match step {
                Some((len, v)) => {
                    self.remaining[len] -= 1;
                    self.visited[v] = true;
                    self.path.push(v);
                    self.hops.push(len);
                    self.cursor[depth + 1] = 0;
                    expansions += 1;
                    if expansions.is_multiple_of(TIME_CHECK_INTERVAL) {
                        if let Some(t) = limits.time_limit {
                            if start.elapsed() >= t {
                                return SearchResult::failed(
                                    Termination::TimeLimit,
                                    backtracks,
                                    start.elapsed(),
                                );
                            }
                        }
                    }
                }
                None => {
                    if depth == 0 {
                        return SearchResult::failed(Termination::Exhausted, backtracks, start.elapsed());
                    }
                    let v = self.path.pop().unwrap();
                    let len = self.hops.pop().unwrap();
                    self.visited[v] = false;
                    self.remaining[len] += 1;
                    backtracks += 1;
                    if limits.max_backtracks.is_some_and(|max| backtracks >= max) {
                        return SearchResult::failed(
                            Termination::BacktrackLimit,
                            backtracks,
                            start.elapsed(),
                        );
                    }
                }
            }
        }
    }
}

/// Brute-force decision procedure over vertex permutations starting at 0,
/// pruned only by prefix length counts. Independent of [`find_path`].
pub fn oracle_find_path(target: &HopMultiset, inst: &ProblemInstance) -> Result<SearchResult> {
    oracle_find_path_bounded(target, inst, ORACLE_DEFAULT_BOUND)
}

pub fn oracle_find_path_bounded(
    target: &HopMultiset,
    inst: &ProblemInstance,
    bound: usize,
) -> Result<SearchResult> {
    if inst.p() > bound {
        return Err(Error::OracleOutOfRange { p: inst.p(), bound });
    }
    check_target(target, inst)?;
    let start = Instant::now();
    let p = inst.p();
    let mut budget: Vec<i64> = target.dense_counts().iter().map(|&c| c as i64).collect();
    let mut unused: Vec<usize> = (1..p).collect();
    let mut prefix = vec![0];
    let mut rejected = 0u64;
    let found = oracle_extend(p, &mut prefix, &mut unused, &mut budget, &mut rejected);
    let elapsed = start.elapsed();
    Ok(if found {
        let hops = crate::path::hops_under(&prefix, p);
        SearchResult::solved(prefix, hops, rejected, elapsed)
    } else {
        SearchResult::failed(Termination::Exhausted, rejected, elapsed)
    })
}

fn oracle_extend(
    p: usize,
    prefix: &mut Vec<usize>,
    unused: &mut Vec<usize>,
    budget: &mut [i64],
    rejected: &mut u64,
) -> bool {
    if unused.is_empty() {
        return true;
    }
    let last = *prefix.last().unwrap();
    for i in 0..unused.len() {
        let v = unused[i];
        let diff = last.abs_diff(v);
        let len = diff.min(p - diff);
        if budget[len] == 0 {
            *rejected += 1;
            continue;
        }
        budget[len] -= 1;
        unused.swap_remove(i);
        prefix.push(v);
        if oracle_extend(p, prefix, unused, budget, rejected) {
            return true;
        }
        prefix.pop();
        unused.push(v);
        let n = unused.len();
        unused.swap(i, n - 1);
        budget[len] += 1;
    }
    false
}
