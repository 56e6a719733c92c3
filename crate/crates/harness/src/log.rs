//! Human-readable run log.

use std::fmt::Write as _;
use std::time::Duration;

use bhr_core::inductive::EvolutionStep;
use bhr_core::{FrequencyPartition, HopMultiset};
use chrono::{DateTime, Local};

use crate::record::RunRecord;

pub fn clock(ts: &DateTime<Local>) -> String {
    ts.format("%H:%M:%S").to_string()
}

/// Seconds with two decimals, truncated toward zero: 0.034 s is "0.03".
pub fn seconds_2dp(d: Duration) -> String {
    let hundredths = d.as_millis() / 10;
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

pub fn list(items: &[usize]) -> String {
    let mut out = String::from("[");
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{x}").unwrap();
    }
    out.push(']');
    out
}

/// Multiset in Python `Counter` repr: most common first, ties by length.
pub fn counter(ms: &HopMultiset) -> String {
    let mut pairs: Vec<(usize, usize)> = ms.iter().collect();
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let body: Vec<String> = pairs.iter().map(|(l, c)| format!("{l}: {c}")).collect();
    format!("Counter({{{}}})", body.join(", "))
}

fn fp_text(record: &RunRecord) -> String {
    match &record.fp {
        Some(fp) => fp.to_string(),
        None => bhr_core::fp_of_multiset(&record.target).to_string(),
    }
}

/// Log entry for one item: the summary line, then on success the
/// `Permutation:` and `Path:` lines.
pub fn emit_log_line(record: &RunRecord) -> String {
    let r = &record.result;
    let ts = clock(&record.timestamp);
    match (&r.path, &r.hop_permutation) {
        (Some(path), Some(perm)) if r.success => format!(
            "[{ts}] Path found for FP={} in {}s with {} backtracks\nPermutation: {}\nPath: {}",
            fp_text(record),
            seconds_2dp(r.elapsed),
            r.backtracks,
            list(perm),
            list(path.vertices()),
        ),
        _ => format!(
            "[{ts}] FAILED FP={} after {} backtracks ({})",
            fp_text(record),
            r.backtracks,
            r.terminated_by.as_str()
        ),
    }
}

pub fn verify_header(p: usize, now: &DateTime<Local>, total: u64, unit: &str) -> String {
    format!(
        "=== BHR Conjecture Verification for p = {p} ===\n[{}] Starting search for p={p}, total {total} {unit}",
        clock(now)
    )
}

pub fn verify_footer(now: &DateTime<Local>, solved: u64, total: u64, unit: &str) -> String {
    format!("[{}] Total {unit} fixed: {solved} / {total}", clock(now))
}

pub fn start_block(p: usize, fp: &FrequencyPartition, backtracks: u64, elapsed: Duration) -> String {
    format!(
        "=== Inductive Construction from p = {p} ===\nStart: p={p} FP={fp} solved in {}s with {backtracks} backtracks",
        seconds_2dp(elapsed)
    )
}

/// One iteration block with the fields of an inductive run.
pub fn evolution_block(step: &EvolutionStep) -> String {
    let r = &step.result;
    let mut out = String::new();
    writeln!(out, "Iteration {}", step.iteration).unwrap();
    writeln!(out, "Timestamp: {}", clock(&step.timestamp)).unwrap();
    writeln!(out, "Scenario: {}", step.scenario).unwrap();
    writeln!(out, "Method used: {}", step.method_used).unwrap();
    writeln!(out, "p (vertices): {}", step.p_new).unwrap();
    writeln!(out, "Evolved FP: {}", counter(&step.target_new)).unwrap();
    if let Some(path) = &r.path {
        let inst = bhr_core::ProblemInstance::new(step.p_new).expect("p_new >= 3");
        let freq = bhr_core::path_hop_lengths(path, &inst).expect("path matches p_new");
        writeln!(out, "HP: {}", list(path.vertices())).unwrap();
        writeln!(out, "HP freq: {}", counter(&freq)).unwrap();
    }
    writeln!(out, "Backtracks: {}", r.backtracks).unwrap();
    writeln!(out, "Time: {} sec", seconds_2dp(r.elapsed)).unwrap();
    write!(out, "Result: {}", if r.success { "SUCCESS" } else { "FAILURE" }).unwrap();
    if !r.success {
        write!(out, " ({})", r.terminated_by.as_str()).unwrap();
        for c in &step.ranked {
            write!(out, "\n  candidate position {} deviation {}", c.position, c.deviation).unwrap();
        }
    }
    out
}

pub fn summary_table(steps: &[EvolutionStep]) -> String {
    let mut out = String::from("Summary Table of Inductive Runs\nIteration | p | Backtracks");
    for s in steps {
        write!(out, "\n{} | {} | {}", s.iteration, s.p_new, s.result.backtracks).unwrap();
    }
    out
}
