//! Batch verification over one of the canonical item streams.
//!
//! Workers claim fixed-size index ranges from a shared counter and solve
//! them with private solver state. Each worker walks its own copy of the
//! stream forward, so positioning is a skip, never a rebuild. Records flow
//! back over a channel to the coordinator, which is the only writer: it
//! emits them in index order, keeps the summary and writes checkpoints.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::Duration;

use bhr_core::{
    enumerate_coprime_multisets, enumerate_multisets, find_path_with, fp_of_multiset, generate_fps,
    representative_multiset, validate_realization, FpStream, FrequencyPartition, Hint, HopMultiset,
    MultisetFilter, MultisetStream, ProblemInstance, SearchLimits, SearchOptions, Termination,
};
use chrono::Local;
use std::time::Instant;

use crate::checkpoint::Checkpoint;
use crate::error::{HarnessError, Result};
use crate::log::{emit_log_line, verify_footer, verify_header};
use crate::record::{Mode, RunRecord};


const CHUNK: u64 = 16;

/// Items of a verification mode in canonical order.
enum ItemStream {
    Fp { inst: ProblemInstance, fps: FpStream },
    Multisets(MultisetStream),
}

pub struct Item {
    pub fp: Option<FrequencyPartition>,
    pub target: HopMultiset,
}

impl ItemStream {
    fn new(inst: &ProblemInstance, mode: Mode) -> Result<Self> {
        Ok(match mode {
            Mode::Fp => ItemStream::Fp { inst: inst.clone(), fps: generate_fps(inst) },
            Mode::AllMultisets => {
                ItemStream::Multisets(enumerate_multisets(inst, MultisetFilter::DivisorCondition))
            }
            Mode::Coprime => ItemStream::Multisets(enumerate_coprime_multisets(inst)),
            Mode::Evolve => {
                return Err(HarnessError::Config("verify does not take mode evolve".into()))
            }
        })
    }

    /// Advances past `n` items without materializing fp representatives.
    fn skip(&mut self, n: u64) {
        for _ in 0..n {
            let more = match self {
                ItemStream::Fp { fps, .. } => fps.next().is_some(),
                ItemStream::Multisets(ms) => ms.next().is_some(),
            };
            if !more {
                break;
            }
        }
    }

    fn next_item(&mut self) -> Result<Option<Item>> {
        Ok(match self {
            ItemStream::Fp { inst, fps } => match fps.next() {
                Some(fp) => {
                    let target = representative_multiset(&fp, inst)?;
                    Some(Item { fp: Some(fp), target })
                }
                None => None,
            },
            ItemStream::Multisets(ms) => ms.next().map(|target| Item { fp: None, target }),
        })
    }
}

/// Number of items `verify` would run for `(p, mode)`.
pub fn item_count(inst: &ProblemInstance, mode: Mode) -> Result<u64> {
    let mut stream = ItemStream::new(inst, mode)?;
    let mut n = 0;
    loop {
        let more = match &mut stream {
            ItemStream::Fp { fps, .. } => fps.next().is_some(),
            ItemStream::Multisets(ms) => ms.next().is_some(),
        };
        if !more {
            return Ok(n);
        }
        n += 1;
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub p: usize,
    pub mode: Mode,
    pub limits: SearchLimits,
    pub jobs: usize,
    /// Seed each solve with the previous success. Only reproducible with one job.
    pub hints: bool,
    pub symmetry_reduction: bool,
    pub checkpoint_path: Option<PathBuf>,
    pub checkpoint_every: u64,
    /// Stop after this many items in this invocation (for staged runs).
    pub max_items: Option<u64>,
    /// Set from a signal handler to stop at the next item boundary.
    pub interrupt: Arc<AtomicBool>,
}

impl VerifyConfig {
    pub fn new(p: usize, mode: Mode) -> Self {
        Self {
            p,
            mode,
            limits: SearchLimits::UNLIMITED,
            jobs: 1,
            hints: true,
            symmetry_reduction: true,
            checkpoint_path: None,
            checkpoint_every: 1000,
            max_items: None,
            interrupt: Arc::new(AtomicBool::new(false)),
        }
    }
}

/// Output streams for a run.
pub struct Sinks<'a> {
    pub results: Option<&'a mut dyn Write>,
    pub log: &'a mut dyn Write,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub p: usize,
    pub mode: Mode,
    pub total: u64,
    pub solved: u64,
    pub exhausted: u64,
    pub limited: u64,
    pub max_backtracks: u64,
    pub total_backtracks: u64,
    pub wall_time: Duration,
    /// True if the run stopped before the end of the stream.
    pub incomplete: bool,
    pub checkpoint: Checkpoint,
}

impl VerifySummary {
    pub fn all_solved(&self) -> bool {
        !self.incomplete && self.solved == self.total
    }

    /// 0 all solved; 2 some item exhausted; 3 limit-terminated or unfinished items remain.
    pub fn exit_code(&self) -> i32 {
        if self.all_solved() {
            0
        } else if self.exhausted > 0 {
            2
        } else {
            3
        }
    }
}

fn unit(mode: Mode) -> &'static str {
    match mode {
        Mode::Fp => "FPs",
        _ => "multisets",
    }
}

struct Outcome {
    index: u64,
    record: RunRecord,
}

fn solve_item(
    inst: &ProblemInstance,
    mode: Mode,
    index: u64,
    item: Item,
    hint: Option<&Hint>,
    options: &SearchOptions,
) -> Result<RunRecord> {
    let result = find_path_with(&item.target, inst, hint, options)?;
    if result.success
        && !validate_realization(result.path.as_ref().expect("success has a path"), &item.target, inst)
    {
        return Err(HarnessError::Unsound { p: inst.p(), item_index: index });
    }
    Ok(RunRecord {
        p: inst.p(),
        mode,
        item_index: index,
        fp: Some(item.fp.unwrap_or_else(|| fp_of_multiset(&item.target))),
        target: item.target,
        result,
        method_used: "Backtrack".into(),
        timestamp: Local::now(),
    })
}

pub fn verify_all(config: &VerifyConfig, resume: Option<Checkpoint>, sinks: Sinks<'_>) -> Result<VerifySummary> {
    if config.jobs == 0 {
        return Err(HarnessError::Config("jobs must be at least 1".into()));
    }
    if config.mode == Mode::Evolve {
        return Err(HarnessError::Config("verify does not take mode evolve".into()));
    }
    let inst = ProblemInstance::new(config.p)?;
    let mut ckpt = match resume {
        Some(c) => {
            c.check_matches(config.p, config.mode)?;
            c
        }
        None => Checkpoint::fresh(config.p, config.mode),
    };
    let total = item_count(&inst, config.mode)?;
    let end = match config.max_items {
        Some(n) => total.min(ckpt.next_index + n),
        None => total,
    };
    let started = Instant::now();
    let options = SearchOptions { limits: config.limits, symmetry_reduction: config.symmetry_reduction };

    writeln!(sinks.log, "{}", verify_header(config.p, &Local::now(), total, unit(config.mode)))?;

    let mut writer = Writer { sinks, ckpt: &mut ckpt, config, error: None };
    if config.jobs == 1 {
        run_sequential(&inst, config, &options, end, &mut writer)?;
    } else {
        run_parallel(&inst, config, &options, end, &mut writer)?;
    }
    if let Some(e) = writer.error.take() {
        return Err(e);
    }
    let sinks = writer.sinks;

    if let Some(path) = &config.checkpoint_path {
        ckpt.save(path)?;
    }
    let incomplete = ckpt.next_index < total;
    writeln!(sinks.log, "{}", verify_footer(&Local::now(), ckpt.solved, total, unit(config.mode)))?;
    if let Some(out) = sinks.results {
        out.flush()?;
    }
    sinks.log.flush()?;

    Ok(VerifySummary {
        p: config.p,
        mode: config.mode,
        total,
        solved: ckpt.solved,
        exhausted: ckpt.exhausted,
        limited: ckpt.limited,
        max_backtracks: ckpt.max_backtracks,
        total_backtracks: ckpt.total_backtracks,
        wall_time: started.elapsed(),
        incomplete,
        checkpoint: ckpt,
    })
}

struct Writer<'a, 'b> {
    sinks: Sinks<'a>,
    ckpt: &'b mut Checkpoint,
    config: &'b VerifyConfig,
    error: Option<HarnessError>,
}

impl Writer<'_, '_> {
    /// Records must arrive in index order.
    fn write(&mut self, record: &RunRecord) -> Result<()> {
        debug_assert_eq!(record.item_index, self.ckpt.next_index);
        if let Some(out) = self.sinks.results.as_deref_mut() {
            writeln!(out, "{}", record.to_json())?;
        }
        writeln!(self.sinks.log, "{}", emit_log_line(record))?;
        if record.result.success {
            writeln!(self.sinks.log)?;
        }
        let r = &record.result;
        let c = &mut *self.ckpt;
        match r.terminated_by {
            Termination::Solved => {
                c.solved += 1;
                c.hint_seed = r.hop_permutation.clone();
            }
            Termination::Exhausted => c.exhausted += 1,
            _ => c.limited += 1,
        }
        c.max_backtracks = c.max_backtracks.max(r.backtracks);
        c.total_backtracks += r.backtracks;
        c.next_index += 1;
        if c.next_index.is_multiple_of(self.config.checkpoint_every) {
            if let Some(path) = &self.config.checkpoint_path {
                if let Some(out) = self.sinks.results.as_deref_mut() {
                    out.flush()?;
                }
                c.save(path)?;
            }
        }
        Ok(())
    }
}

fn run_sequential(
    inst: &ProblemInstance,
    config: &VerifyConfig,
    options: &SearchOptions,
    end: u64,
    writer: &mut Writer<'_, '_>,
) -> Result<()> {
    let mut stream = ItemStream::new(inst, config.mode)?;
    stream.skip(writer.ckpt.next_index);
    while writer.ckpt.next_index < end && !config.interrupt.load(Ordering::Relaxed) {
        let Some(item) = stream.next_item()? else { break };
        let hint = if config.hints { writer.ckpt.hint_seed.clone().map(Hint::new) } else { None };
        let record = solve_item(inst, config.mode, writer.ckpt.next_index, item, hint.as_ref(), options)?;
        writer.write(&record)?;
    }
    Ok(())
}

fn run_parallel(
    inst: &ProblemInstance,
    config: &VerifyConfig,
    options: &SearchOptions,
    end: u64,
    writer: &mut Writer<'_, '_>,
) -> Result<()> {
    let start = writer.ckpt.next_index;
    let next_chunk = AtomicU64::new(start);
    let failed = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<Result<Outcome>>();

    thread::scope(|scope| {
        for _ in 0..config.jobs {
            let tx = tx.clone();
            let (next_chunk, failed) = (&next_chunk, &failed);
            let seed = writer.ckpt.hint_seed.clone();
            scope.spawn(move || {
                let mut stream = match ItemStream::new(inst, config.mode) {
                    Ok(s) => s,
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        return;
                    }
                };
                let mut position = 0u64;
                let mut hint = seed.map(Hint::new);
                loop {
                    if failed.load(Ordering::Relaxed) || config.interrupt.load(Ordering::Relaxed) {
                        return;
                    }
                    let lo = next_chunk.fetch_add(CHUNK, Ordering::Relaxed);
                    if lo >= end {
                        return;
                    }
                    stream.skip(lo - position);
                    position = lo;
                    for index in lo..(lo + CHUNK).min(end) {
                        let item = match stream.next_item() {
                            Ok(Some(item)) => item,
                            Ok(None) => return,
                            Err(e) => {
                                let _ = tx.send(Err(e));
                                return;
                            }
                        };
                        position += 1;
                        let h = if config.hints { hint.as_ref() } else { None };
                        let out = solve_item(inst, config.mode, index, item, h, options);
                        if let Ok(rec) = &out {
                            if let Some(perm) = &rec.result.hop_permutation {
                                hint = Some(Hint::new(perm.clone()));
                            }
                        }
                        let done = out.is_err();
                        if tx.send(out.map(|record| Outcome { index, record })).is_err() || done {
                            return;
                        }
                    }
                }
            });
        }
        drop(tx);

        // Reorder into index order; stop writing at the first gap left by an interrupt.
        let mut pending: BTreeMap<u64, RunRecord> = BTreeMap::new();
        for msg in rx {
            match msg {
                Ok(Outcome { index, record }) => {
                    pending.insert(index, record);
                    while let Some(rec) = pending.remove(&writer.ckpt.next_index) {
                        if let Err(e) = writer.write(&rec) {
                            writer.error.get_or_insert(e);
                            failed.store(true, Ordering::Relaxed);
                        }
                    }
                }
                Err(e) => {
                    writer.error.get_or_insert(e);
                    failed.store(true, Ordering::Relaxed);
                }
            }
        }
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(config: &VerifyConfig, resume: Option<Checkpoint>) -> (VerifySummary, String, String) {
        let mut results = Vec::new();
        let mut log = Vec::new();
        let summary = verify_all(config, resume, Sinks { results: Some(&mut results), log: &mut log }).unwrap();
        (summary, String::from_utf8(results).unwrap(), String::from_utf8(log).unwrap())
    }

    fn strip_volatile(jsonl: &str) -> Vec<serde_json::Value> {
        jsonl
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("timestamp");
                v.as_object_mut().unwrap().remove("elapsed_seconds");
                v
            })
            .collect()
    }

    #[test]
    fn small_fp_run_solves_everything() {
        let (s, results, log) = run(&VerifyConfig::new(12, Mode::Fp), None);
        // p(11) = 56, minus 12 partitions with a part above 6
        assert_eq!(s.total, 44);
        assert_eq!(s.solved, 44);
        assert_eq!(s.exit_code(), 0);
        assert_eq!(results.lines().count(), 44);
        assert!(log.contains("Total FPs fixed: 44 / 44"));
        assert!(log.contains("Path found for FP=(11,) in 0.00s with 0 backtracks"));
    }

    #[test]
    fn jobs_one_is_deterministic() {
        let cfg = VerifyConfig::new(14, Mode::Fp);
        let (_, a, _) = run(&cfg, None);
        let (_, b, _) = run(&cfg, None);
        assert_eq!(strip_volatile(&a), strip_volatile(&b));
    }

    #[test]
    fn parallel_matches_sequential_without_hints() {
        let mut cfg = VerifyConfig::new(15, Mode::Fp);
        cfg.hints = false;
        let (s1, a, _) = run(&cfg, None);
        cfg.jobs = 4;
        let (s4, b, _) = run(&cfg, None);
        assert_eq!(strip_volatile(&a), strip_volatile(&b));
        assert_eq!(s1.solved, s4.solved);
        assert_eq!(s1.total_backtracks, s4.total_backtracks);
    }

    #[test]
    fn coprime_and_multiset_modes() {
        let (s, _, log) = run(&VerifyConfig::new(10, Mode::Coprime), None);
        // support {1, 3}, size 9: ten multisets
        assert_eq!((s.total, s.solved), (10, 10));
        assert!(log.contains("Total multisets fixed: 10 / 10"));
        let (s, _, _) = run(&VerifyConfig::new(8, Mode::AllMultisets), None);
        assert_eq!(s.solved, s.total);
    }

    #[test]
    fn limits_yield_exit_code_3() {
        let mut cfg = VerifyConfig::new(16, Mode::Fp);
        cfg.limits.max_backtracks = Some(1);
        let (s, _, log) = run(&cfg, None);
        assert!(s.limited > 0);
        assert_eq!(s.exhausted, 0);
        assert_eq!(s.exit_code(), 3);
        assert!(log.contains("FAILED FP="));
        assert!(log.contains("(backtrack-limit)"));
    }

    #[test]
    fn staged_resume_equals_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let ckpt_path = dir.path().join("ckpt.json");
        let mut cfg = VerifyConfig::new(16, Mode::Fp);
        let (full, full_results, _) = run(&cfg, None);

        cfg.checkpoint_path = Some(ckpt_path.clone());
        cfg.checkpoint_every = 7;
        cfg.max_items = Some(40);
        let (part, first, _) = run(&cfg, None);
        assert!(part.incomplete);
        assert_eq!(part.exit_code(), 3);
        let ckpt = Checkpoint::load(&ckpt_path).unwrap();
        assert_eq!(ckpt.next_index, 40);

        cfg.max_items = None;
        let (rest, second, _) = run(&cfg, Some(ckpt));
        assert!(!rest.incomplete);
        assert_eq!(rest.solved, full.solved);
        assert_eq!(rest.total_backtracks, full.total_backtracks);
        let joined = format!("{first}{second}");
        assert_eq!(strip_volatile(&joined), strip_volatile(&full_results));
    }

    #[test]
    fn interrupt_stops_at_item_boundary() {
        let cfg = VerifyConfig::new(16, Mode::Fp);
        cfg.interrupt.store(true, Ordering::Relaxed);
        let (s, results, _) = run(&cfg, None);
        assert!(s.incomplete);
        assert_eq!(s.checkpoint.next_index, 0);
        assert!(results.is_empty());
    }

    #[test]
    fn mismatched_checkpoint_rejected() {
        let cfg = VerifyConfig::new(16, Mode::Fp);
        let mut log = Vec::new();
        let err = verify_all(&cfg, Some(Checkpoint::fresh(15, Mode::Fp)), Sinks { results: None, log: &mut log });
        assert!(matches!(err, Err(HarnessError::Config(_))));
    }
}
