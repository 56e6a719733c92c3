use std::io::Write;

use bhr_core::inductive::{
    default_start_fp, evolve_chain, EvolutionState, EvolutionStep, EvolveConfig, ScenarioSchedule,
    SmallestAdmissible,
};
use bhr_core::{find_path, representative_multiset, FrequencyPartition, ProblemInstance, Termination};

use crate::error::{HarnessError, Result};
use crate::log::{evolution_block, start_block, summary_table};
use crate::record::{Mode, RunRecord};

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub start_p: usize,
    pub iterations: usize,
    /// Starting profile; defaults to [`default_start_fp`].
    pub start_fp: Option<FrequencyPartition>,
    pub schedule: ScenarioSchedule,
    pub evolve: EvolveConfig,
}

impl EvolutionConfig {
    pub fn new(start_p: usize, iterations: usize) -> Self {
        Self {
            start_p,
            iterations,
            start_fp: None,
            schedule: ScenarioSchedule::Auto,
            evolve: EvolveConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub start: EvolutionState,
    pub steps: Vec<EvolutionStep>,
    pub final_state: EvolutionState,
}

impl EvolutionReport {
    pub fn all_succeeded(&self, iterations: usize) -> bool {
        self.steps.len() == iterations && self.steps.iter().all(|s| s.result.success)
    }

    pub fn exit_code(&self, iterations: usize) -> i32 {
        if self.all_succeeded(iterations) {
            0
        } else if self.steps.last().is_some_and(|s| s.result.terminated_by.is_limit()) {
            3
        } else {
            2
        }
    }

    pub fn records(&self) -> impl Iterator<Item = RunRecord> + '_ {
        self.steps.iter().map(|s| RunRecord {
            p: s.p_new,
            mode: Mode::Evolve,
            item_index: s.iteration as u64,
            fp: Some(s.fp_new.clone()),
            target: s.target_new.clone(),
            result: s.result.clone(),
            method_used: s.method_used.to_string(),
            timestamp: s.timestamp,
        })
    }
}

/// Solves the starting profile at `start_p`, then grows it one vertex per
/// iteration, logging one block per iteration and a closing summary table.
pub fn run_evolution(config: &EvolutionConfig, log: &mut dyn Write) -> Result<EvolutionReport> {
    let inst = ProblemInstance::new(config.start_p)?;
    let fp = config.start_fp.clone().unwrap_or_else(|| default_start_fp(&inst));
    fp.validate_for(&inst)?;
    let target = representative_multiset(&fp, &inst)?;
    let solved = find_path(&target, &inst, None, &config.evolve.limits)?;
    let Some(path) = solved.path.clone() else {
        return Err(HarnessError::StartUnsolvable {
            p: inst.p(),
            reason: solved.terminated_by.as_str().to_string(),
        });
    };
    writeln!(log, "{}\n", start_block(inst.p(), &fp, solved.backtracks, solved.elapsed))?;
    let start = EvolutionState::new(inst, target, path)?;

    let (final_state, steps) =
        evolve_chain(&start, config.iterations, config.schedule, &SmallestAdmissible, &config.evolve)?;
    for step in &steps {
        writeln!(log, "{}\n", evolution_block(step))?;
    }
    writeln!(log, "{}", summary_table(&steps))?;
    if let Some(last) = steps.last().filter(|s| !s.result.success) {
        let why = match last.result.terminated_by {
            Termination::Exhausted => "no realization exists",
            _ => "search limit reached",
        };
        writeln!(log, "Stopped at iteration {} (p={}): {why}", last.iteration, last.p_new)?;
    }
    log.flush()?;
    Ok(EvolutionReport { start, steps, final_state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bhr_core::inductive::{Method, Scenario};
    use bhr_core::validate_realization;

    #[test]
    fn single_trivial_step() {
        let mut log = Vec::new();
        let report = run_evolution(&EvolutionConfig::new(4, 1), &mut log).unwrap();
        assert!(report.all_succeeded(1));
        assert_eq!(report.final_state.inst().p(), 5);
        let text = String::from_utf8(log).unwrap();
        assert!(text.contains("Iteration 1\n"));
        assert!(text.contains("p (vertices): 5\n"));
        assert!(text.contains("Result: SUCCESS"));
        assert!(text.contains("Summary Table of Inductive Runs\nIteration | p | Backtracks\n1 | 5 | "));
    }

    #[test]
    fn scenario_i_chain_from_four() {
        let mut cfg = EvolutionConfig::new(4, 6);
        cfg.schedule = ScenarioSchedule::Fixed(Scenario::I);
        let report = run_evolution(&cfg, &mut Vec::new()).unwrap();
        assert!(report.all_succeeded(6));
        assert!(report.steps.iter().all(|s| s.method_used == Method::ReuseInsertion));
        assert_eq!(report.final_state.inst().p(), 10);
        let f = &report.final_state;
        assert!(validate_realization(f.path(), f.target(), f.inst()));
    }

    #[test]
    fn records_carry_iteration_index() {
        let report = run_evolution(&EvolutionConfig::new(10, 3), &mut Vec::new()).unwrap();
        let records: Vec<_> = report.records().collect();
        assert_eq!(records.iter().map(|r| r.item_index).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(records.iter().all(|r| r.mode == Mode::Evolve));
    }

    #[test]
    fn bad_start_fp_is_config_error() {
        let mut cfg = EvolutionConfig::new(10, 1);
        cfg.start_fp = Some(FrequencyPartition::new(vec![5, 5]).unwrap());
        assert!(matches!(run_evolution(&cfg, &mut Vec::new()), Err(HarnessError::Core(_))));
    }

    #[test]
    fn unsolvable_start_is_fatal() {
        let mut cfg = EvolutionConfig::new(20, 1);
        cfg.start_fp = Some(FrequencyPartition::new(vec![10, 9]).unwrap());
        cfg.evolve.limits.max_backtracks = Some(1);
        match run_evolution(&cfg, &mut Vec::new()) {
            Err(e @ HarnessError::StartUnsolvable { .. }) => assert_eq!(e.exit_code(), 2),
            other => panic!("expected StartUnsolvable, got {other:?}"),
        }
    }
}
