use bhr_core::solver::{oracle_find_path, ORACLE_DEFAULT_BOUND};
use bhr_core::{enumerate_multisets, find_path, HopMultiset, MultisetFilter, ProblemInstance, SearchLimits};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub checked: u64,
    pub realizable: u64,
    pub disagreements: Vec<HopMultiset>,
}

/// Compares the solver with the brute-force oracle on every unfiltered
/// multiset for each `p` in `min_p..=max_p`.
pub fn oracle_check(min_p: usize, max_p: usize) -> Result<OracleReport> {
    if max_p > ORACLE_DEFAULT_BOUND {
        return Err(HarnessError::Config(format!(
            "oracle-check supports p <= {ORACLE_DEFAULT_BOUND}, got {max_p}"
        )));
    }
    let mut report = OracleReport::default();
    for p in min_p.max(2)..=max_p {
        let inst = ProblemInstance::new(p)?;
        for target in enumerate_multisets(&inst, MultisetFilter::None) {
            let fast = find_path(&target, &inst, None, &SearchLimits::UNLIMITED)?;
            let slow = oracle_find_path(&target, &inst)?;
            report.checked += 1;
            if slow.success {
                report.realizable += 1;
            }
            if fast.success != slow.success {
                report.disagreements.push(target);
            }
        }
    }
    Ok(report)
}
