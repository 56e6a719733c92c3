use std::fmt;

use bhr_core::{
    divisor_condition, enumerate_coprime_multisets, enumerate_multisets, generate_fps, MultisetFilter,
    ProblemInstance,
};

use crate::error::{HarnessError, Result};
use crate::record::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountReport {
    pub p: usize,
    pub mode: Mode,
    pub total: u64,
    /// How many pass the divisor condition (all-multisets mode only).
    pub passing: Option<u64>,
}

impl fmt::Display for CountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} mode={} total={}", self.p, self.mode, self.total)?;
        if let Some(n) = self.passing {
            write!(f, " divisor_condition={n}")?;
        }
        Ok(())
    }
}

/// Enumeration counts without solving.
pub fn count(p: usize, mode: Mode) -> Result<CountReport> {
    let inst = ProblemInstance::new(p)?;
    let (total, passing) = match mode {
        Mode::Fp => (generate_fps(&inst).count() as u64, None),
        Mode::Coprime => (enumerate_coprime_multisets(&inst).count() as u64, None),
        Mode::AllMultisets => {
            let (mut total, mut passing) = (0u64, 0u64);
            for ms in enumerate_multisets(&inst, MultisetFilter::None) {
                total += 1;
                if divisor_condition(&ms, &inst)? {
                    passing += 1;
                }
            }
            (total, Some(passing))
        }
        Mode::Evolve => return Err(HarnessError::Config("count does not take mode evolve".into())),
    };
    Ok(CountReport { p, mode, total, passing })
}
