//! Batch orchestration around `bhr-core`: full verification runs with
//! checkpoint/resume, inductive evolution runs, enumeration counts and
//! solver-vs-oracle checks, each with a human log and JSONL records.

pub mod checkpoint;
pub mod count;
pub mod error;
pub mod evolve;
pub mod log;
pub mod oracle_check;
pub mod record;
pub mod verify;

pub use checkpoint::Checkpoint;
pub use count::{count, CountReport};
pub use error::{HarnessError, Result};
pub use evolve::{run_evolution, EvolutionConfig, EvolutionReport};
pub use log::emit_log_line;
pub use oracle_check::{oracle_check, OracleReport};
pub use record::{Mode, ResultLine, RunRecord};
pub use verify::{verify_all, Sinks, VerifyConfig, VerifySummary};
