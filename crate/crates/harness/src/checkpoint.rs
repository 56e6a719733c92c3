use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::record::Mode;

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

/// Resumable progress of a `verify` run. Items `0..next_index` are done.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub p: usize,
    pub mode: Mode,
    /// Number of items completed, i.e. the index of the first item still to run.
    pub next_index: u64,
    /// Hop permutation of the last solved item; seeds the hint chain.
    pub hint_seed: Option<Vec<usize>>,
    pub solved: u64,
    pub exhausted: u64,
    pub limited: u64,
    pub max_backtracks: u64,
    pub total_backtracks: u64,
}

impl Checkpoint {
    pub fn fresh(p: usize, mode: Mode) -> Self {
        Self {
            format_version: CHECKPOINT_FORMAT_VERSION,
            p,
            mode,
            next_index: 0,
            hint_seed: None,
            solved: 0,
            exhausted: 0,
            limited: 0,
            max_backtracks: 0,
            total_backtracks: 0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)
            .map_err(|source| HarnessError::Checkpoint { path: path.to_owned(), source })?;
        if ckpt.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(HarnessError::Config(format!(
                "checkpoint {} has format version {}, expected {CHECKPOINT_FORMAT_VERSION}",
                path.display(),
                ckpt.format_version
            )));
        }
        Ok(ckpt)
    }

    /// Writes atomically: a sibling temp file is renamed over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string_pretty(self).expect("checkpoint always serializes");
        fs::write(&tmp, text).map_err(|e| HarnessError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
    }

    pub fn check_matches(&self, p: usize, mode: Mode) -> Result<()> {
        if self.p != p || self.mode != mode {
            return Err(HarnessError::Config(format!(
                "checkpoint is for p={} mode={}, run is p={p} mode={mode}",
                self.p, self.mode
            )));
        }
        Ok(())
    }

    pub fn completed(&self) -> u64 {
        self.solved + self.exhausted + self.limited
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ckpt.json");
        let mut c = Checkpoint::fresh(31, Mode::Fp);
        c.next_index = 1000;
        c.solved = 1000;
        c.hint_seed = Some(vec![1, 2, 3]);
        c.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), c);
        assert!(c.check_matches(31, Mode::Fp).is_ok());
        assert!(c.check_matches(26, Mode::Fp).is_err());
        assert!(c.check_matches(31, Mode::Coprime).is_err());
    }

    #[test]
    fn rejects_garbage_and_versions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(HarnessError::Checkpoint { .. })));
        let mut c = Checkpoint::fresh(5, Mode::Fp);
        c.format_version = 99;
        fs::write(&path, serde_json::to_string(&c).unwrap()).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(HarnessError::Config(_))));
    }
}
