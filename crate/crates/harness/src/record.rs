use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use bhr_core::{FrequencyPartition, HopMultiset, SearchResult, Termination};
use chrono::{DateTime, Local};
use serde::{Deserialize, Serialize};

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Fp,
    AllMultisets,
    Coprime,
    Evolve,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Fp => "fp",
            Mode::AllMultisets => "all-multisets",
            Mode::Coprime => "coprime",
            Mode::Evolve => "evolve",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fp" => Ok(Mode::Fp),
            "all-multisets" => Ok(Mode::AllMultisets),
            "coprime" => Ok(Mode::Coprime),
            "evolve" => Ok(Mode::Evolve),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// One solved (or unsolved) item of a batch run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub p: usize,
    pub mode: Mode,
    /// Position in the canonical enumeration order of `mode`.
    pub item_index: u64,
    pub fp: Option<FrequencyPartition>,
    pub target: HopMultiset,
    pub result: SearchResult,
    pub method_used: String,
    pub timestamp: DateTime<Local>,
}

/// Line format of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultLine {
    pub schema_version: u32,
    pub p: usize,
    pub mode: Mode,
    pub item_index: u64,
    pub fp: Option<Vec<usize>>,
    pub target: BTreeMap<usize, usize>,
    pub success: bool,
    pub backtracks: u64,
    pub elapsed_seconds: f64,
    pub method_used: String,
    pub terminated_by: Termination,
    pub path: Option<Vec<usize>>,
    pub timestamp: String,
}

impl RunRecord {
    pub fn to_line(&self) -> ResultLine {
        ResultLine {
            schema_version: RESULTS_SCHEMA_VERSION,
            p: self.p,
            mode: self.mode,
            item_index: self.item_index,
            fp: self.fp.as_ref().map(|f| f.parts().to_vec()),
            target: self.target.iter().collect(),
            success: self.result.success,
            backtracks: self.result.backtracks,
            elapsed_seconds: self.result.elapsed.as_secs_f64(),
            method_used: self.method_used.clone(),
            terminated_by: self.result.terminated_by,
            path: self.result.path.as_ref().map(|p| p.vertices().to_vec()),
            timestamp: self.timestamp.to_rfc3339(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_line()).expect("result lines always serialize")
    }
}
